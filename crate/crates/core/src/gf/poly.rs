use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::{Gf, GfError};

/// Univariate polynomial over a finite field, constant term first,
/// no trailing zeros. The zero polynomial has degree `None`.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Gf,
    c: Vec<u64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = if self.field.degree() == 1 {
                alloc::format!("{}", a)
            } else {
                alloc::format!("{:?}", self.field.digits(a))
            };
            match i {
                0 => write!(f, "{}", coef)?,
                1 if a == 1 => write!(f, "t")?,
                1 => write!(f, "{}*t", coef)?,
                _ if a == 1 => write!(f, "t^{}", i)?,
                _ => write!(f, "{}*t^{}", coef, i)?,
            }
        }
        Ok(())
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients low to high in the field's lex order.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.len().cmp(&other.c.len()).then_with(|| {
            for (a, b) in self.c.iter().zip(&other.c) {
                let o = self.field.lex_cmp(*a, *b);
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }
}

impl Poly {
    pub fn new(field: &Gf, mut c: Vec<u64>) -> Poly {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { field: field.clone(), c }
    }

    pub fn zero(field: &Gf) -> Poly {
        Poly { field: field.clone(), c: Vec::new() }
    }

    pub fn one(field: &Gf) -> Poly {
        Poly::constant(field, 1)
    }

    pub fn constant(field: &Gf, a: u64) -> Poly {
        Poly::new(field, vec![a])
    }

    /// The variable.
    pub fn x(field: &Gf) -> Poly {
        Poly::new(field, vec![0, 1])
    }

    pub fn monomial(field: &Gf, a: u64, k: usize) -> Poly {
        let mut c = vec![0; k + 1];
        c[k] = a;
        Poly::new(field, c)
    }

    /// Build from small integers reduced into the prime subfield.
    pub fn from_ints(field: &Gf, c: &[i64]) -> Poly {
        Poly::new(field, c.iter().map(|&x| field.from_int(x)).collect())
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to -1.
    pub fn deg(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn leading(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect();
        Poly::new(f, c)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect();
        Poly::new(f, c)
    }

    pub fn neg(&self) -> Poly {
        Poly { field: self.field.clone(), c: self.c.iter().map(|&a| self.field.neg(a)).collect() }
    }

    pub fn scale(&self, a: u64) -> Poly {
        let f = &self.field;
        Poly::new(f, self.c.iter().map(|&x| f.mul(x, a)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, c)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.c);
        Poly { field: self.field.clone(), c }
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly), GfError> {
        let f = &self.field;
        let dd = d.degree().ok_or(GfError::DivisionByZero)?;
        if self.c.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let inv_lead = f.inv(d.leading());
        let mut r = self.c.clone();
        let mut qc = vec![0u64; self.c.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = f.mul(r[i], inv_lead);
            if c == 0 {
                continue;
            }
            qc[i - dd] = c;
            for (j, &b) in d.c.iter().enumerate() {
                r[i - dd + j] = f.sub(r[i - dd + j], f.mul(c, b));
            }
        }
        r.truncate(dd);
        Ok((Poly::new(f, qc), Poly::new(f, r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly, GfError> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(d).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.field.inv(self.leading()))
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g` monic.
    pub fn ext_gcd(&self, o: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero divisor");
            r0 = r1;
            r1 = r;
            let s = s0.sub(&q.mul(&s1));
            s0 = s1;
            s1 = s;
            let t = t0.sub(&q.mul(&t1));
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let u = f.inv(r0.leading());
        (r0.scale(u), s0.scale(u), t0.scale(u))
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let c = self.c.iter().enumerate().skip(1).map(|(i, &a)| f.mul(a, f.from_int((i as u64 % f.characteristic()) as i64))).collect();
        Poly::new(f, c)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = &self.field;
        self.c.iter().rev().fold(0, |acc, &a| f.add(f.mul(acc, x), a))
    }

    /// `self(g)`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let f = &self.field;
        self.c.iter().rev().fold(Poly::zero(f), |acc, &a| acc.mul(g).add(&Poly::constant(f, a)))
    }

    /// Apply a map to every coefficient, landing in another field.
    pub fn map_coeffs(&self, target: &Gf, m: impl Fn(u64) -> u64) -> Poly {
        Poly::new(target, self.c.iter().map(|&a| m(a)).collect())
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &Poly) -> Poly {
        let mut base = self.rem(m).expect("nonzero modulus");
        let mut acc = Poly::one(&self.field).rem(m).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m).expect("nonzero modulus");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m).expect("nonzero modulus");
            }
        }
        acc
    }

    /// `x^(q^k) mod m`, by k successive q-th powers.
    pub(crate) fn frobenius_power_of_x(m: &Poly, k: usize) -> Poly {
        let q = m.field.order() as u128;
        let mut x = Poly::x(&m.field).rem(m).expect("nonzero modulus");
        for _ in 0..k {
            x = x.pow_mod(q, m);
        }
        x
    }

    /// Rabin's test.
    pub fn is_irreducible(&self) -> bool {
        let d = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(d) => d,
        };
        let m = self.monic();
        let x = Poly::x(&self.field);
        let q = self.field.order() as u128;
        // x^(q^i) for i = 0..=d
        let mut powers = Vec::with_capacity(d + 1);
        let mut cur = x.rem(&m).expect("nonzero");
        powers.push(cur.clone());
        for _ in 0..d {
            cur = cur.pow_mod(q, &m);
            powers.push(cur.clone());
        }
        if powers[d] != x {
            return false;
        }
        for r in super::field::prime_factors(d as u64) {
            let k = d / r as usize;
            let g = powers[k].sub(&x).gcd(&m);
            if !g.is_one() {
                return false;
            }
        }
        true
    }

    /// Distinct roots in the coefficient field, sorted in lex order.
    pub fn roots(&self) -> Vec<u64> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let f = &self.field;
        let mut out: Vec<u64> = if f.order() <= 64 {
            f.elements().filter(|&a| self.eval(a) == 0).collect()
        } else {
            let m = self.monic();
            let xq = Poly::frobenius_power_of_x(&m, 1);
            let g = xq.sub(&Poly::x(f)).gcd(&m);
            super::factor::equal_degree(&g, 1).into_iter().map(|l| f.neg(l.coeff(0))).collect()
        };
        out.sort_by(|a, b| f.lex_cmp(*a, *b));
        out
    }

    pub fn factor(&self) -> Result<Vec<(Poly, u32)>, GfError> {
        super::factor::factor(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Gf {
        Gf::prime(5).unwrap()
    }

    #[test]
    fn degree_of_products() {
        let f = f5();
        let a = Poly::from_ints(&f, &[1, 2, 3]);
        let b = Poly::from_ints(&f, &[4, 0, 0, 1]);
        assert_eq!(a.mul(&b).degree(), Some(5));
        assert_eq!(Poly::zero(&f).degree(), None);
        assert!(a.mul(&Poly::zero(&f)).is_zero());
    }

    #[test]
    fn division_identity() {
        let f = Gf::new(3, 2, None).unwrap();
        let a = Poly::new(&f, vec![1, 5, 7, 2, 8, 3]);
        let b = Poly::new(&f, vec![4, 0, 6]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.deg() < b.deg());
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
        assert_eq!(g, a.gcd(&b));
    }

    #[test]
    fn irreducible_quadratics_over_f5() {
        let f = f5();
        let mut count = 0;
        for c0 in 0..5 {
            for c1 in 0..5 {
                let p = Poly::from_ints(&f, &[c0, c1, 1]);
                let rootless = (0..5).all(|x| p.eval(x) != 0);
                assert_eq!(p.is_irreducible(), rootless);
                count += rootless as usize;
            }
        }
        assert_eq!(count, 10);
    }

    #[test]
    fn irreducibility_matches_divisor_search() {
        // degree <= 4 over q <= 9: irreducible iff no monic divisor of degree <= deg/2
        for (p, n) in [(2u64, 1u32), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2)] {
            let f = Gf::new(p, n, None).unwrap();
            let q = f.order();
            let monics = |d: usize| -> Vec<Poly> {
                let mut out = Vec::new();
                for k in 0..q.pow(d as u32) {
                    let mut c = Vec::new();
                    let mut x = k;
                    for _ in 0..d {
                        c.push(x % q);
                        x /= q;
                    }
                    c.push(1);
                    out.push(Poly::new(&f, c));
                }
                out
            };
            let small: Vec<Poly> = monics(1).into_iter().chain(monics(2)).collect();
            for d in 2..=4usize {
                if q.pow(d as u32) > 3000 {
                    continue;
                }
                for g in monics(d) {
                    let has_divisor = small
                        .iter()
                        .any(|h| 2 * h.degree().unwrap() <= d && g.rem(h).unwrap().is_zero());
                    assert_eq!(g.is_irreducible(), !has_divisor, "{:?} over {:?}", g, f);
                }
            }
        }
    }

    #[test]
    fn roots_of_t2_plus_1() {
        let f = f5();
        assert_eq!(Poly::from_ints(&f, &[1, 0, 1]).roots(), vec![2, 3]);
        let f49 = Gf::new(7, 2, None).unwrap();
        let p = Poly::new(&f49, vec![f49.from_int(1), 0, 1]);
        let r = p.roots();
        assert_eq!(r.len(), 2);
        for x in r {
            assert_eq!(p.eval(x), 0);
        }
        let big = Gf::new(5, 3, None).unwrap();
        let x = Poly::x(&big);
        let p = x.pow(3).sub(&Poly::one(&big));
        let r = p.roots();
        let brute: Vec<u64> = big.elements().filter(|&a| p.eval(a) == 0).collect();
        assert_eq!(r.len(), brute.len());
    }
}
