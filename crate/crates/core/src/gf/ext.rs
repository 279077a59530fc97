use alloc::vec;
use alloc::vec::Vec;

use once_cell::race::OnceBox;

use super::{Gf, GfError, Poly};

/// The canonical model of `F_{q^d}` together with a fixed embedding of `F_q`.
///
/// The generator of `F_q` is sent to the lex-smallest root of its modulus.
pub struct Extension {
    field: Gf,
    degree: u32,
    base_p: u64,
    base_n: u32,
    base_q: u64,
    theta_pows: Vec<u64>,
    orbits: OnceBox<Vec<u64>>,
    orbit_logs: OnceBox<Vec<u32>>,
}

impl Extension {
    pub(crate) fn build(base: &Gf, d: u32) -> Result<Extension, GfError> {
        let p = base.characteristic();
        let n = base.degree();
        let big = if d == 1 { base.clone() } else { Gf::new(p, n * d, None)? };
        let theta_pows = if d == 1 || n == 1 {
            let mut v = vec![1u64];
            if n > 1 {
                v.push(p);
                for _ in 2..n {
                    let last = *v.last().unwrap();
                    v.push(big.mul(last, p));
                }
            }
            v
        } else {
            let m = Poly::new(&big, base.modulus().to_vec());
            let theta = *m.roots().first().ok_or(GfError::ReducibleModulus)?;
            let mut v = vec![1u64];
            for _ in 1..n {
                let last = *v.last().unwrap();
                v.push(big.mul(last, theta));
            }
            v
        };
        Ok(Extension {
            field: big,
            degree: d,
            base_p: p,
            base_n: n,
            base_q: base.order(),
            theta_pows,
            orbits: OnceBox::new(),
            orbit_logs: OnceBox::new(),
        })
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn base_order(&self) -> u64 {
        self.base_q
    }

    /// Image of a base-field element.
    #[inline]
    pub fn embed(&self, a: u64) -> u64 {
        if self.base_n == 1 {
            return a;
        }
        let p = self.base_p;
        let mut x = a;
        let mut acc = 0u64;
        for &t in &self.theta_pows {
            let c = x % p;
            x /= p;
            if c != 0 {
                acc = self.field.add(acc, self.field.mul(c, t));
            }
        }
        acc
    }

    pub fn embed_poly(&self, f: &Poly) -> Poly {
        f.map_coeffs(&self.field, |a| self.embed(a))
    }

    /// Preimage of `y` under `embed`, if `y` lies in the base field.
    pub fn restrict(&self, y: u64) -> Option<u64> {
        let big = &self.field;
        if self.base_n == 1 {
            return (y < self.base_p).then_some(y);
        }
        // Solve sum c_i digits(theta^i) = digits(y) over F_p.
        let p = self.base_p;
        let rows = big.degree() as usize;
        let cols = self.base_n as usize;
        let mut m: Vec<Vec<u64>> = vec![vec![0; cols + 1]; rows];
        for (j, &t) in self.theta_pows.iter().enumerate() {
            for (i, d) in big.digits(t).into_iter().enumerate() {
                m[i][j] = d;
            }
        }
        for (i, d) in big.digits(y).into_iter().enumerate() {
            m[i][cols] = d;
        }
        let inv = |a: u64| -> u64 { pow_mod(a, p - 2, p) };
        let mut r = 0;
        let mut pivots = Vec::new();
        for c in 0..cols {
            let Some(k) = (r..rows).find(|&k| m[k][c] != 0) else { continue };
            m.swap(r, k);
            let iv = inv(m[r][c]);
            for x in m[r].iter_mut() {
                *x = *x * iv % p;
            }
            for k in 0..rows {
                if k != r && m[k][c] != 0 {
                    let f = m[k][c];
                    for j in 0..=cols {
                        m[k][j] = (m[k][j] + p * p - f * m[r][j] % p) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if m[r..].iter().any(|row| row[cols] != 0) {
            return None;
        }
        let mut coeffs = vec![0u64; cols];
        for (i, &c) in pivots.iter().enumerate() {
            coeffs[c] = m[i][cols];
        }
        let mut acc = 0u64;
        let mut w = 1u64;
        for c in coeffs {
            acc += c * w;
            w *= p;
        }
        Some(acc)
    }

    /// `x -> x^q` for the base field order `q`.
    pub fn frobenius(&self, x: u64) -> u64 {
        self.field.pow(x, self.base_q as u128)
    }

    /// Minimal polynomial over the base field of an element of this extension.
    pub fn min_poly(&self, base: &Gf, a: u64) -> Poly {
        let big = &self.field;
        let mut conj = vec![a];
        let mut y = self.frobenius(a);
        while y != a {
            conj.push(y);
            y = self.frobenius(y);
        }
        let mut f = Poly::one(big);
        for c in conj {
            f = f.mul(&Poly::new(big, vec![big.neg(c), 1]));
        }
        let coeffs = f
            .coeffs()
            .iter()
            .map(|&c| self.restrict(c).expect("conjugate product lies in the base field"))
            .collect();
        Poly::new(base, coeffs)
    }

    /// One element of exact degree `d` from every Frobenius orbit, ordered by
    /// discrete log (the smallest log in each orbit is the representative).
    pub fn orbit_reps(&self) -> Result<&[u64], GfError> {
        let v = self.orbits.get_or_try_init(|| {
            let big = &self.field;
            if !big.has_tables() {
                return Err(GfError::FieldTooLarge);
            }
            let order = big.order() - 1;
            let q = self.base_q % order.max(1);
            let mut seen = vec![0u64; (order as usize).div_ceil(64)];
            let mut out = Vec::new();
            if self.degree == 1 {
                out.push(0);
            }
            for k in 0..order {
                if seen[(k / 64) as usize] >> (k % 64) & 1 == 1 {
                    continue;
                }
                let mut j = k;
                let mut size = 0u32;
                loop {
                    seen[(j / 64) as usize] |= 1 << (j % 64);
                    size += 1;
                    j = ((j as u128 * q as u128) % order as u128) as u64;
                    if j == k {
                        break;
                    }
                }
                if size == self.degree {
                    out.push(big.exp(k).expect("tables present"));
                }
            }
            Ok(alloc::boxed::Box::new(out))
        })?;
        Ok(v.as_slice())
    }
}

impl Extension {
    /// Discrete logs of `orbit_reps`, `u32::MAX` for zero.
    pub fn orbit_rep_logs(&self) -> Result<&[u32], GfError> {
        let reps = self.orbit_reps()?;
        let v = self.orbit_logs.get_or_init(|| {
            alloc::boxed::Box::new(reps.iter().map(|&a| self.field.log(a).unwrap_or(u32::MAX)).collect())
        });
        Ok(v.as_slice())
    }
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * a as u128) % m as u128) as u64;
        }
        a = ((a as u128 * a as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}
