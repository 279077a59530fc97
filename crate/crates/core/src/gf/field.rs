use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use once_cell::race::OnceBox;

use super::ext::Extension;
use super::poly::Poly;
use super::GfError;

/// Fields with at most this many elements get exp/log/Zech tables.
pub const TABLE_LIMIT: u64 = 1 << 23;

/// Largest extension degree kept in the per-field cache.
pub const MAX_CACHED_EXTENSION: u32 = 32;

/// Handle to a finite field `F_q`, `q = p^n`.
///
/// Elements are raw indices `sum c_i p^i` where `c_i` are the coordinates in
/// the power basis of the modulus. The handle is cheap to clone.
#[derive(Clone)]
pub struct Gf {
    inner: Arc<Inner>,
}

struct Inner {
    p: u64,
    n: u32,
    q: u64,
    modulus: Vec<u64>,
    pow_p: Vec<u64>,
    tables: Option<Tables>,
    extensions: Vec<OnceBox<Extension>>,
    traces: OnceBox<crate::count::TraceTable>,
}

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

const NO_LOG: u32 = u32::MAX;

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Gf {}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.inner.p, self.inner.n)
    }
}

impl Gf {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Gf, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        Ok(Gf::build(p, 1, vec![0, 1]))
    }

    /// `F_{p^n}`, with the given modulus or the canonical one.
    ///
    /// The canonical modulus is the lexicographically smallest monic
    /// irreducible polynomial of degree `n`, coefficients read low to high.
    pub fn new(p: u64, n: u32, modulus: Option<&[u64]>) -> Result<Gf, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if n == 0 {
            return Err(GfError::DegreeMismatch { expected: 1, found: 0 });
        }
        checked_pow(p, n).ok_or(GfError::FieldTooLarge)?;
        let prime = Gf::prime(p)?;
        let modulus = match modulus {
            Some(m) => {
                let coeffs: Vec<u64> = m.iter().map(|&c| c % p).collect();
                let f = Poly::new(&prime, coeffs);
                if f.degree() != Some(n as usize) {
                    return Err(GfError::DegreeMismatch {
                        expected: n,
                        found: f.degree().unwrap_or(0) as u32,
                    });
                }
                if f.leading() != 1 {
                    return Err(GfError::NotMonic);
                }
                if !f.is_irreducible() {
                    return Err(GfError::ReducibleModulus);
                }
                f.coeffs().to_vec()
            }
            None => {
                if n == 1 {
                    return Ok(prime);
                }
                canonical_modulus(&prime, n)
            }
        };
        if n == 1 && modulus == [0, 1] {
            return Ok(prime);
        }
        Ok(Gf::build(p, n, modulus))
    }

    fn build(p: u64, n: u32, modulus: Vec<u64>) -> Gf {
        let q = checked_pow(p, n).expect("field size checked by caller");
        let mut pow_p = Vec::with_capacity(n as usize);
        let mut acc = 1u64;
        for _ in 0..n {
            pow_p.push(acc);
            acc = acc.wrapping_mul(p);
        }
        let mut extensions = Vec::new();
        extensions.resize_with(MAX_CACHED_EXTENSION as usize, OnceBox::new);
        let mut gf = Gf {
            inner: Arc::new(Inner {
                p,
                n,
                q,
                modulus,
                pow_p,
                tables: None,
                extensions,
                traces: OnceBox::new(),
            }),
        };
        if q <= TABLE_LIMIT && q > 2 {
            let tables = gf.build_tables();
            Arc::get_mut(&mut gf.inner).expect("fresh handle").tables = Some(tables);
        }
        gf
    }

    fn build_tables(&self) -> Tables {
        let q = self.inner.q;
        let order = q - 1;
        let factors = prime_factors(order);
        let n = self.inner.n as usize;
        let p = self.inner.p;
        let primitive = |g: u64| factors.iter().all(|&r| self.slow_pow(g, (order / r) as u128) != 1);
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![NO_LOG; q as usize];
        // g = t + c: multiplying is a shift, one reduction and a scaled add
        if let Some(c0) = (0..p).filter(|_| n > 1).find(|&c| primitive(p + c)) {
            let m = &self.inner.modulus;
            let mut cur = vec![0u64; n];
            cur[0] = 1;
            for k in 0..order as usize {
                let idx = self.from_digits_unchecked(&cur);
                exp[k] = idx as u32;
                log[idx as usize] = k as u32;
                let top = cur[n - 1];
                for i in (0..n).rev() {
                    let shifted = if i > 0 { cur[i - 1] } else { 0 };
                    cur[i] = (shifted + c0 * cur[i] + (p - m[i]) * top) % p;
                }
            }
            return Tables { zech: self.zech_table(&exp, &log), exp, log };
        }
        let g = (2..q).find(|&g| primitive(g)).unwrap_or(1);
        let gd = self.digits(g);
        let mut cur = vec![0u64; n];
        cur[0] = 1;
        let mut prod = vec![0u64; 2 * n];
        for k in 0..order as usize {
            let idx = self.from_digits_unchecked(&cur);
            exp[k] = idx as u32;
            log[idx as usize] = k as u32;
            // cur *= g
            for x in prod.iter_mut() {
                *x = 0;
            }
            for (i, &a) in cur.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in gd.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + a * b) % p;
                }
            }
            self.reduce_digits(&mut prod);
            cur.copy_from_slice(&prod[..n]);
        }
        Tables { zech: self.zech_table(&exp, &log), exp, log }
    }

    fn zech_table(&self, exp: &[u32], log: &[u32]) -> Vec<u32> {
        let p = self.inner.p;
        exp.iter()
            .map(|&x| {
                let x = x as u64;
                let d0 = x % p;
                let y = if d0 + 1 == p { x - d0 } else { x + 1 };
                log[y as usize]
            })
            .collect()
    }

    // Reduce a digit vector of length 2n modulo the monic modulus, in place.
    fn reduce_digits(&self, prod: &mut [u64]) {
        let n = self.inner.n as usize;
        let p = self.inner.p;
        let m = &self.inner.modulus;
        for i in (n..prod.len()).rev() {
            let c = prod[i] % p;
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..n {
                let sub = mulmod(c, m[j], p);
                prod[i - n + j] = (prod[i - n + j] + p - sub) % p;
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.n
    }

    pub fn order(&self) -> u64 {
        self.inner.q
    }

    /// Modulus coefficients over `F_p`, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.inner.tables.is_some()
    }

    pub(crate) fn trace_cache(&self) -> &OnceBox<crate::count::TraceTable> {
        &self.inner.traces
    }

    /// Cached canonical model of `F_{q^d}` with a fixed embedding of this field.
    pub fn extension(&self, d: u32) -> Result<&Extension, GfError> {
        if d == 0 || d > MAX_CACHED_EXTENSION {
            return Err(GfError::FieldTooLarge);
        }
        self.inner.extensions[(d - 1) as usize]
            .get_or_try_init(|| Extension::build(self, d).map(alloc::boxed::Box::new))
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        1
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, c: i64) -> u64 {
        c.rem_euclid(self.inner.p as i64) as u64
    }

    pub fn digits(&self, a: u64) -> Vec<u64> {
        let p = self.inner.p;
        let mut out = Vec::with_capacity(self.inner.n as usize);
        let mut x = a;
        for _ in 0..self.inner.n {
            out.push(x % p);
            x /= p;
        }
        out
    }

    fn from_digits_unchecked(&self, d: &[u64]) -> u64 {
        d.iter().zip(&self.inner.pow_p).map(|(c, w)| c * w).sum()
    }

    /// Element with the given power-basis coordinates (reduced mod p).
    pub fn from_digits(&self, d: &[u64]) -> Result<u64, GfError> {
        if d.len() > self.inner.n as usize {
            return Err(GfError::DegreeMismatch { expected: self.inner.n, found: d.len() as u32 });
        }
        let p = self.inner.p;
        Ok(d.iter().zip(&self.inner.pow_p).map(|(c, w)| (c % p) * w).sum())
    }

    /// Compare by coordinate vectors read low to high.
    pub fn lex_cmp(&self, a: u64, b: u64) -> Ordering {
        let p = self.inner.p;
        let (mut x, mut y) = (a, b);
        for _ in 0..self.inner.n {
            let o = (x % p).cmp(&(y % p));
            if o != Ordering::Equal {
                return o;
            }
            x /= p;
            y /= p;
        }
        Ordering::Equal
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let inner = &*self.inner;
        if inner.n == 1 {
            let s = a + b;
            return if s >= inner.p { s - inner.p } else { s };
        }
        if let Some(t) = &inner.tables {
            if a == 0 {
                return b;
            }
            if b == 0 {
                return a;
            }
            let order = (inner.q - 1) as u32;
            let la = t.log[a as usize];
            let lb = t.log[b as usize];
            let d = if lb >= la { lb - la } else { lb + order - la };
            let z = t.zech[d as usize];
            if z == NO_LOG {
                return 0;
            }
            let s = la + z;
            let s = if s >= order { s - order } else { s };
            return t.exp[s as usize] as u64;
        }
        let p = inner.p;
        let (mut x, mut y) = (a, b);
        let mut out = 0;
        for w in &inner.pow_p {
            out += ((x % p + y % p) % p) * w;
            x /= p;
            y /= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        let inner = &*self.inner;
        let p = inner.p;
        if inner.n == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        let mut x = a;
        let mut out = 0;
        for w in &inner.pow_p {
            out += ((p - x % p) % p) * w;
            x /= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let inner = &*self.inner;
        if let Some(t) = &inner.tables {
            let order = (inner.q - 1) as u32;
            let s = t.log[a as usize] + t.log[b as usize];
            let s = if s >= order { s - order } else { s };
            return t.exp[s as usize] as u64;
        }
        self.slow_mul(a, b)
    }

    fn slow_mul(&self, a: u64, b: u64) -> u64 {
        let inner = &*self.inner;
        let p = inner.p;
        if inner.n == 1 {
            return mulmod(a, b, p);
        }
        let n = inner.n as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * n];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulmod(x, y, p)) % p;
            }
        }
        self.reduce_digits(&mut prod);
        self.from_digits_unchecked(&prod[..n])
    }

    fn slow_pow(&self, a: u64, mut e: u128) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Square and multiply.
    pub fn pow(&self, a: u64, e: u128) -> u64 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.inner.tables {
            let order = (self.inner.q - 1) as u128;
            let k = (t.log[a as usize] as u128 * (e % order)) % order;
            return t.exp[k as usize] as u64;
        }
        self.slow_pow(a, e)
    }

    /// Multiplicative inverse; panics on zero (use `try_inv` at API boundaries).
    pub fn inv(&self, a: u64) -> u64 {
        self.try_inv(a).expect("inverse of zero")
    }

    pub fn try_inv(&self, a: u64) -> Result<u64, GfError> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        let inner = &*self.inner;
        if let Some(t) = &inner.tables {
            let order = (inner.q - 1) as u32;
            let l = t.log[a as usize];
            return Ok(t.exp[((order - l) % order) as usize] as u64);
        }
        Ok(self.slow_pow(a, (inner.q - 2) as u128))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64, GfError> {
        Ok(self.mul(a, self.try_inv(b)?))
    }

    /// Discrete log to the table generator, if tables exist.
    #[inline]
    pub fn log(&self, a: u64) -> Option<u32> {
        let t = self.inner.tables.as_ref()?;
        let l = t.log[a as usize];
        (l != NO_LOG).then_some(l)
    }

    /// Addition on discrete logs, `None` standing for zero. Needs tables.
    #[inline]
    pub fn log_add(&self, a: Option<u32>, b: Option<u32>) -> Option<u32> {
        let (la, lb) = match (a, b) {
            (None, x) | (x, None) => return x,
            (Some(la), Some(lb)) => (la, lb),
        };
        let t = self.inner.tables.as_ref().expect("log_add needs tables");
        let order = (self.inner.q - 1) as u32;
        let d = if lb >= la { lb - la } else { lb + order - la };
        let z = t.zech[d as usize];
        if z == NO_LOG {
            return None;
        }
        let s = la + z;
        Some(if s >= order { s - order } else { s })
    }

    /// Power of the table generator.
    #[inline]
    pub fn exp(&self, k: u64) -> Option<u64> {
        let t = self.inner.tables.as_ref()?;
        Some(t.exp[(k % (self.inner.q - 1)) as usize] as u64)
    }

    /// Quadratic character: 0, 1 or -1. Odd characteristic only.
    #[inline]
    pub fn chi(&self, a: u64) -> i32 {
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.inner.tables {
            return if t.log[a as usize] & 1 == 0 { 1 } else { -1 };
        }
        if self.inner.p == 2 {
            return 1;
        }
        if self.slow_pow(a, ((self.inner.q - 1) / 2) as u128) == 1 {
            1
        } else {
            -1
        }
    }

    pub fn is_square(&self, a: u64) -> bool {
        self.chi(a) >= 0
    }

    /// Some square root, if one exists.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return Some(0);
        }
        if let Some(t) = &self.inner.tables {
            let l = t.log[a as usize];
            if self.inner.p == 2 {
                let order = self.inner.q - 1;
                let l = l as u64;
                // halve l modulo an odd order
                let h = if l.is_multiple_of(2) { l / 2 } else { (l + order) / 2 };
                return Some(t.exp[h as usize] as u64);
            }
            return (l & 1 == 0).then(|| t.exp[(l / 2) as usize] as u64);
        }
        if self.inner.p == 2 {
            return Some(self.slow_pow(a, (self.inner.q / 2) as u128));
        }
        if self.chi(a) < 0 {
            return None;
        }
        let poly = Poly::new(self, vec![self.neg(a), 0, 1]);
        poly.roots().into_iter().next()
    }

    /// Absolute Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.inner.p as u128)
    }

    /// Wrap a raw index as a checked element.
    pub fn element(&self, v: u64) -> Result<FieldElement, GfError> {
        if v >= self.inner.q {
            return Err(GfError::NotAnElement);
        }
        Ok(FieldElement { field: self.clone(), v })
    }

    /// Iterator over all elements (raw indices).
    pub fn elements(&self) -> core::ops::Range<u64> {
        0..self.inner.q
    }
}

pub(crate) fn checked_pow(p: u64, n: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..n {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

fn canonical_modulus(prime: &Gf, n: u32) -> Vec<u64> {
    let p = prime.order();
    let total = checked_pow(p, n).expect("checked by caller");
    // c_{n-1} varies fastest, c_0 slowest: lexicographic in (c_0, c_1, ...)
    // constant term is nonzero, so start at c_0 = 1
    for k in total / p..total {
        let mut coeffs = vec![0u64; n as usize + 1];
        let mut x = k;
        for i in (0..n as usize).rev() {
            coeffs[i] = x % p;
            x /= p;
        }
        coeffs[n as usize] = 1;
        let f = Poly::new(prime, coeffs.clone());
        if f.is_irreducible() {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// A field element bound to its field, with checked arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Gf,
    v: u64,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            write!(f, "{}", self.v)
        } else {
            write!(f, "{:?}", self.field.digits(self.v))
        }
    }
}

impl FieldElement {
    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn raw(&self) -> u64 {
        self.v
    }

    pub fn coordinates(&self) -> Vec<u64> {
        self.field.digits(self.v)
    }

    fn same(&self, other: &FieldElement) -> Result<(), GfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GfError::MixedFields)
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(other)?;
        Ok(FieldElement { field: self.field.clone(), v: self.field.add(self.v, other.v) })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(other)?;
        Ok(FieldElement { field: self.field.clone(), v: self.field.sub(self.v, other.v) })
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(other)?;
        Ok(FieldElement { field: self.field.clone(), v: self.field.mul(self.v, other.v) })
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { field: self.field.clone(), v: self.field.neg(self.v) }
    }

    pub fn inv(&self) -> Result<FieldElement, GfError> {
        Ok(FieldElement { field: self.field.clone(), v: self.field.try_inv(self.v)? })
    }

    pub fn pow(&self, e: u128) -> FieldElement {
        FieldElement { field: self.field.clone(), v: self.field.pow(self.v, e) }
    }
}
