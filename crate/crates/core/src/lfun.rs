//! L-polynomials of `E / F_q(t)` and of the attached elliptic surface.
//!
//! Everything is a polynomial in `T = q^{-s}`. `L(E,T)` is computed twice:
//! as an Euler product over closed points, and from fiberwise point counts
//! of the surface through the Lefschetz trace formula.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::count::{self, CountError};
use crate::funcfield::{FuncFieldError, Place};
use crate::gf::{Gf, GfError, Poly};
use crate::tate::{self, fiber_point_count, KodairaType, LocalData, ReductionClass, TateError};
use crate::wmodel::{integral_short_model, ModelError, WeierstrassCurve};

/// Number of extra coefficients checked beyond the expected degree.
pub const GUARD: usize = 4;

/// Residue fields up to this size are counted by enumeration in the
/// Lefschetz pipeline; larger ones use the trace table.
pub const EXHAUSTIVE_MAX: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LfunError {
    #[error("guard coefficient of T^{index} is nonzero")]
    PrecisionGuardFailed { index: usize },
    #[error("conductor degree {0} is below 4")]
    NegativeDegree(i64),
    #[error("L vanishes at the requested point")]
    VanishesAtPoint,
    #[error("U must omit at least one place")]
    UIsAllOfC,
    #[error("integer overflow")]
    Overflow,
    #[error("power sums are not those of an integral polynomial")]
    NotIntegral,
    #[error(transparent)]
    Tate(#[from] TateError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Field(#[from] GfError),
}

impl From<ModelError> for LfunError {
    fn from(e: ModelError) -> Self {
        LfunError::Tate(e.into())
    }
}

impl From<FuncFieldError> for LfunError {
    fn from(e: FuncFieldError) -> Self {
        LfunError::Tate(e.into())
    }
}

/// An integer polynomial with constant term 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPolynomial {
    pub coeffs: Vec<BigInt>,
    pub q: u64,
    pub weight: i32,
    pub label: String,
}

impl LPolynomial {
    pub fn new(coeffs: Vec<BigInt>, q: u64, weight: i32, label: &str) -> LPolynomial {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        LPolynomial { coeffs, q, weight, label: label.into() }
    }

    pub fn from_i128(c: &[i128], q: u64, weight: i32, label: &str) -> LPolynomial {
        LPolynomial::new(c.iter().map(|&x| BigInt::from(x)).collect(), q, weight, label)
    }

    pub fn one(q: u64, weight: i32, label: &str) -> LPolynomial {
        LPolynomial::new(vec![BigInt::one()], q, weight, label)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn relabel(mut self, weight: i32, label: &str) -> LPolynomial {
        self.weight = weight;
        self.label = label.into();
        self
    }

    pub fn mul(&self, o: &LPolynomial) -> LPolynomial {
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        LPolynomial::new(c, self.q, self.weight, &self.label)
    }

    /// Exact quotient, `None` if `o` does not divide `self` over `Z`.
    pub fn div_exact(&self, o: &LPolynomial) -> Option<LPolynomial> {
        let (q, r) = poly_divrem_int(&self.coeffs, &o.coeffs)?;
        r.iter().all(|c| c.is_zero()).then(|| LPolynomial::new(q, self.q, self.weight, &self.label))
    }

    /// Substitute `T -> c T`.
    pub fn scale_variable(&self, c: &BigInt) -> LPolynomial {
        let mut pw = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pw);
            pw *= c;
        }
        LPolynomial::new(out, self.q, self.weight, &self.label)
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc * t + BigRational::from_integer(a.clone());
        }
        acc
    }

    /// `T = q^{-s0}`.
    pub fn eval_at_s(&self, s0: i64) -> BigRational {
        self.eval(&q_power(self.q, -s0))
    }

    /// Power sums `sum alpha^n`, `n = 1..=m`, of the reciprocal roots.
    pub fn power_sums(&self, m: usize) -> Vec<BigInt> {
        // n c_n = -sum_{i=1}^{n} s_i c_{n-i}  =>  s_n = -n c_n - sum_{i<n} s_i c_{n-i}
        let mut s: Vec<BigInt> = Vec::with_capacity(m);
        for n in 1..=m {
            let mut v = -BigInt::from(n) * self.coeff(n);
            for i in 1..n {
                v -= &s[i - 1] * self.coeff(n - i);
            }
            s.push(v);
        }
        s
    }

    /// The polynomial with the given reciprocal-root power sums, truncated
    /// at `degree`.
    pub fn from_power_sums(s: &[BigInt], degree: usize, q: u64, weight: i32, label: &str) -> Result<LPolynomial, LfunError> {
        let mut c = vec![BigInt::one()];
        for n in 1..=degree.min(s.len()) {
            let mut acc = BigInt::zero();
            for i in 1..=n {
                acc += &s[i - 1] * &c[n - i];
            }
            let (quo, rem) = (-acc).div_rem(&BigInt::from(n));
            if !rem.is_zero() {
                return Err(LfunError::NotIntegral);
            }
            c.push(quo);
        }
        Ok(LPolynomial::new(c, q, weight, label))
    }

    pub fn coeffs_i128(&self) -> Option<Vec<i128>> {
        self.coeffs.iter().map(|c| c.to_i128()).collect()
    }
}

fn q_power(q: u64, e: i64) -> BigRational {
    let b = BigInt::from(q).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

fn poly_divrem_int(a: &[BigInt], b: &[BigInt]) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let mut b = b.to_vec();
    while b.len() > 1 && b.last().unwrap().is_zero() {
        b.pop();
    }
    let lead = b.last()?.clone();
    if lead.is_zero() {
        return None;
    }
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return Some((vec![BigInt::zero()], r));
    }
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let top = r[i + b.len() - 1].clone();
        if top.is_zero() {
            continue;
        }
        let (c, rem) = top.div_rem(&lead);
        if !rem.is_zero() {
            return None;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    Some((q, r))
}

/// `P_v` for one place, as a polynomial in `T` (the variable `T^{deg v}`
/// already substituted).
pub fn local_factor(data: &LocalData) -> LPolynomial {
    let d = data.degree() as usize;
    let mut c = vec![BigInt::zero(); d * (data.local_factor.len() - 1) + 1];
    for (i, &a) in data.local_factor.iter().enumerate() {
        c[i * d] = BigInt::from(a);
    }
    LPolynomial::new(c, data.q, 1, &format!("P_{}", data.place.label()))
}

/// Value at `T = q^{-s0}`.
pub fn special_value(l: &LPolynomial, s0: i64) -> Result<BigRational, LfunError> {
    let v = l.eval_at_s(s0);
    if v.is_zero() {
        return Err(LfunError::VanishesAtPoint);
    }
    Ok(v)
}

/// `L = (1 - q^{s0} T)^r g` with `g(q^{-s0}) != 0`; returns `(r, g(q^{-s0}))`.
pub fn leading_coefficient(l: &LPolynomial, s0: i64) -> (u32, BigRational) {
    let t0 = q_power(l.q, -s0);
    let mut g: Vec<BigRational> = l.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let mut r = 0u32;
    loop {
        let val = g.iter().rev().fold(BigRational::zero(), |acc, a| acc * &t0 + a);
        if !val.is_zero() || g.iter().all(|c| c.is_zero()) {
            return (r, val);
        }
        // divide by (1 - T/t0): synthetic division by the root t0, then rescale
        let n = g.len() - 1;
        let mut quo = vec![BigRational::zero(); n];
        let mut carry = BigRational::zero();
        for i in (1..=n).rev() {
            carry = &g[i] + carry * &t0;
            quo[i - 1] = carry.clone();
        }
        // g = (T - t0) * quo = (1 - T/t0) * (-t0 quo)
        let neg_t0 = -t0.clone();
        g = quo.into_iter().map(|c| c * &neg_t0).collect();
        r += 1;
    }
}

/// `prod (1 - (q^shift T)^{size * deg})` over the orbits.
pub fn perm_l(orbits: &[(usize, u32)], shift: i32, q: u64) -> LPolynomial {
    let mut out = LPolynomial::one(q, 2 * shift, "perm");
    for &(size, deg) in orbits {
        let k = size * deg as usize;
        let mut c = vec![BigInt::zero(); k + 1];
        c[0] = BigInt::one();
        let qk = if shift >= 0 {
            BigInt::from(q).pow((shift as u32) * k as u32)
        } else {
            // only integral shifts >= 0 give integer polynomials
            BigInt::one()
        };
        c[k] = -qk;
        out = out.mul(&LPolynomial::new(c, q, 2 * shift, "perm"));
    }
    out.relabel(2 * shift, &format!("perm_l(shift {})", shift))
}

/// `(orbit size, place degree)` for the components of the given fibers,
/// optionally skipping identity components.
pub fn component_orbits(data: &[&LocalData], skip_identity: bool) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for d in data {
        let orbits = if skip_identity { d.nonidentity_orbits() } else { d.component_orbits() };
        out.extend(orbits.into_iter().map(|s| (s, d.degree())));
    }
    out
}

/// Local data at every place where the integral short model degenerates,
/// plus infinity.
#[derive(Debug, Clone)]
pub struct SurfaceData {
    pub field: Gf,
    /// Integral short model `y^2 = x^3 + A x + B`.
    pub a: Poly,
    pub b: Poly,
    /// Finite places dividing the discriminant of the short model, some of
    /// which may have good reduction on the minimal model.
    pub exceptional: Vec<LocalData>,
    pub infinity: LocalData,
}

impl SurfaceData {
    pub fn new(e: &WeierstrassCurve) -> Result<SurfaceData, LfunError> {
        let field = e.field().clone();
        let (a, b) = integral_short_model(e)?;
        let disc = a.pow(3).scale(field.from_int(4)).add(&b.pow(2).scale(field.from_int(27)));
        let mut exceptional = Vec::new();
        for (pi, _) in disc.factor()? {
            exceptional.push(tate::tate_local(e, &Place::Finite(pi))?);
        }
        exceptional.sort_by(|x, y| x.place.cmp(&y.place));
        let infinity = tate::tate_local(e, &Place::Infinity)?;
        let sd = SurfaceData { field, a, b, exceptional, infinity };
        if sd.bad().is_empty() {
            return Err(LfunError::Tate(TateError::Model(ModelError::IsotrivialOrSmooth)));
        }
        Ok(sd)
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    /// Bad places, finite ones first.
    pub fn bad(&self) -> Vec<&LocalData> {
        self.exceptional
            .iter()
            .chain(core::iter::once(&self.infinity))
            .filter(|d| d.kodaira != KodairaType::I0)
            .collect()
    }

    pub fn local_data(&self, v: &Place) -> Option<&LocalData> {
        if v.is_infinity() {
            return Some(&self.infinity);
        }
        self.exceptional.iter().find(|d| &d.place == v)
    }

    pub fn conductor_degree(&self) -> u32 {
        self.bad().iter().map(|d| d.conductor_exponent * d.degree()).sum()
    }

    /// `deg L(E,T)`.
    pub fn expected_degree(&self) -> Result<usize, LfunError> {
        let n = self.conductor_degree() as i64 - 4;
        if n < 0 {
            return Err(LfunError::NegativeDegree(n + 4));
        }
        Ok(n as usize)
    }

    /// Visit every finite closed point of degree `d`: either a good place with
    /// the short-model coefficients (as discrete logs) at a chosen root, or an
    /// exceptional place. The root itself is passed as a log, `u32::MAX` for 0.
    fn scan<F>(&self, d: u32, mut visit: F) -> Result<(), LfunError>
    where
        F: FnMut(&Gf, u32, Fiber<'_>) -> Result<(), LfunError>,
    {
        let ext = self.field.extension(d)?;
        let big = ext.field();
        let logs = ext.orbit_rep_logs()?;
        let order = big.order() - 1;
        let coeff_logs = |f: &Poly| -> Vec<Option<u32>> { f.coeffs().iter().map(|&c| big.log(ext.embed(c))).collect() };
        let (ca, cb) = (coeff_logs(&self.a), coeff_logs(&self.b));
        let l4 = big.log(big.from_int(4));
        let l27 = big.log(big.from_int(27));
        let exc: Vec<(Vec<u64>, &LocalData)> = self
            .exceptional
            .iter()
            .filter(|x| x.degree() == d)
            .map(|x| (x.place.pi().unwrap().coeffs().iter().map(|&c| ext.embed(c)).collect(), x))
            .collect();
        let horner = |c: &[u64], x: u64| c.iter().rev().fold(0u64, |acc, &k| big.add(big.mul(acc, x), k));
        let add_log = |x: u32, y: u32| -> u32 {
            let s = x as u64 + y as u64;
            (if s >= order { s - order } else { s }) as u32
        };
        let scale = |l: Option<u32>, by: Option<u32>, times: u32| -> Option<u32> {
            let (l, by) = (l?, by?);
            let mut acc = by;
            for _ in 0..times {
                acc = add_log(acc, l);
            }
            Some(acc)
        };
        for &k in logs {
            let ka = if k == u32::MAX { None } else { Some(k) };
            let eval = |c: &[Option<u32>]| {
                c.iter().enumerate().fold(None, |acc, (i, &ci)| {
                    let term = if i == 0 { ci } else { scale(ka, ci, i as u32) };
                    big.log_add(acc, term)
                })
            };
            let (la, lb) = (eval(&ca), eval(&cb));
            let disc = big.log_add(scale(la, l4, 3), scale(lb, l27, 2));
            if disc.is_some() {
                visit(big, k, Fiber::Good { la, lb })?;
            } else {
                let alpha = ka.map_or(0, |k| big.exp(k as u64).expect("tables"));
                let (_, data) = exc
                    .iter()
                    .find(|(pi, _)| horner(pi, alpha) == 0)
                    .expect("a root of the discriminant lies on an exceptional place");
                visit(big, k, Fiber::Exceptional(data))?;
            }
        }
        Ok(())
    }
}

enum Fiber<'a> {
    Good { la: Option<u32>, lb: Option<u32> },
    Exceptional(&'a LocalData),
}

fn raw(big: &Gf, l: Option<u32>) -> u64 {
    l.map_or(0, |l| big.exp(l as u64).expect("tables"))
}

fn add_checked(x: &mut i128, y: i128) -> Result<(), LfunError> {
    *x = x.checked_add(y).ok_or(LfunError::Overflow)?;
    Ok(())
}

fn mul_checked(x: i128, y: i128) -> Result<i128, LfunError> {
    x.checked_mul(y).ok_or(LfunError::Overflow)
}

fn pow_checked(q: i128, k: u32) -> Result<i128, LfunError> {
    q.checked_pow(k).ok_or(LfunError::Overflow)
}

fn trace_power_checked(a: i128, q: i128, k: u32) -> Result<i128, LfunError> {
    let (mut s0, mut s1) = (2i128, a);
    if k == 0 {
        return Ok(2);
    }
    for _ in 1..k {
        let s2 = mul_checked(a, s1)?.checked_sub(mul_checked(q, s0)?).ok_or(LfunError::Overflow)?;
        s0 = s1;
        s1 = s2;
    }
    Ok(s1)
}

/// `sum alpha^m` of the reciprocal roots of a local factor in `U = T^deg`.
fn local_power_sum(data: &LocalData, m: u32) -> Result<i128, LfunError> {
    Ok(match data.reduction_class {
        ReductionClass::Good => trace_power_checked(data.trace as i128, data.residue_order() as i128, m)?,
        ReductionClass::SplitMultiplicative => 1,
        ReductionClass::NonsplitMultiplicative => {
            if m.is_multiple_of(2) {
                1
            } else {
                -1
            }
        }
        ReductionClass::Additive => 0,
    })
}

/// Coefficients `c_n`, `n = 1..=m`, of `log L(E,T) = sum c_n T^n / n` from
/// the Euler product.
pub fn euler_log_coefficients(sd: &SurfaceData, m: usize) -> Result<Vec<i128>, LfunError> {
    let mut c = vec![0i128; m + 1];
    for d in 1..=m as u32 {
        let kmax = m as u32 / d;
        sd.scan(d, |big, _, fiber| {
            match fiber {
                Fiber::Good { la, lb } => {
                    let tr = match count::TraceTable::get(big) {
                        Some(t) => t.trace_logs(big, la, lb),
                        None => count::short_trace(big, raw(big, la), raw(big, lb))?,
                    } as i128;
                    for k in 1..=kmax {
                        let s = trace_power_checked(tr, big.order() as i128, k)?;
                        add_checked(&mut c[(d * k) as usize], mul_checked(d as i128, s)?)?;
                    }
                }
                Fiber::Exceptional(data) => {
                    for k in 1..=kmax {
                        let s = local_power_sum(data, k)?;
                        add_checked(&mut c[(d * k) as usize], d as i128 * s)?;
                    }
                }
            }
            Ok(())
        })?;
    }
    for k in 1..=m as u32 {
        let s = local_power_sum(&sd.infinity, k)?;
        add_checked(&mut c[k as usize], s)?;
    }
    Ok(c[1..].to_vec())
}

/// Truncated `exp(sum c_n T^n / n)`.
fn exp_series(c: &[i128]) -> Result<Vec<i128>, LfunError> {
    let mut l = vec![1i128];
    for n in 1..=c.len() {
        let mut acc = 0i128;
        for i in 1..=n {
            add_checked(&mut acc, mul_checked(c[i - 1], l[n - i])?)?;
        }
        if acc % n as i128 != 0 {
            return Err(LfunError::NotIntegral);
        }
        l.push(acc / n as i128);
    }
    Ok(l)
}

/// `L(E,T)` together with its guard coefficients.
#[derive(Debug, Clone)]
pub struct EulerResult {
    pub l: LPolynomial,
    pub guard: Vec<i128>,
    pub conductor_degree: u32,
}

pub fn euler_product(sd: &SurfaceData) -> Result<EulerResult, LfunError> {
    let n = sd.expected_degree()?;
    let c = euler_log_coefficients(sd, n + GUARD)?;
    let series = exp_series(&c)?;
    let guard = series[n + 1..].to_vec();
    if let Some(i) = guard.iter().position(|&g| g != 0) {
        return Err(LfunError::PrecisionGuardFailed { index: n + 1 + i });
    }
    Ok(EulerResult {
        l: LPolynomial::from_i128(&series[..=n], sd.q(), 2, "L(E,T)"),
        guard,
        conductor_degree: sd.conductor_degree(),
    })
}

/// `L(E,T)` from the Euler product.
pub fn global_l(e: &WeierstrassCurve) -> Result<LPolynomial, LfunError> {
    Ok(euler_product(&SurfaceData::new(e)?)?.l)
}

/// `#fiber(F_{q^{n}})` summed over the closed points of `P^1` not in
/// `removed`, for `n = 1..=nmax`. Good residue fields up to
/// `EXHAUSTIVE_MAX` elements are counted point by point.
pub fn fiberwise_counts(sd: &SurfaceData, nmax: usize, removed: &[Place]) -> Result<Vec<i128>, LfunError> {
    let mut total = vec![0i128; nmax + 1];
    let skip_exc = |d: &LocalData| removed.contains(&d.place);
    // removed good places are located by root lookup
    let removed_finite: Vec<&Place> = removed.iter().filter(|v| !v.is_infinity()).collect();
    for d in 1..=nmax as u32 {
        let kmax = nmax as u32 / d;
        let ext = sd.field.extension(d)?;
        let removed_here: Vec<Vec<u64>> = removed_finite
            .iter()
            .filter(|v| v.degree() == d && sd.local_data(v).is_none())
            .map(|v| v.pi().unwrap().coeffs().iter().map(|&c| ext.embed(c)).collect())
            .collect();
        let big = ext.field().clone();
        let horner = |c: &[u64], x: u64| c.iter().rev().fold(0u64, |acc, &k| big.add(big.mul(acc, x), k));
        sd.scan(d, |big, k, fiber| {
            let alpha = raw(big, (k != u32::MAX).then_some(k));
            match fiber {
                Fiber::Good { la, lb } => {
                    let (a, b) = (raw(big, la), raw(big, lb));
                    if removed_here.iter().any(|pi| horner(pi, alpha) == 0) {
                        return Ok(());
                    }
                    let qd = big.order();
                    let n = if qd <= EXHAUSTIVE_MAX {
                        count::count_points(big, [0, 0, 0, a, b])? as i128
                    } else {
                        qd as i128 + 1 - count::short_trace(big, a, b)? as i128
                    };
                    let tr = qd as i128 + 1 - n;
                    for k in 1..=kmax {
                        let nk = pow_checked(qd as i128, k)? + 1 - trace_power_checked(tr, qd as i128, k)?;
                        add_checked(&mut total[(d * k) as usize], mul_checked(d as i128, nk)?)?;
                    }
                }
                Fiber::Exceptional(data) => {
                    if skip_exc(data) {
                        return Ok(());
                    }
                    for k in 1..=kmax {
                        add_checked(&mut total[(d * k) as usize], mul_checked(d as i128, fiber_point_count(data, k))?)?;
                    }
                }
            }
            Ok(())
        })?;
    }
    if !removed.contains(&Place::Infinity) {
        for k in 1..=nmax as u32 {
            add_checked(&mut total[k as usize], fiber_point_count(&sd.infinity, k))?;
        }
    }
    Ok(total[1..].to_vec())
}

/// Zeta factors of the proper surface and, optionally, of an open part.
#[derive(Debug, Clone)]
pub struct SurfaceZeta {
    pub h: [LPolynomial; 5],
    pub hc: Option<[LPolynomial; 5]>,
}

/// Alternating Frobenius trace `sum (-1)^i tr(F^n | H^i)` from the factors.
pub fn lefschetz_trace(h: &[LPolynomial; 5], n: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for (i, p) in h.iter().enumerate() {
        let s = p.power_sums(n).pop().unwrap_or_default();
        if i % 2 == 0 {
            acc += s;
        } else {
            acc -= s;
        }
    }
    acc
}

fn h_proper(q: u64, l: &LPolynomial, irr0: &[(usize, u32)]) -> [LPolynomial; 5] {
    let one_minus = |c: u64, w: i32, label: &str| LPolynomial::new(vec![BigInt::one(), -BigInt::from(c)], q, w, label);
    let h2 = one_minus(q, 2, "")
        .mul(&one_minus(q, 2, ""))
        .mul(l)
        .mul(&perm_l(irr0, 1, q))
        .relabel(2, "h2");
    [
        one_minus(1, 0, "h0"),
        LPolynomial::one(q, 1, "h1"),
        h2,
        LPolynomial::one(q, 3, "h3"),
        one_minus(q * q, 4, "h4"),
    ]
}

/// `h^i` of the minimal regular surface.
pub fn assemble_surface_zeta(e: &WeierstrassCurve) -> Result<SurfaceZeta, LfunError> {
    let sd = SurfaceData::new(e)?;
    let l = euler_product(&sd)?.l;
    Ok(surface_zeta_from(&sd, &l))
}

pub fn surface_zeta_from(sd: &SurfaceData, l: &LPolynomial) -> SurfaceZeta {
    let irr0 = component_orbits(&sd.bad(), true);
    SurfaceZeta { h: h_proper(sd.q(), l, &irr0), hc: None }
}

/// Local data for an arbitrary place, good or bad.
pub fn local_data_at(e: &WeierstrassCurve, sd: &SurfaceData, v: &Place) -> Result<LocalData, LfunError> {
    match sd.local_data(v) {
        Some(d) => Ok(d.clone()),
        None => Ok(tate::tate_local(e, v)?),
    }
}

/// Compact-support factors of `E_U`, `U = P^1 - removed`.
pub fn open_surface_l(e: &WeierstrassCurve, removed: &[Place]) -> Result<SurfaceZeta, LfunError> {
    let sd = SurfaceData::new(e)?;
    let l = euler_product(&sd)?.l;
    open_surface_from(e, &sd, &l, removed)
}

pub fn open_surface_from(e: &WeierstrassCurve, sd: &SurfaceData, l: &LPolynomial, removed: &[Place]) -> Result<SurfaceZeta, LfunError> {
    if removed.is_empty() {
        return Err(LfunError::UIsAllOfC);
    }
    let q = sd.q();
    let proper = surface_zeta_from(sd, l);
    let datas: Vec<LocalData> = removed.iter().map(|v| local_data_at(e, sd, v)).collect::<Result<_, _>>()?;
    let refs: Vec<&LocalData> = datas.iter().collect();
    let points: Vec<(usize, u32)> = removed.iter().map(|v| (1usize, v.degree())).collect();
    let one_minus_t = LPolynomial::new(vec![BigInt::one(), -BigInt::one()], q, 0, "");
    let one_minus_qt = LPolynomial::new(vec![BigInt::one(), -BigInt::from(q)], q, 2, "");
    let h1_eu = h1_of_removed(&refs, q);
    let irr = perm_l(&component_orbits(&refs, false), 1, q);
    let hc1 = perm_l(&points, 0, q).div_exact(&one_minus_t).expect("1 - T divides").relabel(1, "hc1");
    let num2 = proper.h[2].mul(&h1_eu).mul(&perm_l(&points, 1, q));
    let hc2 = num2.div_exact(&one_minus_qt.mul(&irr)).ok_or(LfunError::NotIntegral)?.relabel(2, "hc2");
    let hc3 = perm_l(&points, 1, q).div_exact(&one_minus_qt).expect("1 - qT divides").relabel(3, "hc3");
    let hc4 = LPolynomial::new(vec![BigInt::one(), -BigInt::from(q * q)], q, 4, "hc4");
    Ok(SurfaceZeta { h: proper.h, hc: Some([LPolynomial::one(q, 0, "hc0"), hc1, hc2, hc3, hc4]) })
}

/// `L(h^1(E^U), T)`: the product of the local factors at the removed places.
pub fn h1_of_removed(removed: &[&LocalData], q: u64) -> LPolynomial {
    removed
        .iter()
        .fold(LPolynomial::one(q, 1, ""), |acc, d| acc.mul(&local_factor(d)))
        .relabel(1, "h1(E^U)")
}

/// `L(E,T)` recovered from fiberwise point counts, `n = 1..=deg`.
pub fn l_from_lefschetz(sd: &SurfaceData, degree: usize) -> Result<LPolynomial, LfunError> {
    let q = sd.q();
    let counts = fiberwise_counts(sd, degree, &[])?;
    let irr0 = component_orbits(&sd.bad(), true);
    let perm = perm_l(&irr0, 1, q).power_sums(degree);
    let mut s = Vec::with_capacity(degree);
    for n in 1..=degree {
        let qn = BigInt::from(q).pow(n as u32);
        let rest = BigInt::one() + &qn * &qn + BigInt::from(2) * &qn + &perm[n - 1];
        s.push(BigInt::from(counts[n - 1]) - rest);
    }
    LPolynomial::from_power_sums(&s, degree, q, 2, "L(E,T) via Lefschetz")
}

/// Compare fiberwise counts with the trace formula for `n = 1..=nmax`;
/// returns `(count, trace)` pairs.
pub fn lefschetz_check(sd: &SurfaceData, z: &SurfaceZeta, nmax: usize, removed: &[Place]) -> Result<Vec<(BigInt, BigInt)>, LfunError> {
    let counts = fiberwise_counts(sd, nmax, removed)?;
    let h = if removed.is_empty() { &z.h } else { z.hc.as_ref().ok_or(LfunError::UIsAllOfC)? };
    Ok((1..=nmax).map(|n| (BigInt::from(counts[n - 1]), lefschetz_trace(h, n))).collect())
}

/// `epsilon` with `(qT)^N L(1/(q^2 T)) = epsilon L(T)`, or `None` if the
/// identity fails.
pub fn functional_equation_sign(l: &LPolynomial) -> Option<i32> {
    let n = l.degree();
    let q = BigInt::from(l.q);
    let qn = q.pow(n as u32);
    let lead = l.coeff(n);
    let eps = if lead == qn {
        1
    } else if lead == -qn.clone() {
        -1
    } else {
        return None;
    };
    for j in 0..=n {
        // l_{N-j} q^{2j} = eps l_j q^N
        let lhs = l.coeff(n - j) * q.pow(2 * j as u32);
        let rhs = l.coeff(j) * &qn * BigInt::from(eps);
        if lhs != rhs {
            return None;
        }
    }
    Some(eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    fn new(re: f64, im: f64) -> Complex {
        Complex { re, im }
    }
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn div(self, o: Complex) -> Complex {
        let d = o.re * o.re + o.im * o.im;
        Complex::new((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)
    }
    pub fn abs(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

/// Squarefree part over `Q` (primitive integer polynomial).
fn squarefree_part(c: &[BigInt]) -> Vec<BigInt> {
    let deriv: Vec<BigInt> = c.iter().enumerate().skip(1).map(|(i, a)| a * BigInt::from(i)).collect();
    if deriv.iter().all(|x| x.is_zero()) {
        return c.to_vec();
    }
    let g = rational_gcd(c, &deriv);
    if g.len() <= 1 {
        return c.to_vec();
    }
    let num: Vec<BigRational> = c.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let (q, _) = rat_divrem(&num, &g);
    primitive(&q)
}

fn primitive(c: &[BigRational]) -> Vec<BigInt> {
    let den = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

fn trim_rat(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
}

fn rat_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim_rat(&mut r);
    let mut b = b.to_vec();
    trim_rat(&mut b);
    if r.len() < b.len() {
        return (vec![BigRational::zero()], r);
    }
    let lead = b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = &r[i + b.len() - 1] / &lead;
        for (j, bj) in b.iter().enumerate() {
            let t = &c * bj;
            r[i + j] -= t;
        }
        q[i] = c;
    }
    r.truncate(b.len() - 1);
    if r.is_empty() {
        r.push(BigRational::zero());
    }
    trim_rat(&mut r);
    (q, r)
}

fn rational_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigRational> {
    let mut x: Vec<BigRational> = a.iter().map(|v| BigRational::from_integer(v.clone())).collect();
    let mut y: Vec<BigRational> = b.iter().map(|v| BigRational::from_integer(v.clone())).collect();
    trim_rat(&mut x);
    trim_rat(&mut y);
    while !(y.len() == 1 && y[0].is_zero()) {
        let (_, r) = rat_divrem(&x, &y);
        x = y;
        y = r;
    }
    x
}

/// Reciprocal roots of `L` (roots of `T^N L(1/T)`), by Durand–Kerner on the
/// squarefree part followed by Newton polishing.
pub fn reciprocal_roots(l: &LPolynomial) -> Vec<Complex> {
    let sf = squarefree_part(&l.coeffs);
    let n = sf.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    // reversed polynomial; rescale z = x / q^{w/2} so the roots sit near the unit circle
    let scale = libm::pow(l.q as f64, l.weight as f64 / 2.0);
    let lead = sf[0].to_f64().unwrap_or(1.0);
    let coeffs: Vec<f64> = (0..=n)
        .map(|k| {
            // coefficient of z^{n-k}: sf[k] / scale^k / sf[0]
            sf[k].to_f64().unwrap_or(0.0) / libm::pow(scale, k as f64) / lead
        })
        .collect();
    let eval = |z: Complex| -> (Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &c in &coeffs {
            dp = dp.mul(z).add(p);
            p = p.mul(z).add(Complex::new(c, 0.0));
        }
        (p, dp)
    };
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let th = 0.4 + 2.0 * core::f64::consts::PI * k as f64 / n as f64;
            Complex::new(0.9 * libm::cos(th), 0.9 * libm::sin(th))
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let (p, _) = eval(z[i]);
            let mut den = Complex::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den = den.mul(z[i].sub(z[j]));
                }
            }
            let step = p.div(den);
            z[i] = z[i].sub(step);
            delta = delta.max(step.abs());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.abs() > 0.0 {
                *zi = zi.sub(p.div(dp));
            }
        }
    }
    z.into_iter().map(|c| Complex::new(c.re * scale, c.im * scale)).collect()
}

/// Largest deviation `| |alpha| - q^{w/2} |` over the reciprocal roots.
pub fn root_magnitude_deviation(l: &LPolynomial) -> f64 {
    let target = libm::pow(l.q as f64, l.weight as f64 / 2.0);
    reciprocal_roots(l).iter().map(|z| libm::fabs(z.abs() - target)).fold(0.0, f64::max)
}

/// Order of vanishing at `T = 1` of `prod_{v removed} P_v(T^{deg v})`.
pub fn h1_vanishing_order(removed: &[&LocalData], q: u64) -> u32 {
    leading_coefficient(&h1_of_removed(removed, q), 0).0
}

/// Orbit sizes of the bad fibers' non-identity components (used by `perm_l`).
pub fn irr0_orbits(sd: &SurfaceData) -> Vec<(usize, u32)> {
    component_orbits(&sd.bad(), true)
}

/// Residue-field point count of a good fiber through the local factor at
/// `T^deg = 1`.
pub fn good_factor_at_one(data: &LocalData) -> Option<i128> {
    (data.reduction_class == ReductionClass::Good).then(|| data.local_factor.iter().sum())
}
