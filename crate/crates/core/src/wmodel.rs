//! Weierstrass models over `F_q(t)`: invariants, coordinate changes, local
//! minimality and the chart at infinity.

use alloc::vec::Vec;

use crate::funcfield::{places_dividing, valuation, FuncFieldError, Place, RationalFunction};
use crate::gf::{Gf, Poly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("discriminant vanishes identically")]
    SingularCurve,
    #[error("scaling factor u is zero")]
    ZeroScaling,
    #[error("characteristic {0} is not supported (need p >= 5)")]
    UnsupportedCharacteristic(u64),
    #[error("no place of bad reduction: the fibration is smooth")]
    IsotrivialOrSmooth,
    #[error(transparent)]
    FuncField(#[from] FuncFieldError),
}

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over `F_q(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassCurve {
    field: Gf,
    a: [RationalFunction; 5],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveInvariants {
    pub b2: RationalFunction,
    pub b4: RationalFunction,
    pub b6: RationalFunction,
    pub b8: RationalFunction,
    pub c4: RationalFunction,
    pub c6: RationalFunction,
    pub delta: RationalFunction,
    pub j: RationalFunction,
}

fn compute_invariants(a: &[RationalFunction; 5]) -> (CurveInvariants, bool) {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1.mul(a1).add(&a2.mul_int(4));
    let b4 = a4.mul_int(2).add(&a1.mul(a3));
    let b6 = a3.mul(a3).add(&a6.mul_int(4));
    let b8 = a1
        .mul(a1)
        .mul(a6)
        .add(&a2.mul(a6).mul_int(4))
        .sub(&a1.mul(a3).mul(a4))
        .add(&a2.mul(a3).mul(a3))
        .sub(&a4.mul(a4));
    let c4 = b2.mul(&b2).sub(&b4.mul_int(24));
    let c6 = b2.mul(&b2).mul(&b2).neg().add(&b2.mul(&b4).mul_int(36)).sub(&b6.mul_int(216));
    let delta = b2
        .mul(&b2)
        .mul(&b8)
        .neg()
        .sub(&b4.mul(&b4).mul(&b4).mul_int(8))
        .sub(&b6.mul(&b6).mul_int(27))
        .add(&b2.mul(&b4).mul(&b6).mul_int(9));
    let singular = delta.is_zero();
    let j = if singular {
        RationalFunction::zero(delta.field())
    } else {
        c4.mul(&c4).mul(&c4).div(&delta).expect("nonzero discriminant")
    };
    (CurveInvariants { b2, b4, b6, b8, c4, c6, delta, j }, singular)
}

impl WeierstrassCurve {
    /// Coefficients in the order `a1, a2, a3, a4, a6`.
    pub fn new(field: &Gf, a: [RationalFunction; 5]) -> Result<WeierstrassCurve, ModelError> {
        let (_, singular) = compute_invariants(&a);
        if singular {
            return Err(ModelError::SingularCurve);
        }
        Ok(WeierstrassCurve { field: field.clone(), a })
    }

    pub fn from_polys(field: &Gf, a: [Poly; 5]) -> Result<WeierstrassCurve, ModelError> {
        let [a1, a2, a3, a4, a6] = a;
        Self::new(field, [a1.into(), a2.into(), a3.into(), a4.into(), a6.into()])
    }

    /// `y^2 = x^3 + a4 x + a6`.
    pub fn short(a4: Poly, a6: Poly) -> Result<WeierstrassCurve, ModelError> {
        let field = a4.field().clone();
        let z = Poly::zero(&field);
        Self::from_polys(&field, [z.clone(), z.clone(), z, a4, a6])
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn coeffs(&self) -> &[RationalFunction; 5] {
        &self.a
    }

    pub fn a1(&self) -> &RationalFunction {
        &self.a[0]
    }
    pub fn a2(&self) -> &RationalFunction {
        &self.a[1]
    }
    pub fn a3(&self) -> &RationalFunction {
        &self.a[2]
    }
    pub fn a4(&self) -> &RationalFunction {
        &self.a[3]
    }
    pub fn a6(&self) -> &RationalFunction {
        &self.a[4]
    }

    /// All coefficients are polynomials in the coordinate.
    pub fn is_polynomial(&self) -> bool {
        self.a.iter().all(|c| c.is_poly())
    }

    pub fn is_short(&self) -> bool {
        self.a[0].is_zero() && self.a[1].is_zero() && self.a[2].is_zero()
    }

    pub fn invariants(&self) -> CurveInvariants {
        compute_invariants(&self.a).0
    }

    pub fn discriminant(&self) -> RationalFunction {
        self.invariants().delta
    }

    /// `j` is a nonconstant function.
    pub fn is_nonisotrivial(&self) -> bool {
        !self.invariants().j.is_constant()
    }

    /// See [`transform`].
    pub fn apply(&self, u: &RationalFunction, r: &RationalFunction, s: &RationalFunction, w: &RationalFunction) -> Result<WeierstrassCurve, ModelError> {
        transform(self, u, r, s, w)
    }
}

pub fn invariants(e: &WeierstrassCurve) -> Result<CurveInvariants, ModelError> {
    let (inv, singular) = compute_invariants(&e.a);
    if singular {
        return Err(ModelError::SingularCurve);
    }
    Ok(inv)
}

/// Substitution `x = u^2 x' + r`, `y = u^3 y' + u^2 s x' + w`.
pub fn transform(
    e: &WeierstrassCurve,
    u: &RationalFunction,
    r: &RationalFunction,
    s: &RationalFunction,
    w: &RationalFunction,
) -> Result<WeierstrassCurve, ModelError> {
    if u.is_zero() {
        return Err(ModelError::ZeroScaling);
    }
    let [a1, a2, a3, a4, a6] = &e.a;
    let ui = u.inv()?;
    let ui2 = ui.mul(&ui);
    let ui3 = ui2.mul(&ui);
    let ui4 = ui2.mul(&ui2);
    let ui6 = ui3.mul(&ui3);
    let n1 = a1.add(&s.mul_int(2));
    let n2 = a2.sub(&s.mul(a1)).add(&r.mul_int(3)).sub(&s.mul(s));
    let n3 = a3.add(&r.mul(a1)).add(&w.mul_int(2));
    let n4 = a4
        .sub(&s.mul(a3))
        .add(&r.mul(a2).mul_int(2))
        .sub(&w.add(&r.mul(s)).mul(a1))
        .add(&r.mul(r).mul_int(3))
        .sub(&s.mul(w).mul_int(2));
    let n6 = a6
        .add(&r.mul(a4))
        .add(&r.mul(r).mul(a2))
        .add(&r.mul(r).mul(r))
        .sub(&w.mul(a3))
        .sub(&w.mul(w))
        .sub(&r.mul(w).mul(a1));
    WeierstrassCurve::new(
        &e.field,
        [n1.mul(&ui), n2.mul(&ui2), n3.mul(&ui3), n4.mul(&ui4), n6.mul(&ui6)],
    )
}

/// Parameters of the inverse substitution.
pub fn inverse_parameters(
    u: &RationalFunction,
    r: &RationalFunction,
    s: &RationalFunction,
    w: &RationalFunction,
) -> Result<[RationalFunction; 4], ModelError> {
    let ui = u.inv()?;
    let ui2 = ui.mul(&ui);
    Ok([ui.clone(), r.mul(&ui2).neg(), s.mul(&ui).neg(), r.mul(s).sub(w).mul(&ui2.mul(&ui))])
}

fn require_p5(field: &Gf) -> Result<(), ModelError> {
    let p = field.characteristic();
    if p < 5 {
        return Err(ModelError::UnsupportedCharacteristic(p));
    }
    Ok(())
}

/// The short model `y^2 = x^3 - 27 c4 x - 54 c6`.
pub fn short_model(e: &WeierstrassCurve) -> Result<WeierstrassCurve, ModelError> {
    require_p5(&e.field)?;
    let inv = e.invariants();
    let f = &e.field;
    let z = RationalFunction::zero(f);
    WeierstrassCurve::new(f, [z.clone(), z.clone(), z, inv.c4.mul_int(-27), inv.c6.mul_int(-54)])
}

/// Short model with polynomial coefficients, isomorphic over `F_q(t)`.
pub fn integral_short_model(e: &WeierstrassCurve) -> Result<(Poly, Poly), ModelError> {
    let s = short_model(e)?;
    let (a, b) = (s.a4(), s.a6());
    let d = a.den().mul(b.den());
    let d = RationalFunction::from(d);
    let a = a.mul(&d.pow(4)?);
    let b = b.mul(&d.pow(6)?);
    Ok((a.as_poly().expect("cleared").clone(), b.as_poly().expect("cleared").clone()))
}

fn ord(x: &RationalFunction, v: &Place) -> i64 {
    valuation(x, v).unwrap_or(i64::MAX)
}

fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// A model integral and minimal at `v` together with `v(Delta_min)`.
///
/// For `v = Infinity` the result lives in the chart `s = 1/t` and is minimal
/// at `s = 0`.
pub fn minimal_model_at(e: &WeierstrassCurve, v: &Place) -> Result<(WeierstrassCurve, u32), ModelError> {
    require_p5(&e.field)?;
    if v.is_infinity() {
        let m = model_at_infinity(e);
        return minimal_model_at(&m, &Place::Finite(Poly::x(&e.field)));
    }
    let inv = e.invariants();
    let vd = ord(&inv.delta, v);
    let integral = e.a.iter().all(|c| ord(c, v) >= 0);
    if integral && (vd < 12 || ord(&inv.c4, v) < 4) {
        return Ok((e.clone(), vd as u32));
    }
    let s = short_model(e)?;
    let va = ord(s.a4(), v);
    let vb = ord(s.a6(), v);
    let k = match (va, vb) {
        (i64::MAX, b) => div_floor(b, 6),
        (a, i64::MAX) => div_floor(a, 4),
        (a, b) => div_floor(a, 4).min(div_floor(b, 6)),
    };
    let pi: RationalFunction = v.pi().expect("finite").clone().into();
    let u = pi.pow(k)?;
    let z = RationalFunction::zero(&e.field);
    let m = transform(&s, &u, &z, &z, &z)?;
    let vd = ord(&m.discriminant(), v);
    debug_assert!(vd >= 0 && (vd < 12 || ord(&m.invariants().c4, v) < 4));
    Ok((m, vd as u32))
}

/// Substitute `t = 1/s` and rescale by `u = s^d` so every coefficient is
/// integral at `s = 0`; `d` is the least such non-negative integer.
pub fn model_at_infinity(e: &WeierstrassCurve) -> WeierstrassCurve {
    let weights = [1i64, 2, 3, 4, 6];
    let mut d = 0i64;
    for (c, &i) in e.a.iter().zip(&weights) {
        if let Some(v) = valuation(c, &Place::Infinity) {
            // need i*d + v >= 0
            d = d.max((-v + i - 1).div_euclid(i).max(0));
        }
    }
    let s: RationalFunction = Poly::x(&e.field).into();
    let mut a = e.a.clone();
    for (c, &i) in a.iter_mut().zip(&weights) {
        *c = c.invert_variable().mul(&s.pow(i * d).expect("nonnegative power"));
    }
    WeierstrassCurve::new(&e.field, a).expect("isomorphic over k")
}

/// The twist exponent `d` used by `model_at_infinity`.
pub fn infinity_twist(e: &WeierstrassCurve) -> u32 {
    let weights = [1i64, 2, 3, 4, 6];
    let mut d = 0i64;
    for (c, &i) in e.a.iter().zip(&weights) {
        if let Some(v) = valuation(c, &Place::Infinity) {
            d = d.max((-v + i - 1).div_euclid(i).max(0));
        }
    }
    d as u32
}

/// Finite places worth examining: zeros of the discriminant and poles of
/// the coefficients.
pub fn candidate_places(e: &WeierstrassCurve) -> Vec<Place> {
    let delta = e.discriminant();
    let mut out = places_dividing(delta.num());
    out.extend(places_dividing(delta.den()));
    for c in &e.a {
        out.extend(places_dividing(c.den()));
    }
    out.sort();
    out.dedup();
    out
}

/// Places where the minimal model has bad reduction, sorted (infinity last).
pub fn bad_places(e: &WeierstrassCurve) -> Result<Vec<Place>, ModelError> {
    require_p5(&e.field)?;
    let mut out = Vec::new();
    for v in candidate_places(e) {
        if minimal_model_at(e, &v)?.1 > 0 {
            out.push(v);
        }
    }
    if minimal_model_at(e, &Place::Infinity)?.1 > 0 {
        out.push(Place::Infinity);
    }
    if out.is_empty() {
        return Err(ModelError::IsotrivialOrSmooth);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::valuation;

    fn f5() -> Gf {
        Gf::prime(5).unwrap()
    }

    pub(crate) fn legendre(f: &Gf) -> WeierstrassCurve {
        // y^2 = x(x-1)(x-t) = x^3 - (1+t) x^2 + t x
        let z = Poly::zero(f);
        WeierstrassCurve::from_polys(
            f,
            [z.clone(), Poly::from_ints(f, &[-1, -1]), z.clone(), Poly::x(f), z],
        )
        .unwrap()
    }

    #[test]
    fn legendre_invariants() {
        let f = f5();
        let e = legendre(&f);
        let inv = e.invariants();
        let t = Poly::x(&f);
        let t1 = Poly::from_ints(&f, &[-1, 1]);
        let expected_delta = t.pow(2).mul(&t1.pow(2)).scale(f.from_int(16));
        assert_eq!(inv.delta, expected_delta.clone().into());
        let num = Poly::from_ints(&f, &[1, -1, 1]).pow(3).scale(f.from_int(256));
        let j = RationalFunction::new(num, t.pow(2).mul(&t1.pow(2))).unwrap();
        assert_eq!(inv.j, j);
        // c4^3 - c6^2 = 1728 Delta
        let lhs = inv.c4.pow(3).unwrap().sub(&inv.c6.pow(2).unwrap());
        assert_eq!(lhs, inv.delta.mul_int(1728));
        // 4 b8 = b2 b6 - b4^2
        assert_eq!(inv.b8.mul_int(4), inv.b2.mul(&inv.b6).sub(&inv.b4.mul(&inv.b4)));
    }

    #[test]
    fn constant_and_j0_examples() {
        let f = f5();
        let e = WeierstrassCurve::short(Poly::one(&f), Poly::zero(&f)).unwrap();
        let inv = e.invariants();
        assert!(inv.c6.is_zero());
        assert_eq!(inv.j, RationalFunction::constant(&f, f.from_int(1728)));
        assert_eq!(bad_places(&e).unwrap_err(), ModelError::IsotrivialOrSmooth);
        let e = WeierstrassCurve::short(Poly::zero(&f), Poly::x(&f)).unwrap();
        let inv = e.invariants();
        assert_eq!(inv.delta, Poly::x(&f).pow(2).scale(f.from_int(-432)).into());
        assert!(inv.j.is_zero());
        assert_eq!(bad_places(&e).unwrap(), alloc::vec![Place::Finite(Poly::x(&f)), Place::Infinity]);
        assert!(WeierstrassCurve::short(Poly::zero(&f), Poly::zero(&f)).is_err());
    }

    #[test]
    fn transform_laws() {
        let f = f5();
        let e = legendre(&f);
        let one = RationalFunction::one(&f);
        let z = RationalFunction::zero(&f);
        assert_eq!(transform(&e, &one, &z, &z, &z).unwrap(), e);
        let t = RationalFunction::t(&f);
        let e2 = transform(&e, &t, &z, &z, &z).unwrap();
        assert_eq!(e2.discriminant(), e.discriminant().mul(&t.pow(-12).unwrap()));
        assert_eq!(e2.invariants().j, e.invariants().j);
        assert_eq!(transform(&e, &z, &z, &z, &z).unwrap_err(), ModelError::ZeroScaling);
    }

    #[test]
    fn legendre_local_minimality_and_bad_places() {
        let f = f5();
        let e = legendre(&f);
        let t = Poly::x(&f);
        let (m, vd) = minimal_model_at(&e, &Place::Finite(t.clone())).unwrap();
        assert_eq!(m, e);
        assert_eq!(vd, 2);
        let (_, vinf) = minimal_model_at(&e, &Place::Infinity).unwrap();
        assert_eq!(vinf, 8);
        let bad = bad_places(&e).unwrap();
        assert_eq!(
            bad,
            alloc::vec![Place::Finite(t), Place::Finite(Poly::from_ints(&f, &[-1, 1])), Place::Infinity]
        );
        let m = model_at_infinity(&e);
        assert!(m.is_polynomial());
    }

    #[test]
    fn rescaling_to_good_reduction() {
        let f = f5();
        // Delta = t^12 * unit, c4 = t^4 * unit
        let t = Poly::x(&f);
        let e = WeierstrassCurve::short(t.pow(4).scale(2), t.pow(6)).unwrap();
        let (m, vd) = minimal_model_at(&e, &Place::Finite(t.clone())).unwrap();
        assert_eq!(vd, 0);
        assert!(valuation(&m.discriminant(), &Place::Finite(t)).unwrap() == 0);
        // minimal_model_at is idempotent
        let p = Place::Finite(Poly::from_ints(&f, &[1, 1]));
        let (m1, v1) = minimal_model_at(&e, &p).unwrap();
        let (m2, v2) = minimal_model_at(&m1, &p).unwrap();
        assert_eq!((m1, v1), (m2, v2));
    }

    #[test]
    fn infinity_twist_examples() {
        let f = f5();
        let e = WeierstrassCurve::short(Poly::zero(&f), Poly::x(&f).pow(6).add(&Poly::x(&f))).unwrap();
        assert_eq!(infinity_twist(&e), 1);
        let c = WeierstrassCurve::short(Poly::one(&f), Poly::zero(&f)).unwrap();
        assert_eq!(infinity_twist(&c), 0);
        assert_eq!(model_at_infinity(&c), c);
    }

    #[test]
    fn small_characteristic_rejected() {
        let f = Gf::prime(3).unwrap();
        let e = WeierstrassCurve::short(Poly::x(&f), Poly::one(&f)).unwrap();
        assert_eq!(bad_places(&e).unwrap_err(), ModelError::UnsupportedCharacteristic(3));
    }
}
