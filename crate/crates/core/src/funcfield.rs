//! Places, valuations and residue maps of the rational function field `F_q(t)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::gf::{Extension, FieldElement, Gf, GfError, Poly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FuncFieldError {
    #[error("function has a pole at the place")]
    PoleAtPlace,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error(transparent)]
    Field(#[from] GfError),
}

/// A closed point of the projective line over `F_q`.
#[derive(Clone, PartialEq, Eq)]
pub enum Place {
    /// A monic irreducible polynomial in `t`.
    Finite(Poly),
    Infinity,
}

impl Place {
    pub fn finite(pi: Poly) -> Place {
        Place::Finite(pi.monic())
    }

    pub fn degree(&self) -> u32 {
        match self {
            Place::Finite(pi) => pi.degree().unwrap_or(0) as u32,
            Place::Infinity => 1,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    pub fn pi(&self) -> Option<&Poly> {
        match self {
            Place::Finite(pi) => Some(pi),
            Place::Infinity => None,
        }
    }

    /// Number of elements of the residue field.
    pub fn residue_order(&self, q: u64) -> u64 {
        q.pow(self.degree())
    }

    /// Short text form: `t+2`, `t^2+t+2`, `inf`.
    pub fn label(&self) -> String {
        match self {
            Place::Infinity => String::from("inf"),
            Place::Finite(pi) => poly_label(pi),
        }
    }
}

/// Text form of a polynomial in `t`, highest degree first.
pub fn poly_label(f: &Poly) -> String {
    use core::fmt::Write;
    let field = f.field();
    let mut s = String::new();
    if f.is_zero() {
        return String::from("0");
    }
    let coef = |a: u64| -> String {
        if field.degree() == 1 {
            alloc::format!("{}", a)
        } else {
            let d: Vec<String> = field.digits(a).iter().map(|x| alloc::format!("{}", x)).collect();
            alloc::format!("[{}]", d.join(","))
        }
    };
    for (i, &a) in f.coeffs().iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        if !s.is_empty() {
            s.push('+');
        }
        match (i, a) {
            (0, _) => s.push_str(&coef(a)),
            (1, 1) => s.push('t'),
            (1, _) => {
                let _ = write!(s, "{}*t", coef(a));
            }
            (_, 1) => {
                let _ = write!(s, "t^{}", i);
            }
            _ => {
                let _ = write!(s, "{}*t^{}", coef(a), i);
            }
        }
    }
    s
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite places by (degree, lex); infinity after all finite places.
impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinity, Place::Infinity) => Ordering::Equal,
            (Place::Infinity, _) => Ordering::Greater,
            (_, Place::Infinity) => Ordering::Less,
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
        }
    }
}

/// All places of degree `d`, sorted.
pub fn places_of_degree(field: &Gf, d: u32) -> Vec<Place> {
    if d == 0 {
        return Vec::new();
    }
    let mut out: Vec<Place> = match field.extension(d).and_then(|e| e.orbit_reps().map(|r| (e, r))) {
        Ok((ext, reps)) => reps.iter().map(|&a| Place::Finite(ext.min_poly(field, a))).collect(),
        Err(_) => enumerate_irreducibles(field, d).into_iter().map(Place::Finite).collect(),
    };
    out.sort();
    if d == 1 {
        out.push(Place::Infinity);
    }
    out
}

fn enumerate_irreducibles(field: &Gf, d: u32) -> Vec<Poly> {
    let q = field.order();
    let total = q.checked_pow(d).expect("enumeration size");
    let mut out = Vec::new();
    for k in 0..total {
        let mut c = Vec::with_capacity(d as usize + 1);
        let mut x = k;
        for _ in 0..d {
            c.push(x % q);
            x /= q;
        }
        c.push(1);
        let f = Poly::new(field, c);
        if f.is_irreducible() {
            out.push(f);
        }
    }
    out
}

/// An element of `F_q(t)` in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        let one = Poly::one(p.field());
        RationalFunction { num: p, den: one }
    }
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<RationalFunction, FuncFieldError> {
        if den.is_zero() {
            return Err(FuncFieldError::ZeroDenominator);
        }
        let field = num.field().clone();
        if num.is_zero() {
            return Ok(RationalFunction { num, den: Poly::one(&field) });
        }
        let g = num.gcd(&den);
        let mut n = num.div_exact(&g).expect("gcd divides");
        let mut d = den.div_exact(&g).expect("gcd divides");
        let lead = d.leading();
        if lead != 1 {
            let inv = field.inv(lead);
            n = n.scale(inv);
            d = d.scale(inv);
        }
        Ok(RationalFunction { num: n, den: d })
    }

    pub fn zero(field: &Gf) -> Self {
        Poly::zero(field).into()
    }

    pub fn one(field: &Gf) -> Self {
        Poly::one(field).into()
    }

    pub fn constant(field: &Gf, a: u64) -> Self {
        Poly::constant(field, a).into()
    }

    pub fn t(field: &Gf) -> Self {
        Poly::x(field).into()
    }

    pub fn field(&self) -> &Gf {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone()).expect("nonzero");
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den)).expect("nonzero")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero")
    }

    pub fn scale(&self, a: u64) -> Self {
        Self::new(self.num.scale(a), self.den.clone()).expect("nonzero")
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.scale(self.field().from_int(k))
    }

    pub fn inv(&self) -> Result<Self, FuncFieldError> {
        if self.num.is_zero() {
            return Err(FuncFieldError::ZeroDenominator);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self, FuncFieldError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, FuncFieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RationalFunction { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// `x(1/s)` written in the variable `s`.
    pub fn invert_variable(&self) -> Self {
        let rev = |f: &Poly, d: usize| -> Poly {
            let mut c = f.coeffs().to_vec();
            c.resize(d + 1, 0);
            c.reverse();
            Poly::new(f.field(), c)
        };
        if self.num.is_zero() {
            return self.clone();
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        let m = dn.max(dd);
        Self::new(rev(&self.num, m), rev(&self.den, m)).expect("nonzero")
    }
}

fn poly_valuation(f: &Poly, pi: &Poly) -> i64 {
    let mut k = 0;
    let mut g = f.clone();
    while let Some(h) = g.div_exact(pi) {
        g = h;
        k += 1;
    }
    k
}

/// Valuation of `x` at `v`; `None` stands for `+infinity` (x = 0).
pub fn valuation(x: &RationalFunction, v: &Place) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(match v {
        Place::Infinity => x.den.deg() - x.num.deg(),
        Place::Finite(pi) => poly_valuation(&x.num, pi) - poly_valuation(&x.den, pi),
    })
}

/// Valuation of a nonzero polynomial at a finite place; `None` for zero.
pub fn valuation_poly(f: &Poly, pi: &Poly) -> Option<i64> {
    (!f.is_zero()).then(|| poly_valuation(f, pi))
}

/// Reduction map `O_v -> kappa(v) = F_{q^d}` (fixed lex-smallest root of `pi`).
#[derive(Clone)]
pub struct ResidueMap {
    base: Gf,
    place: Place,
    root: u64,
}

impl ResidueMap {
    pub fn new(base: &Gf, place: &Place) -> Result<ResidueMap, FuncFieldError> {
        let root = match place {
            Place::Infinity => 0,
            Place::Finite(pi) => {
                let ext = base.extension(place.degree())?;
                let roots = ext.embed_poly(pi).roots();
                *roots.first().expect("an irreducible polynomial splits in its splitting field")
            }
        };
        Ok(ResidueMap { base: base.clone(), place: place.clone(), root })
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn extension(&self) -> &Extension {
        self.base.extension(self.place.degree()).expect("built in new")
    }

    /// The residue field `F_{q^d}`.
    pub fn field(&self) -> &Gf {
        self.extension().field()
    }

    /// Image of `t` (finite places).
    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn map_poly(&self, f: &Poly) -> u64 {
        match &self.place {
            Place::Infinity => {
                // polynomials are integral at infinity only when constant
                f.coeff(0)
            }
            Place::Finite(_) => {
                let ext = self.extension();
                let big = ext.field();
                f.coeffs().iter().rev().fold(0, |acc, &a| big.add(big.mul(acc, self.root), ext.embed(a)))
            }
        }
    }

    pub fn map(&self, x: &RationalFunction) -> Result<u64, FuncFieldError> {
        let v = valuation(x, &self.place);
        match v {
            None => return Ok(0),
            Some(k) if k < 0 => return Err(FuncFieldError::PoleAtPlace),
            Some(k) if k > 0 => return Ok(0),
            _ => {}
        }
        match &self.place {
            Place::Infinity => {
                let f = self.base.clone();
                Ok(f.div(x.num.leading(), x.den.leading())?)
            }
            Place::Finite(_) => {
                let big = self.field().clone();
                Ok(big.div(self.map_poly(&x.num), self.map_poly(&x.den))?)
            }
        }
    }
}

/// Image of `x` in the residue field of `v`.
pub fn residue(x: &RationalFunction, v: &Place) -> Result<FieldElement, FuncFieldError> {
    let r = ResidueMap::new(x.field(), v)?;
    let a = r.map(x)?;
    Ok(r.field().element(a)?)
}

/// Distinct places where `x` has nonzero valuation.
pub fn support(x: &RationalFunction) -> Vec<Place> {
    let mut out = Vec::new();
    for f in [&x.num, &x.den] {
        if f.degree().unwrap_or(0) > 0 {
            for (g, _) in f.factor().expect("nonzero") {
                out.push(Place::Finite(g));
            }
        }
    }
    if valuation(x, &Place::Infinity).unwrap_or(0) != 0 {
        out.push(Place::Infinity);
    }
    out.sort();
    out.dedup();
    out
}

/// Places of the distinct irreducible factors of a nonzero polynomial.
pub fn places_dividing(f: &Poly) -> Vec<Place> {
    if f.degree().unwrap_or(0) == 0 {
        return vec![];
    }
    f.factor().expect("nonzero").into_iter().map(|(g, _)| Place::Finite(g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Gf {
        Gf::prime(5).unwrap()
    }

    #[test]
    fn places_counts() {
        let f = f5();
        let p1 = places_of_degree(&f, 1);
        assert_eq!(p1.len(), 6);
        assert_eq!(p1[0], Place::Finite(Poly::x(&f)));
        assert_eq!(p1[5], Place::Infinity);
        assert_eq!(places_of_degree(&f, 2).len(), 10);
        let f25 = Gf::new(5, 2, None).unwrap();
        assert_eq!(places_of_degree(&f25, 1).len(), 26);
        // enumeration fallback agrees with the orbit path
        let via_orbits: Vec<Place> = places_of_degree(&f, 3);
        let mut via_enum: Vec<Place> = enumerate_irreducibles(&f, 3).into_iter().map(Place::Finite).collect();
        via_enum.sort();
        assert_eq!(via_orbits, via_enum);
    }

    #[test]
    fn valuation_examples() {
        let f = f5();
        let t = Poly::x(&f);
        let x: RationalFunction = t.pow(2).mul(&Poly::from_ints(&f, &[-1, 1])).into();
        assert_eq!(valuation(&x, &Place::Finite(t.clone())), Some(2));
        assert_eq!(valuation(&x, &Place::Infinity), Some(-3));
        let y = RationalFunction::new(Poly::one(&f), Poly::from_ints(&f, &[2, 1])).unwrap();
        assert_eq!(valuation(&y, &Place::Finite(Poly::from_ints(&f, &[2, 1]))), Some(-1));
        assert_eq!(valuation(&RationalFunction::zero(&f), &Place::Infinity), None);
    }

    #[test]
    fn residue_examples() {
        let f = f5();
        let t = Poly::x(&f);
        let r = residue(&Poly::from_ints(&f, &[3, 1]).into(), &Place::Finite(t.clone())).unwrap();
        assert_eq!(r.raw(), 3);
        // t^2 + 1 splits over F_5, so t^2 + 2 serves as the degree-2 place
        assert!(!Poly::from_ints(&f, &[1, 0, 1]).is_irreducible());
        let pi = Poly::from_ints(&f, &[2, 0, 1]);
        assert!(pi.is_irreducible());
        let r = residue(&t.pow(2).into(), &Place::Finite(pi)).unwrap();
        assert_eq!(r.field().order(), 25);
        assert_eq!(r.raw(), r.field().from_int(-2));
        let x = RationalFunction::new(Poly::from_ints(&f, &[1, 1]), t.clone()).unwrap();
        assert_eq!(residue(&x, &Place::Infinity).unwrap().raw(), 1);
        let pole = RationalFunction::new(Poly::one(&f), t.clone()).unwrap();
        assert_eq!(residue(&pole, &Place::Finite(t)).unwrap_err(), FuncFieldError::PoleAtPlace);
    }

    #[test]
    fn residue_commutes_with_frobenius() {
        let f = Gf::new(5, 2, None).unwrap();
        for place in places_of_degree(&f, 2).into_iter().take(20) {
            let rm = ResidueMap::new(&f, &place).unwrap();
            let pi = place.pi().unwrap();
            let ext = rm.extension();
            // generators: t and the field generator u
            let tq = Poly::x(&f).pow(f.order()).rem(pi).unwrap();
            assert_eq!(rm.map_poly(&tq), ext.frobenius(rm.root()));
            let u = Poly::constant(&f, 5);
            let uq = Poly::constant(&f, f.pow(5, 25));
            assert_eq!(rm.map_poly(&uq), ext.frobenius(rm.map_poly(&u)));
        }
    }

    #[test]
    fn invert_variable_round_trip() {
        let f = f5();
        let x = RationalFunction::new(Poly::from_ints(&f, &[1, 2, 0, 3]), Poly::from_ints(&f, &[4, 1])).unwrap();
        assert_eq!(x.invert_variable().invert_variable(), x);
    }
}
