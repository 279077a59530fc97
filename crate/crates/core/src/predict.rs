//! Predicted orders and ranks of kernels, cokernels and torsion subgroups,
//! evaluated exactly from the local data, `L`-functions and torsion.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::count;
use crate::funcfield::{places_of_degree, Place, ResidueMap};
use crate::lfun::{self, LPolynomial, LfunError, SurfaceData, SurfaceZeta};
use crate::mw::{self, CertificateStatus, MwError, TorsionCertificate, TorsionConfig};
use crate::tate::{self, LocalData, ReductionClass};
use crate::wmodel::{ModelError, WeierstrassCurve};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PredictError {
    #[error("the fibration is smooth or isotrivial")]
    InapplicableHypothesis,
    #[error("U must omit at least one place")]
    UIsAllOfC,
    #[error("U meets a bad fiber")]
    UnsupportedU,
    #[error("j must be at least 3")]
    WeightTooSmall,
    #[error(transparent)]
    Lfun(#[from] LfunError),
    #[error(transparent)]
    Mw(#[from] MwError),
}

impl From<ModelError> for PredictError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::IsotrivialOrSmooth => PredictError::InapplicableHypothesis,
            e => PredictError::Lfun(e.into()),
        }
    }
}

impl From<tate::TateError> for PredictError {
    fn from(e: tate::TateError) -> Self {
        match e {
            tate::TateError::Model(m) => m.into(),
            e => PredictError::Lfun(e.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Deferred,
    /// Numerical, advisory only.
    Warning,
    /// Trivially satisfied for base `P^1`; nothing is checked.
    Untested,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Deferred => "deferred",
            Verdict::Warning => "warning",
            Verdict::Untested => "untested",
        }
    }

    fn of(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// An exact order, or a range when the torsion certificate is not exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderValue {
    Exact(BigRational),
    Interval(BigRational, BigRational),
}

impl OrderValue {
    fn from_pair(a: BigRational, b: BigRational) -> OrderValue {
        if a == b {
            OrderValue::Exact(a)
        } else if a < b {
            OrderValue::Interval(a, b)
        } else {
            OrderValue::Interval(b, a)
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            OrderValue::Exact(v) => Some(v),
            OrderValue::Interval(..) => None,
        }
    }

    pub fn verdict(&self) -> Verdict {
        match self {
            OrderValue::Exact(v) => Verdict::of(v.is_integer() && v.is_positive()),
            OrderValue::Interval(..) => Verdict::Deferred,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quantity {
    Order(OrderValue),
    Rank(u64),
    /// A group described in words (e.g. `Z`, `trivial`).
    Group(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub quantity: Quantity,
    pub verdict: Verdict,
}

impl Slot {
    fn order(name: &str, v: OrderValue) -> Slot {
        let verdict = v.verdict();
        Slot { name: name.into(), quantity: Quantity::Order(v), verdict }
    }

    fn rank(name: &str, r: u64) -> Slot {
        Slot { name: name.into(), quantity: Quantity::Rank(r), verdict: Verdict::Pass }
    }

    fn group(name: &str, g: &str, verdict: Verdict) -> Slot {
        Slot { name: name.into(), quantity: Quantity::Group(g.into()), verdict }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

fn check(name: &str, verdict: Verdict, detail: String) -> Check {
    Check { name: name.into(), verdict, detail }
}

/// Slots for one open subscheme `U = P^1 - removed`.
#[derive(Debug, Clone)]
pub struct OpenReport {
    pub removed: Vec<Place>,
    pub slots: Vec<Slot>,
    /// Order of vanishing of `L(h^1(E^U), T)` at `T = 1`.
    pub vanishing_order: u32,
}

#[derive(Debug, Clone)]
pub struct HighWeightReport {
    pub j: u32,
    pub slots: Vec<Slot>,
}

#[derive(Debug, Clone)]
pub struct OrderReport {
    pub q: u64,
    /// `|S_0|`, split multiplicative places.
    pub r: usize,
    pub s1: usize,
    pub s2: usize,
    pub irr_s2: usize,
    pub core: Vec<Slot>,
    pub open: Vec<OpenReport>,
    pub highweight: Vec<HighWeightReport>,
    pub ppart: BigRational,
    pub checks: Vec<Check>,
}

impl OrderReport {
    pub fn slot(&self, name: &str) -> Option<&Slot> {
        self.core
            .iter()
            .chain(self.open.iter().flat_map(|o| o.slots.iter()))
            .chain(self.highweight.iter().flat_map(|h| h.slots.iter()))
            .find(|s| s.name == name)
    }

    pub fn all_slots(&self) -> impl Iterator<Item = &Slot> {
        self.core.iter().chain(self.open.iter().flat_map(|o| o.slots.iter())).chain(self.highweight.iter().flat_map(|h| h.slots.iter()))
    }

    /// True iff nothing failed (deferred, advisory and untested entries are fine).
    pub fn all_pass(&self) -> bool {
        self.all_slots().map(|s| s.verdict).chain(self.checks.iter().map(|c| c.verdict)).all(|v| v != Verdict::Fail)
    }

    pub fn deferred(&self) -> bool {
        self.all_slots().any(|s| s.verdict == Verdict::Deferred)
    }
}

/// Everything the formulas need, computed once per curve.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub curve: WeierstrassCurve,
    pub surface: SurfaceData,
    pub l: LPolynomial,
    pub guard: Vec<i128>,
    /// `L(E,T)` recovered from fiberwise point counts.
    pub lefschetz: Result<LPolynomial, LfunError>,
    pub zeta: SurfaceZeta,
    pub torsion: TorsionCertificate,
}

impl Analysis {
    pub fn new(e: &WeierstrassCurve, cfg: &TorsionConfig) -> Result<Analysis, PredictError> {
        let surface = SurfaceData::new(e).map_err(|err| match err {
            LfunError::Tate(t) => PredictError::from(t),
            other => PredictError::Lfun(other),
        })?;
        let euler = lfun::euler_product(&surface)?;
        let zeta = lfun::surface_zeta_from(&surface, &euler.l);
        let lefschetz = lfun::l_from_lefschetz(&surface, euler.l.degree());
        let torsion = mw::geometric_torsion(e, cfg)?;
        Ok(Analysis { curve: e.clone(), surface, l: euler.l, guard: euler.guard, lefschetz, zeta, torsion })
    }

    pub fn q(&self) -> u64 {
        self.surface.q()
    }

    pub fn bad(&self) -> Vec<&LocalData> {
        self.surface.bad()
    }

    /// `(|T'_{(j)}|` at the verified lower module, at the upper bound`)`.
    pub fn t_prime(&self, j: u32) -> Result<(BigInt, BigInt), PredictError> {
        let lo = mw::twisted_invariants(&self.torsion.verified_lower, j, self.q())?;
        Ok(match self.torsion.status {
            CertificateStatus::Exact => (lo.into(), lo.into()),
            CertificateStatus::Interval => (lo.into(), self.torsion.upper_bound.max(lo).into()),
        })
    }

    pub fn split_places(&self) -> Vec<&LocalData> {
        self.bad().into_iter().filter(|d| d.reduction_class == ReductionClass::SplitMultiplicative).collect()
    }
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn abs(x: BigRational) -> BigRational {
    x.abs()
}

/// `|L(h^0(X), s0)|` for a finite etale `X` given by its orbits.
fn h0_abs(orbits: &[(usize, u32)], q: u64, s0: i64) -> BigRational {
    abs(lfun::perm_l(orbits, 0, q).eval_at_s(s0))
}

fn point_orbits(places: &[&LocalData]) -> Vec<(usize, u32)> {
    places.iter().map(|d| (1usize, d.degree())).collect()
}

fn eval_pair(tp: &(BigInt, BigInt), f: impl Fn(&BigRational) -> BigRational) -> OrderValue {
    OrderValue::from_pair(f(&rat(tp.0.clone())), f(&rat(tp.1.clone())))
}

/// Slots for the proper surface and `K_1`, `K_2` of `E`.
pub fn predict_core(a: &Analysis) -> Result<Vec<Slot>, PredictError> {
    let q = a.q();
    let bad = a.bad();
    if bad.is_empty() {
        return Err(PredictError::InapplicableHypothesis);
    }
    let qm1 = rat(q - 1);
    let r = a.split_places().len() as u64;
    let irr_orbits = lfun::component_orbits(&bad, false);
    let irr_s2 = irr_orbits.len() as u64;
    let l_irr = h0_abs(&irr_orbits, q, -1);
    let l_s2 = h0_abs(&point_orbits(&bad), q, -1);
    let l_e0 = abs(lfun::special_value(&a.l, 0).unwrap_or_else(|_| BigRational::zero()));
    // L(h^1(C), s) = 1 for the projective line
    let l_h1c = BigRational::one();
    let tp = a.t_prime(1)?;
    let mut s = vec![
        Slot::rank("k2.rank", r),
        Slot::order("k2.coker", eval_pair(&tp, |t| &qm1 * &qm1 * &l_irr / (t * &l_s2))),
        Slot::order("k2.kernel", OrderValue::Exact(&l_h1c * &l_h1c)),
        Slot::order("k1.kernel", eval_pair(&tp, |t| &qm1 * &qm1 * t * &l_e0)),
        Slot::rank("k1.coker.rank", 2 + irr_s2 - bad.len() as u64),
        Slot::group("k1.coker.torsion", "trivial", Verdict::Untested),
        Slot::order("h1.torsion", OrderValue::Exact(rat(q * q - 1))),
        Slot::order("d22.kernel", OrderValue::Exact(l_h1c.clone())),
        Slot::order("d22.coker", eval_pair(&tp, |t| &qm1 * &l_irr / (t * &l_s2))),
        Slot::order("d32.kernel", eval_pair(&tp, |t| &qm1 * t * &l_e0)),
        Slot::group("d32.coker", "Z", Verdict::Pass),
        Slot::order("d43.coker", OrderValue::Exact(qm1.clone())),
        Slot::order("k2.boundary_kernel", OrderValue::Exact(&l_h1c * &l_h1c)),
    ];
    if l_e0.is_zero() {
        for x in s.iter_mut().filter(|x| x.name == "k1.kernel" || x.name == "d32.kernel") {
            x.verdict = Verdict::Fail;
        }
    }
    Ok(s)
}

/// Removed places default: the bad places.
pub fn good_locus(a: &Analysis) -> Vec<Place> {
    a.bad().iter().map(|d| d.place.clone()).collect()
}

/// The first degree-one good place, used to shrink `U` further.
pub fn extra_good_place(a: &Analysis) -> Option<Place> {
    let bad = good_locus(a);
    places_of_degree(&a.surface.field, 1)
        .into_iter()
        .chain(core::iter::once(Place::Infinity))
        .find(|v| !bad.contains(v))
}

/// Slots for the open surface `E_U`, `U = P^1 - removed`.
pub fn predict_open(a: &Analysis, removed: &[Place]) -> Result<OpenReport, PredictError> {
    if removed.is_empty() {
        return Err(PredictError::UIsAllOfC);
    }
    let q = a.q();
    let bad = a.bad();
    if bad.iter().any(|d| !removed.contains(&d.place)) {
        return Err(PredictError::UnsupportedU);
    }
    let mut removed: Vec<Place> = removed.to_vec();
    removed.sort();
    removed.dedup();
    let datas: Vec<LocalData> =
        removed.iter().map(|v| lfun::local_data_at(&a.curve, &a.surface, v)).collect::<Result<_, _>>()?;
    let refs: Vec<&LocalData> = datas.iter().collect();
    let qm1 = rat(q - 1);
    let l_cu = h0_abs(&point_orbits(&refs), q, -1);
    let l_irr_u = h0_abs(&lfun::component_orbits(&refs, false), q, -1);
    let l_h2_0 = abs(a.zeta.h[2].eval_at_s(0));
    let (vanish, lead) = lfun::leading_coefficient(&lfun::h1_of_removed(&refs, q), 0);
    let lead = abs(lead);
    // smooth over U, so T_U = T
    let tp = a.t_prime(1)?;
    let s0_minus_u = bad.iter().filter(|d| d.reduction_class == ReductionClass::SplitMultiplicative).count() as u64;
    let pic = removed.iter().fold(0u64, |g, v| num_integer::gcd(g, v.degree() as u64));
    let slots = vec![
        Slot::order("open.h1.torsion", OrderValue::Exact(rat(q * q - 1))),
        Slot::rank("open.h2.rank", s0_minus_u),
        Slot::order("open.h2.torsion", eval_pair(&tp, |t| t * &l_cu / &qm1)),
        Slot::order("open.boundary.coker", eval_pair(&tp, |t| &qm1 * &l_irr_u / (t * &l_cu))),
        Slot::rank("open.h3.rank", (removed.len() as u64).saturating_sub(1)),
        Slot::order("open.h3.torsion", eval_pair(&tp, |t| t * &l_h2_0 * &lead * &l_cu / (&qm1 * &l_irr_u))),
        Slot::order("open.h4.order", OrderValue::Exact(rat(pic))),
    ];
    Ok(OpenReport { removed, slots, vanishing_order: vanish })
}

/// Kernels and cokernels of the boundary maps in weight `j >= 3`.
pub fn predict_highweight(a: &Analysis, j: u32) -> Result<HighWeightReport, PredictError> {
    if j < 3 {
        return Err(PredictError::WeightTooSmall);
    }
    let q = a.q();
    let qb = BigInt::from(q);
    let qj = rat(qb.pow(j) - 1u32);
    let qj1 = rat(qb.pow(j - 1) - 1u32);
    let qj2 = rat(qb.pow(j - 2) - 1u32);
    let l_h2 = abs(a.zeta.h[2].eval_at_s(2 - j as i64));
    let one = OrderValue::Exact(BigRational::one());
    let tp = a.t_prime(j - 1)?;
    let mut slots = Vec::new();
    for i in 0..=5u32 {
        let v = match i {
            1 => OrderValue::Exact(qj.clone()),
            3 => eval_pair(&tp, |t| t * &l_h2 / &qj1),
            // L(h^1(C), .) = 1 for i = 2, 4
            _ => one.clone(),
        };
        slots.push(Slot::order(&format!("w{}.kernel.{}", j, i), v));
    }
    for i in 0..=5u32 {
        let v = match i {
            2 => eval_pair(&tp, |t| &qj1 / t),
            4 => OrderValue::Exact(qj2.clone()),
            _ => one.clone(),
        };
        slots.push(Slot::order(&format!("w{}.coker.{}", j, i), v));
    }
    Ok(HighWeightReport { j, slots })
}

/// `|v|_p^{-1}`.
pub fn p_part(v: &BigRational, p: u64) -> BigRational {
    let p = BigInt::from(p);
    let part = |x: &BigInt| {
        let mut x = x.abs();
        let mut pp = BigInt::one();
        while !x.is_zero() && (&x % &p).is_zero() {
            x /= &p;
            pp *= &p;
        }
        pp
    };
    BigRational::new(part(v.numer()), part(v.denom()))
}

/// `|L(h^2(E), 0)|_p^{-1}`; `None` if the value vanishes.
pub fn predict_ppart(a: &Analysis) -> Option<BigRational> {
    let v = a.zeta.h[2].eval_at_s(0);
    if v.is_zero() {
        return None;
    }
    Some(p_part(&v, a.surface.field.characteristic()))
}

/// Per-fiber point counts at good places of degree `<= max_deg`: local factor
/// at `T^deg = 1` against a brute-force count of the reduced minimal model.
pub fn fiber_count_identity(a: &Analysis, max_deg: u32) -> Result<Vec<(Place, i128, u64)>, PredictError> {
    let field = &a.surface.field;
    let mut out = Vec::new();
    let mut places: Vec<Place> = (1..=max_deg).flat_map(|d| places_of_degree(field, d)).collect();
    places.push(Place::Infinity);
    for v in places {
        let data = lfun::local_data_at(&a.curve, &a.surface, &v)?;
        if data.reduction_class != ReductionClass::Good {
            continue;
        }
        let (model, lp, _) = tate::local_chart(&a.curve, &v)?;
        let rm = ResidueMap::new(field, &lp).map_err(|e| PredictError::Lfun(LfunError::from(e)))?;
        let mut coeffs = [0u64; 5];
        for (c, x) in coeffs.iter_mut().zip(model.coeffs().iter()) {
            *c = rm.map(x).map_err(|e| PredictError::Lfun(LfunError::from(e)))?;
        }
        let brute = count::count_points(rm.field(), coeffs).map_err(|e| PredictError::Lfun(e.into()))?;
        let factor: i128 = data.local_factor.iter().sum();
        out.push((v, factor, brute));
    }
    Ok(out)
}

/// Assemble every slot and every consistency check. `removed` overrides the
/// default open subschemes; `weights` lists the `j >= 3` to evaluate.
pub fn predict(a: &Analysis, removed: Option<&[Place]>, weights: &[u32]) -> Result<OrderReport, PredictError> {
    let q = a.q();
    let bad = a.bad();
    let core = predict_core(a)?;
    let mut open = Vec::new();
    match removed {
        Some(r) => open.push(predict_open(a, r)?),
        None => {
            let gl = good_locus(a);
            open.push(predict_open(a, &gl)?);
            if let Some(extra) = extra_good_place(a) {
                let mut more = gl.clone();
                more.push(extra);
                open.push(predict_open(a, &more)?);
            }
        }
    }
    let highweight = weights.iter().map(|&j| predict_highweight(a, j)).collect::<Result<Vec<_>, _>>()?;
    let ppart = predict_ppart(a);
    let mut checks = Vec::new();

    let slot_fail = core
        .iter()
        .chain(open.iter().flat_map(|o| o.slots.iter()))
        .chain(highweight.iter().flat_map(|h| h.slots.iter()))
        .filter(|s| s.verdict == Verdict::Fail)
        .map(|s| s.name.clone())
        .collect::<Vec<_>>();
    checks.push(check("orders_positive_integers", Verdict::of(slot_fail.is_empty()), slot_fail.join(",")));

    let n = a.l.degree();
    let agree = matches!(&a.lefschetz, Ok(l) if l.coeffs == a.l.coeffs);
    checks.push(check("lefschetz_agreement", Verdict::of(agree), format!("degree {}", n)));
    checks.push(check(
        "degree_and_guard",
        Verdict::of(n as u32 + 4 == a.surface.conductor_degree() && a.guard.iter().all(|&g| g == 0)),
        format!("conductor degree {}", a.surface.conductor_degree()),
    ));
    let eps = lfun::functional_equation_sign(&a.l);
    checks.push(check(
        "functional_equation",
        Verdict::of(eps.is_some()),
        eps.map_or("no sign".to_string(), |e| format!("epsilon {}", e)),
    ));
    let dev = lfun::root_magnitude_deviation(&a.l);
    checks.push(check(
        "root_magnitudes",
        if dev < 1e-6 { Verdict::Pass } else { Verdict::Warning },
        format!("max deviation {:e}", dev),
    ));
    let ogg = bad.iter().all(|d| d.conductor_exponent as i64 == d.v_delta_min as i64 - d.kodaira.components() as i64 + 1);
    checks.push(check("ogg", Verdict::of(ogg), String::new()));
    let fibers = fiber_count_identity(a, 1)?;
    let bad_fibers: Vec<String> = fibers.iter().filter(|(_, f, b)| *f != *b as i128).map(|(v, _, _)| v.label()).collect();
    checks.push(check(
        "fiber_count_identity",
        Verdict::of(bad_fibers.is_empty()),
        format!("{} good places; mismatches: {}", fibers.len(), bad_fibers.join(",")),
    ));
    for o in &open {
        let expect = bad.iter().filter(|d| d.reduction_class == ReductionClass::SplitMultiplicative && o.removed.contains(&d.place)).count();
        checks.push(check(
            "h1_vanishing_order",
            Verdict::of(o.vanishing_order as usize == expect),
            format!("r = {}, split places removed = {}", o.vanishing_order, expect),
        ));
    }
    // shrinking U to the good locus reproduces the proper-surface cokernel
    if let (Some(o), Some(c)) = (open.first(), core.iter().find(|s| s.name == "d22.coker")) {
        if let Some(s) = o.slots.iter().find(|s| s.name == "open.boundary.coker") {
            let same = s.quantity == c.quantity;
            let full = o.removed.len() == bad.len();
            if full {
                checks.push(check("open_matches_core", Verdict::of(same), String::new()));
            }
        }
    }
    // the weight-j cokernel divides q^{j-1} - 1 by |T'(j-1)|
    let mut twists: Vec<u32> = weights.iter().map(|&j| j - 1).collect();
    twists.sort_unstable();
    twists.dedup();
    for j in twists {
        let tp = a.t_prime(j)?;
        let qj = BigInt::from(q).pow(j) - 1u32;
        let verdict = if tp.0 != tp.1 {
            Verdict::Deferred
        } else {
            Verdict::of((&qj % &tp.0).is_zero())
        };
        checks.push(check(&format!("t_prime_divides_q{}_minus_1", j), verdict, format!("|T'| = {}", tp.0)));
    }
    checks.push(check(
        "ppart",
        Verdict::of(ppart.is_some()),
        ppart.as_ref().map_or("L(h2, 0) = 0".to_string(), |v| v.to_string()),
    ));
    let s1 = bad.iter().filter(|d| matches!(d.reduction_class, ReductionClass::SplitMultiplicative | ReductionClass::NonsplitMultiplicative)).count();
    Ok(OrderReport {
        q,
        r: a.split_places().len(),
        s1,
        s2: bad.len(),
        irr_s2: lfun::component_orbits(&bad, false).len(),
        core,
        open,
        highweight,
        ppart: ppart.unwrap_or_else(BigRational::zero),
        checks,
    })
}
