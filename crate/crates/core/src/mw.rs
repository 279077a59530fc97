//! Prime-to-`p` Mordell–Weil torsion over `F_{q^m}(t)`, the geometric torsion
//! group with its Frobenius action, and twisted invariants.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::count::{self, CountError, CurveGroup};
use crate::funcfield::{FuncFieldError, Place, RationalFunction};
use crate::gf::{Gf, GfError, Poly};
use crate::tate::{self, TateError};
use crate::wmodel::{integral_short_model, ModelError, WeierstrassCurve};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MwError {
    #[error("no good places available for sampling")]
    NoGoodPlaces,
    #[error("search space of {0} candidates exceeds the configured limit")]
    CapExceeded(u64),
    #[error("the group has nontrivial p-part")]
    PPartPresent,
    #[error("U meets a bad fiber")]
    UnsupportedU,
    #[error("N = {0} is divisible by the characteristic")]
    BadTorsionOrder(u64),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    FuncField(#[from] FuncFieldError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Tate(#[from] TateError),
}

/// A finite abelian group `Z/n_1 + ... + Z/n_k` (`n_1 | n_2 | ...`, all
/// `n_i > 1`) with an automorphism. Row `i` of `frob` is the image of the
/// `i`-th generator in generator coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusModule {
    pub cyclic_orders: Vec<u64>,
    pub frob: Vec<Vec<u64>>,
}

impl FrobeniusModule {
    pub fn trivial() -> FrobeniusModule {
        FrobeniusModule { cyclic_orders: Vec::new(), frob: Vec::new() }
    }

    /// The module with identity action.
    pub fn with_trivial_action(cyclic_orders: Vec<u64>) -> FrobeniusModule {
        let k = cyclic_orders.len();
        let frob = (0..k).map(|i| (0..k).map(|j| (i == j) as u64).collect()).collect();
        FrobeniusModule { cyclic_orders, frob }
    }

    pub fn order(&self) -> u64 {
        self.cyclic_orders.iter().product()
    }

    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &n in &self.cyclic_orders {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..n).map(move |c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }

    pub fn apply_frob(&self, a: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; a.len()];
        for (i, &c) in a.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                let n = self.cyclic_orders[j];
                *o = (*o + c % n * (self.frob[i][j] % n)) % n;
            }
        }
        out
    }

    fn scale(&self, a: &[u64], k: u64) -> Vec<u64> {
        a.iter().zip(&self.cyclic_orders).map(|(&c, &n)| (c as u128 * k as u128 % n as u128) as u64).collect()
    }
}

/// `#ker(frob - q^j)` on `A`.
pub fn twisted_invariants(m: &FrobeniusModule, j: u32, q: u64) -> Result<u64, MwError> {
    let p = crate::gf::prime_factors(q).first().copied().unwrap_or(q);
    if m.order().is_multiple_of(p) {
        return Err(MwError::PPartPresent);
    }
    let mut count = 0;
    for a in m.elements() {
        let qj = m.cyclic_orders.iter().fold(1u64, |acc, &n| acc.lcm(&n));
        let k = mod_pow(q, j as u64, qj.max(1));
        if m.apply_frob(&a) == m.scale(&a, k) {
            count += 1;
        }
    }
    Ok(count)
}

fn mod_pow(b: u64, mut e: u64, n: u64) -> u64 {
    let n = n as u128;
    let mut r = 1u128 % n;
    let mut b = b as u128 % n;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % n;
        }
        b = b * b % n;
        e >>= 1;
    }
    r as u64
}

/// A point `(x(t), y(t))` on the integral short model, coefficients in `F_{q^m}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub x: Poly,
    pub y: Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    Exact,
    Interval,
}

#[derive(Debug, Clone)]
pub struct TorsionCertificate {
    pub verified_lower: FrobeniusModule,
    /// Generator witnesses, in the order of `verified_lower.cyclic_orders`.
    pub generators: Vec<Section>,
    /// Every nonzero torsion point found.
    pub points: Vec<Section>,
    /// The witnesses live over `F_{q^m}`.
    pub m: u32,
    pub upper_bound: u64,
    pub status: CertificateStatus,
}

#[derive(Debug, Clone, Copy)]
pub struct TorsionConfig {
    pub m_max: u32,
    pub deg_cap: Option<usize>,
    pub samples: usize,
    pub max_combinations: u64,
}

impl Default for TorsionConfig {
    fn default() -> Self {
        TorsionConfig { m_max: 4, deg_cap: None, samples: 24, max_combinations: 1 << 20 }
    }
}

/// The integral short model with coefficients moved to `F_{q^m}`.
#[derive(Clone)]
struct Model {
    k: Gf,
    a: Poly,
    b: Poly,
    p: u64,
}

impl Model {
    fn new(e: &WeierstrassCurve, m: u32) -> Result<Model, MwError> {
        let base = e.field();
        let (a, b) = integral_short_model(e)?;
        let ext = base.extension(m)?;
        Ok(Model { k: ext.field().clone(), a: ext.embed_poly(&a), b: ext.embed_poly(&b), p: base.characteristic() })
    }

    fn eval_over(&self, l: &Gf, embed: &dyn Fn(u64) -> u64, t0: u64) -> (u64, u64) {
        let h = |f: &Poly| f.coeffs().iter().rev().fold(0u64, |acc, &c| l.add(l.mul(acc, t0), embed(c)));
        (h(&self.a), h(&self.b))
    }

    /// Degree bound for torsion sections on this model.
    fn model_cap(&self) -> usize {
        let k = core::cmp::max((self.a.deg().max(0) as usize).div_ceil(4), (self.b.deg().max(0) as usize).div_ceil(6));
        2 * k
    }
}

fn good(l: &Gf, a: u64, b: u64) -> bool {
    let d = l.add(l.mul(l.from_int(4), l.mul(a, l.mul(a, a))), l.mul(l.from_int(27), l.mul(b, b)));
    d != 0
}

fn strip_p(mut n: u64, p: u64) -> u64 {
    while n.is_multiple_of(p) && n > 0 {
        n /= p;
    }
    n
}

/// Largest sampling field considered.
const MAX_SAMPLE_FIELD: u64 = 1 << 20;

/// gcd of `#E_{t0}(L)` over good `t0` in fields `L` containing `F_{q^m}`;
/// the prime-to-`p` part bounds `#E(F_{q^m}(t))_tors`. Points are drawn
/// pseudo-randomly (fixed seed), `samples` from each of `F_{q^m}`,
/// `F_{q^{2m}}` and `F_{q^{3m}}`, so that subfield elements do not dominate.
pub fn torsion_upper_bound(e: &WeierstrassCurve, m: u32, samples: usize) -> Result<u64, MwError> {
    let model = Model::new(e, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11_0000 + m as u64);
    let mut g = 0u64;
    let mut taken = 0usize;
    for r in 1..=3u32 {
        let ext = model.k.extension(r)?;
        let l = ext.field();
        if l.order() > MAX_SAMPLE_FIELD {
            break;
        }
        let want = samples.min(l.order() as usize);
        let mut got = 0;
        for _ in 0..4 * want {
            if got >= want {
                break;
            }
            let t0 = rng.next_u64() % l.order();
            let (a, b) = model.eval_over(l, &|c| ext.embed(c), t0);
            if !good(l, a, b) {
                continue;
            }
            let n = (l.order() as i64 + 1 - count::short_trace_few(l, a, b)?) as u64;
            g = g.gcd(&n);
            got += 1;
        }
        taken += got;
    }
    if taken == 0 {
        return Err(MwError::NoGoodPlaces);
    }
    Ok(strip_p(g, model.p))
}

/// `g_n` with `psi_n = g_n` (n odd) or `2y g_n` (n even) for `y^2 = x^3 + a x + b`.
pub fn division_polynomial(f: &Gf, a: u64, b: u64, n: u64) -> Poly {
    let c = |k: i64| f.from_int(k);
    let fx = Poly::new(f, vec![b, a, 0, 1]);
    let ff = fx.mul(&fx).scale(c(16)); // (2y)^4
    let mut g: Vec<Poly> = vec![
        Poly::zero(f),
        Poly::one(f),
        Poly::one(f),
        Poly::new(f, vec![f.neg(f.mul(a, a)), f.mul(c(12), b), f.mul(c(6), a), 0, c(3)]),
        Poly::new(
            f,
            vec![
                f.neg(f.add(f.mul(c(8), f.mul(b, b)), f.mul(a, f.mul(a, a)))),
                f.neg(f.mul(c(4), f.mul(a, b))),
                f.neg(f.mul(c(5), f.mul(a, a))),
                f.mul(c(20), b),
                f.mul(c(5), a),
                0,
                1,
            ],
        )
        .scale(c(2)),
    ];
    let mut k = g.len() as u64;
    while k <= n {
        let m = (k / 2) as usize;
        let next = if k % 2 == 1 {
            let (x, y) = (g[m + 2].mul(&g[m].pow(3)), g[m - 1].mul(&g[m + 1].pow(3)));
            if m.is_multiple_of(2) {
                ff.mul(&x).sub(&y)
            } else {
                x.sub(&ff.mul(&y))
            }
        } else {
            g[m].mul(&g[m + 2].mul(&g[m - 1].pow(2)).sub(&g[m - 2].mul(&g[m + 1].pow(2))))
        };
        g.push(next);
        k += 1;
    }
    g.swap_remove(n as usize)
}

/// x-coordinates over `f` of the nonzero points killed by `n`.
fn torsion_x_roots(f: &Gf, a: u64, b: u64, n: u64) -> Vec<u64> {
    let mut g = division_polynomial(f, a, b, n);
    if n.is_multiple_of(2) {
        g = g.mul(&Poly::new(f, vec![b, a, 0, 1]));
    }
    let mut r = g.roots();
    r.sort_unstable();
    r.dedup();
    r
}

/// Square root in `K[t]`, if `f` is a square.
fn poly_sqrt(f: &Poly) -> Option<Poly> {
    let k = f.field();
    if f.is_zero() {
        return Some(Poly::zero(k));
    }
    let deg = f.degree()?;
    if deg % 2 == 1 {
        return None;
    }
    let d = deg / 2;
    let lead = k.sqrt(f.leading())?;
    let two_lead_inv = k.inv(k.mul(k.from_int(2), lead));
    let mut y = vec![0u64; d + 1];
    y[d] = lead;
    for j in 1..=d {
        let mut s = f.coeff(2 * d - j);
        for i in 1..j {
            s = k.sub(s, k.mul(y[d - i], y[d - j + i]));
        }
        y[d - j] = k.mul(s, two_lead_inv);
    }
    let y = Poly::new(k, y);
    (y.mul(&y) == *f).then_some(y)
}

type RPoint = Option<(RationalFunction, RationalFunction)>;

fn r_add(a: &RationalFunction, p: &RPoint, q: &RPoint) -> Result<RPoint, MwError> {
    let (x1, y1) = match p {
        None => return Ok(q.clone()),
        Some(v) => v,
    };
    let (x2, y2) = match q {
        None => return Ok(p.clone()),
        Some(v) => v,
    };
    let k = x1.field();
    let lambda = if x1 == x2 {
        if y1.add(y2).is_zero() {
            return Ok(None);
        }
        x1.mul(x1).scale(k.from_int(3)).add(a).div(&y1.scale(k.from_int(2)))?
    } else {
        y2.sub(y1).div(&x2.sub(x1))?
    };
    let x3 = lambda.mul(&lambda).sub(x1).sub(x2);
    let y3 = lambda.mul(&x1.sub(&x3)).sub(y1);
    Ok(Some((x3, y3)))
}

fn r_mul(a: &RationalFunction, n: u64, p: &RPoint) -> Result<RPoint, MwError> {
    let mut acc: RPoint = None;
    let mut base = p.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = r_add(a, &acc, &base)?;
        }
        base = r_add(a, &base, &base)?;
        n >>= 1;
    }
    Ok(acc)
}

/// Exact check that `[n] P = O` over `K(t)`.
pub fn killed_by(e_a: &Poly, s: &Section, n: u64) -> Result<bool, MwError> {
    let a = RationalFunction::from(e_a.clone());
    let p = Some((RationalFunction::from(s.x.clone()), RationalFunction::from(s.y.clone())));
    Ok(r_mul(&a, n, &p)?.is_none())
}

/// Every nonzero point `P` with `[n] P = O` whose coordinates lie in
/// `F_{q^m}[t]` with `deg x <= deg_cap`.
pub fn torsion_sections(e: &WeierstrassCurve, n: u64, m: u32, deg_cap: usize) -> Result<Vec<Section>, MwError> {
    torsion_sections_capped(e, n, m, deg_cap, TorsionConfig::default().max_combinations)
}

pub fn torsion_sections_capped(e: &WeierstrassCurve, n: u64, m: u32, deg_cap: usize, max_comb: u64) -> Result<Vec<Section>, MwError> {
    let model = Model::new(e, m)?;
    if n.is_multiple_of(model.p) {
        return Err(MwError::BadTorsionOrder(n));
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    let k = &model.k;
    let need = deg_cap + 1;
    // sampling field: enough good points to choose from
    let mut r = 1u32;
    while k.order().pow(r) < (8 * (need as u64 + 2)).max(64) && k.order().pow(r + 1) <= MAX_SAMPLE_FIELD {
        r += 1;
    }
    let ext = k.extension(r)?;
    let l = ext.field();
    let mut pts: Vec<(u64, Vec<u64>)> = Vec::new();
    for t0 in l.elements().take(256) {
        let (a, b) = model.eval_over(l, &|c| ext.embed(c), t0);
        if !good(l, a, b) {
            continue;
        }
        let roots = torsion_x_roots(l, a, b, n);
        if roots.is_empty() {
            return Ok(Vec::new());
        }
        pts.push((t0, roots));
    }
    if pts.len() < need + 2 {
        return Err(MwError::NoGoodPlaces);
    }
    pts.sort_by_key(|(_, r)| r.len());
    let (chosen, fresh) = (&pts[..need], &pts[need..need + 2]);
    let combos = chosen.iter().try_fold(1u64, |acc, (_, r)| acc.checked_mul(r.len() as u64)).unwrap_or(u64::MAX);
    if combos > max_comb {
        return Err(MwError::CapExceeded(combos));
    }
    // Lagrange basis over the chosen points
    let nodes: Vec<u64> = chosen.iter().map(|(t, _)| *t).collect();
    let basis: Vec<Poly> = (0..need)
        .map(|i| {
            let mut num = Poly::one(l);
            let mut den = l.one();
            for (j, &tj) in nodes.iter().enumerate() {
                if i != j {
                    num = num.mul(&Poly::new(l, vec![l.neg(tj), 1]));
                    den = l.mul(den, l.sub(nodes[i], tj));
                }
            }
            num.scale(l.inv(den))
        })
        .collect();
    let at_fresh: Vec<Vec<u64>> = fresh.iter().map(|(t, _)| basis.iter().map(|b| b.eval(*t)).collect()).collect();
    let fx_of = |x: &Poly| x.pow(3).add(&model.a.mul(x)).add(&model.b);
    let mut out = Vec::new();
    let mut idx = vec![0usize; need];
    'outer: loop {
        let vals: Vec<u64> = (0..need).map(|i| chosen[i].1[idx[i]]).collect();
        let prune = fresh.iter().zip(&at_fresh).all(|((_, roots), w)| {
            let v = vals.iter().zip(w).fold(0u64, |acc, (&c, &wi)| l.add(acc, l.mul(c, wi)));
            roots.binary_search(&v).is_ok()
        });
        if prune {
            let xl = basis.iter().zip(&vals).fold(Poly::zero(l), |acc, (b, &c)| acc.add(&b.scale(c)));
            let coeffs: Option<Vec<u64>> = xl.coeffs().iter().map(|&c| ext.restrict(c)).collect();
            if let Some(c) = coeffs {
                let x = Poly::new(k, c);
                if let Some(y) = poly_sqrt(&fx_of(&x)) {
                    let s = Section { x: x.clone(), y: y.clone() };
                    if killed_by(&model.a, &s, n)? {
                        out.push(s);
                        if !y.is_zero() {
                            out.push(Section { x, y: y.neg() });
                        }
                    }
                }
            }
        }
        for i in 0..need {
            idx[i] += 1;
            if idx[i] < chosen[i].1.len() {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    out.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));
    out.dedup();
    Ok(out)
}

/// Default degree cap: `2 + ceil(sum deg v * v(Delta_min) / 6)`, raised to
/// the bound forced by integrality at infinity of the short model.
pub fn default_deg_cap(e: &WeierstrassCurve) -> Result<usize, MwError> {
    let bad = tate::all_bad_local_data(e)?;
    let s: u32 = bad.iter().map(|d| d.degree() * d.v_delta_min).sum();
    let model = Model::new(e, 1)?;
    Ok((2 + (s as usize).div_ceil(6)).max(model.model_cap()))
}

/// A good point of `F_{q^m}` (or a small extension) where reduction is
/// injective on prime-to-`p` torsion: `(extension degree, t0)`.
fn specialization(model: &Model) -> Result<(u32, u64), MwError> {
    for r in 1..=4u32 {
        let ext = model.k.extension(r)?;
        let l = ext.field();
        for t0 in l.elements() {
            let (a, b) = model.eval_over(l, &|c| ext.embed(c), t0);
            if good(l, a, b) {
                return Ok((r, t0));
            }
        }
    }
    Err(MwError::NoGoodPlaces)
}

/// Torsion over one level `F_{q^m}(t)` with its structure and Frobenius.
#[derive(Debug, Clone)]
pub struct LevelTorsion {
    pub m: u32,
    pub module: FrobeniusModule,
    pub generators: Vec<Section>,
    pub points: Vec<Section>,
    pub upper_bound: u64,
}

pub fn level_torsion(e: &WeierstrassCurve, m: u32, cfg: &TorsionConfig) -> Result<LevelTorsion, MwError> {
    let bound = torsion_upper_bound(e, m, cfg.samples)?;
    let cap = match cfg.deg_cap {
        Some(c) => c,
        None => default_deg_cap(e)?,
    };
    let model = Model::new(e, m)?;
    let mut points: Vec<Section> = Vec::new();
    let mut b = bound;
    let mut l = 2u64;
    while b > 1 {
        if b % l == 0 {
            let mut pe = 1;
            while b % l == 0 {
                b /= l;
                pe *= l;
            }
            for s in torsion_sections_capped(e, pe, m, cap, cfg.max_combinations)? {
                points.push(s);
            }
        }
        l += 1;
    }
    if points.is_empty() {
        return Ok(LevelTorsion { m, module: FrobeniusModule::trivial(), generators: Vec::new(), points, upper_bound: bound });
    }
    let (r, t0) = specialization(&model)?;
    let sext = model.k.extension(r)?;
    let sl = sext.field();
    let (sa, sb) = model.eval_over(sl, &|c| sext.embed(c), t0);
    let grp = CurveGroup::new(sl, [0, 0, 0, sa, sb]);
    let spec = |s: &Section| -> Option<(u64, u64)> {
        let h = |f: &Poly| f.coeffs().iter().rev().fold(0u64, |acc, &c| sl.add(sl.mul(acc, t0), sext.embed(c)));
        Some((h(&s.x), h(&s.y)))
    };
    // all points of the group generated by the found ones, as specializations
    let mut elems: Vec<Option<(u64, u64)>> = vec![None];
    for s in &points {
        let v = spec(s);
        if !elems.contains(&v) {
            elems.push(v);
        }
    }
    // close under addition (the found set should already be closed)
    loop {
        let mut added = false;
        let snapshot = elems.clone();
        for &u in &snapshot {
            for &v in &snapshot {
                let w = grp.add(u, v);
                if !elems.contains(&w) {
                    elems.push(w);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let order = elems.len() as u64;
    let ord_of = |p: Option<(u64, u64)>| grp.point_order(p, order);
    // invariant factors and generators, by brute force over the small group
    let mut by_order: Vec<(u64, usize)> = (1..elems.len()).map(|i| (ord_of(elems[i]), i)).collect();
    by_order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let (n2, g2) = by_order[0];
    let mut gens = vec![(n2, g2)];
    if n2 != order {
        let n1 = order / n2;
        let cyc2: Vec<Option<(u64, u64)>> = (0..n2).map(|k| grp.mul(k, elems[g2])).collect();
        let g1 = (1..elems.len())
            .find(|&i| {
                ord_of(elems[i]) == n1 && (1..n1).all(|k| !cyc2.contains(&grp.mul(k, elems[i])))
            })
            .expect("abelian group of rank two");
        gens.insert(0, (n1, g1));
    }
    let cyclic_orders: Vec<u64> = gens.iter().map(|g| g.0).collect();
    let combo = |c: &[u64]| -> Option<(u64, u64)> {
        gens.iter().zip(c).fold(None, |acc, (&(_, gi), &ci)| grp.add(acc, grp.mul(ci, elems[gi])))
    };
    let module_elems = FrobeniusModule::with_trivial_action(cyclic_orders.clone()).elements();
    let dlog = |p: Option<(u64, u64)>| -> Vec<u64> {
        module_elems.iter().find(|c| combo(c) == p).cloned().expect("element of the group")
    };
    let witness = |i: usize| -> Section {
        points.iter().find(|s| spec(s) == elems[i]).cloned().expect("generators are found sections")
    };
    let generators: Vec<Section> = gens.iter().map(|&(_, i)| witness(i)).collect();
    let q = e.field().order();
    let k = &model.k;
    // the q-power map on coefficients is the arithmetic Frobenius; store its
    // inverse, the geometric one
    let arith: Vec<Vec<u64>> = generators
        .iter()
        .map(|s| {
            let fx = s.x.map_coeffs(k, |c| k.pow(c, q as u128));
            let fy = s.y.map_coeffs(k, |c| k.pow(c, q as u128));
            dlog(spec(&Section { x: fx, y: fy }))
        })
        .collect();
    let sigma = FrobeniusModule { cyclic_orders: cyclic_orders.clone(), frob: arith };
    let unit = |i: usize| -> Vec<u64> { (0..cyclic_orders.len()).map(|j| (i == j) as u64).collect() };
    let frob = (0..cyclic_orders.len())
        .map(|i| module_elems.iter().find(|a| sigma.apply_frob(a) == unit(i)).cloned().expect("automorphism"))
        .collect();
    Ok(LevelTorsion { m, module: FrobeniusModule { cyclic_orders, frob }, generators, points, upper_bound: bound })
}

/// Geometric torsion, searched over `F_{q^m}(t)` for `m = 1..=m_max`. Exact
/// when every level's verified order meets its upper bound.
pub fn geometric_torsion(e: &WeierstrassCurve, cfg: &TorsionConfig) -> Result<TorsionCertificate, MwError> {
    // the stabilized level: largest verified group, ties going to the larger field
    let mut best: Option<LevelTorsion> = None;
    let mut capped = false;
    for m in 1..=cfg.m_max {
        let lv = match level_torsion(e, m, cfg) {
            Ok(lv) => lv,
            Err(MwError::CapExceeded(_)) => {
                capped = true;
                continue;
            }
            Err(err) => return Err(err),
        };
        if best.as_ref().is_none_or(|b| lv.module.order() >= b.module.order()) {
            best = Some(lv);
        }
    }
    let best = best.ok_or(MwError::NoGoodPlaces)?;
    let best_exact = best.module.order() == best.upper_bound;
    Ok(TorsionCertificate {
        upper_bound: best.upper_bound,
        verified_lower: best.module,
        generators: best.generators,
        points: best.points,
        m: best.m,
        status: if !capped && best_exact { CertificateStatus::Exact } else { CertificateStatus::Interval },
    })
}

/// `T_U`; only smooth `E_U -> U` is supported, where it equals `T`.
pub fn torsion_restricted(e: &WeierstrassCurve, removed: &[Place], cert: &TorsionCertificate) -> Result<FrobeniusModule, MwError> {
    for d in tate::all_bad_local_data(e)? {
        if !removed.contains(&d.place) {
            return Err(MwError::UnsupportedU);
        }
    }
    Ok(cert.verified_lower.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre(f: &Gf) -> WeierstrassCurve {
        let z = Poly::zero(f);
        WeierstrassCurve::from_polys(f, [z.clone(), Poly::from_ints(f, &[-1, -1]), z.clone(), Poly::x(f), z]).unwrap()
    }

    #[test]
    fn twisted_examples() {
        let m = FrobeniusModule::with_trivial_action(vec![2, 2]);
        assert_eq!(twisted_invariants(&m, 1, 5).unwrap(), 4);
        let m = FrobeniusModule::with_trivial_action(vec![3]);
        assert_eq!(twisted_invariants(&m, 1, 5).unwrap(), 1);
        assert_eq!(twisted_invariants(&FrobeniusModule::trivial(), 7, 5).unwrap(), 1);
        // j = 0: fixed points; negation on Z/3 fixes only 0
        let m = FrobeniusModule { cyclic_orders: vec![3], frob: vec![vec![2]] };
        assert_eq!(twisted_invariants(&m, 0, 7).unwrap(), 1);
        assert_eq!(twisted_invariants(&m, 1, 5).unwrap(), 3);
        let m = FrobeniusModule::with_trivial_action(vec![5]);
        assert_eq!(twisted_invariants(&m, 1, 5), Err(MwError::PPartPresent));
    }

    #[test]
    fn division_polynomial_roots_are_torsion() {
        let f = Gf::prime(13).unwrap();
        let (a, b) = (2u64, 5u64);
        let g = CurveGroup::new(&f, [0, 0, 0, a, b]);
        for n in 2..=7u64 {
            let roots = torsion_x_roots(&f, a, b, n);
            for p in g.points().into_iter().flatten() {
                let killed = g.mul(n, Some(p)).is_none();
                assert_eq!(killed, roots.contains(&p.0), "n = {} p = {:?}", n, p);
            }
        }
    }

    #[test]
    fn sqrt_round_trip() {
        let f = Gf::prime(7).unwrap();
        let y = Poly::from_ints(&f, &[3, 0, 2, 5]);
        let s = poly_sqrt(&y.mul(&y)).unwrap();
        assert!(s == y || s == y.neg());
        assert!(poly_sqrt(&Poly::from_ints(&f, &[3, 0, 1])).is_none());
    }

    #[test]
    fn legendre_two_torsion() {
        let f = Gf::prime(5).unwrap();
        let e = legendre(&f);
        let mut xs: Vec<Poly> = torsion_sections(&e, 2, 1, 1).unwrap().into_iter().map(|s| s.x).collect();
        xs.sort();
        // the short model is a twist-free translate: three sections, x linear in t
        assert_eq!(xs.len(), 3);
        assert!(torsion_sections(&e, 1, 1, 1).unwrap().is_empty());
        let b = torsion_upper_bound(&e, 1, 24).unwrap();
        assert_eq!(b % 4, 0);
        let cert = geometric_torsion(&e, &TorsionConfig::default()).unwrap();
        assert_eq!(cert.verified_lower.cyclic_orders, vec![2, 2]);
        assert_eq!(cert.verified_lower, FrobeniusModule::with_trivial_action(vec![2, 2]));
        assert_eq!(cert.status, CertificateStatus::Exact);
        assert_eq!(twisted_invariants(&cert.verified_lower, 1, 5).unwrap(), 4);
    }

    #[test]
    fn nontrivial_frobenius() {
        // y^2 = (x - t)(x^2 - 2): 2-torsion x = t rational, the other two over F_25
        let f = Gf::prime(5).unwrap();
        // x^3 - t x^2 - 2x + 2t: a2 = -t, a4 = -2, a6 = 2t
        let z = Poly::zero(&f);
        let e = WeierstrassCurve::from_polys(
            &f,
            [z.clone(), Poly::from_ints(&f, &[0, -1]), z, Poly::from_ints(&f, &[-2]), Poly::from_ints(&f, &[0, 2])],
        )
        .unwrap();
        let cert = geometric_torsion(&e, &TorsionConfig { m_max: 2, ..Default::default() }).unwrap();
        assert_eq!(cert.verified_lower.order(), 4);
        assert_eq!(cert.m, 2);
        assert_ne!(cert.verified_lower, FrobeniusModule::with_trivial_action(vec![2, 2]));
        assert_eq!(twisted_invariants(&cert.verified_lower, 0, 5).unwrap(), 2);
    }
}
