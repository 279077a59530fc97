//! Point counting over finite fields: exhaustive oracles, group structure,
//! singular cubics, trace recursion and a precomputed trace table.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::gf::{Gf, GfError, Poly};

/// Default cap on the field size for exhaustive enumeration.
pub const DEFAULT_MAX_Q: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountError {
    #[error("field of order {q} exceeds the cap {cap}")]
    FieldTooLarge { q: u64, cap: u64 },
    #[error("the Weierstrass equation is singular")]
    SingularInput,
    #[error("the Weierstrass equation is nonsingular")]
    NonsingularInput,
    #[error("trace table entry is not integral")]
    InexactTable,
    #[error(transparent)]
    Field(#[from] GfError),
}

/// `Z/n1 x Z/n2` with `n1 | n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupStructure {
    pub n1: u64,
    pub n2: u64,
}

impl GroupStructure {
    pub fn order(&self) -> u64 {
        self.n1 * self.n2
    }
}

/// A polynomial `sum c x^i y^j` over a finite field.
#[derive(Debug, Clone)]
pub struct Bivariate {
    field: Gf,
    terms: Vec<(u32, u32, u64)>,
}

impl Bivariate {
    /// Terms `(i, j, c)` meaning `c x^i y^j`.
    pub fn new(field: &Gf, terms: Vec<(u32, u32, u64)>) -> Bivariate {
        Bivariate { field: field.clone(), terms }
    }

    /// `y^2 + a1 xy + a3 y - x^3 - a2 x^2 - a4 x - a6`.
    pub fn weierstrass(field: &Gf, a: [u64; 5]) -> Bivariate {
        let [a1, a2, a3, a4, a6] = a;
        let f = field;
        Bivariate::new(
            f,
            vec![
                (0, 2, 1),
                (1, 1, a1),
                (0, 1, a3),
                (3, 0, f.neg(1)),
                (2, 0, f.neg(a2)),
                (1, 0, f.neg(a4)),
                (0, 0, f.neg(a6)),
            ],
        )
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn eval(&self, x: u64, y: u64) -> u64 {
        let f = &self.field;
        self.terms.iter().fold(0, |acc, &(i, j, c)| {
            f.add(acc, f.mul(c, f.mul(f.pow(x, i as u128), f.pow(y, j as u128))))
        })
    }

    /// The specialization at `x` as a polynomial in `y`.
    pub fn y_poly(&self, x: u64) -> Poly {
        let f = &self.field;
        let deg = self.terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
        let mut c = vec![0u64; deg + 1];
        for &(i, j, a) in &self.terms {
            c[j as usize] = f.add(c[j as usize], f.mul(a, f.pow(x, i as u128)));
        }
        Poly::new(f, c)
    }
}

fn check_cap(field: &Gf, cap: u64) -> Result<(), CountError> {
    if field.order() > cap {
        return Err(CountError::FieldTooLarge { q: field.order(), cap });
    }
    Ok(())
}

fn count_y_roots(f: &Gf, py: &Poly) -> u64 {
    match py.degree() {
        None => f.order(),
        Some(0) => 0,
        Some(1) => 1,
        Some(2) if f.characteristic() != 2 => {
            let (c, b, a) = (py.coeff(0), py.coeff(1), py.coeff(2));
            let disc = f.sub(f.mul(b, b), f.mul(f.from_int(4), f.mul(a, c)));
            (1 + f.chi(disc)) as u64
        }
        _ => py.roots().len() as u64,
    }
}

/// Number of affine solutions, by enumeration over `x`.
pub fn count_affine(eq: &Bivariate, cap: u64) -> Result<u64, CountError> {
    let f = &eq.field;
    check_cap(f, cap)?;
    Ok(f.elements().map(|x| count_y_roots(f, &eq.y_poly(x))).sum())
}

type Point = Option<(u64, u64)>;

/// Group law on a Weierstrass cubic with coefficients in `F_Q`.
#[derive(Clone)]
pub struct CurveGroup {
    f: Gf,
    a: [u64; 5],
}

impl CurveGroup {
    pub fn new(field: &Gf, a: [u64; 5]) -> CurveGroup {
        CurveGroup { f: field.clone(), a }
    }

    pub fn neg(&self, p: Point) -> Point {
        let f = &self.f;
        let [a1, _, a3, _, _] = self.a;
        p.map(|(x, y)| (x, f.sub(f.neg(y), f.add(f.mul(a1, x), a3))))
    }

    pub fn add(&self, p: Point, q: Point) -> Point {
        let f = &self.f;
        let [a1, a2, a3, a4, _] = self.a;
        let (x1, y1) = match p {
            None => return q,
            Some(v) => v,
        };
        let (x2, y2) = match q {
            None => return p,
            Some(v) => v,
        };
        let lambda = if x1 == x2 {
            if f.add(f.add(y1, y2), f.add(f.mul(a1, x2), a3)) == 0 {
                return None;
            }
            let three = f.from_int(3);
            let two = f.from_int(2);
            let num = f.sub(
                f.add(f.add(f.mul(three, f.mul(x1, x1)), f.mul(f.mul(two, a2), x1)), a4),
                f.mul(a1, y1),
            );
            let den = f.add(f.add(f.mul(two, y1), f.mul(a1, x1)), a3);
            f.div(num, den).expect("nonzero tangent denominator")
        } else {
            let den = f.sub(x2, x1);
            f.div(f.sub(y2, y1), den).expect("distinct x")
        };
        let nu = f.sub(y1, f.mul(lambda, x1));
        let x3 = f.sub(f.sub(f.sub(f.add(f.mul(lambda, lambda), f.mul(a1, lambda)), a2), x1), x2);
        let y3 = f.sub(f.sub(f.neg(f.mul(f.add(lambda, a1), x3)), nu), a3);
        Some((x3, y3))
    }

    pub fn mul(&self, k: u64, p: Point) -> Point {
        let mut acc = None;
        let mut base = p;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn on_curve(&self, p: Point) -> bool {
        match p {
            None => true,
            Some((x, y)) => Bivariate::weierstrass(&self.f, self.a).eval(x, y) == 0,
        }
    }

    /// All rational points, the point at infinity first.
    pub fn points(&self) -> Vec<Point> {
        let f = &self.f;
        let eq = Bivariate::weierstrass(f, self.a);
        let mut out = vec![None];
        for x in f.elements() {
            for y in eq.y_poly(x).roots() {
                out.push(Some((x, y)));
            }
        }
        out
    }

    /// Order of a point in a group of order `n`.
    pub fn point_order(&self, p: Point, n: u64) -> u64 {
        let mut ord = n;
        for l in crate::gf::prime_factors(n) {
            while ord.is_multiple_of(l) && self.mul(ord / l, p).is_none() {
                ord /= l;
            }
        }
        ord
    }
}

fn discriminant(f: &Gf, a: [u64; 5]) -> u64 {
    let [a1, a2, a3, a4, a6] = a;
    let i = |k: i64| f.from_int(k);
    let b2 = f.add(f.mul(a1, a1), f.mul(i(4), a2));
    let b4 = f.add(f.mul(i(2), a4), f.mul(a1, a3));
    let b6 = f.add(f.mul(a3, a3), f.mul(i(4), a6));
    let b8 = {
        let t1 = f.mul(f.mul(a1, a1), a6);
        let t2 = f.mul(i(4), f.mul(a2, a6));
        let t3 = f.mul(a1, f.mul(a3, a4));
        let t4 = f.mul(a2, f.mul(a3, a3));
        let t5 = f.mul(a4, a4);
        f.sub(f.add(f.sub(f.add(t1, t2), t3), t4), t5)
    };
    let t1 = f.neg(f.mul(f.mul(b2, b2), b8));
    let t2 = f.mul(i(8), f.mul(b4, f.mul(b4, b4)));
    let t3 = f.mul(i(27), f.mul(b6, b6));
    let t4 = f.mul(i(9), f.mul(b2, f.mul(b4, b6)));
    f.add(f.sub(f.sub(t1, t2), t3), t4)
}

/// Order and structure of `E(F_Q)` by exhaustive group computation.
pub fn count_elliptic(field: &Gf, a: [u64; 5]) -> Result<(u64, GroupStructure), CountError> {
    check_cap(field, DEFAULT_MAX_Q)?;
    if discriminant(field, a) == 0 {
        return Err(CountError::SingularInput);
    }
    let g = CurveGroup::new(field, a);
    let pts = g.points();
    let n = pts.len() as u64;
    let q = field.order() as i128;
    let trace = q + 1 - n as i128;
    assert!(trace * trace <= 4 * q, "Hasse bound violated");
    let mut exponent = 1u64;
    for &p in &pts {
        let o = g.point_order(p, n);
        exponent = num_integer::lcm(exponent, o);
        if exponent == n {
            break;
        }
    }
    Ok((n, GroupStructure { n1: n / exponent, n2: exponent }))
}

/// `#E(F_Q)` without group structure, for any characteristic.
pub fn count_points(field: &Gf, a: [u64; 5]) -> Result<u64, CountError> {
    check_cap(field, DEFAULT_MAX_Q)?;
    let f = field;
    let [a1, a2, a3, a4, a6] = a;
    if f.characteristic() == 2 {
        return Ok(count_affine(&Bivariate::weierstrass(f, a), DEFAULT_MAX_Q)? + 1);
    }
    let four = f.from_int(4);
    let mut n = 1u64;
    for x in f.elements() {
        let b = f.add(f.mul(a1, x), a3);
        let c = f.add(f.mul(f.add(f.mul(f.add(x, a2), x), a4), x), a6);
        let disc = f.add(f.mul(b, b), f.mul(four, c));
        n += (1 + f.chi(disc)) as u64;
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularKind {
    NodeSplit,
    NodeNonsplit,
    Cusp,
}

/// Smooth-locus count and singularity type of a singular Weierstrass cubic.
pub fn count_singular_weierstrass(field: &Gf, a: [u64; 5]) -> Result<(u64, SingularKind), CountError> {
    check_cap(field, DEFAULT_MAX_Q)?;
    let f = field;
    if discriminant(f, a) != 0 {
        return Err(CountError::NonsingularInput);
    }
    let [a1, a2, a3, a4, _] = a;
    let g = CurveGroup::new(f, a);
    let pts = g.points();
    let two = f.from_int(2);
    let three = f.from_int(3);
    let is_singular = |x: u64, y: u64| {
        let fy = f.add(f.add(f.mul(two, y), f.mul(a1, x)), a3);
        let fx = f.sub(
            f.mul(a1, y),
            f.add(f.add(f.mul(three, f.mul(x, x)), f.mul(f.mul(two, a2), x)), a4),
        );
        fx == 0 && fy == 0
    };
    let (x0, y0) = pts
        .iter()
        .flatten()
        .copied()
        .find(|&(x, y)| is_singular(x, y))
        .expect("a singular cubic has a rational singular point");
    // tangent cone at (x0, y0): Y^2 + a1 Y X - (3 x0 + a2) X^2 after translation
    let c2 = f.add(f.mul(three, x0), a2);
    let cone = Poly::new(f, vec![f.neg(c2), a1, 1]);
    let kind = match cone.roots().len() {
        2 => SingularKind::NodeSplit,
        0 => SingularKind::NodeNonsplit,
        _ => SingularKind::Cusp,
    };
    let _ = y0;
    Ok((pts.len() as u64 - 1, kind))
}

/// `alpha^k + beta^k` where `alpha, beta` are the roots of `1 - a T + Q T^2`.
pub fn trace_power(a: i128, q: i128, k: u32) -> i128 {
    let (mut s0, mut s1) = (2i128, a);
    if k == 0 {
        return 2;
    }
    for _ in 1..k {
        let s2 = a * s1 - q * s0;
        s0 = s1;
        s1 = s2;
    }
    s1
}

/// `#E(F_{Q^k})` from the trace over `F_Q`.
pub fn count_over_extension(a: i128, q: i128, k: u32) -> i128 {
    q.pow(k) + 1 - trace_power(a, q, k)
}

/// Exhaustive trace of `y^2 = x^3 + A x + B`.
pub fn short_trace_exhaustive(f: &Gf, a: u64, b: u64) -> i64 {
    let mut s = 0i64;
    for x in f.elements() {
        let y = f.add(f.mul(f.add(f.mul(x, x), a), x), b);
        s += f.chi(y) as i64;
    }
    -s
}

/// Work budget (in complex multiply-adds) allowed for building a table.
pub const TABLE_BUDGET: u64 = 1 << 33;

/// Exact traces of all short curves `y^2 = x^3 + A x + B` over one field.
///
/// `A` is reduced modulo fourth powers (scaling `(A, B) -> (u^4 A, u^6 B)`);
/// one table per class, each computed as a convolution of the quadratic
/// character with the value distribution of `x^3 + A x`.
pub struct TraceTable {
    q: u64,
    e: u64,
    inv4e: u64,
    zero: Vec<i16>,
    classes: Vec<Vec<i16>>,
}

impl TraceTable {
    /// Fetch or build the table for `field`; `None` if the field is not
    /// eligible (no log tables, characteristic below 5, or too large).
    pub fn get(field: &Gf) -> Option<&TraceTable> {
        if !Self::eligible(field) {
            return None;
        }
        field
            .trace_cache()
            .get_or_try_init(|| TraceTable::build(field).map(Box::new))
            .ok()
    }

    pub fn eligible(field: &Gf) -> bool {
        let p = field.characteristic();
        field.has_tables()
            && p >= 5
            && field.order().saturating_mul(p).saturating_mul(field.degree() as u64) * 12 <= TABLE_BUDGET
    }

    fn build(field: &Gf) -> Result<TraceTable, CountError> {
        let q = field.order();
        let e = num_integer::gcd(4, q - 1);
        let dft = Dft::new(field);
        let n = q as usize;
        // transform of the quadratic character
        let mut chi_re: Vec<f64> = field.elements().map(|y| field.chi(y) as f64).collect();
        let mut chi_im = vec![0f64; n];
        dft.run(&mut chi_re, &mut chi_im, false);
        let round = |v: &[f64]| -> Result<Vec<i16>, CountError> {
            let scale = 1.0 / q as f64;
            v.iter()
                .map(|&v| {
                    let x = -v * scale;
                    let r = libm::round(x);
                    if libm::fabs(x - r) > 0.25 {
                        Err(CountError::InexactTable)
                    } else {
                        Ok(r as i16)
                    }
                })
                .collect()
        };
        // two real convolutions per complex transform: the value distribution
        // of x^3 + a x in the real part, of x^3 + a' x in the imaginary part
        let coeffs: Vec<u64> = core::iter::once(0).chain((0..e).map(|r| field.exp(r).expect("tables"))).collect();
        let mut tables = Vec::with_capacity(coeffs.len());
        for pair in coeffs.chunks(2) {
            let mut re = vec![0f64; n];
            let mut im = vec![0f64; n];
            // x = g^i, so -(x^3 + a x) has log i + log(x^2 + a) + (q - 1) / 2
            let order = (q - 1) as u32;
            let half = order / 2;
            let logs: Vec<Option<u32>> = pair.iter().map(|&a| field.log(a)).collect();
            re[0] += 1.0;
            if pair.len() == 2 {
                im[0] += 1.0;
            }
            for i in 0..order {
                let l2 = if 2 * i >= order { 2 * i - order } else { 2 * i };
                for (h, &la) in [&mut re, &mut im].into_iter().zip(&logs) {
                    let idx = match field.log_add(Some(l2), la) {
                        None => 0,
                        Some(s) => field.exp(i as u64 + s as u64 + half as u64).expect("tables"),
                    };
                    h[idx as usize] += 1.0;
                }
            }
            dft.run(&mut re, &mut im, false);
            for i in 0..n {
                let (a, b) = (re[i], im[i]);
                re[i] = a * chi_re[i] - b * chi_im[i];
                im[i] = a * chi_im[i] + b * chi_re[i];
            }
            dft.run(&mut re, &mut im, true);
            tables.push(round(&re)?);
            if pair.len() == 2 {
                tables.push(round(&im)?);
            }
        }
        let zero = tables.remove(0);
        let classes = tables;
        let m = (q - 1) / e;
        let inv4e = if m == 1 { 0 } else { mod_inverse(4 / e, m) };
        Ok(TraceTable { q, e, inv4e, zero, classes })
    }

    /// Trace `Q + 1 - #E(F_Q)` of `y^2 = x^3 + A x + B`; `A, B` must not
    /// give a singular curve.
    #[inline]
    pub fn trace(&self, field: &Gf, a: u64, b: u64) -> i64 {
        self.trace_logs(field, field.log(a), field.log(b))
    }

    /// As `trace`, with `A` and `B` given by discrete logs (`None` for zero).
    #[inline]
    pub fn trace_logs(&self, field: &Gf, la: Option<u32>, lb: Option<u32>) -> i64 {
        let k = match la {
            None => return self.zero[lb.map_or(0, |l| field.exp(l as u64).expect("tables")) as usize] as i64,
            Some(k) => k as u64,
        };
        // e divides 4
        let r = k & (self.e - 1);
        let mm = k >> self.e.trailing_zeros();
        let m = (self.q - 1) / self.e;
        let j = if m == 1 { 0 } else { mm * self.inv4e % m };
        // u = g^j, B' = B u^-6
        let b2 = match lb {
            None => 0,
            Some(lb) => {
                let order = self.q - 1;
                let mut shift = 6 * j;
                while shift >= order {
                    shift -= order;
                }
                let mut l = lb as u64 + order - shift;
                if l >= order {
                    l -= order;
                }
                field.exp(l).expect("tables")
            }
        };
        self.classes[r as usize][b2 as usize] as i64
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// Multi-dimensional DFT over the additive group `(Z/p)^n` of a field,
/// indexed by raw element indices.
struct Dft {
    p: usize,
    n: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Dft {
    fn new(field: &Gf) -> Dft {
        let p = field.characteristic() as usize;
        let (cos, sin) = (0..p)
            .map(|k| {
                let th = 2.0 * core::f64::consts::PI * k as f64 / p as f64;
                (libm::cos(th), libm::sin(th))
            })
            .unzip();
        Dft { p, n: field.degree() as usize, cos, sin }
    }

    // Each pass transforms the top base-p digit and rotates it to the bottom,
    // so rows are always contiguous and after n passes the order is restored.
    fn run(&self, re: &mut Vec<f64>, im: &mut Vec<f64>, inverse: bool) {
        const TILE: usize = 256;
        let p = self.p;
        let h = p / 2;
        let total = re.len();
        let rows = total / p;
        let sigma = if inverse { 1.0 } else { -1.0 };
        let mut out_re = vec![0f64; total];
        let mut out_im = vec![0f64; total];
        // sums and differences of rows j and p - j
        let mut sr = vec![0f64; h * TILE];
        let mut si = vec![0f64; h * TILE];
        let mut dr = vec![0f64; h * TILE];
        let mut di = vec![0f64; h * TILE];
        let [mut ar, mut ai, mut br, mut bi] = [[0f64; TILE]; 4];
        for _ in 0..self.n {
            for m0 in (0..rows).step_by(TILE) {
                let w = TILE.min(rows - m0);
                let row = |j: usize| j * rows + m0..j * rows + m0 + w;
                for j in 1..=h {
                    let (x, y) = (row(j), row(p - j));
                    let t = (j - 1) * TILE..(j - 1) * TILE + w;
                    for (((s, d), a), b) in sr[t.clone()].iter_mut().zip(&mut dr[t.clone()]).zip(&re[x.clone()]).zip(&re[y.clone()]) {
                        *s = a + b;
                        *d = a - b;
                    }
                    for (((s, d), a), b) in si[t.clone()].iter_mut().zip(&mut di[t]).zip(&im[x]).zip(&im[y]) {
                        *s = a + b;
                        *d = a - b;
                    }
                }
                let x0 = row(0);
                ar[..w].copy_from_slice(&re[x0.clone()]);
                ai[..w].copy_from_slice(&im[x0.clone()]);
                for j in 0..h {
                    let t = j * TILE..j * TILE + w;
                    for (a, v) in ar[..w].iter_mut().zip(&sr[t.clone()]) {
                        *a += v;
                    }
                    for (a, v) in ai[..w].iter_mut().zip(&si[t]) {
                        *a += v;
                    }
                }
                for o in 0..w {
                    out_re[(m0 + o) * p] = ar[o];
                    out_im[(m0 + o) * p] = ai[o];
                }
                for k in 1..=h {
                    ar[..w].copy_from_slice(&re[x0.clone()]);
                    ai[..w].copy_from_slice(&im[x0.clone()]);
                    br[..w].fill(0.0);
                    bi[..w].fill(0.0);
                    for j in 1..=h {
                        let idx = j * k % p;
                        let (c, s) = (self.cos[idx], self.sin[idx]);
                        let t = (j - 1) * TILE..(j - 1) * TILE + w;
                        for (a, v) in ar[..w].iter_mut().zip(&sr[t.clone()]) {
                            *a += c * v;
                        }
                        for (a, v) in ai[..w].iter_mut().zip(&si[t.clone()]) {
                            *a += c * v;
                        }
                        for (b, v) in br[..w].iter_mut().zip(&dr[t.clone()]) {
                            *b += s * v;
                        }
                        for (b, v) in bi[..w].iter_mut().zip(&di[t]) {
                            *b += s * v;
                        }
                    }
                    // X_k = A + i sigma B, X_{p-k} = A - i sigma B
                    for o in 0..w {
                        let base = (m0 + o) * p;
                        out_re[base + k] = ar[o] - sigma * bi[o];
                        out_im[base + k] = ai[o] + sigma * br[o];
                        out_re[base + p - k] = ar[o] + sigma * bi[o];
                        out_im[base + p - k] = ai[o] - sigma * br[o];
                    }
                }
            }
            core::mem::swap(re, &mut out_re);
            core::mem::swap(im, &mut out_im);
        }
    }
}

/// Trace of `y^2 = x^3 + A x + B` over `field`, from the table when one is
/// available and by enumeration otherwise.
pub fn short_trace(field: &Gf, a: u64, b: u64) -> Result<i64, CountError> {
    if let Some(t) = TraceTable::get(field) {
        return Ok(t.trace(field, a, b));
    }
    check_cap(field, DEFAULT_MAX_Q)?;
    Ok(short_trace_exhaustive(field, a, b))
}

/// Fields up to this size get a trace table on first use.
const SMALL_TABLE: u64 = 1 << 20;

/// As `short_trace`, for callers that need only a few traces: a table is
/// used if one is already cached, and built only for fields of at most
/// `2^20` elements.
pub fn short_trace_few(field: &Gf, a: u64, b: u64) -> Result<i64, CountError> {
    if let Some(t) = field.trace_cache().get() {
        return Ok(t.trace(field, a, b));
    }
    if field.order() <= SMALL_TABLE {
        return short_trace(field, a, b);
    }
    check_cap(field, DEFAULT_MAX_Q)?;
    Ok(short_trace_exhaustive(field, a, b))
}
