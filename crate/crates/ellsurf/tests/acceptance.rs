//! Acceptance run over the validation corpus. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ellsurf::corpus::{self, Member};
use ellsurf::selftest::LEGENDRE_F5;
use ellsurf::spec::CurveSpec;
use ellsurf_core::count;
use ellsurf_core::funcfield::{self, RationalFunction};
use ellsurf_core::gf::{Gf, Poly};
use ellsurf_core::lfun::{self, SurfaceData};
use ellsurf_core::mw::{CertificateStatus, TorsionConfig};
use ellsurf_core::predict::{self, Analysis, Quantity, Verdict};
use ellsurf_core::tate::{LocalData, ReductionClass};
use num_bigint::BigInt;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const CORPUS_TIME_LIMIT: Duration = Duration::from_secs(60);
const LEGENDRE_TIME_LIMIT: Duration = Duration::from_secs(5);
const ROOT_TOLERANCE: f64 = 1e-6;
const MAX_DEFERRED_FRACTION: f64 = 0.10;
const FIELD_TRIPLES: usize = 10_000;
const FACTORIZATIONS: usize = 1_000;
const PRODUCT_FORMULAS: usize = 100;
const ORBIT_SAMPLE: usize = 40;
const WEIGHTS: [u32; 2] = [3, 4];

#[derive(Default)]
struct Report {
    lines: Vec<(u32, String)>,
    ok: bool,
}

impl Report {
    fn line(&mut self, n: u32, name: &str, pass: bool, detail: String) {
        self.ok &= pass;
        self.lines.push((n, format!("{} criterion {} ({}): {}", if pass { "PASS" } else { "FAIL" }, n, name, detail)));
    }
}

fn label(m: &Member) -> String {
    m.spec().to_canonical()
}

fn surface(m: &Member) -> SurfaceData {
    SurfaceData::new(&m.spec().curve().expect("corpus curve")).expect("local data")
}

fn pipelines(corpus: &[Member], r: &mut Report) {
    let mut mismatches = Vec::new();
    let mut degree_fail = Vec::new();
    let mut fe_fail = Vec::new();
    let mut worst_dev = 0f64;
    let mut max_cond = 0;
    let mut timed = Duration::ZERO;
    let mut ls = Vec::with_capacity(corpus.len());
    for m in corpus {
        let t = Instant::now();
        let sd = surface(m);
        let eu = lfun::euler_product(&sd).expect("euler product");
        let lef = lfun::l_from_lefschetz(&sd, eu.l.degree());
        timed += t.elapsed();
        if !matches!(&lef, Ok(l) if l.coeffs == eu.l.coeffs) {
            mismatches.push(label(m));
        }
        max_cond = max_cond.max(sd.conductor_degree());
        if eu.l.degree() as u32 + 4 != sd.conductor_degree() || eu.guard.iter().any(|&g| g != 0) {
            degree_fail.push(label(m));
        }
        let dev = lfun::root_magnitude_deviation(&eu.l);
        worst_dev = worst_dev.max(dev);
        if lfun::functional_equation_sign(&eu.l).is_none() || dev > ROOT_TOLERANCE {
            fe_fail.push(label(m));
        }
        ls.push(eu.l.coeffs);
    }
    // invariants are constant on orbits, so a sample of non-representatives must agree
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b17);
    let reps: Vec<usize> = (0..corpus.len()).filter(|&i| corpus[i].orbit_size > 1).collect();
    let mut orbit_fail = Vec::new();
    for _ in 0..ORBIT_SAMPLE {
        let i = reps[rng.next_u64() as usize % reps.len()];
        let orbit = corpus::orbit(&corpus[i]);
        let other = &orbit[rng.next_u64() as usize % orbit.len()];
        let l = lfun::euler_product(&surface(other)).expect("euler product").l;
        if l.coeffs != ls[i] {
            orbit_fail.push(label(other));
        }
    }
    r.line(
        1,
        "dual-pipeline agreement",
        mismatches.is_empty() && orbit_fail.is_empty() && timed < CORPUS_TIME_LIMIT,
        format!(
            "{} curves, max conductor degree {}, {} mismatches, {}/{} orbit samples agree, {:.1}s (limit {}s){}",
            corpus.len(),
            max_cond,
            mismatches.len(),
            ORBIT_SAMPLE - orbit_fail.len(),
            ORBIT_SAMPLE,
            timed.as_secs_f64(),
            CORPUS_TIME_LIMIT.as_secs(),
            first(&mismatches.iter().chain(&orbit_fail).cloned().collect::<Vec<_>>())
        ),
    );
    r.line(2, "degree and guard", degree_fail.is_empty(), format!("{} failures{}", degree_fail.len(), first(&degree_fail)));
    r.line(
        3,
        "functional equation",
        fe_fail.is_empty(),
        format!("{} failures, worst root deviation {:e} (tolerance {:e}){}", fe_fail.len(), worst_dev, ROOT_TOLERANCE, first(&fe_fail)),
    );
}

fn first(v: &[String]) -> String {
    v.first().map_or(String::new(), |s| format!("; first {}", s))
}

fn legendre(r: &mut Report) {
    let t = Instant::now();
    let e = CurveSpec::parse(LEGENDRE_F5).and_then(|s| s.curve()).expect("legendre spec");
    let (a, rep) = ellsurf::run(&e, &[], &[]).expect("legendre run");
    let elapsed = t.elapsed();
    let types: Vec<(String, String)> = a.bad().iter().map(|d| (d.kodaira.symbol(), d.place.label())).collect();
    let want = [("I2", "t"), ("I2", "t+4"), ("I2*", "inf")];
    let types_ok = types.len() == 3 && types.iter().zip(want).all(|((k, v), (wk, wv))| k == wk && v == wv);
    let tors = &a.torsion.verified_lower;
    let two_two = tors.cyclic_orders == [2, 2] && tors.frob == [vec![1, 0], vec![0, 1]];
    let k1 = match rep.slot("k1.kernel").map(|s| &s.quantity) {
        Some(Quantity::Order(v)) => v.exact().cloned(),
        _ => None,
    };
    let exact = a.torsion.status == CertificateStatus::Exact;
    let k1_ok = match &k1 {
        Some(v) if exact && two_two => *v == BigInt::from(64).into(),
        Some(v) => v.is_integer() && *v > BigInt::from(0).into(),
        None => false,
    };
    let pass = types_ok && a.surface.conductor_degree() == 4 && a.l.is_one() && two_two && k1_ok && elapsed < LEGENDRE_TIME_LIMIT;
    r.line(
        4,
        "Legendre benchmark",
        pass,
        format!(
            "types {:?}, conductor {}, L = {:?}, torsion {:?} {:?}, k1 kernel {}, {:.2}s (limit {}s)",
            types.iter().map(|(k, v)| format!("{}@{}", k, v)).collect::<Vec<_>>(),
            a.surface.conductor_degree(),
            a.l.coeffs.iter().map(BigInt::to_string).collect::<Vec<_>>(),
            tors.cyclic_orders,
            a.torsion.status,
            k1.map_or("none".into(), |v| v.to_string()),
            elapsed.as_secs_f64(),
            LEGENDRE_TIME_LIMIT.as_secs()
        ),
    );
}

fn vanishing_increments(a: &Analysis) -> bool {
    let bad = a.bad();
    let mut removed: Vec<LocalData> = Vec::new();
    let mut candidates: Vec<LocalData> = bad.iter().map(|d| (*d).clone()).collect();
    if let Some(v) = predict::extra_good_place(a) {
        candidates.push(lfun::local_data_at(&a.curve, &a.surface, &v).expect("local data"));
    }
    let q = a.q();
    let mut prev = 0;
    for d in candidates {
        let split = d.reduction_class == ReductionClass::SplitMultiplicative;
        removed.push(d);
        let refs: Vec<&LocalData> = removed.iter().collect();
        let now = lfun::h1_vanishing_order(&refs, q);
        if now != prev + split as u32 {
            return false;
        }
        prev = now;
    }
    true
}

fn orders_and_local(corpus: &[Member], r: &mut Report) {
    let cfg = TorsionConfig::default();
    let mut int_fail = Vec::new();
    let mut errors = Vec::new();
    let mut deferred = 0;
    let mut exact = 0;
    let mut g0_fail = Vec::new();
    let mut vanish_fail = Vec::new();
    let mut ogg_fail = Vec::new();
    let (mut places, mut bad_places) = (0, 0);
    for m in corpus {
        let e = m.spec().curve().expect("corpus curve");
        let a = match Analysis::new(&e, &cfg) {
            Ok(a) => a,
            Err(err) => {
                errors.push(format!("{} {:?}", label(m), err));
                continue;
            }
        };
        match predict::predict(&a, None, &WEIGHTS) {
            Err(err) => errors.push(format!("{} {:?}", label(m), err)),
            Ok(rep) => {
                if a.torsion.status == CertificateStatus::Exact {
                    exact += 1;
                    let bad: Vec<String> = rep.all_slots().filter(|s| s.verdict == Verdict::Fail).map(|s| s.name.clone()).collect();
                    if !bad.is_empty() {
                        int_fail.push(format!("{} [{}]", label(m), bad.join(" ")));
                    }
                }
                if rep.deferred() {
                    deferred += m.orbit_size;
                }
            }
        }
        match predict::fiber_count_identity(&a, 2) {
            Ok(rows) => {
                places += rows.len();
                if rows.iter().any(|(_, f, b)| *f != *b as i128) {
                    g0_fail.push(label(m));
                }
            }
            Err(err) => g0_fail.push(format!("{} {:?}", label(m), err)),
        }
        if !vanishing_increments(&a) {
            vanish_fail.push(label(m));
        }
        for d in a.bad() {
            bad_places += 1;
            if d.conductor_exponent as i64 != d.v_delta_min as i64 - d.kodaira.components() as i64 + 1 {
                ogg_fail.push(format!("{} at {}", label(m), d.place.label()));
            }
        }
    }
    // fractions are over all curves, not orbit representatives
    let total: usize = corpus.iter().map(|m| m.orbit_size).sum();
    let frac = deferred as f64 / total as f64;
    r.line(
        5,
        "integrality",
        int_fail.is_empty() && errors.is_empty() && frac <= MAX_DEFERRED_FRACTION,
        format!(
            "{} exact certificates, {} with a non-integral order, {} errors, deferred {}/{} = {:.1}% (limit {:.0}%){}",
            exact,
            int_fail.len(),
            errors.len(),
            deferred,
            total,
            100.0 * frac,
            100.0 * MAX_DEFERRED_FRACTION,
            first(&int_fail.iter().chain(&errors).cloned().collect::<Vec<_>>())
        ),
    );
    r.line(
        6,
        "good-fiber counts and vanishing orders",
        g0_fail.is_empty() && vanish_fail.is_empty(),
        format!(
            "{} good places of degree <= 2, {} count mismatches, {} vanishing-order failures{}",
            places,
            g0_fail.len(),
            vanish_fail.len(),
            first(&g0_fail.iter().chain(&vanish_fail).cloned().collect::<Vec<_>>())
        ),
    );
    r.line(7, "Ogg relation", ogg_fail.is_empty(), format!("{} bad places, {} failures{}", bad_places, ogg_fail.len(), first(&ogg_fail)));
}

fn field_axioms(rng: &mut ChaCha8Rng) -> usize {
    let fields = [
        Gf::prime(5).unwrap(),
        Gf::prime(7).unwrap(),
        Gf::prime(101).unwrap(),
        Gf::new(5, 2, None).unwrap(),
        Gf::new(7, 3, None).unwrap(),
        Gf::new(3, 5, None).unwrap(),
    ];
    let mut fails = 0;
    for i in 0..FIELD_TRIPLES {
        let f = &fields[i % fields.len()];
        let q = f.order();
        let [a, b, c] = [0; 3].map(|_| rng.next_u64() % q);
        let ok = f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
            && f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
            && f.add(a, b) == f.add(b, a)
            && f.mul(a, b) == f.mul(b, a)
            && f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
            && f.add(a, f.neg(a)) == 0
            && f.mul(a, 1) == a
            && (a == 0 || f.mul(a, f.inv(a)) == 1)
            && f.pow(a, q as u128) == a;
        fails += !ok as usize;
    }
    fails
}

fn factorizations(rng: &mut ChaCha8Rng) -> usize {
    let fields = [Gf::prime(5).unwrap(), Gf::prime(7).unwrap(), Gf::new(5, 2, None).unwrap()];
    let mut fails = 0;
    for i in 0..FACTORIZATIONS {
        let f = &fields[i % fields.len()];
        let deg = 1 + rng.next_u64() as usize % 10;
        let mut c: Vec<u64> = (0..deg).map(|_| rng.next_u64() % f.order()).collect();
        c.push(1 + rng.next_u64() % (f.order() - 1));
        let g = Poly::new(f, c);
        let ok = g.factor().is_ok_and(|parts| {
            let mut prod = Poly::constant(f, g.leading());
            for (h, e) in &parts {
                prod = prod.mul(&h.pow(*e as u64));
            }
            prod == g && parts.iter().all(|(h, _)| h.is_monic() && h.is_irreducible())
        });
        fails += !ok as usize;
    }
    fails
}

fn product_formulas(rng: &mut ChaCha8Rng) -> usize {
    let f = Gf::prime(7).unwrap();
    let mut fails = 0;
    let mut done = 0;
    while done < PRODUCT_FORMULAS {
        let mut poly = || Poly::new(&f, (0..1 + rng.next_u64() % 6).map(|_| rng.next_u64() % 7).collect());
        let (n, d) = (poly(), poly());
        let Ok(x) = RationalFunction::new(n, d) else { continue };
        if x.is_zero() {
            continue;
        }
        done += 1;
        let total: i64 = funcfield::support(&x).iter().map(|v| v.degree() as i64 * funcfield::valuation(&x, v).unwrap()).sum();
        fails += (total != 0) as usize;
    }
    fails
}

// Good rational fibers t = c of a short model: #E(F_{Q^2}) by enumeration
// against the value from the trace over F_Q.
fn trace_recursions(sample: &[Member]) -> (usize, usize) {
    let (mut checked, mut fails) = (0, 0);
    for m in sample {
        let f = Gf::prime(m.p).unwrap();
        let (a4, a6) = (Poly::new(&f, m.a4.clone()), Poly::new(&f, m.a6.clone()));
        let ext = f.extension(2).unwrap();
        for c in f.elements() {
            let a = [0, 0, 0, a4.eval(c), a6.eval(c)];
            let Ok((n1, _)) = count::count_elliptic(&f, a) else { continue };
            let q = f.order() as i128;
            let n2 = count::count_points(ext.field(), a.map(|x| ext.embed(x))).unwrap() as i128;
            checked += 1;
            fails += (n2 != count::count_over_extension(q + 1 - n1 as i128, q, 2)) as usize;
        }
    }
    (checked, fails)
}

fn oracles(corpus: &[Member], r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dac1e);
    let axioms = field_axioms(&mut rng);
    let facts = factorizations(&mut rng);
    let prods = product_formulas(&mut rng);
    let sample: Vec<Member> = corpus.iter().step_by(10).cloned().collect();
    let (fibers, rec) = trace_recursions(&sample);
    r.line(
        8,
        "oracle layer",
        axioms + facts + prods + rec == 0,
        format!(
            "field triples {}/{}, factorizations {}/{}, product formulas {}/{}, trace recursions {}/{}",
            FIELD_TRIPLES - axioms,
            FIELD_TRIPLES,
            FACTORIZATIONS - facts,
            FACTORIZATIONS,
            PRODUCT_FORMULAS - prods,
            PRODUCT_FORMULAS,
            fibers - rec,
            fibers
        ),
    );
}

fn main() -> ExitCode {
    // `cargo test -- --list` and similar probes expect no work
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut r = Report { ok: true, ..Report::default() };
    // Legendre first, before the corpus warms any caches
    let t = Instant::now();
    legendre(&mut r);
    let corpus = corpus::validation_corpus();
    eprintln!("[{:.0}s] corpus of {} curves", t.elapsed().as_secs_f64(), corpus.len());
    pipelines(&corpus, &mut r);
    eprintln!("[{:.0}s] L-function pipelines", t.elapsed().as_secs_f64());
    orders_and_local(&corpus, &mut r);
    eprintln!("[{:.0}s] orders and local data", t.elapsed().as_secs_f64());
    oracles(&corpus, &mut r);
    eprintln!("[{:.0}s] oracles", t.elapsed().as_secs_f64());
    r.lines.sort_by_key(|(n, _)| *n);
    for (_, l) in &r.lines {
        println!("{}", l);
    }
    if r.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
