//! JSON renderings of analysis results. Rationals are `{"num", "den"}` pairs
//! of decimal strings so that big integers never pass through floats.

use ellsurf_core::funcfield::poly_label;
use ellsurf_core::lfun::{self, LPolynomial, SurfaceData};
use ellsurf_core::mw::{CertificateStatus, FrobeniusModule, Section, TorsionCertificate};
use ellsurf_core::predict::{Check, OrderReport, OrderValue, Quantity, Slot};
use ellsurf_core::tate::{LocalData, ReductionClass};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::spec::CurveSpec;

pub fn rational(r: &BigRational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

pub fn integer(n: &BigInt) -> Value {
    Value::String(n.to_string())
}

fn reduction(c: ReductionClass) -> &'static str {
    match c {
        ReductionClass::Good => "good",
        ReductionClass::SplitMultiplicative => "split",
        ReductionClass::NonsplitMultiplicative => "nonsplit",
        ReductionClass::Additive => "additive",
    }
}

pub fn local_data(d: &LocalData) -> Value {
    let split = match d.reduction_class {
        ReductionClass::SplitMultiplicative => Value::Bool(true),
        ReductionClass::NonsplitMultiplicative => Value::Bool(false),
        _ => Value::Null,
    };
    json!({
        "place": d.place.label(),
        "degree": d.degree(),
        "kodaira": d.kodaira.symbol(),
        "v_delta": d.v_delta_min,
        "conductor_exponent": d.conductor_exponent,
        "components": d.kodaira.components(),
        "reduction": reduction(d.reduction_class),
        "split": split,
        "component_orbits": d.component_orbits(),
    })
}

pub fn analyze(spec: &CurveSpec, sd: &SurfaceData) -> Value {
    let bad: Vec<Value> = sd.bad().into_iter().map(local_data).collect();
    json!({
        "field": { "p": sd.field.characteristic(), "n": sd.field.degree(), "q": sd.q() },
        "curve": serde_json::to_value(spec).expect("spec serializes"),
        "bad_places": bad,
        "conductor_degree": sd.conductor_degree(),
        "l_degree": sd.expected_degree().ok(),
    })
}

/// One row per bad place: place, type, v(Delta), f, components, split,
/// component orbits.
pub fn fiber_table(sd: &SurfaceData) -> String {
    let mut out = format!("{:<16} {:<6} {:>8} {:>3} {:>5} {:<9} {}\n", "place", "type", "v(Delta)", "f", "comps", "split", "orbits");
    for d in sd.bad() {
        let split = match d.reduction_class {
            ReductionClass::SplitMultiplicative => "yes",
            ReductionClass::NonsplitMultiplicative => "no",
            _ => "-",
        };
        let orbits: Vec<String> = d.component_orbits().iter().map(|o| o.to_string()).collect();
        out.push_str(&format!(
            "{:<16} {:<6} {:>8} {:>3} {:>5} {:<9} {}\n",
            d.place.label(),
            d.kodaira.symbol(),
            d.v_delta_min,
            d.conductor_exponent,
            d.kodaira.components(),
            split,
            orbits.join(",")
        ));
    }
    out
}

pub fn lpoly(l: &LPolynomial) -> Value {
    json!({
        "coeffs": l.coeffs.iter().map(integer).collect::<Vec<_>>(),
        "degree": l.degree(),
        "q": l.q,
        "weight": l.weight,
        "label": l.label,
    })
}

pub fn lefschetz_rows(rows: &[(BigInt, BigInt)]) -> Value {
    Value::Array(
        rows.iter()
            .enumerate()
            .map(|(i, (count, trace))| json!({ "n": i + 1, "count": integer(count), "trace": integer(trace), "equal": count == trace }))
            .collect(),
    )
}

pub fn module(m: &FrobeniusModule) -> Value {
    json!({ "cyclic_orders": m.cyclic_orders, "frob": m.frob, "order": m.order() })
}

fn section(s: &Section) -> Value {
    json!({ "x": poly_label(&s.x), "y": poly_label(&s.y) })
}

pub fn torsion(c: &TorsionCertificate) -> Value {
    json!({
        "status": match c.status { CertificateStatus::Exact => "exact", CertificateStatus::Interval => "interval" },
        "verified_lower": module(&c.verified_lower),
        "upper_bound": c.upper_bound,
        "level": c.m,
        "generators": c.generators.iter().map(section).collect::<Vec<_>>(),
    })
}

fn quantity(q: &Quantity) -> Value {
    match q {
        Quantity::Order(OrderValue::Exact(v)) => json!({ "kind": "order", "value": rational(v) }),
        Quantity::Order(OrderValue::Interval(lo, hi)) => json!({ "kind": "order_interval", "lo": rational(lo), "hi": rational(hi) }),
        Quantity::Rank(r) => json!({ "kind": "rank", "value": r }),
        Quantity::Group(g) => json!({ "kind": "group", "value": g }),
    }
}

fn slot(s: &Slot) -> Value {
    let mut v = quantity(&s.quantity);
    v["name"] = json!(s.name);
    v["verdict"] = json!(s.verdict.name());
    v
}

fn check(c: &Check) -> Value {
    json!({ "name": c.name, "verdict": c.verdict.name(), "detail": c.detail })
}

pub fn order_report(r: &OrderReport, cert: &TorsionCertificate) -> Value {
    json!({
        "q": r.q,
        "r": r.r,
        "s1": r.s1,
        "s2": r.s2,
        "irr_s2": r.irr_s2,
        "torsion": torsion(cert),
        "core": r.core.iter().map(slot).collect::<Vec<_>>(),
        "open": r.open.iter().map(|o| json!({
            "removed": o.removed.iter().map(|p| p.label()).collect::<Vec<_>>(),
            "vanishing_order": o.vanishing_order,
            "slots": o.slots.iter().map(slot).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "highweight": r.highweight.iter().map(|h| json!({
            "j": h.j,
            "slots": h.slots.iter().map(slot).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "ppart": rational(&r.ppart),
        "checks": r.checks.iter().map(check).collect::<Vec<_>>(),
        "all_pass": r.all_pass(),
        "deferred": r.deferred(),
    })
}

/// `L(E, s0)` and the leading term there.
pub fn special_values(l: &LPolynomial) -> Value {
    let at0 = lfun::special_value(l, 0).ok();
    let (r, lead) = lfun::leading_coefficient(l, 1);
    json!({
        "L_at_0": at0.as_ref().map(rational),
        "leading": { "s0": 1, "r": r, "value": rational(&lead) },
    })
}
