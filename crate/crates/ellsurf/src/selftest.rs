//! Quick end-to-end checks on the Legendre family over `F_5`.

use ellsurf_core::lfun;
use ellsurf_core::mw::CertificateStatus;
use ellsurf_core::predict::Quantity;
use num_bigint::BigInt;

use crate::spec::CurveSpec;

pub const LEGENDRE_F5: &str = r#"{"p":5,"n":1,"a1":[],"a2":[-1,-1],"a3":[],"a4":[0,1],"a6":[]}"#;

/// Report lines and overall success.
pub fn run() -> (Vec<String>, bool) {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut line = |name: &str, pass: bool, detail: String| {
        ok &= pass;
        lines.push(format!("{} {}: {}", if pass { "PASS" } else { "FAIL" }, name, detail));
    };
    let e = match CurveSpec::parse(LEGENDRE_F5).and_then(|s| s.curve()) {
        Ok(e) => e,
        Err(err) => {
            line("legendre spec", false, err.to_string());
            return (lines, false);
        }
    };
    match crate::run(&e, &[], &[3]) {
        Err(err) => line("legendre pipeline", false, err.to_string()),
        Ok((a, r)) => {
            let types: Vec<String> = a.bad().iter().map(|d| format!("{}@{}", d.kodaira, d.place.label())).collect();
            line("kodaira types", types == ["I2@t", "I2@t+4", "I2*@inf"], types.join(" "));
            line("conductor degree", a.surface.conductor_degree() == 4, a.surface.conductor_degree().to_string());
            line("L(E,T) = 1", a.l.is_one(), format!("{:?}", a.l.coeffs));
            let t = &a.torsion;
            let full2 = t.verified_lower.cyclic_orders == [2, 2] && t.verified_lower.frob == [vec![1, 0], vec![0, 1]];
            line("torsion (Z/2)^2, trivial Frobenius", full2, format!("{:?}", t.verified_lower.cyclic_orders));
            let k1 = r.slot("k1.kernel").and_then(|s| match &s.quantity {
                Quantity::Order(v) => v.exact().cloned(),
                _ => None,
            });
            let exact = t.status == CertificateStatus::Exact;
            let pass = exact && k1.as_ref().is_some_and(|v| *v == BigInt::from(64).into());
            line("k1 kernel order 64", pass, k1.map_or("interval".into(), |v| v.to_string()));
            line("all verdicts", r.all_pass(), format!("{} checks", r.checks.len()));
        }
    }
    let e7 = CurveSpec::short(7, &[1, 0, 1], &[0, 1, 0, 1]).curve();
    match e7.ok().and_then(|e| lfun::SurfaceData::new(&e).ok()).map(|sd| {
        let l = lfun::euler_product(&sd);
        (sd, l)
    }) {
        Some((sd, Ok(eu))) => {
            let lef = lfun::l_from_lefschetz(&sd, eu.l.degree());
            let agree = lef.as_ref().is_ok_and(|l| l.coeffs == eu.l.coeffs);
            line("dual pipeline over F_7", agree, format!("{:?}", eu.l.coeffs.iter().map(BigInt::to_string).collect::<Vec<_>>()));
        }
        _ => line("dual pipeline over F_7", false, "no L-function".into()),
    }
    (lines, ok)
}
