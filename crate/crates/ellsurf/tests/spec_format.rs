use ellsurf::spec::{self, CurveSpec};
use ellsurf_core::funcfield::Place;
use proptest::prelude::*;

fn coeffs(p: i64, len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-2 * p..2 * p, 0..=len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_a_fixed_point(p in prop::sample::select(vec![5u64, 7, 11]), a4 in coeffs(11, 3), a6 in coeffs(11, 4), a1 in coeffs(11, 1)) {
        let mut s = CurveSpec::short(p, &a4, &a6);
        s.a1 = a1.into_iter().map(spec::Coeff::Int).collect();
        let Ok(e) = s.curve() else { return Ok(()) };
        let canon = CurveSpec::from_curve(&e).unwrap();
        let text = canon.to_canonical();
        let again = CurveSpec::parse(&text).unwrap();
        prop_assert_eq!(&again.to_canonical(), &text);
        let e2 = again.curve().unwrap();
        prop_assert_eq!(CurveSpec::from_curve(&e2).unwrap(), canon);
    }

    #[test]
    fn extension_coefficients_round_trip(a4 in prop::collection::vec(prop::collection::vec(0i64..5, 0..=2), 1..3), a6 in prop::collection::vec(prop::collection::vec(0i64..5, 0..=2), 1..4)) {
        let list = |v: Vec<Vec<i64>>| v.into_iter().map(spec::Coeff::List).collect();
        let s = CurveSpec { p: 5, n: 2, modulus: None, a1: vec![], a2: vec![], a3: vec![], a4: list(a4), a6: list(a6) };
        let Ok(e) = s.curve() else { return Ok(()) };
        let canon = CurveSpec::from_curve(&e).unwrap();
        let back = CurveSpec::parse(&canon.to_canonical()).unwrap().curve().unwrap();
        prop_assert_eq!(CurveSpec::from_curve(&back).unwrap(), canon);
    }
}

#[test]
fn place_labels_parse_back() {
    let f = CurveSpec::short(7, &[1], &[1]).field().unwrap();
    for d in 1..=2 {
        for v in ellsurf_core::funcfield::places_of_degree(&f, d) {
            assert_eq!(spec::parse_place(&f, &v.label()).unwrap(), v);
        }
    }
    assert_eq!(spec::parse_place(&f, "inf").unwrap(), Place::Infinity);
    assert!(spec::parse_place(&f, "t^2+1").is_ok());
    assert!(spec::parse_place(&f, "t^2-1").is_err());
    assert!(spec::parse_place(&f, "2t").is_err());
}
