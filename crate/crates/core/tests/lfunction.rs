use ellsurf_core::gf::{Gf, Poly};
use ellsurf_core::lfun::{self, SurfaceData};
use ellsurf_core::tate::KodairaType;
use ellsurf_core::wmodel::WeierstrassCurve;
use proptest::prelude::*;

fn curve(p: u64, a4: &[u64], a6: &[u64]) -> Option<WeierstrassCurve> {
    let f = Gf::prime(p).unwrap();
    let e = WeierstrassCurve::short(Poly::new(&f, a4.to_vec()), Poly::new(&f, a6.to_vec())).ok()?;
    e.is_nonisotrivial().then_some(e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_and_lefschetz_agree(a4 in prop::collection::vec(0u64..5, 3), a6 in prop::collection::vec(0u64..5, 4)) {
        let Some(e) = curve(5, &a4, &a6) else { return Ok(()) };
        let sd = SurfaceData::new(&e).unwrap();
        let eu = lfun::euler_product(&sd).unwrap();
        prop_assert!(eu.guard.iter().all(|g| *g == 0));
        prop_assert_eq!(eu.l.degree() as u32 + 4, sd.conductor_degree());
        let lef = lfun::l_from_lefschetz(&sd, eu.l.degree()).unwrap();
        prop_assert_eq!(&lef.coeffs, &eu.l.coeffs);
        prop_assert!(lfun::functional_equation_sign(&eu.l).is_some());
        prop_assert!(lfun::root_magnitude_deviation(&eu.l) < 1e-6);
    }

    #[test]
    fn ogg_relation(a4 in prop::collection::vec(0u64..7, 3), a6 in prop::collection::vec(0u64..7, 4)) {
        let Some(e) = curve(7, &a4, &a6) else { return Ok(()) };
        let sd = SurfaceData::new(&e).unwrap();
        for d in sd.bad() {
            prop_assert_eq!(d.conductor_exponent as i64, d.v_delta_min as i64 - d.kodaira.components() as i64 + 1);
        }
    }
}

#[test]
fn legendre_has_trivial_l_function() {
    let f = Gf::prime(5).unwrap();
    let z = Poly::zero(&f);
    let e = WeierstrassCurve::from_polys(&f, [z.clone(), Poly::from_ints(&f, &[-1, -1]), z.clone(), Poly::x(&f), z]).unwrap();
    let sd = SurfaceData::new(&e).unwrap();
    let types: Vec<KodairaType> = sd.bad().iter().map(|d| d.kodaira).collect();
    assert_eq!(types.iter().map(|k| k.symbol()).collect::<Vec<_>>(), ["I2", "I2", "I2*"]);
    assert_eq!(sd.conductor_degree(), 4);
    assert!(lfun::euler_product(&sd).unwrap().l.is_one());
}
