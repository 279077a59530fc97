use ellsurf_core::gf::{Gf, Poly};
use ellsurf_core::mw::{self, FrobeniusModule, TorsionConfig};
use ellsurf_core::wmodel::WeierstrassCurve;
use num_integer::Integer;
use proptest::prelude::*;

fn module() -> impl Strategy<Value = (Vec<u64>, Vec<Vec<u64>>)> {
    prop::sample::select(vec![vec![2u64], vec![3], vec![2, 2], vec![2, 4], vec![3, 3], vec![4]]).prop_flat_map(|orders| {
        let k = orders.len();
        let m = *orders.last().unwrap();
        (Just(orders), prop::collection::vec(prop::collection::vec(0..m, k), k))
    })
}

fn automorphism(orders: &[u64], rows: &[Vec<u64>]) -> Option<FrobeniusModule> {
    let mut frob = rows.to_vec();
    // images must respect the orders: n_i * image_i = 0
    for (i, row) in frob.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let scale = orders[j] / orders[j].gcd(&orders[i]);
            *c = *c % orders[j] / scale * scale % orders[j];
        }
    }
    let m = FrobeniusModule { cyclic_orders: orders.to_vec(), frob };
    let mut images: Vec<Vec<u64>> = m.elements().iter().map(|a| m.apply_frob(a)).collect();
    images.sort();
    images.dedup();
    (images.len() as u64 == m.order()).then_some(m)
}

proptest! {
    #[test]
    fn invariants_form_a_subgroup_of_bounded_order((orders, rows) in module(), j in 0u32..6) {
        let Some(m) = automorphism(&orders, &rows) else { return Ok(()) };
        let k = mw::twisted_invariants(&m, j, 7).unwrap();
        prop_assert!(k >= 1);
        prop_assert_eq!(m.order() % k, 0);
    }

    #[test]
    fn trivial_action_invariants(orders in prop::sample::select(vec![vec![2u64], vec![2, 2], vec![3], vec![2, 4]]), j in 0u32..6, q in prop::sample::select(vec![5u64, 7, 11, 13])) {
        prop_assume!(orders.iter().all(|n| n % q != 0));
        let m = FrobeniusModule::with_trivial_action(orders.clone());
        let expect: u64 = orders.iter().map(|&n| n.gcd(&((q.pow(j) - 1) % n))).product();
        prop_assert_eq!(mw::twisted_invariants(&m, j, q).unwrap(), expect);
    }
}

#[test]
fn legendre_two_torsion_is_rational() {
    let f = Gf::prime(5).unwrap();
    let z = Poly::zero(&f);
    let e = WeierstrassCurve::from_polys(&f, [z.clone(), Poly::from_ints(&f, &[-1, -1]), z.clone(), Poly::x(&f), z]).unwrap();
    let cert = mw::geometric_torsion(&e, &TorsionConfig::default()).unwrap();
    assert_eq!(cert.verified_lower.cyclic_orders, vec![2, 2]);
    assert_eq!(cert.verified_lower.frob, vec![vec![1, 0], vec![0, 1]]);
    assert!(cert.upper_bound.is_multiple_of(cert.verified_lower.order()));
}

#[test]
fn three_torsion_over_quadratic_extension() {
    // y^2 = x^3 + t x + 1 + 2t + 3t^2 has a 3-torsion section over F_25 that Frobenius negates
    let f = Gf::prime(5).unwrap();
    let (a4, a6) = (Poly::from_ints(&f, &[0, 1]), Poly::from_ints(&f, &[1, 2, 3]));
    let e = WeierstrassCurve::short(a4.clone(), a6).unwrap();
    let cert = mw::geometric_torsion(&e, &TorsionConfig::default()).unwrap();
    assert_eq!(cert.verified_lower.cyclic_orders, vec![3]);
    assert_eq!(cert.verified_lower.frob, vec![vec![2]]);
    let ext = f.extension(cert.m).unwrap();
    let a = ext.embed_poly(&a4);
    for s in &cert.generators {
        assert!(mw::killed_by(&a, s, 3).unwrap());
        assert!(!mw::killed_by(&a, s, 1).unwrap());
    }
    // Frobenius acts by -1, so the invariants of the odd twists are everything
    assert_eq!(mw::twisted_invariants(&cert.verified_lower, 3, 5).unwrap(), 3);
    assert_eq!(mw::twisted_invariants(&cert.verified_lower, 2, 5).unwrap(), 1);
}
