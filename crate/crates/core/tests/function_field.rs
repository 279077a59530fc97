use ellsurf_core::funcfield::{self, Place, RationalFunction};
use ellsurf_core::gf::{Gf, Poly};
use proptest::prelude::*;

fn nonzero_poly(q: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..q, 1..7).prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn product_formula(p in prop::sample::select(vec![5u64, 7, 11]), a in nonzero_poly(5), b in nonzero_poly(5)) {
        let f = Gf::prime(p).unwrap();
        let x = RationalFunction::new(Poly::new(&f, a), Poly::new(&f, b)).unwrap();
        let total: i64 = funcfield::support(&x)
            .iter()
            .map(|v| v.degree() as i64 * funcfield::valuation(&x, v).unwrap())
            .sum();
        prop_assert_eq!(total, 0);
    }

    #[test]
    fn valuations_are_additive(a in nonzero_poly(7), b in nonzero_poly(7), c in nonzero_poly(7)) {
        let f = Gf::prime(7).unwrap();
        let x = RationalFunction::new(Poly::new(&f, a), Poly::new(&f, c.clone())).unwrap();
        let y = RationalFunction::new(Poly::new(&f, b), Poly::new(&f, vec![1])).unwrap();
        let xy = x.mul(&y);
        let mut places = funcfield::support(&x);
        places.extend(funcfield::support(&y));
        places.push(Place::Infinity);
        for v in &places {
            let sum = funcfield::valuation(&x, v).unwrap() + funcfield::valuation(&y, v).unwrap();
            prop_assert_eq!(funcfield::valuation(&xy, v).unwrap(), sum);
        }
    }

    #[test]
    fn residues_are_multiplicative(a in nonzero_poly(5), b in nonzero_poly(5)) {
        let f = Gf::prime(5).unwrap();
        let (pa, pb) = (Poly::new(&f, a), Poly::new(&f, b));
        for v in funcfield::places_of_degree(&f, 2).iter().take(4) {
            let r = funcfield::ResidueMap::new(&f, v).unwrap();
            let k = r.field();
            prop_assert_eq!(r.map_poly(&pa.mul(&pb)), k.mul(r.map_poly(&pa), r.map_poly(&pb)));
        }
    }
}
