use ellsurf_core::count;
use ellsurf_core::gf::Gf;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    // #E(F_{Q^2}) from the trace over F_Q agrees with enumeration over F_{Q^2}
    #[test]
    fn trace_recursion_over_quadratic_extension(
        (p, n) in prop::sample::select(vec![(5u64, 1u32), (7, 1), (11, 1), (5, 2)]),
        coeffs in prop::collection::vec(0u64..1000, 5),
    ) {
        let f = Gf::new(p, n, None).unwrap();
        let a: [u64; 5] = core::array::from_fn(|i| coeffs[i] % f.order());
        let Ok(n1) = count::count_elliptic(&f, a).map(|(n, _)| n as i128) else { return Ok(()) };
        let q = f.order() as i128;
        let ext = f.extension(2).unwrap();
        let lifted = a.map(|c| ext.embed(c));
        let n2 = count::count_points(ext.field(), lifted).unwrap() as i128;
        prop_assert_eq!(n2, count::count_over_extension(q + 1 - n1, q, 2));
    }

    #[test]
    fn trace_table_matches_enumeration(a in 0u64..343, b in 0u64..343) {
        let f = Gf::new(7, 3, None).unwrap();
        let disc = f.add(f.mul(4, f.pow(a, 3)), f.mul(27 % 7, f.mul(b, b)));
        prop_assume!(disc != 0);
        let t = count::TraceTable::get(&f).unwrap();
        prop_assert_eq!(t.trace(&f, a, b), count::short_trace_exhaustive(&f, a, b));
    }

    #[test]
    fn hasse_bound(a in 0u64..125, b in 0u64..125) {
        let f = Gf::new(5, 3, None).unwrap();
        let Ok((n, g)) = count::count_elliptic(&f, [0, 0, 0, a, b]) else { return Ok(()) };
        let t = 126 - n as i64;
        prop_assert!(t * t <= 4 * 125);
        prop_assert_eq!(g.order(), n);
    }
}
