//! Randomized structural invariants.

use crosskit::cross::{gen_family, merge, project, FamilyKind, MultiIndex, Point, Side};
use crosskit::extremal::h_closed_form;
use crosskit::geometry::{make_pair, BaseSet, PlanarDomain};
use crosskit::Complex64;
use proptest::prelude::*;

fn arb_point(n: usize) -> impl Strategy<Value = Point> {
    proptest::collection::vec((-0.95f64..0.95, -0.95f64..0.95), n)
        .prop_map(|v| Point::new(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap())
}

fn arb_alpha(n: usize) -> impl Strategy<Value = MultiIndex> {
    proptest::collection::vec(any::<bool>(), n).prop_map(MultiIndex::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn merge_project_round_trip(z in arb_point(5), alpha in arb_alpha(5)) {
        let c0 = project(&z, &alpha, Side::Zero).unwrap();
        let c1 = project(&z, &alpha, Side::One).unwrap();
        prop_assert_eq!(merge(&alpha, &c0, &c1).unwrap(), z);
    }

    #[test]
    fn closed_form_range_and_vanishing(re in -0.99f64..0.99, im in -0.99f64..0.99) {
        let pair = make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap();
        let z = Complex64::new(re, im);
        if pair.domain().contains(z) {
            let h = h_closed_form(&pair, z).unwrap();
            prop_assert!((0.0..=1.0).contains(&h));
            if im == 0.0 {
                prop_assert_eq!(h, 0.0);
            }
        }
    }

    #[test]
    fn family_is_sorted_and_unique(n in 2usize..8, k in 1usize..8) {
        prop_assume!(k <= n);
        let fam = gen_family(n, k, FamilyKind::J).unwrap();
        for w in fam.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for alpha in &fam {
            let weight = alpha.weight();
            prop_assert!(weight >= 1 && weight <= k);
        }
    }
}
