mod common;

use proptest::prelude::*;
use wavecert::harmonics::{analyze, beltrami_apply, synthesize, AngularExpansion, AngularGrid, HarmonicIndex};

const L: usize = 12;

proptest! {
    #![proptest_config(common::config(24))]

    #[test]
    fn round_trip_is_identity(coeffs in prop::collection::vec(-1.0f64..1.0, (L + 1) * (L + 1))) {
        let grid = AngularGrid::new(L);
        let e = AngularExpansion::from_coeffs(L, HarmonicIndex::all_up_to(L).zip(coeffs)).unwrap();
        let back = analyze(&synthesize(&e, &grid).unwrap(), &grid, L).unwrap();
        for (idx, c) in e.iter() {
            prop_assert!((back.get(idx) - c).abs() <= 1e-10, "{idx}: {} vs {c}", back.get(idx));
        }
    }

    #[test]
    fn beltrami_is_linear(
        a in prop::collection::vec(-1.0f64..1.0, 36),
        b in prop::collection::vec(-1.0f64..1.0, 36),
        s in -3.0f64..3.0,
    ) {
        let ea = AngularExpansion::from_coeffs(5, HarmonicIndex::all_up_to(5).zip(a.iter().copied())).unwrap();
        let eb = AngularExpansion::from_coeffs(5, HarmonicIndex::all_up_to(5).zip(b.iter().copied())).unwrap();
        let combo = AngularExpansion::from_coeffs(
            5,
            HarmonicIndex::all_up_to(5).zip(a.iter().zip(&b).map(|(x, y)| x + s * y)),
        ).unwrap();
        let (ba, bb, bc) = (beltrami_apply(&ea), beltrami_apply(&eb), beltrami_apply(&combo));
        for idx in HarmonicIndex::all_up_to(5) {
            prop_assert!((bc.get(idx) - (ba.get(idx) + s * bb.get(idx))).abs() <= 1e-12 * 30.0 * (1.0 + s.abs()));
        }
    }
}
