mod common;

use common::{direction, scaled};
use proptest::prelude::*;
use wavecert::control::{apply_w_direct, apply_w_point, unitarity_check, Control};

proptest! {
    #![proptest_config(common::config(20))]

    #[test]
    fn direct_and_per_harmonic_w_agree(
        seed in any::<u64>(),
        band in 0usize..=3,
        xi in 0.3f64..1.5,
        w in direction(),
        r in 0.1f64..4.0,
    ) {
        let f = Control::random(seed, band, xi).unwrap();
        let x = scaled(w, r);
        let a = apply_w_direct(&f, x, 16).unwrap();
        let b = apply_w_point(&f, x);
        prop_assert!((a - b).abs() <= 1e-7, "{x:?}: {a} vs {b}");
        if r < xi {
            prop_assert_eq!(b, 0.0);
        }
    }
}

#[test]
fn seeded_random_controls_are_isometric() {
    for seed in 0..10u64 {
        let f = Control::random(1000 + seed, 1 + (seed as usize % 4), 0.5 + 0.1 * seed as f64).unwrap();
        let rep = unitarity_check(&f).unwrap();
        assert!(rep.relative_gap <= 1e-5, "seed {seed}: {rep:?}");
    }
}
