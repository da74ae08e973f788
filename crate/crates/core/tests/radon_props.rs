mod common;

use common::direction;
use proptest::prelude::*;
use wavecert::fields::{HarmonicField, RadialProfile};
use wavecert::harmonics::eval_harmonic_at;
use wavecert::radon::{radon_direct, radon_harmonic};

proptest! {
    #![proptest_config(common::config(30))]

    #[test]
    fn per_harmonic_radon_matches_direct_quadrature(
        idx in common::index(8),
        (xi, g) in (0.5f64..2.0).prop_flat_map(|xi| (Just(xi), common::monomial(xi, -8, -3))),
        tau in 0.05f64..4.0,
        w in direction(),
    ) {
        let profile: RadialProfile = g.into();
        let harmonic = radon_harmonic(&profile, idx.l, tau).unwrap() * eval_harmonic_at(idx, w);
        let y = HarmonicField::single(xi, idx, profile).unwrap();
        let direct = radon_direct(&y, tau, w).unwrap();
        prop_assert!(
            (harmonic - direct).abs() <= 1e-6 * harmonic.abs().max(1e-3),
            "tau={tau} xi={xi} {idx}: {harmonic} vs {direct}"
        );
    }
}
