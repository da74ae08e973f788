#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use wavecert::fields::RadialMonomialSum;
use wavecert::harmonics::{unit_vector, HarmonicIndex};

pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed_0017), failure_persistence: None, ..Config::default() }
}

pub fn index(max_l: usize) -> impl Strategy<Value = HarmonicIndex> {
    (0..=max_l).prop_flat_map(|l| (-(l as i64)..=l as i64).prop_map(move |m| HarmonicIndex::new(l, m).unwrap()))
}

pub fn direction() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| unit_vector(z.acos(), phi))
}

/// One to three distinct exponents in `lo..=hi` with coefficients in `[-2, 2]`.
pub fn monomial(xi: f64, lo: i32, hi: i32) -> impl Strategy<Value = RadialMonomialSum> {
    let exps: Vec<i32> = (lo..=hi).collect();
    (prop::sample::subsequence(exps, 1..=3), prop::collection::vec(-2.0f64..2.0, 3)).prop_map(move |(e, c)| {
        let terms: Vec<(f64, i32)> = e.iter().zip(&c).map(|(a, c)| (*c, *a)).collect();
        RadialMonomialSum::from_f64(xi, &terms)
    })
}

pub fn scaled(v: [f64; 3], s: f64) -> [f64; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}
