//! Radon transform and the observation operator `O = -(1/2π) ∂_τ R`.
//!
//! Per harmonic, `R(g Y_l^m)(τ, ω) = G_l(τ) Y_l^m(ω)` with
//! `G_l(τ) = 2π ∫_{max(τ,ξ)}^∞ g(r) P_l(τ/r) r dr`, and the observation is
//! `o(τ) = τ g(τ) 1[τ ≥ ξ] - ∫_{max(τ,ξ)}^∞ g(r) P_l'(τ/r) dr`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, legendre_polynomial, Polynomial, Rational};
use crate::fields::{HarmonicField, RadialMonomialSum, RadialProfile};
use crate::harmonics::{self, legendre_and_derivative, legendre_unchecked, HarmonicIndex};
use crate::quad;

const ABS_TOL: f64 = 1e-15;
const REL_TOL: f64 = 1e-12;

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Closed form of `G_l` for a monomial sum, kept without the `2π` factor:
/// `G/2π = Σ_e C_e τ^e` for `τ ≥ ξ` and `Σ_k D_k τ^k` for `τ < ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialRadon {
    degree: usize,
    support: f64,
    outer: BTreeMap<i32, Rational>,
    inner: Polynomial,
}

impl MonomialRadon {
    pub fn new(g: &RadialMonomialSum, degree: usize) -> Result<Self> {
        let legendre = legendre_polynomial(degree);
        let p: Vec<(usize, &Rational)> = legendre.terms().collect();
        // τ^k ∫_M^∞ r^{a+1-k} dr = τ^k M^{a+2-k} / (k-a-2)
        let k_min = p.first().map_or(0, |(k, _)| *k as i32);
        let mut outer: BTreeMap<i32, Rational> = BTreeMap::new();
        for (c, a) in g.terms() {
            if a + 2 - k_min >= 0 {
                return Err(Error::NotRadonIntegrable { exponent: a, degree });
            }
            let s = exact::sum_of_quotients(p.iter().map(|(k, pk)| (*pk, *k as i64 - a as i64 - 2)));
            *outer.entry(a + 2).or_insert_with(Rational::zero) += c * s;
        }
        outer.retain(|_, c| !c.is_zero());
        let mut inner = vec![Rational::zero(); degree + 1];
        if g.support() > 0.0 {
            let xi = exact::from_f64(g.support());
            let b: Vec<(Rational, i32)> = g.terms().map(|(c, a)| (c * exact::powi(&xi, a + 2), a)).collect();
            for (k, pk) in &p {
                let s = exact::sum_of_quotients(b.iter().map(|(q, a)| (q, *k as i64 - *a as i64 - 2)));
                inner[*k] = *pk * s * exact::powi(&xi, -(*k as i32));
            }
        }
        Ok(Self { degree, support: g.support(), outer, inner: Polynomial::new(inner) })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients `C_e` of `G/2π` on `[ξ, ∞)`.
    pub fn outer_coefficients(&self) -> &BTreeMap<i32, Rational> {
        &self.outer
    }

    /// Coefficients `D_k` of `G/2π` on `[0, ξ)`.
    pub fn inner_polynomial(&self) -> &Polynomial {
        &self.inner
    }

    /// Exact certificate that `G_l` is constant on `[ξ, ∞)`.
    pub fn is_constant_beyond_support(&self) -> bool {
        self.outer.keys().all(|&e| e == 0)
    }

    fn outer_side(&self, tau: f64, side: Side) -> bool {
        tau > self.support || (tau == self.support && side == Side::Right)
    }

    pub fn eval(&self, tau: f64) -> f64 {
        let v = if self.outer_side(tau, Side::Right) {
            self.outer.iter().map(|(e, c)| exact::to_f64(c) * tau.powi(*e)).sum()
        } else {
            self.inner.eval_f64(tau)
        };
        2.0 * PI * v
    }

    /// `-(1/2π) G'(τ)` from the requested side.
    pub fn observation(&self, tau: f64, side: Side) -> f64 {
        if self.outer_side(tau, side) {
            -self
                .outer
                .iter()
                .filter(|(e, _)| **e != 0)
                .map(|(e, c)| *e as f64 * exact::to_f64(c) * tau.powi(e - 1))
                .sum::<f64>()
        } else {
            -self.inner.derivative().eval_f64(tau)
        }
    }
}

/// Per-harmonic Radon/observation evaluator for one radial profile.
#[derive(Debug, Clone)]
pub struct HarmonicRadon<'a> {
    profile: &'a RadialProfile,
    degree: usize,
    tail: Option<MonomialRadon>,
    body: Option<(f64, f64)>,
    cuts: Vec<f64>,
}

impl<'a> HarmonicRadon<'a> {
    pub fn new(profile: &'a RadialProfile, degree: usize) -> Result<Self> {
        let tail = match profile.tail() {
            Some(t) if !t.is_zero() => {
                let t = if matches!(profile, RadialProfile::Monomial(_)) {
                    t.clone()
                } else {
                    t.with_support(profile.finite_end())
                };
                Some(MonomialRadon::new(&t, degree)?)
            }
            _ => None,
        };
        let body = match profile {
            RadialProfile::Monomial(_) => None,
            _ => Some((profile.support_start(), profile.finite_end())),
        };
        Ok(Self { profile, degree, tail, body, cuts: profile.breakpoints() })
    }

    pub fn tail(&self) -> Option<&MonomialRadon> {
        self.tail.as_ref()
    }

    fn body_integral<F: Fn(f64, f64) -> f64>(&self, tau: f64, kernel: F) -> f64 {
        let Some((start, end)) = self.body else { return 0.0 };
        let lo = tau.max(start);
        if lo >= end {
            return 0.0;
        }
        let pts = quad::split_points(lo, end, self.cuts.iter().copied());
        quad::adaptive_piecewise(&pts, |r| kernel(r, self.profile.eval(r)), ABS_TOL, REL_TOL).value
    }

    /// `G_l(τ)`.
    pub fn transform(&self, tau: f64) -> f64 {
        let l = self.degree;
        let body = self.body_integral(tau, |r, g| g * legendre_unchecked(l, (tau / r).min(1.0)) * r);
        2.0 * PI * body + self.tail.as_ref().map_or(0.0, |t| t.eval(tau))
    }

    /// `o(τ^±) = -(1/2π) G_l'(τ^±)`.
    pub fn observation(&self, tau: f64, side: Side) -> f64 {
        let l = self.degree;
        let mut o = 0.0;
        if let Some((start, end)) = self.body {
            if tau >= start && tau <= end {
                let (gl, gr) = self.profile.one_sided(tau);
                // beyond the body the tail closed form carries the boundary term
                let g = match side {
                    Side::Left => gl,
                    Side::Right if tau == end => 0.0,
                    Side::Right => gr,
                };
                o += tau * g;
            }
            o -= self.body_integral(tau, |r, g| g * legendre_and_derivative(l, (tau / r).min(1.0)).1);
        }
        if let Some(t) = &self.tail {
            o += t.observation(tau, side);
        }
        o
    }

    /// Breakpoints where `o` may jump.
    pub fn jump_locations(&self) -> &[f64] {
        &self.cuts
    }
}

/// `G_l(τ)` for a single radial profile.
pub fn radon_harmonic(g: &RadialProfile, l: usize, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(HarmonicRadon::new(g, l)?.transform(tau))
}

/// `o_l(τ^side)` for a single radial profile.
pub fn observe_harmonic(g: &RadialProfile, l: usize, tau: f64, side: Side) -> Result<f64> {
    check_tau(tau)?;
    Ok(HarmonicRadon::new(g, l)?.observation(tau, side))
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("τ must be finite and nonnegative, got {tau}")));
    }
    Ok(())
}

/// `(Ry)(τ, ω)` by direct quadrature over the plane `x·ω = τ`.
///
/// In plane polar coordinates around `τω` the in-plane radius is traded for
/// `r = |x|` (so `ρ dρ = r dr`), then `u = max(τ,ξ)/r ∈ (0, 1]` compactifies
/// the radial range. The angular integral uses the trapezoid rule, exact for
/// the band-limited restriction to each circle.
pub fn radon_direct(y: &HarmonicField, tau: f64, omega: [f64; 3]) -> Result<f64> {
    check_tau(tau)?;
    if y.is_empty() {
        return Ok(0.0);
    }
    for (idx, p) in y.terms() {
        HarmonicRadon::new(p, idx.l)?;
    }
    let omega = harmonics::normalize(omega);
    let (e1, e2) = harmonics::orthonormal_frame(omega);
    let n_psi = 2 * y.band_limit() + 8;
    let dpsi = 2.0 * PI / n_psi as f64;
    let trig: Vec<(f64, f64)> = (0..n_psi).map(|k| (k as f64 * dpsi).sin_cos()).collect();
    let m = tau.max(y.support());
    if m == 0.0 {
        return Err(Error::InvalidArgument("plane through the origin with zero support radius".into()));
    }
    let circle = |r: f64| -> f64 {
        let rho = (r * r - tau * tau).max(0.0).sqrt();
        trig.iter()
            .map(|&(s, c)| {
                let x = [
                    tau * omega[0] + rho * (c * e1[0] + s * e2[0]),
                    tau * omega[1] + rho * (c * e1[1] + s * e2[1]),
                    tau * omega[2] + rho * (c * e1[2] + s * e2[2]),
                ];
                y.eval(x)
            })
            .sum::<f64>()
            * dpsi
    };
    let mut cuts: Vec<f64> = Vec::new();
    for (_, p) in y.terms() {
        for b in p.breakpoints() {
            if b > m {
                cuts.push(m / b);
            }
        }
    }
    let pts = quad::split_points(0.0, 1.0, cuts);
    let est = quad::adaptive_piecewise(
        &pts,
        |u| {
            let r = m / u;
            circle(r) * r * m / (u * u)
        },
        1e-14,
        1e-11,
    );
    Ok(est.value)
}

/// A jump of one observation coefficient at a declared breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    pub tau: f64,
    pub l: usize,
    pub m: i64,
    pub left: f64,
    pub right: f64,
}

impl JumpRecord {
    pub fn amplitude(&self) -> f64 {
        self.right - self.left
    }
}

/// Observation coefficients `o_lm(τ)` on a grid. Values at declared jump
/// locations on the grid are right limits; both limits live in `jumps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationTrace {
    pub tau: Vec<f64>,
    pub series: Vec<HarmonicSeries>,
    pub jumps: Vec<JumpRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSeries {
    pub l: usize,
    pub m: i64,
    pub values: Vec<f64>,
}

impl ObservationTrace {
    pub fn get(&self, idx: HarmonicIndex) -> Option<&HarmonicSeries> {
        self.series.iter().find(|s| s.l == idx.l && s.m == idx.m)
    }

    /// Rows `tau,l,m,value,side`; one-sided rows carry side `-1`/`+1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,l,m,value,side\n");
        for s in &self.series {
            let jumps: Vec<&JumpRecord> = self.jumps.iter().filter(|j| j.l == s.l && j.m == s.m).collect();
            let mut rows: Vec<(f64, i8, f64)> = Vec::new();
            for (t, v) in self.tau.iter().zip(&s.values) {
                if !jumps.iter().any(|j| j.tau == *t) {
                    rows.push((*t, 0, *v));
                }
            }
            for j in jumps {
                rows.push((j.tau, -1, j.left));
                rows.push((j.tau, 1, j.right));
            }
            rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for (t, side, v) in rows {
                let _ = writeln!(out, "{:.16e},{},{},{:.16e},{}", t, s.l, s.m, v, side);
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Uniform grid `0, step, …` up to and including `max` (within rounding).
pub fn uniform_grid(max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && max >= 0.0) {
        return Err(Error::InvalidArgument("grid needs a positive step and nonnegative end".into()));
    }
    let n = (max / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

/// Default grid: step `0.01` on `[0, 5ξ₀]`.
pub fn default_grid(xi0: f64) -> Result<Vec<f64>> {
    uniform_grid(5.0 * xi0, 0.01)
}

fn check_grid(taus: &[f64]) -> Result<()> {
    if taus.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("τ-grid must be nonnegative and strictly increasing".into()));
    }
    Ok(())
}

/// `Oy` on a τ-grid, with one-sided records at every profile breakpoint
/// inside the grid range.
pub fn observe(y: &HarmonicField, taus: &[f64]) -> Result<ObservationTrace> {
    check_grid(taus)?;
    let mut series = Vec::new();
    let mut jumps = Vec::new();
    let (lo, hi) = (taus.first().copied().unwrap_or(0.0), taus.last().copied().unwrap_or(0.0));
    for (idx, p) in y.terms() {
        let rt = HarmonicRadon::new(p, idx.l)?;
        let values = taus.iter().map(|&t| rt.observation(t, Side::Right)).collect();
        for &b in rt.jump_locations() {
            if b >= lo && b <= hi {
                jumps.push(JumpRecord {
                    tau: b,
                    l: idx.l,
                    m: idx.m,
                    left: rt.observation(b, Side::Left),
                    right: rt.observation(b, Side::Right),
                });
            }
        }
        series.push(HarmonicSeries { l: idx.l, m: idx.m, values });
    }
    Ok(ObservationTrace { tau: taus.to_vec(), series, jumps })
}

/// `sup |o_lm(τ)| / ‖y‖` over grid points `τ ≥ ξ` (right limits) and all
/// harmonics; zero for the zero state.
pub fn unobservability_residual(y: &HarmonicField, xi: f64, taus: &[f64]) -> Result<f64> {
    check_grid(taus)?;
    let norm = y.norm_sq()?.sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mut sup = 0.0f64;
    for (idx, p) in y.terms() {
        let rt = HarmonicRadon::new(p, idx.l)?;
        for &t in taus.iter().filter(|&&t| t >= xi) {
            sup = sup.max(rt.observation(t, Side::Right).abs());
        }
    }
    Ok(sup / norm)
}

/// Exact certificate: every monomial term has `G_l` constant on `[ξ, ∞)`.
pub fn radon_constant_certificate(y: &HarmonicField) -> Result<bool> {
    for (idx, p) in y.terms() {
        let m = p.as_monomial().ok_or(Error::NotMonomial { index: idx })?;
        if !MonomialRadon::new(m, idx.l)?.is_constant_beyond_support() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dspace::{basis_element, PolyClassP};
    use crate::exact::int;
    use crate::fields::PiecewisePolynomial;
    use crate::harmonics::AngularExpansion;

    fn idx(l: usize, m: i64) -> HarmonicIndex {
        HarmonicIndex::new(l, m).unwrap()
    }

    fn mono(xi: f64, terms: &[(f64, i32)]) -> RadialProfile {
        RadialMonomialSum::from_f64(xi, terms).into()
    }

    #[test]
    fn radon_harmonic_examples() {
        let g = mono(1.0, &[(1.0, -2)]);
        assert!((radon_harmonic(&g, 1, 2.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((radon_harmonic(&g, 1, 0.5).unwrap() - PI).abs() < 1e-14);
        let g = mono(1.0, &[(1.0, -4)]);
        assert_eq!(radon_harmonic(&g, 3, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_matches_quadrature_oracle() {
        // ∫_{max(τ,ξ)}^∞ r^a P_l(τ/r) r dr by quadrature in u = M/r
        for (a, l, tau, xi) in [(-4, 2, 0.7, 1.0), (-3, 2, 1.3, 1.0), (-6, 5, 2.5, 2.0), (-5, 0, 0.0, 1.0)] {
            let g = mono(xi, &[(1.0, a)]);
            let m = f64::max(tau, xi);
            let oracle = 2.0
                * PI
                * quad::adaptive(
                    |u: f64| {
                        let r = m / u;
                        r.powi(a) * legendre_unchecked(l, tau / r) * r * m / (u * u)
                    },
                    0.0,
                    1.0,
                    1e-15,
                    1e-13,
                )
                .value;
            let v = radon_harmonic(&g, l, tau).unwrap();
            assert!((v - oracle).abs() < 1e-12 * oracle.abs().max(1.0), "a={a} l={l}: {v} vs {oracle}");
        }
    }

    #[test]
    fn divergent_terms_are_rejected() {
        let g = mono(1.0, &[(1.0, -2)]);
        assert_eq!(radon_harmonic(&g, 0, 1.0), Err(Error::NotRadonIntegrable { exponent: -2, degree: 0 }));
        let g = mono(1.0, &[(1.0, -1)]);
        assert_eq!(radon_harmonic(&g, 1, 1.0), Err(Error::NotRadonIntegrable { exponent: -1, degree: 1 }));
        assert!(radon_harmonic(&mono(1.0, &[(1.0, -3)]), 1, 1.0).is_ok());
    }

    #[test]
    fn body_and_tail_agree_with_pure_monomial() {
        let m = RadialMonomialSum::from_f64(1.0, &[(1.0, -2), (-0.5, -4)]);
        let sampled: RadialProfile = m.to_sampled(&[1.0, 2.0]).unwrap().into();
        // Hermite on [1,2] is inexact, so compare with an exact piecewise body + tail split.
        let exact_tau = 2.5;
        let a = radon_harmonic(&sampled, 1, exact_tau).unwrap();
        let b = radon_harmonic(&m.clone().into(), 1, exact_tau).unwrap();
        assert!((a - b).abs() < 1e-13);
        let ind: RadialProfile = PiecewisePolynomial::indicator(1.0, 2.0).unwrap().into();
        // G_1 for an indicator shell at τ < 1: 2π τ ∫_1^2 dr = 2πτ
        assert!((radon_harmonic(&ind, 1, 0.5).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn observation_examples() {
        let y = HarmonicField::single(1.0, idx(1, 0), RadialMonomialSum::from_f64(1.0, &[(1.0, -2)])).unwrap();
        let trace = observe(&y, &[0.25, 0.5, 0.75, 1.5, 2.0]).unwrap();
        let s = trace.get(idx(1, 0)).unwrap();
        for (t, v) in trace.tau.iter().zip(&s.values) {
            let expected = if *t < 1.0 { -1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-14, "τ={t}: {v}");
        }
        let p = PolyClassP::new(3, vec![int(-4), int(3)]).unwrap();
        let y = basis_element(1.0, &p, &AngularExpansion::single(idx(3, 0), 1.0)).unwrap();
        let grid = uniform_grid(5.0, 0.01).unwrap();
        let trace = observe(&y, &grid).unwrap();
        for (t, v) in trace.tau.iter().zip(&trace.series[0].values) {
            if *t >= 1.0 {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn observation_matches_numerical_derivative_of_direct_radon() {
        let y = HarmonicField::single(1.0, idx(1, 0), RadialMonomialSum::from_f64(1.0, &[(1.0, -2)])).unwrap();
        let north = [0.0, 0.0, 1.0];
        let y10 = harmonics::eval_harmonic_at(idx(1, 0), north);
        let h = 1e-3;
        for tau in [0.5, 1.7] {
            let d = (radon_direct(&y, tau + h, north).unwrap() - radon_direct(&y, tau - h, north).unwrap()) / (2.0 * h);
            let o = -d / (2.0 * PI) / y10;
            let expected = observe_harmonic(y.get(idx(1, 0)).unwrap(), 1, tau, Side::Right).unwrap();
            assert!((o - expected).abs() < 1e-6, "τ={tau}: {o} vs {expected}");
        }
    }

    #[test]
    fn radial_jump_produces_observation_jump() {
        // g = 0.3 on [1, 2), then 0.3 + α smoothly decaying to zero at 3
        let alpha = 0.8;
        let g = PiecewisePolynomial::new(
            vec![1.0, 2.0, 3.0],
            vec![vec![0.3], vec![0.3 + alpha, 0.0, 0.0, -10.0 * (0.3 + alpha), 15.0 * (0.3 + alpha), -6.0 * (0.3 + alpha)]],
        )
        .unwrap();
        let y = HarmonicField::single(1.0, idx(2, 1), g).unwrap();
        let trace = observe(&y, &uniform_grid(5.0, 0.5).unwrap()).unwrap();
        let j = trace.jumps.iter().find(|j| j.tau == 2.0).unwrap();
        assert!((j.amplitude() - 2.0 * alpha).abs() < 1e-12);
        let j = trace.jumps.iter().find(|j| j.tau == 1.0).unwrap();
        assert!((j.amplitude() - 0.3).abs() < 1e-12);
        assert!(trace.to_csv().contains(",2,1,"));
    }

    #[test]
    fn direct_quadrature_examples() {
        let y = HarmonicField::single(1.0, idx(1, 0), RadialMonomialSum::from_f64(1.0, &[(1.0, -2)])).unwrap();
        let north = [0.0, 0.0, 1.0];
        let v = radon_direct(&y, 2.0, north).unwrap();
        let expected = 2.0 * PI * harmonics::eval_harmonic_at(idx(1, 0), north);
        assert!((v - expected).abs() < 1e-6 * expected.abs());
        assert_eq!(radon_direct(&HarmonicField::new(1.0), 1.0, north).unwrap(), 0.0);

        let radial = HarmonicField::single(1.0, idx(0, 0), RadialMonomialSum::from_f64(1.0, &[(1.0, -3)])).unwrap();
        let a = radon_direct(&radial, 1.2, north).unwrap();
        let b = radon_direct(&radial, 1.2, [0.3, -0.5, 0.2]).unwrap();
        assert!((a - b).abs() < 1e-8 * a.abs());
    }

    #[test]
    fn unobservability_examples() {
        let s = PolyClassP::monomial(1, 0).unwrap();
        let y = basis_element(1.0, &s, &AngularExpansion::single(idx(1, 0), 1.0)).unwrap();
        let grid = default_grid(1.0).unwrap();
        assert!(unobservability_residual(&y, 1.0, &grid).unwrap() <= 1e-10);
        assert!(radon_constant_certificate(&y).unwrap());

        let shell = HarmonicField::single(1.0, idx(1, 0), PiecewisePolynomial::indicator(1.0, 2.0).unwrap()).unwrap();
        assert!(unobservability_residual(&shell, 1.0, &grid).unwrap() > 0.01);
    }

    #[test]
    fn dilation_scales_by_lambda_squared() {
        let g = PiecewisePolynomial::bump(1.0, 2.0, 3, 1.0).unwrap();
        let lambda = 1.7;
        let dilated = PiecewisePolynomial::bump(lambda, 2.0 * lambda, 3, 1.0).unwrap();
        let (g, dilated): (RadialProfile, RadialProfile) = (g.into(), dilated.into());
        // bump((r/λ-1)(2-r/λ)) = λ^{-2p} bump_λ
        let scale = lambda.powi(6);
        for tau in [0.3, 1.1, 2.4] {
            let lhs = radon_harmonic(&dilated, 2, tau).unwrap() / scale;
            let rhs = lambda * lambda * radon_harmonic(&g, 2, tau / lambda).unwrap();
            assert!((lhs - rhs).abs() < 1e-8 * rhs.abs().max(1e-3));
        }
    }
}
