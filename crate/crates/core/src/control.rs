//! Controls at infinity and the control operator
//! `(Wf)(x) = (1/2π) ∫_{S²} f̃_τ(x·ω, ω) dσ_ω`.
//!
//! Per harmonic, `w_l[g](r) = ∫_{-1}^{1} g̃'(rt) P_l(t) dt`. The zero
//! extension `g̃` may jump, so `g̃'` carries point masses at those jumps.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::fields::{HarmonicField, Knot, RadialMonomialSum, RadialProfile, SampledProfile};
use crate::harmonics::{self, legendre_and_derivative, legendre_unchecked, HarmonicIndex};
use crate::quad;
use crate::radon::{HarmonicRadon, Side};

const ABS_TOL: f64 = 1e-15;
const REL_TOL: f64 = 1e-13;

/// Gaussian profiles are treated as exactly zero beyond `center + 10·width`.
pub const GAUSSIAN_CUTOFF: f64 = 10.0;

/// Time profile `g(τ)` of one harmonic of a control, with closed-form derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum TimeProfile {
    /// `amplitude · exp(-((τ - center)/width)²)` on `[start, center + 10·width]`.
    Gaussian { amplitude: f64, center: f64, width: f64, start: f64 },
    /// Uniform cubic B-spline `Σ c_i B((τ - start)/step - i)`.
    Spline { start: f64, step: f64, coeffs: Vec<f64> },
    /// `amplitude · ((τ - start)(end - τ))^power` on `[start, end]`.
    Poly { start: f64, end: f64, power: u32, amplitude: f64 },
}

fn bspline(u: f64) -> [f64; 2] {
    if !(0.0..4.0).contains(&u) {
        return [0.0, 0.0];
    }
    if u < 1.0 {
        [u * u * u / 6.0, u * u / 2.0]
    } else if u < 2.0 {
        [(-3.0 * u * u * u + 12.0 * u * u - 12.0 * u + 4.0) / 6.0, (-9.0 * u * u + 24.0 * u - 12.0) / 6.0]
    } else if u < 3.0 {
        [(3.0 * u * u * u - 24.0 * u * u + 60.0 * u - 44.0) / 6.0, (9.0 * u * u - 48.0 * u + 60.0) / 6.0]
    } else {
        let v = 4.0 - u;
        [v * v * v / 6.0, -v * v / 2.0]
    }
}

impl TimeProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            TimeProfile::Gaussian { amplitude, center, width, start } => {
                [amplitude, center, width, start].iter().all(|v| v.is_finite()) && *width > 0.0 && *start >= 0.0
            }
            TimeProfile::Spline { start, step, coeffs } => {
                start.is_finite() && *start >= 0.0 && *step > 0.0 && coeffs.iter().all(|c| c.is_finite())
            }
            TimeProfile::Poly { start, end, amplitude, .. } => {
                *start >= 0.0 && end > start && end.is_finite() && amplitude.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidControl(format!("bad profile parameters: {self:?}")))
        }
    }

    /// `[start, end]` outside of which `g` vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            TimeProfile::Gaussian { center, width, start, .. } => {
                (*start, (center + GAUSSIAN_CUTOFF * width).max(*start))
            }
            TimeProfile::Spline { start, step, coeffs } => (*start, start + (coeffs.len() + 3) as f64 * step),
            TimeProfile::Poly { start, end, .. } => (*start, *end),
        }
    }

    /// Points where `g` or its derivatives may be non-smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TimeProfile::Spline { start, step, coeffs } => {
                (0..=coeffs.len() + 3).map(|i| start + i as f64 * step).collect()
            }
            _ => {
                let (a, b) = self.support();
                vec![a, b]
            }
        }
    }

    /// Value and derivative of the zero extension, right- or left-continuous.
    fn value_and_slope(&self, tau: f64, right: bool) -> [f64; 2] {
        let (a, b) = self.support();
        let inside = if right { tau >= a && tau < b } else { tau > a && tau <= b };
        if !inside {
            return [0.0, 0.0];
        }
        match self {
            TimeProfile::Gaussian { amplitude, center, width, .. } => {
                let z = (tau - center) / width;
                let v = amplitude * (-z * z).exp();
                [v, -2.0 * z / width * v]
            }
            TimeProfile::Spline { start, step, coeffs } => {
                let t = (tau - start) / step;
                let first = (t.floor() as i64 - 3).max(0) as usize;
                let mut out = [0.0, 0.0];
                for (i, c) in coeffs.iter().enumerate().skip(first).take(4) {
                    let [b, db] = bspline(t - i as f64);
                    out[0] += c * b;
                    out[1] += c * db / step;
                }
                out
            }
            TimeProfile::Poly { start, end, power, amplitude } => {
                let (x, y) = (tau - start, end - tau);
                let p = *power as i32;
                if p == 0 {
                    return [*amplitude, 0.0];
                }
                let base = x * y;
                [amplitude * base.powi(p), amplitude * p as f64 * base.powi(p - 1) * (y - x)]
            }
        }
    }

    pub fn eval(&self, tau: f64) -> f64 {
        self.value_and_slope(tau, true)[0]
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        self.value_and_slope(tau, true)[1]
    }

    /// One-sided derivative (`right = false` for the left limit).
    pub fn slope(&self, tau: f64, right: bool) -> f64 {
        self.value_and_slope(tau, right)[1]
    }

    /// `(location, g(b⁺) - g(b⁻))` for every jump of the zero extension.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let (a, b) = self.support();
        if b <= a {
            return Vec::new();
        }
        let left_end = self.value_and_slope(b, false)[0];
        let mut out = Vec::new();
        let start = self.eval(a);
        if start != 0.0 {
            out.push((a, start));
        }
        if left_end != 0.0 {
            out.push((b, -left_end));
        }
        out
    }

    /// `∫ g(τ)² dτ`.
    pub fn norm_sq(&self) -> f64 {
        let (a, b) = self.support();
        let pts = quad::split_points(a, b, self.breakpoints());
        quad::adaptive_piecewise(&pts, |t| self.eval(t).powi(2), ABS_TOL, REL_TOL).value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ProfileEntry {
    l: usize,
    m: i64,
    #[serde(flatten)]
    profile: TimeProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ControlDto {
    xi: f64,
    #[serde(rename = "L")]
    band_limit: usize,
    profiles: Vec<ProfileEntry>,
}

/// A control `f(τ, ω) = Σ g_lm(τ) Y_l^m(ω)` delayed by `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Control {
    xi: f64,
    band_limit: usize,
    profiles: Vec<(HarmonicIndex, TimeProfile)>,
}

impl Control {
    pub fn new(xi: f64, band_limit: usize) -> Result<Self> {
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::InvalidControl(format!("delay must be nonnegative, got {xi}")));
        }
        Ok(Self { xi, band_limit, profiles: Vec::new() })
    }

    pub fn with(mut self, idx: HarmonicIndex, profile: TimeProfile) -> Result<Self> {
        self.insert(idx, profile)?;
        Ok(self)
    }

    pub fn insert(&mut self, idx: HarmonicIndex, profile: TimeProfile) -> Result<()> {
        HarmonicIndex::new(idx.l, idx.m)?;
        profile.validate()?;
        if idx.l > self.band_limit {
            return Err(Error::BandLimit { required: idx.l, available: self.band_limit });
        }
        if profile.support().0 < self.xi {
            return Err(Error::InvalidControl(format!(
                "{idx} profile starts at τ={} before the delay {}",
                profile.support().0,
                self.xi
            )));
        }
        if self.profiles.iter().any(|(i, _)| *i == idx) {
            return Err(Error::InvalidControl(format!("duplicate profile for {idx}")));
        }
        self.profiles.push((idx, profile));
        self.profiles.sort_by_key(|(i, _)| *i);
        Ok(())
    }

    pub fn delay(&self) -> f64 {
        self.xi
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn profiles(&self) -> &[(HarmonicIndex, TimeProfile)] {
        &self.profiles
    }

    /// `‖f‖²_F = Σ ∫ g_lm² dτ`.
    pub fn norm_sq(&self) -> f64 {
        self.profiles.iter().map(|(_, p)| p.norm_sq()).sum()
    }

    /// `f(τ, ω)` at a direction given by a nonzero vector.
    pub fn eval(&self, tau: f64, omega: [f64; 3]) -> f64 {
        let (theta, phi) = harmonics::direction_angles(omega);
        let ys = harmonics::eval_all(self.band_limit, theta, phi);
        self.profiles.iter().map(|(i, p)| p.eval(tau) * ys[i.flat()]).sum()
    }

    /// Same control shifted later by `delta ≥ 0`.
    pub fn delayed(&self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidArgument("delay shift must be nonnegative".into()));
        }
        let shift = |p: &TimeProfile| match p.clone() {
            TimeProfile::Gaussian { amplitude, center, width, start } => {
                TimeProfile::Gaussian { amplitude, center: center + delta, width, start: start + delta }
            }
            TimeProfile::Spline { start, step, coeffs } => TimeProfile::Spline { start: start + delta, step, coeffs },
            TimeProfile::Poly { start, end, power, amplitude } => {
                TimeProfile::Poly { start: start + delta, end: end + delta, power, amplitude }
            }
        };
        let mut out = Control::new(self.xi + delta, self.band_limit)?;
        for (i, p) in &self.profiles {
            out.insert(*i, shift(p))?;
        }
        Ok(out)
    }

    /// Random spline control: every `(l, m)` with `l ≤ band_limit` gets a
    /// cubic B-spline with 6 coefficients in `[-1, 1]`, step `0.5`, starting
    /// in `[ξ, ξ + 0.5)`.
    pub fn random(seed: u64, band_limit: usize, xi: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Control::new(xi, band_limit)?;
        for idx in HarmonicIndex::all_up_to(band_limit) {
            let start = xi + 0.5 * rng.random::<f64>();
            let coeffs = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            c.insert(idx, TimeProfile::Spline { start, step: 0.5, coeffs })?;
        }
        Ok(c)
    }

    pub fn to_json(&self) -> Result<String> {
        let dto = ControlDto {
            xi: self.xi,
            band_limit: self.band_limit,
            profiles: self.profiles.iter().map(|(i, p)| ProfileEntry { l: i.l, m: i.m, profile: p.clone() }).collect(),
        };
        Ok(serde_json::to_string_pretty(&dto)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let dto: ControlDto = serde_json::from_str(s)?;
        let mut c = Control::new(dto.xi, dto.band_limit)?;
        for e in dto.profiles {
            c.insert(HarmonicIndex::new(e.l, e.m)?, e.profile)?;
        }
        Ok(c)
    }
}

/// `w_l[g](r)` for one harmonic, with its monomial tail beyond the support.
#[derive(Debug, Clone)]
pub struct WHarmonic<'a> {
    g: &'a TimeProfile,
    degree: usize,
    start: f64,
    end: f64,
    cuts: Vec<f64>,
    jumps: Vec<(f64, f64)>,
    tail: RadialMonomialSum,
}

impl<'a> WHarmonic<'a> {
    pub fn new(g: &'a TimeProfile, degree: usize) -> Self {
        let (start, end) = g.support();
        let cuts = g.breakpoints();
        let jumps = g.jumps();
        // For r ≥ end: w = Σ_k p_k M_k r^{-k-1}, M_k = ∫ g̃'(τ) τ^k dτ.
        // M_0 = g(end⁺) - g(start⁻) = 0 exactly, so k = 0 never contributes.
        let legendre = exact::legendre_polynomial(degree);
        let mut terms = Vec::new();
        for (k, pk) in legendre.terms() {
            if k == 0 || end <= start {
                continue;
            }
            let pts = quad::split_points(start, end, cuts.iter().copied());
            let smooth = quad::adaptive_piecewise(&pts, |t| g.derivative(t) * t.powi(k as i32), ABS_TOL, REL_TOL).value;
            let point: f64 = jumps.iter().map(|(b, a)| a * b.powi(k as i32)).sum();
            let mk = smooth + point;
            if mk != 0.0 {
                terms.push((pk * exact::from_f64(mk), -(k as i32) - 1));
            }
        }
        let tail = RadialMonomialSum::new(end.max(start), terms);
        Self { g, degree, start, end, cuts, jumps, tail }
    }

    pub fn tail(&self) -> &RadialMonomialSum {
        &self.tail
    }

    pub fn support(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.cuts
    }

    /// `I(r) = r·w(r)` and `I'(r)` for `r` inside the support; `include_at`
    /// decides whether a jump located exactly at `r` is counted (right limit).
    fn body(&self, r: f64, include_at: bool) -> [f64; 2] {
        let l = self.degree;
        let mut i = 0.0;
        let mut di = 0.0;
        for &(b, a) in &self.jumps {
            if b < r || (b == r && include_at) {
                let (p, dp) = legendre_and_derivative(l, (b / r).min(1.0));
                i += a * p;
                di += a * dp * (-b / (r * r));
            }
        }
        let hi = r.min(self.end);
        if hi > self.start {
            let pts = quad::split_points(self.start, hi, self.cuts.iter().copied());
            i += quad::adaptive_piecewise(
                &pts,
                |t| self.g.derivative(t) * legendre_unchecked(l, (t / r).min(1.0)),
                ABS_TOL,
                REL_TOL,
            )
            .value;
            let dest = quad::adaptive_piecewise(
                &pts,
                |t| self.g.derivative(t) * legendre_and_derivative(l, (t / r).min(1.0)).1 * (-t / (r * r)),
                ABS_TOL,
                REL_TOL,
            );
            di += dest.value;
            // moving upper limit: g'(r) P_l(1), one-sided at breakpoints
            if r < self.end || !include_at {
                di += self.g.slope(r, include_at);
            }
        }
        [i, di]
    }

    fn value_and_derivative(&self, r: f64, right: bool) -> [f64; 2] {
        if r <= 0.0 {
            return [0.0, 0.0];
        }
        if r > self.end || (r == self.end && right) {
            let d = self.tail.derivative();
            return [self.tail.eval_formula(r), d.eval_formula(r)];
        }
        if r < self.start || (r == self.start && !right) {
            return [0.0, 0.0];
        }
        let [i, di] = self.body(r, right);
        [i / r, di / r - i / (r * r)]
    }

    /// Right-continuous `w_l(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        self.value_and_derivative(r, true)[0]
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.value_and_derivative(r, true)[1]
    }

    pub fn knot(&self, r: f64) -> Knot {
        let [vl, dl] = self.value_and_derivative(r, false);
        let [vr, dr] = self.value_and_derivative(r, true);
        Knot { r, left: vl, right: vr, dleft: dl, dright: dr }
    }

    /// `∫ w_l(r)² r² dr`.
    pub fn norm_sq(&self) -> Result<f64> {
        let pts = quad::split_points(self.start, self.end, self.cuts.iter().copied());
        let body = quad::adaptive_piecewise(&pts, |r| (self.eval(r) * r).powi(2), ABS_TOL, REL_TOL).value;
        Ok(body + self.tail.tail_inner(&self.tail, self.end)?)
    }
}

/// `Wf` sampled on `r_grid` (profile breakpoints added), as a field with
/// Hermite profiles and exact monomial tails.
pub fn apply_w_harmonic(f: &Control, r_grid: &[f64]) -> Result<HarmonicField> {
    if r_grid.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument("r-grid must be positive".into()));
    }
    let mut field = HarmonicField::new(f.delay());
    for (idx, g) in f.profiles() {
        let w = WHarmonic::new(g, idx.l);
        let (start, end) = w.support();
        if end <= start {
            continue;
        }
        let mut radii: Vec<f64> = r_grid.iter().copied().filter(|&r| r > start && r < end).collect();
        radii.extend(w.breakpoints().iter().copied());
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let knots: Vec<Knot> = radii.iter().map(|&r| w.knot(r)).collect();
        let tail = (!w.tail().is_zero()).then(|| w.tail().clone());
        field.insert(*idx, SampledProfile::new(&knots, tail)?)?;
    }
    Ok(field)
}

/// `u^f(x, t) = (1/2π) ∫_{S²} f̃_τ(t + x·ω, ω) dσ_ω` by quadrature on the
/// sphere in a frame whose pole is `x/|x|`: Gauss–Kronrod in `z = x̂·ω`
/// split at the profile breakpoints, trapezoid in longitude, and the point
/// masses of `f̃_τ` integrated exactly in `z`.
pub fn wave_direct(f: &Control, x: [f64; 3], t: f64, n_phi: usize) -> Result<f64> {
    if n_phi < f.band_limit() + 1 {
        return Err(Error::BandLimit { required: f.band_limit() + 1, available: n_phi });
    }
    let r = harmonics::norm3(x);
    let axis = if r > 0.0 { harmonics::normalize(x) } else { [0.0, 0.0, 1.0] };
    let (e1, e2) = harmonics::orthonormal_frame(axis);
    let dphi = 2.0 * PI / n_phi as f64;
    let trig: Vec<(f64, f64)> = (0..n_phi).map(|k| (k as f64 * dphi).sin_cos()).collect();
    let band = f.band_limit();
    // ∫ Y_lm(ω(z, φ)) dφ for every harmonic of the control
    let ring = |z: f64| -> Vec<f64> {
        let s = (1.0 - z * z).max(0.0).sqrt();
        let mut acc = vec![0.0; (band + 1) * (band + 1)];
        for &(sp, cp) in &trig {
            let w = [
                z * axis[0] + s * (cp * e1[0] + sp * e2[0]),
                z * axis[1] + s * (cp * e1[1] + sp * e2[1]),
                z * axis[2] + s * (cp * e1[2] + sp * e2[2]),
            ];
            let (th, ph) = harmonics::direction_angles(w);
            for (a, y) in acc.iter_mut().zip(harmonics::eval_all(band, th, ph)) {
                *a += y * dphi;
            }
        }
        acc
    };
    let mut total = 0.0;
    if r == 0.0 {
        // f̃_τ(t, ·) integrates over the sphere against Y_0^0 only
        let mut value = 0.0;
        for (idx, g) in f.profiles().iter().filter(|(i, _)| i.l == 0) {
            if g.jumps().iter().any(|(b, _)| *b == t) {
                return Err(Error::InvalidArgument(format!("{idx}: evaluation exactly on a jump front")));
            }
            value += g.derivative(t) * (4.0 * PI).sqrt();
        }
        return Ok(value / (2.0 * PI));
    }
    let mut cuts = Vec::new();
    for (_, g) in f.profiles() {
        for b in g.breakpoints() {
            cuts.push((b - t) / r);
        }
    }
    let pts = quad::split_points(-1.0, 1.0, cuts);
    let smooth = quad::adaptive_piecewise(
        &pts,
        |z| {
            let ys = ring(z);
            f.profiles().iter().map(|(idx, g)| g.derivative(t + r * z) * ys[idx.flat()]).sum()
        },
        1e-14,
        1e-12,
    );
    total += smooth.value;
    for (idx, g) in f.profiles() {
        for (b, a) in g.jumps() {
            let z = (b - t) / r;
            if z.abs() <= 1.0 {
                total += a / r * ring(z)[idx.flat()];
            }
        }
    }
    Ok(total / (2.0 * PI))
}

/// `(Wf)(x)` by direct sphere quadrature.
pub fn apply_w_direct(f: &Control, x: [f64; 3], n_phi: usize) -> Result<f64> {
    wave_direct(f, x, 0.0, n_phi)
}

/// `(Wf)(x)` from the per-harmonic reduction.
pub fn apply_w_point(f: &Control, x: [f64; 3]) -> f64 {
    let r = harmonics::norm3(x);
    if r < f.delay() || r == 0.0 {
        return 0.0;
    }
    let (theta, phi) = harmonics::direction_angles(x);
    let ys = harmonics::eval_all(f.band_limit(), theta, phi);
    f.profiles().iter().map(|(idx, g)| WHarmonic::new(g, idx.l).eval(r) * ys[idx.flat()]).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitarityReport {
    pub norm_f: f64,
    pub norm_wf: f64,
    pub relative_gap: f64,
}

/// `‖f‖_F` by time quadrature against `‖Wf‖_H` by radial quadrature.
pub fn unitarity_check(f: &Control) -> Result<UnitarityReport> {
    let nf = f.norm_sq().sqrt();
    let mut nw2 = 0.0;
    for (idx, g) in f.profiles() {
        nw2 += WHarmonic::new(g, idx.l).norm_sq()?;
    }
    let nw = nw2.sqrt();
    let relative_gap = if nf == 0.0 { nw } else { (nf - nw).abs() / nf };
    Ok(UnitarityReport { norm_f: nf, norm_wf: nw, relative_gap })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjointReport {
    pub wf_y: f64,
    pub f_oy: f64,
    /// `|(Wf, y) - (f, Oy)| / (‖f‖ ‖y‖)`.
    pub relative: f64,
}

fn wf_y_term(w: &WHarmonic<'_>, y: &RadialProfile) -> Result<f64> {
    let (ws, we) = w.support();
    let lo = ws.max(y.support_start());
    let hi = match y.tail() {
        Some(_) => we.max(y.finite_end()),
        None => y.finite_end(),
    };
    let mut total = 0.0;
    if hi > lo {
        let cuts = w.breakpoints().iter().copied().chain(y.breakpoints());
        let pts = quad::split_points(lo, hi, cuts);
        total += quad::adaptive_piecewise(&pts, |r| w.eval(r) * y.eval(r) * r * r, ABS_TOL, REL_TOL).value;
    }
    if let Some(t) = y.tail() {
        total += w.tail().tail_inner(t, hi.max(lo))?;
    }
    Ok(total)
}

/// `(Wf, y)_H` and `(f, Oy)_F`, each by its own quadrature.
pub fn adjoint_check(f: &Control, y: &HarmonicField) -> Result<AdjointReport> {
    let mut wf_y = 0.0;
    let mut f_oy = 0.0;
    for (idx, g) in f.profiles() {
        let Some(profile) = y.get(*idx) else { continue };
        let w = WHarmonic::new(g, idx.l);
        wf_y += wf_y_term(&w, profile)?;
        let radon = HarmonicRadon::new(profile, idx.l)?;
        let (a, b) = g.support();
        let pts = quad::split_points(a, b, g.breakpoints().into_iter().chain(profile.breakpoints()));
        f_oy += quad::adaptive_piecewise(&pts, |t| g.eval(t) * radon.observation(t, Side::Right), ABS_TOL, REL_TOL)
            .value;
    }
    let scale = f.norm_sq().sqrt() * y.norm_sq()?.sqrt();
    let diff = (wf_y - f_oy).abs();
    let relative = if scale == 0.0 { diff } else { diff / scale };
    Ok(AdjointReport { wf_y, f_oy, relative })
}
