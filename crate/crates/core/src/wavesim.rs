//! The dual system `v_tt = Δv`, `v(·,0) = 0`, `v_t(·,0) = y`, evaluated by
//! Kirchhoff's spherical means, and the propagation of radial jumps of `y`.
//!
//! For `y = g(r) Y_l(ω)` the spherical mean reduces (Funk–Hecke on each shell
//! `|γ| = ρ`) to `v(rω₀, t) = -Y_l(ω₀) I(r, s) / (2r)` with `s = -t` and
//! `I = ∫_{|r-s|}^{r+s} g(ρ) P_l(c) ρ dρ`, `c = (r² + ρ² - s²) / (2rρ)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{HarmonicField, PiecewisePolynomial, RadialProfile};
use crate::harmonics::{self, legendre_and_derivative, AngularExpansion};
use crate::quad;
use crate::radon::{HarmonicRadon, Side};

const ABS_TOL: f64 = 1e-15;
const REL_TOL: f64 = 1e-12;

/// Default ε-schedule for jump measurement, in units of `ξ₀`.
pub const EPS_SCHEDULE: [f64; 3] = [0.02, 0.01, 0.005];

fn check_time(t: f64) -> Result<()> {
    if !(t < 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be negative, got {t}")));
    }
    Ok(())
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KirchhoffValue {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// `v^y(x, t) = (1/4πt) ∫_{|γ-x|=|t|} y(γ) dσ_γ` by direct quadrature on the
/// sphere: Gauss–Kronrod in the polar variable (axis `x/|x|`, split where the
/// sphere crosses radial breakpoints of `y`), trapezoid in longitude.
pub fn kirchhoff_eval(y: &HarmonicField, x: [f64; 3], t: f64) -> Result<KirchhoffValue> {
    check_time(t)?;
    let s = -t;
    let r = harmonics::norm3(x);
    let axis = if r > 0.0 { harmonics::normalize(x) } else { [0.0, 0.0, 1.0] };
    let (e1, e2) = harmonics::orthonormal_frame(axis);
    let sphere = |n_phi: usize| -> quad::Estimate {
        let dphi = 2.0 * PI / n_phi as f64;
        let trig: Vec<(f64, f64)> = (0..n_phi).map(|k| (k as f64 * dphi).sin_cos()).collect();
        let ring = |z: f64| -> f64 {
            let q = (1.0 - z * z).max(0.0).sqrt();
            trig.iter()
                .map(|&(sp, cp)| {
                    let g = [
                        x[0] + s * (z * axis[0] + q * (cp * e1[0] + sp * e2[0])),
                        x[1] + s * (z * axis[1] + q * (cp * e1[1] + sp * e2[1])),
                        x[2] + s * (z * axis[2] + q * (cp * e1[2] + sp * e2[2])),
                    ];
                    y.eval(g)
                })
                .sum::<f64>()
                * dphi
        };
        let mut cuts = Vec::new();
        if r > 0.0 {
            for (_, p) in y.terms() {
                for b in p.breakpoints() {
                    cuts.push((b * b - r * r - s * s) / (2.0 * r * s));
                }
            }
            cuts.push((y.support() * y.support() - r * r - s * s) / (2.0 * r * s));
        }
        let pts = quad::split_points(-1.0, 1.0, cuts);
        quad::adaptive_piecewise(&pts, ring, 1e-15, 1e-12)
    };
    let n = 2 * y.band_limit() + 4;
    let coarse = sphere(n);
    let fine = sphere(2 * n);
    let scale = s * s / (4.0 * PI * t);
    let error = (fine.error + (fine.value - coarse.value).abs()) * scale.abs();
    Ok(KirchhoffValue { value: fine.value * scale, error, converged: coarse.converged && fine.converged })
}

/// `(v, v_r, v_t)` per harmonic at `(r, t)`, without the `Y_l(ω₀)` factor.
///
/// `v = -I/(2r)`, `v_r = I/(2r²) - I_r/(2r)`, `v_t = I_s/(2r)`. The kernel is
/// differentiated analytically; the moving limits contribute boundary terms.
pub fn kirchhoff_harmonic_derivatives(g: &RadialProfile, l: usize, r: f64, t: f64) -> Result<[f64; 3]> {
    check_time(t)?;
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("derivatives need r > 0".into()));
    }
    let s = -t;
    let lo = (r - s).abs().max(g.support_start());
    let hi = r + s;
    let upper_limit = match g.tail() {
        Some(_) => hi,
        None => hi.min(g.finite_end()),
    };
    let mut i = 0.0;
    let mut ir = 0.0;
    let mut is = 0.0;
    if upper_limit > lo {
        let pts = quad::split_points(lo, upper_limit, g.breakpoints());
        // c = ((r-s)(r+s) + ρ²) / (2rρ) avoids cancellation for large r, s
        let diff = (r - s) * (r + s);
        let kernel = |rho: f64| {
            let c = ((diff + rho * rho) / (2.0 * r * rho)).clamp(-1.0, 1.0);
            legendre_and_derivative(l, c)
        };
        i = quad::adaptive_piecewise(&pts, |rho| g.eval(rho) * kernel(rho).0 * rho, ABS_TOL, REL_TOL).value;
        ir = quad::adaptive_piecewise(
            &pts,
            |rho| g.eval(rho) * kernel(rho).1 * (r * r - rho * rho + s * s) / (2.0 * r * r),
            ABS_TOL,
            REL_TOL,
        )
        .value;
        is = quad::adaptive_piecewise(&pts, |rho| -g.eval(rho) * kernel(rho).1 * s / r, ABS_TOL, REL_TOL).value;
    }
    // boundary terms: c = 1 at ρ = r + s; at ρ = |r - s|, c = 1 (r > s) or -1 (r < s)
    let top = g.one_sided(hi).0 * hi;
    ir += top;
    is += top;
    let d = r - s;
    if d > 0.0 {
        let bottom = g.one_sided(d).1 * d;
        ir -= bottom;
        is += bottom;
    } else if d < 0.0 {
        let parity = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
        let bottom = g.one_sided(-d).1 * (-d) * parity;
        ir += bottom;
        is -= bottom;
    }
    Ok([-i / (2.0 * r), i / (2.0 * r * r) - ir / (2.0 * r), is / (2.0 * r)])
}

/// Per-harmonic Kirchhoff value `v(rω₀, t) / Y_l(ω₀)`; at `r = 0` the
/// full-sphere mean `t·g(|t|)` (degree 0 only).
pub fn kirchhoff_harmonic(g: &RadialProfile, l: usize, r: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    if r < 0.0 {
        return Err(Error::InvalidArgument("radius must be nonnegative".into()));
    }
    if r == 0.0 {
        return Ok(if l == 0 { t * g.eval(-t) } else { 0.0 });
    }
    Ok(kirchhoff_harmonic_derivatives(g, l, r, t)?[0])
}

/// `v^y(x, t)` summed over the harmonics of `y`.
pub fn kirchhoff_field(y: &HarmonicField, x: [f64; 3], t: f64) -> Result<f64> {
    let r = harmonics::norm3(x);
    let (theta, phi) = harmonics::direction_angles(x);
    let ys = harmonics::eval_all(y.band_limit(), theta, phi);
    let mut total = 0.0;
    for (idx, p) in y.terms() {
        total += kirchhoff_harmonic(p, idx.l, r, t)? * ys[idx.flat()];
    }
    Ok(total)
}

/// `y = α(ω) χ(r)` with `χ` the quintic smoothstep from `1` at `ξ₀` to `0` at
/// `1.5 ξ₀`, zero below `ξ₀`; the field is declared with support radius `ξ`.
pub fn jump_state(xi: f64, xi0: f64, alpha: &AngularExpansion) -> Result<HarmonicField> {
    if !(xi > 0.0 && xi0 >= xi) {
        return Err(Error::InvalidArgument(format!("need 0 < ξ ≤ ξ₀, got ξ={xi}, ξ₀={xi0}")));
    }
    let chi = PiecewisePolynomial::smoothstep_down(xi0, 1.5 * xi0)?;
    let mut y = HarmonicField::new(xi);
    for (idx, a) in alpha.iter() {
        if a != 0.0 {
            y.insert(idx, chi.scale(a))?;
        }
    }
    Ok(y)
}

/// Geometric-optics factor for `[v_r]` on `C₁` as stated in the literature
/// form of the jump law: `-ξ₀/(ξ₀ - t)`.
pub fn stated_vr_factor(xi0: f64, t: f64) -> f64 {
    -xi0 / (xi0 - t)
}

/// Factor obtained from the Kirchhoff formula: `+ξ₀/(2(ξ₀ - t))`.
pub fn kirchhoff_vr_factor(xi0: f64, t: f64) -> f64 {
    xi0 / (2.0 * (xi0 - t))
}

/// Measured and predicted jump of `v_r` across `C₁: r = ξ₀ - t` for one harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpDatum {
    pub xi0: f64,
    pub t: f64,
    pub l: usize,
    pub m: i64,
    pub alpha: f64,
    pub predicted: f64,
    pub measured: f64,
    pub ratio: f64,
    pub kirchhoff_predicted: f64,
    pub kirchhoff_ratio: f64,
    pub extrapolation_residual: f64,
    pub inconclusive: bool,
}

fn richardson(values: &[f64]) -> (f64, f64) {
    match values {
        [a0, a1, a2] => {
            let r1a = 2.0 * a1 - a0;
            let r1b = 2.0 * a2 - a1;
            let r2 = (4.0 * r1b - r1a) / 3.0;
            (r2, (r2 - r1b).abs())
        }
        [a0, a1] => {
            let r = 2.0 * a1 - a0;
            (r, (r - a1).abs())
        }
        [a0] => (*a0, f64::INFINITY),
        _ => (f64::NAN, f64::INFINITY),
    }
}

/// Jump of `v_r` at `r = ξ₀ - t` for `y = α χ`, from one-sided analytic
/// derivatives at `r* ± ε` and Richardson extrapolation over a halving
/// ε-schedule (given in units of `ξ₀`).
pub fn extract_jump_vr(xi0: f64, alpha: &AngularExpansion, t: f64, eps_schedule: &[f64]) -> Result<Vec<JumpDatum>> {
    check_time(t)?;
    if eps_schedule.is_empty() || eps_schedule.len() > 3 || eps_schedule.windows(2).any(|w| (w[0] - 2.0 * w[1]).abs() > 1e-12 * w[0])
    {
        return Err(Error::InvalidArgument("ε-schedule must halve at each step (1 to 3 entries)".into()));
    }
    let y = jump_state(xi0, xi0, alpha)?;
    let r_star = xi0 - t;
    let mut out = Vec::new();
    for (idx, p) in y.terms() {
        let a = alpha.get(idx);
        let mut jumps = Vec::new();
        for e in eps_schedule {
            let eps = e * xi0;
            let plus = kirchhoff_harmonic_derivatives(p, idx.l, r_star + eps, t)?[1];
            let minus = kirchhoff_harmonic_derivatives(p, idx.l, r_star - eps, t)?[1];
            jumps.push(plus - minus);
        }
        let (measured, residual) = richardson(&jumps);
        let predicted = stated_vr_factor(xi0, t) * a;
        let kirchhoff_predicted = kirchhoff_vr_factor(xi0, t) * a;
        out.push(JumpDatum {
            xi0,
            t,
            l: idx.l,
            m: idx.m,
            alpha: a,
            predicted,
            measured,
            ratio: measured / predicted,
            kirchhoff_predicted,
            kirchhoff_ratio: measured / kirchhoff_predicted,
            extrapolation_residual: residual,
            inconclusive: residual > 1e-3 * measured.abs(),
        });
    }
    Ok(out)
}

/// CSV with columns `xi0,t,l,m,predicted,measured,ratio` followed by the
/// Kirchhoff-derived prediction and the extrapolation diagnostics.
pub fn jump_csv(data: &[JumpDatum]) -> String {
    let mut out = String::from(
        "xi0,t,l,m,predicted,measured,ratio,kirchhoff_predicted,kirchhoff_ratio,extrapolation_residual,inconclusive\n",
    );
    for d in data {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            d.xi0,
            d.t,
            d.l,
            d.m,
            d.predicted,
            d.measured,
            d.ratio,
            d.kirchhoff_predicted,
            d.kirchhoff_ratio,
            d.extrapolation_residual,
            d.inconclusive
        );
    }
    out
}

/// Jump of `Oy` at `τ = ξ₀` for one harmonic, against the stated law `-ξ₀ α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservedJump {
    pub l: usize,
    pub m: i64,
    pub alpha: f64,
    pub predicted: f64,
    pub measured: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservedJumpReport {
    pub xi: f64,
    pub xi0: f64,
    pub jumps: Vec<ObservedJump>,
    /// A nonzero jump inside `[ξ, ∞)` makes `y` observable, hence `y ∉ D^ξ`.
    pub observable: bool,
    pub verdict: String,
}

/// One-sided limits of `o_lm` at `τ = ξ₀` for `y = α χ` declared in `H^ξ`.
pub fn observed_jump(xi: f64, xi0: f64, alpha: &AngularExpansion) -> Result<ObservedJumpReport> {
    let y = jump_state(xi, xi0, alpha)?;
    let mut jumps = Vec::new();
    for (idx, p) in y.terms() {
        let radon = HarmonicRadon::new(p, idx.l)?;
        let measured = radon.observation(xi0, Side::Right) - radon.observation(xi0, Side::Left);
        let a = alpha.get(idx);
        let predicted = -xi0 * a;
        jumps.push(ObservedJump { l: idx.l, m: idx.m, alpha: a, predicted, measured, ratio: measured / predicted });
    }
    let scale = alpha.norm_sq().sqrt().max(f64::MIN_POSITIVE);
    let observable = xi0 >= xi && jumps.iter().any(|j| j.measured.abs() > 1e-12 * xi0 * scale);
    let verdict = if observable { "y ∉ D^ξ" } else { "no jump observed" }.to_string();
    Ok(ObservedJumpReport { xi, xi0, jumps, observable, verdict })
}

/// Convergence of `s [v_t + v_r]((s+τ)ω, -s)` to `(Oy)(τ, ω)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub tau: f64,
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    pub target: f64,
    pub errors: Vec<f64>,
    /// `log(e_i / e_{i+1}) / log(s_{i+1} / s_i)` for consecutive `s`.
    pub pair_orders: Vec<f64>,
    /// Empirical order from the two largest `s`.
    pub order: f64,
}

pub fn limit_definition(y: &HarmonicField, tau: f64, omega: [f64; 3], s_values: &[f64]) -> Result<LimitReport> {
    if s_values.len() < 2 || s_values.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidArgument("need at least two positive s values".into()));
    }
    let (theta, phi) = harmonics::direction_angles(omega);
    let ys = harmonics::eval_all(y.band_limit(), theta, phi);
    let mut target = 0.0;
    for (idx, p) in y.terms() {
        target += HarmonicRadon::new(p, idx.l)?.observation(tau, Side::Right) * ys[idx.flat()];
    }
    let mut values = Vec::new();
    for &s in s_values {
        let mut v = 0.0;
        for (idx, p) in y.terms() {
            let [_, vr, vt] = kirchhoff_harmonic_derivatives(p, idx.l, s + tau, -s)?;
            v += s * (vt + vr) * ys[idx.flat()];
        }
        values.push(v);
    }
    let errors: Vec<f64> = values.iter().map(|v| (v - target).abs()).collect();
    let pair_orders: Vec<f64> = (1..s_values.len())
        .map(|i| (errors[i - 1] / errors[i]).ln() / (s_values[i] / s_values[i - 1]).ln())
        .collect();
    let order = *pair_orders.last().expect("at least two s values");
    Ok(LimitReport { tau, s: s_values.to_vec(), values, target, errors, pair_orders, order })
}

/// Reference solution by leapfrog for `w = r·v`:
/// `w_tt = w_rr - l(l+1) w / r²`, `w(0) = 0`, `w(·,0) = 0`, `w_t(·,0) = r g`.
/// `v` is odd in `t`, so the run goes forward to `|t|` and flips the sign.
pub fn reference_solution(g: &RadialProfile, l: usize, r: f64, t: f64, dr: f64) -> Result<f64> {
    check_time(t)?;
    if !(dr > 0.0 && r > 0.0) {
        return Err(Error::InvalidArgument("reference solver needs r > 0 and dr > 0".into()));
    }
    let big_t = -t;
    let reach = if g.tail().is_some() { r + big_t } else { g.finite_end().min(r + big_t) };
    let r_max = reach + big_t + 4.0 * dr + r;
    let n = (r_max / dr).ceil() as usize + 1;
    let steps = (big_t / (0.5 * dr)).ceil() as usize;
    let dt = big_t / steps as f64;
    let lam = (dt / dr).powi(2);
    let ll = (l * (l + 1)) as f64;
    let grid: Vec<f64> = (0..n).map(|i| i as f64 * dr).collect();
    let apply = |w: &[f64], i: usize| -> f64 {
        let ri = grid[i];
        lam * (w[i + 1] - 2.0 * w[i] + w[i - 1]) - dt * dt * ll * w[i] / (ri * ri)
    };
    let mut prev = vec![0.0; n];
    let mut cur: Vec<f64> = grid.iter().map(|&ri| dt * ri * g.eval(ri)).collect();
    // w(dt) = dt·w_t + dt³/6·L(w_t) to third order
    let w_t = cur.iter().map(|c| c / dt).collect::<Vec<f64>>();
    for i in 1..n - 1 {
        cur[i] += dt * apply(&w_t, i) / 6.0;
    }
    cur[0] = 0.0;
    cur[n - 1] = 0.0;
    let mut next = vec![0.0; n];
    for _ in 1..steps {
        for i in 1..n - 1 {
            next[i] = 2.0 * cur[i] - prev[i] + apply(&cur, i);
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    let k = ((r / dr).floor() as usize).min(n - 2);
    let frac = (r - grid[k]) / dr;
    let w = cur[k] * (1.0 - frac) + cur[k + 1] * frac;
    Ok(-w / r)
}
