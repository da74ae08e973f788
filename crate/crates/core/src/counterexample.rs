//! The non-smooth unobservable state
//! `h = Σ_k a_k (1/r) [p(1/r)]^{2k+1} Y_{6k+3}`, `p(s) = 3s - 4s³`, on `r ≥ 1`.
//!
//! Every truncation `h_N` lies in `D¹`. Since `p(1/2) = 1` and `|p(1/r)| < 1`
//! elsewhere on `r > 1`, the series is smooth off the sphere `r = 2`, while on
//! it the Beltrami norm is `(1/4) Σ a_k² [(6k+3)(6k+4)]²`.

use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dspace::{polyharmonic_check, PolyClassP};
use crate::error::{Error, Result};
use crate::exact::{self, int, ratio, Polynomial, Rational};
use crate::fields::{HarmonicField, RadialMonomialSum};
use crate::harmonics::{AngularExpansion, HarmonicIndex};
use crate::radon::{uniform_grid, unobservability_residual};

/// Support radius of `h`.
pub const XI: f64 = 1.0;
/// Radius of the singular sphere.
pub const XI0: f64 = 2.0;

/// `p(s) = 3s - 4s³` as an element of `P_3`.
pub fn base_polynomial() -> PolyClassP {
    PolyClassP::new(3, vec![int(-4), int(3)]).expect("3s - 4s³ lies in P_3")
}

/// `p(s)` in exact arithmetic.
pub fn p_exact(s: &Rational) -> Rational {
    base_polynomial().polynomial().eval(s)
}

/// `q(r) = |p(1/r)|`, the contraction factor of the series at radius `r`.
pub fn contraction(r: f64) -> f64 {
    let u = 1.0 / r;
    (3.0 * u - 4.0 * u * u * u).abs()
}

/// Harmonic degree of the `k`-th term.
pub fn degree(k: usize) -> usize {
    6 * k + 3
}

fn beltrami(k: usize) -> f64 {
    let l = degree(k) as f64;
    l * (l + 1.0)
}

/// The coefficient sequence `a_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSchedule {
    /// `a_k = 1/k`.
    InvK,
    /// `a_k = 1`.
    Unit,
    /// Finitely many given values `a_1, a_2, …`.
    Custom(Vec<f64>),
}

impl CoefficientSchedule {
    pub fn name(&self) -> &'static str {
        match self {
            Self::InvK => "inv_k",
            Self::Unit => "unit",
            Self::Custom(_) => "custom",
        }
    }

    /// Number of available terms (`None` for the infinite schedules).
    pub fn term_count(&self) -> Option<usize> {
        match self {
            Self::Custom(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::Custom(v) = self {
            if let Some(a) = v.iter().find(|a| !a.is_finite()) {
                return Err(Error::ScheduleRejected(format!("non-finite coefficient {a}")));
            }
        }
        Ok(())
    }

    /// Exact `a_k`, `k ≥ 1`.
    pub fn coefficient(&self, k: usize) -> Result<Rational> {
        if k == 0 {
            return Err(Error::InvalidArgument("coefficients are indexed from k = 1".into()));
        }
        match self {
            Self::InvK => Ok(ratio(1, k as i64)),
            Self::Unit => Ok(Rational::one()),
            Self::Custom(v) => v
                .get(k - 1)
                .map(|&a| exact::from_f64(a))
                .ok_or_else(|| Error::InvalidArgument(format!("custom schedule has {} terms, asked for k={k}", v.len()))),
        }
    }

    pub fn value(&self, k: usize) -> Result<f64> {
        Ok(exact::to_f64(&self.coefficient(k)?))
    }

    /// `sup_{k > n} |a_k|`.
    pub fn tail_sup(&self, n: usize) -> f64 {
        match self {
            Self::InvK => 1.0 / (n + 1) as f64,
            Self::Unit => 1.0,
            Self::Custom(v) => v.iter().skip(n).fold(0.0, |m, a| m.max(a.abs())),
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        self.validate()?;
        match self.term_count() {
            Some(len) if n > len => Err(Error::InvalidArgument(format!("custom schedule has {len} terms, N={n}"))),
            _ => Ok(()),
        }
    }
}

impl FromStr for CoefficientSchedule {
    type Err = Error;

    /// `inv_k`, `unit`, or a comma-separated list of values.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inv_k" => Ok(Self::InvK),
            "unit" => Ok(Self::Unit),
            list => {
                let values = list
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::ScheduleRejected(format!("expected inv_k, unit or a list of numbers, got '{s}'")))?;
                let sched = Self::Custom(values);
                sched.validate()?;
                Ok(sched)
            }
        }
    }
}

/// Which `Y_{6k+3}^m` carries the `k`-th term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MChoice {
    #[default]
    Zero,
    /// `m = l`.
    Highest,
    /// `m = -l`.
    Lowest,
    /// `m = (7k mod (2l+1)) - l`.
    Cycle,
}

impl MChoice {
    pub fn order(&self, k: usize) -> i64 {
        let l = degree(k) as i64;
        match self {
            Self::Zero => 0,
            Self::Highest => l,
            Self::Lowest => -l,
            Self::Cycle => (7 * k as i64) % (2 * l + 1) - l,
        }
    }
}

impl FromStr for MChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Self::Zero),
            "highest" => Ok(Self::Highest),
            "lowest" => Ok(Self::Lowest),
            "cycle" => Ok(Self::Cycle),
            _ => Err(Error::InvalidArgument(format!("unknown m-choice '{s}'"))),
        }
    }
}

/// One summand `a_k (1/r) [p(1/r)]^{2k+1} Y_{6k+3}^{m(k)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterTerm {
    pub k: usize,
    pub index: HarmonicIndex,
    pub coefficient: Rational,
    pub profile: RadialMonomialSum,
}

/// `h_N`, the first `N` terms of `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedH {
    n: usize,
    schedule: CoefficientSchedule,
    m_choice: MChoice,
    terms: Vec<CounterTerm>,
    field: HarmonicField,
}

impl TruncatedH {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn schedule(&self) -> &CoefficientSchedule {
        &self.schedule
    }

    pub fn m_choice(&self) -> MChoice {
        self.m_choice
    }

    pub fn terms(&self) -> &[CounterTerm] {
        &self.terms
    }

    pub fn field(&self) -> &HarmonicField {
        &self.field
    }

    /// Copy with `delta · r^exponent` added to the radial part of term `k`.
    pub fn perturbed(&self, k: usize, exponent: i32, delta: f64) -> Result<Self> {
        let mut terms = self.terms.clone();
        let term = terms
            .iter_mut()
            .find(|t| t.k == k)
            .ok_or_else(|| Error::InvalidArgument(format!("no term k={k}")))?;
        term.profile = term.profile.add(&RadialMonomialSum::new(XI, [(exact::from_f64(delta), exponent)]));
        let field = assemble(&terms)?;
        Ok(Self { terms, field, ..self.clone() })
    }
}

fn assemble(terms: &[CounterTerm]) -> Result<HarmonicField> {
    let mut field = HarmonicField::new(XI);
    for t in terms {
        field.insert(t.index, t.profile.clone())?;
    }
    Ok(field)
}

/// Builds `h_N` with exact monomial radial parts; `N = 0` gives the zero field.
pub fn build_h(n: usize, schedule: &CoefficientSchedule, m_choice: MChoice) -> Result<TruncatedH> {
    schedule.check_len(n)?;
    let p = base_polynomial();
    let p_sq = p.polynomial().mul(p.polynomial());
    let mut odd_power = p.polynomial().clone();
    let mut terms = Vec::with_capacity(n);
    for k in 1..=n {
        let a = schedule.coefficient(k)?;
        // p^{2k+1} = p^{2k-1} p², certified in P_{6k+3} as power_expand does
        odd_power = odd_power.mul(&p_sq);
        let power = PolyClassP::from_polynomial(degree(k), odd_power.clone())?;
        let index = HarmonicIndex::new(degree(k), m_choice.order(k))?;
        let profile = power.radial_profile(XI).scale(&a);
        terms.push(CounterTerm { k, index, coefficient: a, profile });
    }
    let field = assemble(&terms)?;
    Ok(TruncatedH { n, schedule: schedule.clone(), m_choice, terms, field })
}

/// `h_N(2, ·)` and its norms, all computed from exact values at `r = 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueAtTwo {
    #[serde(skip)]
    pub expansion: AngularExpansion,
    /// `(l, m, h_lm(2))`.
    pub coefficients: Vec<(usize, i64, f64)>,
    /// `‖h_N(2,·)‖²`.
    pub l2_norm_sq: f64,
    /// `‖Δ_ω h_N(2,·)‖²`.
    pub beltrami_norm_sq: f64,
}

pub fn value_at_2(h: &TruncatedH) -> Result<ValueAtTwo> {
    let two = int(2);
    let band = h.terms.last().map_or(0, |t| t.index.l);
    let mut expansion = AngularExpansion::new(band);
    let mut l2 = Rational::zero();
    let mut bel = Rational::zero();
    let mut coefficients = Vec::with_capacity(h.terms.len());
    for t in &h.terms {
        let v = t.profile.eval_exact(&two);
        let l = t.index.l as i64;
        let lam = int(l * (l + 1));
        l2 += &v * &v;
        bel += &v * &v * &lam * &lam;
        expansion.set(t.index, exact::to_f64(&v))?;
        coefficients.push((t.index.l, t.index.m, exact::to_f64(&v)));
    }
    Ok(ValueAtTwo { expansion, coefficients, l2_norm_sq: exact::to_f64(&l2), beltrami_norm_sq: exact::to_f64(&bel) })
}

/// Exact `h` and `∂_r h` of one term at `r = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialAtTwo {
    pub k: usize,
    pub index: HarmonicIndex,
    pub value: Rational,
    pub radial_derivative: Rational,
}

/// Term-wise values at the singular sphere. Each term is a single monomial
/// formula on `r ≥ 1`, so both one-sided limits at `r = 2` are these numbers.
pub fn radial_at_2(h: &TruncatedH) -> Vec<RadialAtTwo> {
    let two = int(2);
    h.terms
        .iter()
        .map(|t| RadialAtTwo {
            k: t.k,
            index: t.index,
            value: t.profile.eval_exact(&two),
            radial_derivative: t.profile.derivative().eval_exact(&two),
        })
        .collect()
}

/// `[f, f', f'']` for `f(r) = (1/r) [p(1/r)]^n`.
pub fn term_derivatives(n: usize, r: f64) -> [f64; 3] {
    let u = 1.0 / r;
    let p = 3.0 * u - 4.0 * u * u * u;
    let p1 = 3.0 - 12.0 * u * u;
    let p2 = -24.0 * u;
    let nf = n as f64;
    let pn2 = if n >= 2 { p.powi(n as i32 - 2) } else { 0.0 };
    let pn1 = if n >= 1 { p.powi(n as i32 - 1) } else { 0.0 };
    let pn = p.powi(n as i32);
    // g(u) = u p(u)^n, f(r) = g(1/r)
    let g = u * pn;
    let gu = pn + nf * u * p1 * pn1;
    let guu = 2.0 * nf * p1 * pn1 + nf * u * p2 * pn1 + nf * (nf - 1.0) * u * p1 * p1 * pn2;
    [g, -u * u * gu, 2.0 * u * u * u * gu + u.powi(4) * guu]
}

/// Upper bound for `|f^{(order)}|` of the term with power `n`.
fn term_bound(n: usize, r: f64, order: usize) -> f64 {
    let u = 1.0 / r;
    let q = contraction(r);
    let a = (3.0 - 12.0 * u * u).abs();
    let b = 24.0 * u;
    let nf = n as f64;
    match order {
        0 => u * q.powi(n as i32),
        1 => u * u * q.powi(n as i32 - 1) * (q + nf * u * a),
        _ => {
            q.powi(n as i32 - 2)
                * (2.0 * u.powi(3) * (q * q + nf * u * a * q)
                    + u.powi(4) * (2.0 * nf * a * q + nf * u * b * q + nf * (nf - 1.0) * u * a * a))
        }
    }
}

/// `‖∂_r^order h_N(r,·)‖²` by direct summation.
pub fn radial_derivative_norm_sq(schedule: &CoefficientSchedule, n: usize, r: f64, order: usize) -> Result<f64> {
    derivative_series(schedule, n, r, order, 0)
}

fn derivative_series(schedule: &CoefficientSchedule, n: usize, r: f64, order: usize, weight: i32) -> Result<f64> {
    if order > 2 {
        return Err(Error::DerivativeOrder(order));
    }
    schedule.check_len(n)?;
    if r < XI {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for k in 1..=n {
        let a = schedule.value(k)?;
        let f = term_derivatives(2 * k + 1, r)[order];
        sum += a * a * beltrami(k).powi(2 * weight) * f * f;
    }
    Ok(sum)
}

/// Certified bound of `Σ_{k>n} sup|a|² λ_k^{2·weight} B_k²` where `B_k` bounds
/// the term derivative; the ratio bound of consecutive summands is
/// nonincreasing in `k`, so the tail past the first ratio below `0.9` is geometric.
fn series_tail_bound(a_sup: f64, n: usize, r: f64, order: usize, weight: i32) -> f64 {
    if a_sup == 0.0 {
        return 0.0;
    }
    let q = contraction(r);
    let term = |k: usize| {
        let b = term_bound(2 * k + 1, r, order);
        a_sup * a_sup * beltrami(k).powi(2 * weight) * b * b
    };
    let ratio = |k: usize| {
        let nf = (2 * k + 1) as f64;
        ((nf + 2.0) / nf).powi(2 * order as i32) * (beltrami(k + 1) / beltrami(k)).powi(2 * weight) * q.powi(4)
    };
    // any k with ratio < 1 closes the tail geometrically; keep summing while
    // the closure is still loose
    let mut sum = 0.0;
    let mut best = f64::INFINITY;
    for k in n + 1..n + 200_000 {
        let rho = ratio(k);
        let t = term(k);
        if rho < 1.0 {
            best = best.min(sum + t / (1.0 - rho));
            if rho < 0.5 || t == 0.0 {
                break;
            }
        }
        sum += t;
    }
    best
}

/// One line of the smoothness table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessRow {
    pub r: f64,
    pub q: f64,
    /// Radial derivative order.
    pub order: usize,
    /// `l2` for `‖∂_r^d h_N‖²`, `beltrami` for `‖Δ_ω ∂_r^d h_N‖²`.
    pub norm: &'static str,
    pub partial: f64,
    pub tail_bound: f64,
    pub tolerance: f64,
    pub cauchy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub n: usize,
    pub exclusion: f64,
    pub rows: Vec<SmoothnessRow>,
    pub cauchy: bool,
}

/// Partial sums and certified tails of the angular norms of `∂_r^d h` for
/// `d = 0, 1, 2` at radii off the sphere `r = 2`.
pub fn smoothness_diagnostics(h: &TruncatedH, radii: &[f64], exclusion: f64, tol: f64) -> Result<SmoothnessReport> {
    if !(exclusion > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument("exclusion radius and tolerance must be positive".into()));
    }
    let a_sup = h.schedule.tail_sup(h.n);
    let mut rows = Vec::new();
    for &r in radii {
        if !(r > XI && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("diagnostics are taken on r > 1, got {r}")));
        }
        if (r - XI0).abs() < exclusion {
            return Err(Error::ExcludedPoint { r, center: XI0 });
        }
        for order in 0..=2 {
            for (weight, norm) in [(0, "l2"), (1, "beltrami")] {
                let partial = derivative_series(&h.schedule, h.n, r, order, weight)?;
                let tail_bound = series_tail_bound(a_sup, h.n, r, order, weight);
                rows.push(SmoothnessRow {
                    r,
                    q: contraction(r),
                    order,
                    norm,
                    partial,
                    tail_bound,
                    tolerance: tol,
                    cauchy: tail_bound <= tol,
                });
            }
        }
    }
    let cauchy = rows.iter().all(|r| r.cauchy);
    Ok(SmoothnessReport { n: h.n, exclusion, rows, cauchy })
}

/// `S(N) = (1/4) Σ_{k≤N} a_k² [(6k+3)(6k+4)]²`, exactly.
pub fn beltrami_partial_sum(schedule: &CoefficientSchedule, n: usize) -> Result<Rational> {
    schedule.check_len(n)?;
    let mut s = Rational::zero();
    for k in 1..=n {
        let a = schedule.coefficient(k)?;
        let l = degree(k) as i64;
        let lam = int(l * (l + 1));
        s += &a * &a * &lam * &lam;
    }
    Ok(s / int(4))
}

/// `‖h_N(2,·)‖² = (1/4) Σ_{k≤N} a_k²`, exactly.
pub fn l2_at_two(schedule: &CoefficientSchedule, n: usize) -> Result<Rational> {
    schedule.check_len(n)?;
    let mut s = Rational::zero();
    for k in 1..=n {
        let a = schedule.coefficient(k)?;
        s += &a * &a;
    }
    Ok(s / int(4))
}

/// `(1/4) Σ_{k>n} 1/k²`.
fn inv_k_l2_tail(n: usize) -> f64 {
    let head: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
    0.25 * (std::f64::consts::PI.powi(2) / 6.0 - head)
}

/// Ranges and tolerances of the divergence certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Growth-law check runs over `law_from..=law_reference`.
    pub law_from: usize,
    pub law_reference: usize,
    pub law_tol: f64,
    pub tail_from: usize,
    pub tail_tol: f64,
}

impl Default for DivergenceConfig {
    fn default() -> Self {
        Self { n_min: 5, n_max: 50, law_from: 50, law_reference: 100, law_tol: 0.1, tail_from: 100, tail_tol: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub s_n: f64,
    pub s_2n: f64,
    pub doubling: bool,
    /// `S(N) / N^e` with `e` the growth exponent.
    pub law_ratio: f64,
    pub l2_at_two: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub schedule: &'static str,
    pub rows: Vec<GrowthRow>,
    pub doubling: bool,
    /// `e` in `S(N) ~ c N^e`: 3 for `a_k = 1/k`, 5 for `a_k = 1`.
    pub growth_exponent: i32,
    /// Leading constant `c` of the closed-form law.
    pub law_constant: f64,
    pub law_reference_ratio: f64,
    pub law_max_deviation: f64,
    pub law_tolerance: f64,
    pub law: bool,
    /// `‖h(2,·)‖² - ‖h_N(2,·)‖²` at `N = tail_from` (infinite for `a_k = 1`).
    pub l2_tail: f64,
    pub l2_tail_tolerance: f64,
    pub l2_tail_pass: bool,
    /// First `N` with tail below tolerance.
    pub l2_tail_reached_at: Option<usize>,
    /// `a_k = 1` only: `‖h_N(2,·)‖² = N/4` held exactly over the range.
    pub l2_linear: Option<bool>,
    pub note: String,
}

/// Monotone-growth evidence for the divergence of `‖Δ_ω h(2,·)‖`.
pub fn divergence_certificate(schedule: &CoefficientSchedule, cfg: &DivergenceConfig) -> Result<DivergenceReport> {
    let (exponent, constant) = match schedule {
        // a_k² λ_k² = (36k + 42 + 12/k)² ~ 1296 k²
        CoefficientSchedule::InvK => (3, 1296.0 / 4.0 / 3.0),
        // λ_k² ~ 1296 k⁴
        CoefficientSchedule::Unit => (5, 1296.0 / 4.0 / 5.0),
        CoefficientSchedule::Custom(_) => {
            return Err(Error::ScheduleRejected(
                "a finite coefficient list cannot satisfy Σ k⁴ a_k² = ∞; use inv_k or unit".into(),
            ))
        }
    };
    if cfg.n_min == 0 || cfg.n_min > cfg.n_max || cfg.law_from == 0 || cfg.law_from > cfg.law_reference {
        return Err(Error::InvalidArgument("empty or invalid N range".into()));
    }
    let top = (2 * cfg.n_max).max(cfg.law_reference);
    // running exact sums
    let mut s = vec![Rational::zero(); top + 1];
    let mut l2 = vec![Rational::zero(); top + 1];
    for k in 1..=top {
        let a = schedule.coefficient(k)?;
        let l = degree(k) as i64;
        let lam = int(l * (l + 1));
        let a2 = &a * &a;
        s[k] = &s[k - 1] + &a2 * &lam * &lam / int(4);
        l2[k] = &l2[k - 1] + &a2 / int(4);
    }
    let law_ratio = |n: usize| exact::to_f64(&s[n]) / (n as f64).powi(exponent);
    let rows: Vec<GrowthRow> = (cfg.n_min..=cfg.n_max)
        .map(|n| GrowthRow {
            n,
            s_n: exact::to_f64(&s[n]),
            s_2n: exact::to_f64(&s[2 * n]),
            doubling: s[2 * n] >= &s[n] * int(2),
            law_ratio: law_ratio(n),
            l2_at_two: exact::to_f64(&l2[n]),
        })
        .collect();
    let doubling = rows.iter().all(|r| r.doubling);
    let reference = law_ratio(cfg.law_reference);
    let law_max_deviation =
        (cfg.law_from..=cfg.law_reference).map(|n| (law_ratio(n) / reference - 1.0).abs()).fold(0.0, f64::max);
    let law = law_max_deviation <= cfg.law_tol;

    let (l2_tail, l2_tail_reached_at, l2_linear) = match schedule {
        CoefficientSchedule::InvK => {
            let reached = (1..=10_000_000).find(|&n| inv_k_l2_tail(n) < cfg.tail_tol);
            (inv_k_l2_tail(cfg.tail_from), reached, None)
        }
        _ => {
            let linear = (1..=top).all(|n| l2[n] == ratio(n as i64, 4));
            (f64::INFINITY, None, Some(linear))
        }
    };
    let l2_tail_pass = l2_tail < cfg.tail_tol;
    let note = format!(
        "finite-range evidence: S(2N) ≥ 2S(N) for N in {}..={} and S(N) ~ {constant} N^{exponent}; \
         the divergence itself is the limit of this law, not a numerical infinity",
        cfg.n_min, cfg.n_max
    );
    Ok(DivergenceReport {
        schedule: schedule.name(),
        rows,
        doubling,
        growth_exponent: exponent,
        law_constant: constant,
        law_reference_ratio: reference,
        law_max_deviation,
        law_tolerance: cfg.law_tol,
        law,
        l2_tail,
        l2_tail_tolerance: cfg.tail_tol,
        l2_tail_pass,
        l2_tail_reached_at,
        l2_linear,
        note,
    })
}

impl DivergenceReport {
    /// Plot-ready `N,S_N,S_2N,l2_at_two` table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,S_N,S_2N,l2_at_two\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:.16e},{:.16e},{:.16e}", r.n, r.s_n, r.s_2n, r.l2_at_two);
        }
        out
    }
}

/// Membership checks of a single term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermCertificate {
    pub k: usize,
    pub l: usize,
    pub m: i64,
    /// Radial part is `(1/r) p(1/r)` with `p ∈ P_l`.
    pub parity: bool,
    /// Exact `Δ^l` test (only for `k ≤ k_max`).
    pub polyharmonic: Option<bool>,
    pub residual: f64,
    pub residual_pass: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipCertificate {
    pub k_max: usize,
    pub tau_range: [f64; 2],
    pub residual_tolerance: f64,
    pub terms: Vec<TermCertificate>,
    /// Residual of the whole field.
    pub residual: f64,
    pub passed: bool,
}

/// Settings of the membership certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipConfig {
    pub k_max: usize,
    pub tau_max: f64,
    pub tau_step: f64,
    pub tol: f64,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        Self { k_max: 4, tau_max: 10.0, tau_step: 0.01, tol: 1e-8 }
    }
}

fn parity_check(term: &CounterTerm) -> bool {
    let l = term.index.l;
    let mut coeffs = Vec::new();
    for (c, a) in term.profile.terms() {
        if a > -2 {
            return false;
        }
        coeffs.push(((-a - 1) as usize, c.clone()));
    }
    PolyClassP::from_polynomial(l, Polynomial::from_terms(coeffs)).is_ok()
}

/// All three certificates for every term, without aborting.
pub fn membership_report(h: &TruncatedH, cfg: &MembershipConfig) -> Result<MembershipCertificate> {
    let taus = uniform_grid(cfg.tau_max, cfg.tau_step)?;
    let mut terms = Vec::with_capacity(h.terms.len());
    for t in &h.terms {
        let single = HarmonicField::single(XI, t.index, t.profile.clone())?;
        let parity = parity_check(t);
        let polyharmonic =
            if t.k <= cfg.k_max { Some(polyharmonic_check(&single)?.passed) } else { None };
        let residual = unobservability_residual(&single, XI, &taus)?;
        let residual_pass = residual <= cfg.tol;
        terms.push(TermCertificate {
            k: t.k,
            l: t.index.l,
            m: t.index.m,
            parity,
            polyharmonic,
            residual,
            residual_pass,
            passed: parity && polyharmonic.unwrap_or(true) && residual_pass,
        });
    }
    let residual = unobservability_residual(&h.field, XI, &taus)?;
    let passed = terms.iter().all(|t| t.passed) && residual <= cfg.tol;
    Ok(MembershipCertificate {
        k_max: cfg.k_max,
        tau_range: [XI, cfg.tau_max],
        residual_tolerance: cfg.tol,
        terms,
        residual,
        passed,
    })
}

/// [`membership_report`], failing on the first term that does not certify.
pub fn membership_certificate(h: &TruncatedH, cfg: &MembershipConfig) -> Result<MembershipCertificate> {
    let rep = membership_report(h, cfg)?;
    if let Some(t) = rep.terms.iter().find(|t| !t.passed) {
        let reason = if !t.parity {
            "radial part is not (1/r)p(1/r) with p in the degree class".to_string()
        } else if t.polyharmonic == Some(false) {
            format!("Δ^{} leaves a nonzero residual", t.l)
        } else {
            format!("unobservability residual {:.3e} exceeds {:.1e}", t.residual, rep.residual_tolerance)
        };
        return Err(Error::CertificateFailed { k: t.k, reason });
    }
    Ok(rep)
}

/// Largest `|coefficient|` in the exact expansion of term `k`, a measure of
/// the cancellation that floating-point evaluation near `r = 1` must survive.
pub fn expansion_magnitude(h: &TruncatedH, k: usize) -> Option<f64> {
    h.terms.iter().find(|t| t.k == k).map(|t| {
        t.profile.terms().map(|(c, _)| exact::to_f64(&c.abs())).fold(0.0, f64::max)
    })
}
