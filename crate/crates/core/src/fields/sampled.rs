use crate::error::{Error, Result};

use super::RadialMonomialSum;

/// Profile known through samples: piecewise cubic Hermite between knots,
/// with explicit one-sided values and slopes at every knot, and an optional
/// monomial tail beyond the last knot (otherwise zero there).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    knots: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    dleft: Vec<f64>,
    dright: Vec<f64>,
    tail: Option<RadialMonomialSum>,
}

/// One knot of a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub r: f64,
    pub left: f64,
    pub right: f64,
    pub dleft: f64,
    pub dright: f64,
}

impl Knot {
    /// A knot where the profile is smooth.
    pub fn smooth(r: f64, value: f64, slope: f64) -> Self {
        Self { r, left: value, right: value, dleft: slope, dright: slope }
    }
}

impl SampledProfile {
    pub fn new(knots: &[Knot], tail: Option<RadialMonomialSum>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidProfile("a sampled profile needs at least two knots".into()));
        }
        if knots.windows(2).any(|w| !(w[1].r > w[0].r)) || knots[0].r < 0.0 {
            return Err(Error::InvalidProfile("knots must be nonnegative and strictly increasing".into()));
        }
        if knots.iter().any(|k| ![k.left, k.right, k.dleft, k.dright].iter().all(|v| v.is_finite())) {
            return Err(Error::InvalidProfile("knot data must be finite".into()));
        }
        if let Some(t) = &tail {
            t.check_square_integrable()?;
        }
        let tail = tail.map(|t| t.with_support(knots.last().expect("checked").r));
        Ok(Self {
            knots: knots.iter().map(|k| k.r).collect(),
            left: knots.iter().map(|k| k.left).collect(),
            right: knots.iter().map(|k| k.right).collect(),
            dleft: knots.iter().map(|k| k.dleft).collect(),
            dright: knots.iter().map(|k| k.dright).collect(),
            tail,
        })
    }

    pub fn knots(&self) -> Vec<Knot> {
        (0..self.knots.len())
            .map(|i| Knot {
                r: self.knots[i],
                left: self.left[i],
                right: self.right[i],
                dleft: self.dleft[i],
                dright: self.dright[i],
            })
            .collect()
    }

    pub fn knot_radii(&self) -> &[f64] {
        &self.knots
    }

    pub fn tail(&self) -> Option<&RadialMonomialSum> {
        self.tail.as_ref()
    }

    pub fn start(&self) -> f64 {
        self.knots[0]
    }

    pub fn end(&self) -> f64 {
        *self.knots.last().expect("at least two knots")
    }

    fn interval(&self, r: f64) -> Option<usize> {
        if r < self.start() || r >= self.end() {
            return None;
        }
        Some(self.knots.partition_point(|&k| k <= r) - 1)
    }

    /// Hermite basis evaluation: value, first and second derivative.
    fn hermite(&self, i: usize, r: f64) -> [f64; 3] {
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        let (y0, y1) = (self.right[i], self.left[i + 1]);
        let (m0, m1) = (self.dright[i] * h, self.dleft[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let d = ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        let dd = ((12.0 * t - 6.0) * y0 + (6.0 * t - 4.0) * m0 + (-12.0 * t + 6.0) * y1 + (6.0 * t - 2.0) * m1)
            / (h * h);
        [v, d, dd]
    }

    fn eval_order(&self, r: f64, order: usize) -> f64 {
        match self.interval(r) {
            Some(i) => self.hermite(i, r)[order],
            None if r >= self.end() => match &self.tail {
                Some(t) => {
                    let mut t = t.clone();
                    for _ in 0..order {
                        t = t.derivative();
                    }
                    t.eval(r)
                }
                None => 0.0,
            },
            None => 0.0,
        }
    }

    /// Right-continuous value.
    pub fn eval(&self, r: f64) -> f64 {
        self.eval_order(r, 0)
    }

    /// `(left, right)` limits at `r`.
    pub fn one_sided(&self, r: f64) -> (f64, f64) {
        match self.knots.iter().position(|&k| k == r) {
            Some(i) => {
                let right = if i + 1 == self.knots.len() {
                    self.tail.as_ref().map_or(0.0, |t| t.eval(r))
                } else {
                    self.right[i]
                };
                let left = if i == 0 { 0.0 } else { self.left[i] };
                (left, right)
            }
            None => {
                let v = self.eval(r);
                (v, v)
            }
        }
    }

    /// Derivative as a sampled profile: slopes become values and the Hermite
    /// second derivatives (one-sided at knots) become slopes.
    pub fn derivative(&self) -> Self {
        let n = self.knots.len();
        let knots: Vec<Knot> = (0..n)
            .map(|i| {
                let dd_right = if i + 1 < n { self.hermite(i, self.knots[i])[2] } else { 0.0 };
                let dd_left = if i > 0 { self.hermite(i - 1, self.knots[i])[2] } else { 0.0 };
                Knot { r: self.knots[i], left: self.dleft[i], right: self.dright[i], dleft: dd_left, dright: dd_right }
            })
            .collect();
        let mut out = Self::new(&knots, None).expect("derived from a valid profile");
        out.tail = self.tail.as_ref().map(|t| t.derivative());
        out
    }

    pub fn eval_derivative(&self, r: f64, order: usize) -> f64 {
        self.eval_order(r, order)
    }
}

impl RadialMonomialSum {
    /// Samples the monomial sum on `knots` (all at or beyond the support
    /// radius) and keeps the sum itself as the tail.
    pub fn to_sampled(&self, knots: &[f64]) -> Result<SampledProfile> {
        let d = self.derivative();
        let data: Vec<Knot> = knots
            .iter()
            .map(|&r| {
                let mut k = Knot::smooth(r, self.eval(r), d.eval(r));
                if r == self.support() {
                    k.left = 0.0;
                    k.dleft = 0.0;
                }
                k
            })
            .collect();
        SampledProfile::new(&data, Some(self.clone()))
    }
}
