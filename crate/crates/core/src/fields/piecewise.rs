use crate::error::{Error, Result};

/// Compactly supported piecewise polynomial in `r`.
///
/// Segment `i` covers `[b_i, b_{i+1})` with coefficients in the local variable
/// `r - b_i`; the profile is zero outside `[b_0, b_n]`. One-sided values at
/// every breakpoint are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    segments: Vec<Vec<f64>>,
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<f64>, segments: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2 || segments.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidProfile(format!(
                "{} breakpoints need {} segments, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                segments.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) || breakpoints[0] < 0.0 {
            return Err(Error::InvalidProfile("breakpoints must be nonnegative and strictly increasing".into()));
        }
        Ok(Self { breakpoints, segments })
    }

    /// `1` on `[a, b)`, zero elsewhere.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![vec![1.0]])
    }

    /// Quintic smoothstep from `1` at `start` down to `0` at `end`; zero
    /// below `start` (a unit jump there) and above `end`. C² at `end`.
    pub fn smoothstep_down(start: f64, end: f64) -> Result<Self> {
        let w = end - start;
        Self::new(
            vec![start, end],
            vec![vec![1.0, 0.0, 0.0, -10.0 / w.powi(3), 15.0 / w.powi(4), -6.0 / w.powi(5)]],
        )
    }

    /// `amp · ((r-a)(b-r))^power` on `[a, b]`, zero elsewhere.
    pub fn bump(a: f64, b: f64, power: u32, amp: f64) -> Result<Self> {
        let len = b - a;
        // (x (L - x))^p = Σ_i C(p,i) L^{p-i} (-1)^i x^{p+i}
        let p = power as usize;
        let mut coeffs = vec![0.0; 2 * p + 1];
        let mut binom = 1.0;
        for i in 0..=p {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[p + i] = amp * sign * binom * len.powi((p - i) as i32);
            binom = binom * (p - i) as f64 / (i + 1) as f64;
        }
        Self::new(vec![a, b], vec![coeffs])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Vec<f64>] {
        &self.segments
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        *self.breakpoints.last().expect("at least two breakpoints")
    }

    fn segment_at(&self, r: f64) -> Option<usize> {
        if r < self.start() || r >= self.end() {
            return None;
        }
        Some(self.breakpoints.partition_point(|&b| b <= r) - 1)
    }

    /// Right-continuous value.
    pub fn eval(&self, r: f64) -> f64 {
        match self.segment_at(r) {
            Some(i) => horner(&self.segments[i], r - self.breakpoints[i]),
            None => 0.0,
        }
    }

    /// `(left limit, right limit)` at `r`.
    pub fn one_sided(&self, r: f64) -> (f64, f64) {
        let right = self.eval(r);
        let left = match self.breakpoints.iter().position(|&b| b == r) {
            Some(0) => 0.0,
            Some(i) => horner(&self.segments[i - 1], r - self.breakpoints[i - 1]),
            None => right,
        };
        (left, right)
    }

    pub fn derivative(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|c| c.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect())
            .collect();
        Self { breakpoints: self.breakpoints.clone(), segments }
    }

    pub fn max_degree(&self) -> usize {
        self.segments.iter().map(|s| s.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            segments: self.segments.iter().map(|s| s.iter().map(|c| c * k).collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_has_unit_jump_and_vanishes_smoothly() {
        let chi = PiecewisePolynomial::smoothstep_down(2.0, 3.0).unwrap();
        assert_eq!(chi.one_sided(2.0), (0.0, 1.0));
        let (l, r) = chi.one_sided(3.0);
        assert!(l.abs() < 1e-14 && r == 0.0);
        let d = chi.derivative();
        assert!(d.one_sided(2.0).1.abs() < 1e-14);
        assert!(d.one_sided(3.0).0.abs() < 1e-12);
        assert!(d.derivative().one_sided(3.0).0.abs() < 1e-10);
        assert!((chi.eval(2.5) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn bump_matches_direct_formula() {
        let b = PiecewisePolynomial::bump(1.0, 3.0, 4, 2.0).unwrap();
        for r in [1.1f64, 1.7, 2.0, 2.9] {
            let direct = 2.0 * ((r - 1.0) * (3.0 - r)).powi(4);
            assert!((b.eval(r) - direct).abs() < 1e-12);
        }
        assert_eq!(b.eval(0.5), 0.0);
        assert_eq!(b.eval(3.5), 0.0);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(PiecewisePolynomial::new(vec![1.0, 1.0], vec![vec![1.0]]).is_err());
        assert!(PiecewisePolynomial::new(vec![1.0, 2.0, 3.0], vec![vec![1.0]]).is_err());
    }
}
