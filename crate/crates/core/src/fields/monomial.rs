use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{self, int, Rational};

/// `Σ c_j r^{a_j}` for `r ≥ ξ`, zero for `r < ξ`, with exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMonomialSum {
    support: f64,
    terms: BTreeMap<i32, Rational>,
}

impl RadialMonomialSum {
    pub fn new(support: f64, terms: impl IntoIterator<Item = (Rational, i32)>) -> Self {
        let mut map: BTreeMap<i32, Rational> = BTreeMap::new();
        for (c, a) in terms {
            *map.entry(a).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Self { support, terms: map }
    }

    pub fn zero(support: f64) -> Self {
        Self { support, terms: BTreeMap::new() }
    }

    /// Convenience constructor from float coefficients (converted exactly).
    pub fn from_f64(support: f64, terms: &[(f64, i32)]) -> Self {
        Self::new(support, terms.iter().map(|&(c, a)| (exact::from_f64(c), a)))
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn with_support(&self, support: f64) -> Self {
        Self { support, terms: self.terms.clone() }
    }

    /// `(coefficient, exponent)` pairs in increasing exponent.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, i32)> {
        self.terms.iter().map(|(a, c)| (c, *a))
    }

    pub fn coefficient(&self, exponent: i32) -> Rational {
        self.terms.get(&exponent).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn exponents(&self) -> Vec<i32> {
        self.terms.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// Square integrability against `r² dr` on `[ξ, ∞)` needs every `a ≤ -2`.
    pub fn check_square_integrable(&self) -> Result<()> {
        match self.max_exponent() {
            Some(a) if 2 * a + 2 >= -1 => Err(Error::NonSquareIntegrable { exponent: a }),
            _ => Ok(()),
        }
    }

    /// Value in floating point, `0` below the support radius.
    pub fn eval(&self, r: f64) -> f64 {
        if r < self.support {
            return 0.0;
        }
        self.eval_formula(r)
    }

    /// The monomial formula itself, ignoring the support cut.
    pub fn eval_formula(&self, r: f64) -> f64 {
        self.terms.iter().map(|(a, c)| exact::to_f64(c) * r.powi(*a)).sum()
    }

    /// Exact value at an exact radius (support cut applied).
    pub fn eval_exact(&self, r: &Rational) -> Rational {
        if exact::to_f64(r) < self.support {
            return Rational::zero();
        }
        self.terms.iter().map(|(a, c)| c * exact::powi(r, *a)).sum()
    }

    /// Value computed exactly from the float radius, then rounded once.
    /// Immune to the cancellation of large alternating coefficients.
    pub fn eval_precise(&self, r: f64) -> f64 {
        exact::to_f64(&self.eval_exact(&exact::from_f64(r)))
    }

    /// Term-wise derivative (support unchanged).
    pub fn derivative(&self) -> Self {
        Self::new(
            self.support,
            self.terms().map(|(c, a)| (c * int(a as i64), a - 1)),
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.support, self.terms().map(|(c, a)| (c * k, a)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.support.min(other.support),
            self.terms().chain(other.terms()).map(|(c, a)| (c.clone(), a)),
        )
    }

    /// `Δ (f(r) Y_l)` for `f = self`, radial part, support unchanged.
    pub fn laplacian(&self, degree: usize) -> Self {
        Self::new(
            self.support,
            self.terms().map(|(c, a)| laplacian_symbolic(c, a, degree)),
        )
    }

    /// Exact `∫_from^∞ f(r) g(r) r² dr` for two monomial sums valid on `[from, ∞)`.
    pub fn tail_inner_exact(&self, other: &Self, from: &Rational) -> Result<Rational> {
        let mut by_power: BTreeMap<i32, Rational> = BTreeMap::new();
        for (c1, a1) in self.terms() {
            for (c2, a2) in other.terms() {
                *by_power.entry(a1 + a2 + 2).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        let mut acc = Rational::zero();
        for (e, c) in by_power {
            if c.is_zero() {
                continue;
            }
            if e >= -1 {
                // the offending exponent belongs to the larger factor
                let worst = self.max_exponent().max(other.max_exponent()).unwrap_or(e);
                return Err(Error::NonSquareIntegrable { exponent: worst });
            }
            // ∫_R^∞ r^e dr = -R^{e+1}/(e+1)
            acc += c * exact::powi(from, e + 1) / int(-(e as i64) - 1);
        }
        Ok(acc)
    }

    pub fn tail_inner(&self, other: &Self, from: f64) -> Result<f64> {
        Ok(exact::to_f64(&self.tail_inner_exact(other, &exact::from_f64(from))?))
    }

    /// `∫_ξ^∞ f(r)² r² dr`, exact up to the final rounding.
    pub fn norm_sq(&self) -> Result<f64> {
        self.check_square_integrable()?;
        self.tail_inner(self, self.support)
    }
}

/// `Δ(c r^a Y_l) = c [a(a+1) - l(l+1)] r^{a-2} Y_l`, returned as
/// `(new coefficient, new exponent)`.
pub fn laplacian_symbolic(coeff: &Rational, exponent: i32, degree: usize) -> (Rational, i32) {
    let a = exponent as i64;
    let l = degree as i64;
    (coeff * int(a * (a + 1) - l * (l + 1)), exponent - 2)
}

/// `times` symbolic Laplacians, stopping early once the sum vanishes.
pub(crate) fn iterated_laplacian(f: &RadialMonomialSum, degree: usize, times: usize) -> RadialMonomialSum {
    let mut cur = f.clone();
    for _ in 0..times {
        if cur.is_zero() {
            break;
        }
        cur = cur.laplacian(degree);
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn norm_of_r_minus_two_from_one() {
        let f = RadialMonomialSum::from_f64(1.0, &[(1.0, -2)]);
        assert_eq!(f.norm_sq().unwrap(), 1.0);
    }

    #[test]
    fn norm_of_r_minus_three_from_two() {
        // ∫_2^∞ r^-4 dr = 1/24
        let f = RadialMonomialSum::from_f64(2.0, &[(1.0, -3)]);
        let oracle = crate::quad::adaptive(|u: f64| {
            let r = 2.0 / u;
            r.powi(-6) * r * r * 2.0 / (u * u)
        }, 0.0, 1.0, 1e-15, 1e-14).value;
        assert!((f.norm_sq().unwrap() - oracle).abs() < 1e-14);
        assert!((oracle - 1.0 / 24.0).abs() < 1e-14);
    }

    #[test]
    fn non_square_integrable_exponent_rejected() {
        let f = RadialMonomialSum::from_f64(1.0, &[(1.0, -1), (2.0, -3)]);
        assert_eq!(f.norm_sq(), Err(Error::NonSquareIntegrable { exponent: -1 }));
    }

    #[test]
    fn laplacian_examples() {
        for l in 0..12usize {
            let (c, _) = laplacian_symbolic(&int(1), -(l as i32) - 1, l);
            assert!(c.is_zero());
        }
        assert_eq!(laplacian_symbolic(&int(1), -2, 1), (int(0), -4));
        assert_eq!(laplacian_symbolic(&int(1), -2, 3), (int(-10), -4));
    }

    #[test]
    fn derivative_is_termwise() {
        let f = RadialMonomialSum::from_f64(1.0, &[(1.0, -2)]);
        assert_eq!(f.derivative(), RadialMonomialSum::from_f64(1.0, &[(-2.0, -3)]));
    }

    #[test]
    fn below_support_is_exact_zero() {
        let f = RadialMonomialSum::from_f64(2.0, &[(5.0, -2), (-1.0, -7)]);
        assert_eq!(f.eval(1.999), 0.0);
        assert_eq!(f.eval_exact(&ratio(3, 2)), int(0));
    }

    #[test]
    fn precise_evaluation_survives_cancellation() {
        // (1 - 1/r)^40 expanded has coefficients ~1e11 but is tiny near r = 1.
        let p = crate::exact::Polynomial::from_terms([(0, int(1)), (1, int(-1))]).pow(40);
        let f = RadialMonomialSum::new(1.0, p.terms().map(|(k, c)| (c.clone(), -(k as i32))));
        let r = 1.25;
        let truth = (1.0f64 - 1.0 / r).powi(40);
        assert!((f.eval_precise(r) - truth).abs() < 1e-13 * truth);
        assert!((f.eval(r) - truth).abs() > 1e-6 * truth);
    }
}
