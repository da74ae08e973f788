//! Exact rational arithmetic: dense polynomials over Q and the Legendre
//! coefficient tables that the closed-form radial integrals need.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact value of a finite float.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(|| panic!("non-finite value {x} cannot be made exact"))
}

/// Correctly rounded conversion to `f64`.
pub fn to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    q.to_f64().unwrap_or_else(|| if q.is_positive() { f64::INFINITY } else { f64::NEG_INFINITY })
}

/// `Σ q_i / d_i` for nonzero integer `d_i`, reduced once at the end.
pub fn sum_of_quotients<'a>(terms: impl IntoIterator<Item = (&'a Rational, i64)>) -> Rational {
    let terms: Vec<(&Rational, BigInt)> = terms
        .into_iter()
        .filter(|(q, _)| !q.is_zero())
        .map(|(q, d)| {
            assert!(d != 0, "zero divisor");
            (q, q.denom() * BigInt::from(d))
        })
        .collect();
    let common = terms.iter().fold(BigInt::one(), |acc, (_, d)| acc.lcm(d));
    let num: BigInt = terms.iter().map(|(q, d)| q.numer() * (&common / d)).sum();
    Rational::new(num, common)
}

/// `q^e` for any integer exponent; `q` must be nonzero when `e < 0`.
pub fn powi(q: &Rational, e: i32) -> Rational {
    let p = num_traits::pow(q.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Dense polynomial with exact coefficients, `coeffs[k]` multiplying `x^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut coeffs = Vec::new();
        for (k, c) in terms {
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rational::zero());
            }
            coeffs[k] += c;
        }
        Self::new(coeffs)
    }

    pub fn one() -> Self {
        Self::new(vec![Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Nonzero `(power, coefficient)` pairs in increasing power.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }
}

/// Exact monomial coefficients of the Legendre polynomial P_l.
pub fn legendre_polynomial(l: usize) -> Polynomial {
    // P_l(x) = 2^{-l} sum_k (-1)^k C(l,k) C(2l-2k, l) x^{l-2k}
    let scale = BigInt::one() << l;
    let mut coeffs = vec![Rational::zero(); l + 1];
    for k in 0..=l / 2 {
        let mag = binomial(l as u64, k as u64) * binomial((2 * l - 2 * k) as u64, l as u64);
        let signed = if k % 2 == 0 { mag } else { -mag };
        coeffs[l - 2 * k] = Rational::new(signed, scale.clone());
    }
    Polynomial::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_sum_matches_naive() {
        let qs = [ratio(3, 4), ratio(-5, 6), int(0), ratio(7, 9)];
        let ds = [3, -7, 5, 12];
        let naive = qs.iter().zip(ds).fold(Rational::zero(), |acc, (q, d)| acc + q / int(d));
        assert_eq!(sum_of_quotients(qs.iter().zip(ds)), naive);
        assert!(sum_of_quotients(std::iter::empty()).is_zero());
    }

    #[test]
    fn legendre_coefficients_match_closed_forms() {
        assert_eq!(legendre_polynomial(0), Polynomial::one());
        assert_eq!(legendre_polynomial(3).coeffs(), &[int(0), ratio(-3, 2), int(0), ratio(5, 2)]);
        for l in 0..40 {
            assert_eq!(legendre_polynomial(l).eval(&int(1)), int(1), "P_{l}(1)");
        }
    }

    #[test]
    fn polynomial_power_matches_repeated_product() {
        let p = Polynomial::from_terms([(1, int(3)), (3, int(-4))]);
        assert_eq!(p.pow(3), p.mul(&p).mul(&p));
        assert_eq!(p.pow(0), Polynomial::one());
    }

    #[test]
    fn float_conversion_round_trips() {
        for x in [0.1, -3.75, 1e-300, 123456.789] {
            assert_eq!(to_f64(&from_f64(x)), x);
        }
        assert_eq!(to_f64(&ratio(1, 3)), 1.0 / 3.0);
        assert_eq!(powi(&int(2), -3), ratio(1, 8));
    }
}
