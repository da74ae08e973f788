//! The unobservable subspaces `D^ξ_l`: polynomial classes `P_l`, basis
//! fields `(1/r) p(1/r) Y_l`, polyharmonic certification and a numerical
//! membership test for arbitrary profiles.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{self, Polynomial, Rational};
use crate::fields::{iterated_laplacian, HarmonicField, RadialMonomialSum, RadialProfile};
use crate::harmonics::{AngularExpansion, HarmonicIndex};

/// Largest `j` with `l - 2j > 0`.
pub fn sigma(l: usize) -> Result<usize> {
    if l < 1 {
        return Err(Error::InvalidArgument("σ(l) needs l ≥ 1".into()));
    }
    Ok((l - 1) / 2)
}

/// A polynomial `p(s) = Σ_j c_j s^{l-2j}`, `0 ≤ j ≤ σ(l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyClassP {
    l: usize,
    poly: Polynomial,
}

impl PolyClassP {
    /// From the coefficients `c_0, c_1, …` of `s^l, s^{l-2}, …`.
    pub fn new(l: usize, coeffs: Vec<Rational>) -> Result<Self> {
        let s = sigma(l)?;
        if coeffs.len() > s + 1 {
            return Err(Error::NotInClass {
                degree: l,
                reason: format!("{} coefficients given, at most {} allowed", coeffs.len(), s + 1),
            });
        }
        let poly = Polynomial::from_terms(coeffs.into_iter().enumerate().map(|(j, c)| (l - 2 * j, c)));
        Ok(Self { l, poly })
    }

    /// `s^{l-2j}` viewed inside `P_l`.
    pub fn monomial(l: usize, j: usize) -> Result<Self> {
        if j > sigma(l)? {
            return Err(Error::NotInClass { degree: l, reason: format!("j={j} exceeds σ({l})") });
        }
        let mut c = vec![Rational::zero(); j + 1];
        c[j] = exact::int(1);
        Self::new(l, c)
    }

    /// Certifies that `poly` lies in `P_l`.
    pub fn from_polynomial(l: usize, poly: Polynomial) -> Result<Self> {
        sigma(l)?;
        for (k, _) in poly.terms() {
            if k == 0 {
                return Err(Error::NotInClass { degree: l, reason: "constant term present".into() });
            }
            if k > l {
                return Err(Error::NotInClass { degree: l, reason: format!("exponent {k} exceeds {l}") });
            }
            if !(l - k).is_multiple_of(2) {
                return Err(Error::NotInClass { degree: l, reason: format!("exponent {k} has the wrong parity") });
            }
        }
        Ok(Self { l, poly })
    }

    pub fn degree_class(&self) -> usize {
        self.l
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    /// `c_j`, the coefficient of `s^{l-2j}`.
    pub fn coefficients(&self) -> Vec<Rational> {
        (0..=(self.l - 1) / 2).map(|j| self.poly.coeff(self.l - 2 * j)).collect()
    }

    /// `(1/r) p(1/r)` as an exact monomial sum supported on `[ξ, ∞)`.
    pub fn radial_profile(&self, xi: f64) -> RadialMonomialSum {
        RadialMonomialSum::new(xi, self.poly.terms().map(|(k, c)| (c.clone(), -(k as i32) - 1)))
    }
}

fn check_support(xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::InvalidArgument(format!("support radius must be positive, got {xi}")));
    }
    Ok(())
}

/// `(1/r) p(1/r) Y(ω)` for `r ≥ ξ`, zero inside. Not normalized.
pub fn basis_element(xi: f64, p: &PolyClassP, y: &AngularExpansion) -> Result<HarmonicField> {
    check_support(xi)?;
    if let Some(&found) = y.degrees().iter().find(|&&d| d != p.l) {
        return Err(Error::DegreeMismatch { expected: p.l, found });
    }
    let radial = p.radial_profile(xi);
    let mut field = HarmonicField::new(xi);
    for (idx, c) in y.iter() {
        if c != 0.0 {
            field.insert(idx, radial.scale(&exact::from_f64(c)))?;
        }
    }
    Ok(field)
}

/// [`basis_element`] scaled to unit norm.
pub fn basis_element_normalized(xi: f64, p: &PolyClassP, y: &AngularExpansion) -> Result<HarmonicField> {
    let field = basis_element(xi, p, y)?;
    let n = field.norm_sq()?.sqrt();
    if n == 0.0 {
        return Err(Error::InvalidArgument("cannot normalize a zero element".into()));
    }
    Ok(field.scale(1.0 / n))
}

/// Outcome of repeated symbolic Laplacians.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyharmonicReport {
    pub degree: usize,
    pub applications: usize,
    pub passed: bool,
    /// Radial part of `Δ^applications y` for every term.
    pub residuals: Vec<(HarmonicIndex, RadialMonomialSum)>,
}

fn pure_degree(field: &HarmonicField) -> Result<usize> {
    let mut degree = None;
    for (idx, _) in field.terms() {
        match degree {
            None => degree = Some(idx.l),
            Some(d) if d != idx.l => return Err(Error::DegreeMismatch { expected: d, found: idx.l }),
            _ => {}
        }
    }
    Ok(degree.unwrap_or(0))
}

/// Applies the symbolic Laplacian `applications` times to a pure-degree field
/// with monomial radial parts; passes iff every coefficient is exactly zero.
pub fn laplacian_power_check(field: &HarmonicField, applications: usize) -> Result<PolyharmonicReport> {
    let degree = pure_degree(field)?;
    let mut residuals = Vec::new();
    for (idx, profile) in field.terms() {
        let m = profile.as_monomial().ok_or(Error::NotMonomial { index: idx })?;
        residuals.push((idx, iterated_laplacian(m, idx.l, applications)));
    }
    let passed = residuals.iter().all(|(_, r)| r.is_zero());
    Ok(PolyharmonicReport { degree, applications, passed, residuals })
}

/// `Δ^l y = 0` for a field of pure degree `l`, decided in exact arithmetic.
pub fn polyharmonic_check(field: &HarmonicField) -> Result<PolyharmonicReport> {
    let l = pure_degree(field)?;
    laplacian_power_check(field, l)
}

/// `[p(s)]^n` for odd `n`, certified to lie in `P_{n·l}`.
pub fn power_expand(p: &PolyClassP, n: usize) -> Result<PolyClassP> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("power must be odd and positive, got {n}")));
    }
    PolyClassP::from_polynomial(n * p.l, p.poly.pow(n))
}

/// Least-squares distance of one radial profile from `span{r^{-(l-2j)-1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TermMembership {
    pub index: HarmonicIndex,
    pub residual: f64,
    pub norm: f64,
    /// Fitted coefficients of `r^{-l-1}, r^{-l+1}, …` (empty for `l = 0`).
    pub coefficients: Vec<f64>,
    pub member: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub terms: Vec<TermMembership>,
    pub member: bool,
}

pub const MEMBERSHIP_REL_TOL: f64 = 1e-10;

/// Projects each radial part onto the `D^ξ_l` monomials on a log-spaced grid
/// over `[ξ, r_max]` (weights matching `r² dr`) and accepts when the residual
/// is at most `1e-10` times the sampled norm.
pub fn membership_test(field: &HarmonicField, r_max: f64, points: usize) -> Result<MembershipReport> {
    let xi = field.support();
    check_support(xi)?;
    if !(r_max > xi) || points < 2 {
        return Err(Error::InvalidArgument("membership grid needs r_max > ξ and at least two points".into()));
    }
    let step = (r_max / xi).ln() / (points - 1) as f64;
    let radii: Vec<f64> = (0..points).map(|i| xi * (step * i as f64).exp()).collect();
    // log-spaced trapezoid weight for ∫ g² r² dr = ∫ g² r³ d(log r)
    let weights: Vec<f64> = radii
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let end = if i == 0 || i + 1 == points { 0.5 } else { 1.0 };
            (end * step * r.powi(3)).sqrt()
        })
        .collect();
    let mut terms = Vec::new();
    for (index, profile) in field.terms() {
        terms.push(fit_term(index, profile, &radii, &weights)?);
    }
    let member = terms.iter().all(|t| t.member);
    Ok(MembershipReport { terms, member })
}

fn fit_term(index: HarmonicIndex, profile: &RadialProfile, radii: &[f64], weights: &[f64]) -> Result<TermMembership> {
    let b = DVector::from_iterator(radii.len(), radii.iter().zip(weights).map(|(&r, w)| w * profile.eval(r)));
    let norm = b.norm();
    let exponents: Vec<i32> = match sigma(index.l) {
        Ok(s) => (0..=s).map(|j| -((index.l - 2 * j) as i32) - 1).collect(),
        Err(_) => Vec::new(),
    };
    if exponents.is_empty() {
        return Ok(TermMembership { index, residual: norm, norm, coefficients: Vec::new(), member: norm == 0.0 });
    }
    let mut a = DMatrix::from_fn(radii.len(), exponents.len(), |i, j| weights[i] * radii[i].powi(exponents[j]));
    let scales: Vec<f64> = a.column_iter().map(|c| c.norm().max(f64::MIN_POSITIVE)).collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))?;
    let residual = (&a * &x - &b).norm();
    let coefficients = x.iter().zip(&scales).map(|(c, s)| c / s).collect();
    Ok(TermMembership { index, residual, norm, coefficients, member: residual <= MEMBERSHIP_REL_TOL * norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::fields::PiecewisePolynomial;

    fn idx(l: usize, m: i64) -> HarmonicIndex {
        HarmonicIndex::new(l, m).unwrap()
    }

    fn p3() -> PolyClassP {
        PolyClassP::new(3, vec![int(-4), int(3)]).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(1).unwrap(), 0);
        assert_eq!(sigma(3).unwrap(), 1);
        assert_eq!(sigma(9).unwrap(), 4);
        assert_eq!(sigma(2).unwrap(), 0);
        assert!(sigma(0).is_err());
    }

    #[test]
    fn class_membership_is_certified() {
        let s = Polynomial::from_terms([(1, int(1))]);
        assert!(PolyClassP::from_polynomial(3, s.clone()).is_ok());
        assert!(PolyClassP::from_polynomial(2, s).is_err());
        assert!(PolyClassP::from_polynomial(3, Polynomial::from_terms([(0, int(1))])).is_err());
        assert!(PolyClassP::new(3, vec![int(1), int(1), int(1)]).is_err());
        assert_eq!(p3().coefficients(), vec![int(-4), int(3)]);
    }

    #[test]
    fn basis_examples() {
        let s = PolyClassP::monomial(1, 0).unwrap();
        let y = basis_element(1.0, &s, &AngularExpansion::single(idx(1, 0), 1.0)).unwrap();
        assert_eq!(y.norm_sq().unwrap(), 1.0);

        let y = basis_element(1.0, &p3(), &AngularExpansion::single(idx(3, 0), 1.0)).unwrap();
        let m = y.get(idx(3, 0)).unwrap().as_monomial().unwrap();
        assert_eq!(m.exponents(), vec![-4, -2]);
        assert_eq!(m.coefficient(-2), int(3));
        assert_eq!(m.coefficient(-4), int(-4));

        let y = basis_element(2.0, &s, &AngularExpansion::single(idx(1, 0), 1.0)).unwrap();
        let z = [0.0, 0.0, 1.0];
        assert_eq!(y.eval([0.0, 0.0, 1.999]), 0.0);
        let expected = 0.25 * crate::harmonics::eval_harmonic_at(idx(1, 0), z);
        assert!((y.eval([0.0, 0.0, 2.0]) - expected).abs() < 1e-15);
    }

    #[test]
    fn degree_mismatch_rejected() {
        let e = basis_element(1.0, &p3(), &AngularExpansion::single(idx(2, 0), 1.0));
        assert_eq!(e, Err(Error::DegreeMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn polyharmonic_examples() {
        let s1 = PolyClassP::monomial(1, 0).unwrap();
        let y = basis_element(1.0, &s1, &AngularExpansion::single(idx(1, 0), 1.0)).unwrap();
        assert!(polyharmonic_check(&y).unwrap().passed);

        let y = basis_element(1.0, &p3(), &AngularExpansion::single(idx(3, 0), 1.0)).unwrap();
        let rep = polyharmonic_check(&y).unwrap();
        assert!(rep.passed && rep.applications == 3);

        let s3 = PolyClassP::monomial(3, 1).unwrap();
        let y = basis_element(1.0, &s3, &AngularExpansion::single(idx(3, 0), 1.0)).unwrap();
        assert!(polyharmonic_check(&y).unwrap().passed);
        let harmonic = laplacian_power_check(&y, 1).unwrap();
        assert!(!harmonic.passed);
        assert_eq!(harmonic.residuals[0].1.coefficient(-4), int(-10));
    }

    #[test]
    fn polyharmonic_rejects_sampled_input() {
        let y = HarmonicField::single(1.0, idx(1, 0), PiecewisePolynomial::indicator(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(polyharmonic_check(&y).unwrap_err(), Error::NotMonomial { index: idx(1, 0) });
    }

    #[test]
    fn every_low_degree_basis_element_is_exactly_polyharmonic() {
        for l in 1..=12 {
            for j in 0..=sigma(l).unwrap() {
                let p = PolyClassP::monomial(l, j).unwrap();
                for m in [-(l as i64), 0, l as i64] {
                    let y = basis_element(1.5, &p, &AngularExpansion::single(idx(l, m), 1.0)).unwrap();
                    let rep = polyharmonic_check(&y).unwrap();
                    assert!(rep.passed, "l={l} j={j}");
                    assert!(rep.residuals.iter().all(|(_, r)| r.is_zero()));
                }
            }
        }
    }

    #[test]
    fn power_expand_examples() {
        assert_eq!(power_expand(&p3(), 1).unwrap(), p3());
        let cube = power_expand(&p3(), 3).unwrap();
        // oracle: direct multiplication of the coefficient lists
        let base = [int(0), int(3), int(0), int(-4)];
        let mut direct = vec![int(1)];
        for _ in 0..3 {
            let mut next = vec![int(0); direct.len() + 3];
            for (i, a) in direct.iter().enumerate() {
                for (k, b) in base.iter().enumerate() {
                    next[i + k] += a * b;
                }
            }
            direct = next;
        }
        assert_eq!(cube.polynomial(), &Polynomial::new(direct));
        assert_eq!(cube.polynomial().coeff(3), int(27));
        assert_eq!(cube.polynomial().coeff(5), int(-108));
        assert_eq!(cube.polynomial().coeff(7), int(144));
        assert_eq!(cube.polynomial().coeff(9), int(-64));
        assert_eq!(cube.degree_class(), 9);

        let fifth = power_expand(&p3(), 5).unwrap();
        let exps: Vec<usize> = fifth.polynomial().terms().map(|(k, _)| k).collect();
        assert_eq!(exps, vec![5, 7, 9, 11, 13, 15]);
        assert!(power_expand(&p3(), 2).is_err());
    }

    #[test]
    fn powers_of_the_chebyshev_cubic_stay_in_class() {
        for k in 0..=20usize {
            let q = power_expand(&p3(), 2 * k + 1).unwrap();
            assert_eq!(q.degree_class(), 6 * k + 3);
            assert!(q.polynomial().terms().all(|(e, _)| e % 2 == 1 && e <= 6 * k + 3));
        }
    }

    #[test]
    fn basis_elements_orthogonal_across_indices() {
        let mut fields = Vec::new();
        for l in 1..=4 {
            for m in -(l as i64)..=(l as i64) {
                let p = PolyClassP::monomial(l, 0).unwrap();
                fields.push(basis_element(1.0, &p, &AngularExpansion::single(idx(l, m), 1.0)).unwrap());
            }
        }
        for (i, a) in fields.iter().enumerate() {
            for b in &fields[i + 1..] {
                assert!(a.inner(b).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalized_basis_element_has_unit_norm() {
        let y = basis_element_normalized(2.0, &p3(), &AngularExpansion::single(idx(3, 1), 1.0)).unwrap();
        assert!((y.norm_sq().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn membership_accepts_d_elements_and_rejects_others() {
        let y = basis_element(1.0, &p3(), &AngularExpansion::single(idx(3, 2), 0.7)).unwrap();
        let rep = membership_test(&y, 50.0, 400).unwrap();
        assert!(rep.member, "{rep:?}");
        assert!((rep.terms[0].coefficients[1] - 0.7 * 3.0).abs() < 1e-8);

        let wrong_parity = HarmonicField::single(1.0, idx(3, 0), RadialMonomialSum::new(1.0, [(ratio(1, 1), -3)])).unwrap();
        assert!(!membership_test(&wrong_parity, 50.0, 400).unwrap().member);

        let step = HarmonicField::single(1.0, idx(1, 0), PiecewisePolynomial::smoothstep_down(1.0, 2.0).unwrap()).unwrap();
        assert!(!membership_test(&step, 50.0, 400).unwrap().member);

        let radial = HarmonicField::single(1.0, idx(0, 0), RadialMonomialSum::new(1.0, [(int(1), -2)])).unwrap();
        assert!(!membership_test(&radial, 50.0, 400).unwrap().member);
    }
}
