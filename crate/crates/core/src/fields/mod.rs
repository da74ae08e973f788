//! Radial profiles and band-limited states `y(rω) = Σ g_lm(r) Y_l^m(ω)`.
//!
//! Two kinds of radial data coexist: exact monomial sums (the radial parts of
//! unobservable states) and numerical profiles (piecewise polynomials with
//! exact breakpoints, or Hermite samples). Conversion only goes from monomial
//! to sampled.

mod monomial;
mod piecewise;
mod sampled;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::harmonics::{self, AngularExpansion, HarmonicIndex};
use crate::quad;

pub(crate) use monomial::iterated_laplacian;
pub use monomial::{laplacian_symbolic, RadialMonomialSum};
pub use piecewise::PiecewisePolynomial;
pub use sampled::{Knot, SampledProfile};

const INNER_ABS_TOL: f64 = 1e-16;
const INNER_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    Monomial(RadialMonomialSum),
    Piecewise(PiecewisePolynomial),
    Sampled(SampledProfile),
}

impl From<RadialMonomialSum> for RadialProfile {
    fn from(m: RadialMonomialSum) -> Self {
        RadialProfile::Monomial(m)
    }
}

impl From<PiecewisePolynomial> for RadialProfile {
    fn from(p: PiecewisePolynomial) -> Self {
        RadialProfile::Piecewise(p)
    }
}

impl From<SampledProfile> for RadialProfile {
    fn from(s: SampledProfile) -> Self {
        RadialProfile::Sampled(s)
    }
}

impl RadialProfile {
    /// Right-continuous value.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Monomial(m) => m.eval(r),
            RadialProfile::Piecewise(p) => p.eval(r),
            RadialProfile::Sampled(s) => s.eval(r),
        }
    }

    /// `(left, right)` limits at `r`.
    pub fn one_sided(&self, r: f64) -> (f64, f64) {
        match self {
            RadialProfile::Monomial(m) if r == m.support() => (0.0, m.eval(r)),
            RadialProfile::Monomial(m) => (m.eval(r), m.eval(r)),
            RadialProfile::Piecewise(p) => p.one_sided(r),
            RadialProfile::Sampled(s) => s.one_sided(r),
        }
    }

    /// Smallest radius where the profile may be nonzero.
    pub fn support_start(&self) -> f64 {
        match self {
            RadialProfile::Monomial(m) => m.support(),
            RadialProfile::Piecewise(p) => p.start(),
            RadialProfile::Sampled(s) => s.start(),
        }
    }

    /// Radius beyond which the profile coincides with [`Self::tail`] (or zero).
    pub fn finite_end(&self) -> f64 {
        match self {
            RadialProfile::Monomial(m) => m.support(),
            RadialProfile::Piecewise(p) => p.end(),
            RadialProfile::Sampled(s) => s.end(),
        }
    }

    /// Monomial representation valid on `[finite_end, ∞)`; `None` means zero there.
    pub fn tail(&self) -> Option<&RadialMonomialSum> {
        match self {
            RadialProfile::Monomial(m) => Some(m),
            RadialProfile::Piecewise(_) => None,
            RadialProfile::Sampled(s) => s.tail(),
        }
    }

    /// Radii where the profile or its derivatives may be discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialProfile::Monomial(m) => vec![m.support()],
            RadialProfile::Piecewise(p) => p.breakpoints().to_vec(),
            RadialProfile::Sampled(s) => s.knot_radii().to_vec(),
        }
    }

    pub fn derivative(&self) -> RadialProfile {
        match self {
            RadialProfile::Monomial(m) => RadialProfile::Monomial(m.derivative()),
            RadialProfile::Piecewise(p) => RadialProfile::Piecewise(p.derivative()),
            RadialProfile::Sampled(s) => RadialProfile::Sampled(s.derivative()),
        }
    }

    pub fn as_monomial(&self) -> Option<&RadialMonomialSum> {
        match self {
            RadialProfile::Monomial(m) => Some(m),
            _ => None,
        }
    }

    pub fn scale(&self, k: f64) -> RadialProfile {
        match self {
            RadialProfile::Monomial(m) => RadialProfile::Monomial(m.scale(&exact::from_f64(k))),
            RadialProfile::Piecewise(p) => RadialProfile::Piecewise(p.scale(k)),
            RadialProfile::Sampled(s) => {
                let knots: Vec<Knot> = s
                    .knots()
                    .into_iter()
                    .map(|kn| Knot { r: kn.r, left: k * kn.left, right: k * kn.right, dleft: k * kn.dleft, dright: k * kn.dright })
                    .collect();
                let tail = s.tail().map(|t| t.scale(&exact::from_f64(k)));
                RadialProfile::Sampled(SampledProfile::new(&knots, tail).expect("scaled valid profile"))
            }
        }
    }

    fn check_integrable(&self) -> Result<()> {
        match self.tail() {
            Some(t) => t.check_square_integrable(),
            None => Ok(()),
        }
    }

    /// `∫ g(r) h(r) r² dr` over `[0, ∞)`.
    pub fn inner(&self, other: &RadialProfile) -> Result<f64> {
        self.check_integrable()?;
        other.check_integrable()?;
        let lo = self.support_start().max(other.support_start());
        let hi = self.finite_end().max(other.finite_end()).max(lo);
        let cuts = quad::split_points(lo, hi, self.breakpoints().into_iter().chain(other.breakpoints()));
        let body = quad::adaptive_piecewise(
            &cuts,
            |r| self.eval(r) * other.eval(r) * r * r,
            INNER_ABS_TOL,
            INNER_REL_TOL,
        )
        .value;
        let tail = match (self.tail(), other.tail()) {
            (Some(a), Some(b)) => a.tail_inner(b, hi)?,
            _ => 0.0,
        };
        Ok(body + tail)
    }

    /// `∫ g(r)² r² dr`; closed form for monomial sums.
    pub fn norm_sq(&self) -> Result<f64> {
        match self {
            RadialProfile::Monomial(m) => m.norm_sq(),
            _ => self.inner(self),
        }
    }
}

/// A state in `H^ξ`: finitely many harmonic terms, each with a radial profile
/// vanishing below the support radius `ξ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HarmonicField {
    support: f64,
    terms: BTreeMap<HarmonicIndex, RadialProfile>,
}

impl HarmonicField {
    pub fn new(support: f64) -> Self {
        Self { support, terms: BTreeMap::new() }
    }

    pub fn single(support: f64, idx: HarmonicIndex, profile: impl Into<RadialProfile>) -> Result<Self> {
        let mut f = Self::new(support);
        f.insert(idx, profile)?;
        Ok(f)
    }

    /// Adds or replaces the term at `idx`.
    pub fn insert(&mut self, idx: HarmonicIndex, profile: impl Into<RadialProfile>) -> Result<()> {
        let profile = profile.into();
        HarmonicIndex::new(idx.l, idx.m)?;
        if profile.support_start() < self.support {
            return Err(Error::InvalidProfile(format!(
                "{idx} profile starts at r={} below the support radius {}",
                profile.support_start(),
                self.support
            )));
        }
        self.terms.insert(idx, profile);
        Ok(())
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn terms(&self) -> impl Iterator<Item = (HarmonicIndex, &RadialProfile)> {
        self.terms.iter().map(|(i, p)| (*i, p))
    }

    pub fn get(&self, idx: HarmonicIndex) -> Option<&RadialProfile> {
        self.terms.get(&idx)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn band_limit(&self) -> usize {
        self.terms.keys().map(|i| i.l).max().unwrap_or(0)
    }

    /// Point value; exactly zero for `|x| < ξ`.
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let r = harmonics::norm3(x);
        if r < self.support {
            return 0.0;
        }
        let radial: Vec<(HarmonicIndex, f64)> =
            self.terms.iter().map(|(i, p)| (*i, p.eval(r))).filter(|(_, g)| *g != 0.0).collect();
        if radial.is_empty() {
            return 0.0;
        }
        let (theta, phi) = harmonics::direction_angles(x);
        let ys = harmonics::eval_all(self.band_limit(), theta, phi);
        radial.iter().map(|(i, g)| g * ys[i.flat()]).sum()
    }

    /// Angular expansion of `y(r, ·)` from the left and from the right.
    pub fn angular_slice(&self, r: f64) -> (AngularExpansion, AngularExpansion) {
        let band = self.band_limit();
        let mut left = AngularExpansion::new(band);
        let mut right = AngularExpansion::new(band);
        for (i, p) in self.terms() {
            let (a, b) = p.one_sided(r);
            left.set(i, a).expect("index within band");
            right.set(i, b).expect("index within band");
        }
        (left, right)
    }

    /// `‖y‖² = Σ ∫ g_lm(r)² r² dr`.
    pub fn norm_sq(&self) -> Result<f64> {
        self.terms.values().map(RadialProfile::norm_sq).sum()
    }

    /// `(y, z)_H`.
    pub fn inner(&self, other: &HarmonicField) -> Result<f64> {
        let mut acc = 0.0;
        for (i, p) in self.terms() {
            if let Some(q) = other.get(i) {
                acc += p.inner(q)?;
            }
        }
        Ok(acc)
    }

    /// Radial derivative of order 1 or 2, term by term. Breakpoint one-sided
    /// values of the result stay available through [`RadialProfile::one_sided`].
    pub fn radial_derivative(&self, order: usize) -> Result<HarmonicField> {
        if !(1..=2).contains(&order) {
            return Err(Error::DerivativeOrder(order));
        }
        let mut out = HarmonicField::new(self.support);
        for (i, p) in self.terms() {
            let mut d = p.derivative();
            if order == 2 {
                d = d.derivative();
            }
            out.terms.insert(i, d);
        }
        Ok(out)
    }

    pub fn scale(&self, k: f64) -> HarmonicField {
        HarmonicField {
            support: self.support,
            terms: self.terms.iter().map(|(i, p)| (*i, p.scale(k))).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&FieldDto::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let dto: FieldDto = serde_json::from_str(s)?;
        dto.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct MonoTermDto {
    c: f64,
    a: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

impl MonoTermDto {
    fn from_term(c: &Rational, a: i32) -> Self {
        let f = exact::to_f64(c);
        let exact = (exact::from_f64(f) != *c).then(|| c.to_string());
        Self { c: f, a, exact }
    }

    fn coefficient(&self) -> Result<Rational> {
        match &self.exact {
            Some(s) => s.parse().map_err(|_| Error::Serde(format!("bad exact coefficient {s:?}"))),
            None if self.c.is_finite() => Ok(exact::from_f64(self.c)),
            None => Err(Error::Serde("non-finite coefficient".into())),
        }
    }
}

fn mono_terms(m: &RadialMonomialSum) -> Vec<MonoTermDto> {
    m.terms().map(|(c, a)| MonoTermDto::from_term(c, a)).collect()
}

fn mono_from(support: f64, terms: &[MonoTermDto]) -> Result<RadialMonomialSum> {
    let parsed: Result<Vec<(Rational, i32)>> = terms.iter().map(|t| Ok((t.coefficient()?, t.a))).collect();
    Ok(RadialMonomialSum::new(support, parsed?))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ProfileDto {
    Monomial {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<f64>,
        terms: Vec<MonoTermDto>,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        segments: Vec<Vec<f64>>,
    },
    Sampled {
        knots: Vec<f64>,
        left: Vec<f64>,
        right: Vec<f64>,
        dleft: Vec<f64>,
        dright: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<Vec<MonoTermDto>>,
    },
}

impl ProfileDto {
    fn from_profile(p: &RadialProfile, field_support: f64) -> Self {
        match p {
            RadialProfile::Monomial(m) => ProfileDto::Monomial {
                support: (m.support() != field_support).then_some(m.support()),
                terms: mono_terms(m),
            },
            RadialProfile::Piecewise(pw) => ProfileDto::Piecewise {
                breakpoints: pw.breakpoints().to_vec(),
                segments: pw.segments().to_vec(),
            },
            RadialProfile::Sampled(s) => {
                let k = s.knots();
                ProfileDto::Sampled {
                    knots: k.iter().map(|k| k.r).collect(),
                    left: k.iter().map(|k| k.left).collect(),
                    right: k.iter().map(|k| k.right).collect(),
                    dleft: k.iter().map(|k| k.dleft).collect(),
                    dright: k.iter().map(|k| k.dright).collect(),
                    tail: s.tail().map(mono_terms),
                }
            }
        }
    }

    fn into_profile(self, field_support: f64) -> Result<RadialProfile> {
        Ok(match self {
            ProfileDto::Monomial { support, terms } => {
                RadialProfile::Monomial(mono_from(support.unwrap_or(field_support), &terms)?)
            }
            ProfileDto::Piecewise { breakpoints, segments } => {
                RadialProfile::Piecewise(PiecewisePolynomial::new(breakpoints, segments)?)
            }
            ProfileDto::Sampled { knots, left, right, dleft, dright, tail } => {
                let n = knots.len();
                if [left.len(), right.len(), dleft.len(), dright.len()].iter().any(|&k| k != n) {
                    return Err(Error::InvalidProfile("sampled arrays differ in length".into()));
                }
                let data: Vec<Knot> = (0..n)
                    .map(|i| Knot { r: knots[i], left: left[i], right: right[i], dleft: dleft[i], dright: dright[i] })
                    .collect();
                let end = knots.last().copied().unwrap_or(0.0);
                let tail = tail.map(|t| mono_from(end, &t)).transpose()?;
                RadialProfile::Sampled(SampledProfile::new(&data, tail)?)
            }
        })
    }
}

#[derive(Serialize, Deserialize)]
struct FieldTermDto {
    l: usize,
    m: i64,
    profile: ProfileDto,
}

#[derive(Serialize, Deserialize)]
struct FieldDto {
    xi: f64,
    terms: Vec<FieldTermDto>,
}

impl From<&HarmonicField> for FieldDto {
    fn from(f: &HarmonicField) -> Self {
        Self {
            xi: f.support,
            terms: f
                .terms()
                .map(|(i, p)| FieldTermDto { l: i.l, m: i.m, profile: ProfileDto::from_profile(p, f.support) })
                .collect(),
        }
    }
}

impl TryFrom<FieldDto> for HarmonicField {
    type Error = Error;

    fn try_from(dto: FieldDto) -> Result<Self> {
        if !(dto.xi >= 0.0) {
            return Err(Error::InvalidProfile(format!("support radius {} must be nonnegative", dto.xi)));
        }
        let mut f = HarmonicField::new(dto.xi);
        for t in dto.terms {
            let idx = HarmonicIndex::new(t.l, t.m)?;
            f.insert(idx, t.profile.into_profile(dto.xi)?)?;
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn idx(l: usize, m: i64) -> HarmonicIndex {
        HarmonicIndex::new(l, m).unwrap()
    }

    #[test]
    fn norm_examples() {
        let y = HarmonicField::single(1.0, idx(1, 0), RadialMonomialSum::from_f64(1.0, &[(1.0, -2)])).unwrap();
        assert_eq!(y.norm_sq().unwrap(), 1.0);
        assert_eq!(HarmonicField::new(1.0).norm_sq().unwrap(), 0.0);
        let y = HarmonicField::single(2.0, idx(2, 0), RadialMonomialSum::from_f64(2.0, &[(1.0, -3)])).unwrap();
        assert!((y.norm_sq().unwrap() - 1.0 / 24.0).abs() < 1e-16);
    }

    #[test]
    fn mixed_inner_product_uses_tail_closed_form() {
        let m = RadialProfile::from(RadialMonomialSum::from_f64(1.0, &[(1.0, -2)]));
        let s = RadialProfile::from(RadialMonomialSum::from_f64(1.0, &[(1.0, -2)]).to_sampled(&[1.0, 1.1, 1.3]).unwrap());
        // On [1, 1.3] Hermite interpolation is approximate; tail is exact.
        assert!((m.inner(&s).unwrap() - 1.0).abs() < 1e-4);
        let ind = RadialProfile::from(PiecewisePolynomial::indicator(1.0, 2.0).unwrap());
        // ∫_1^2 r^-2 r^2 dr = 1
        assert!((m.inner(&ind).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn below_support_is_exact_zero() {
        let y = HarmonicField::single(2.0, idx(3, -1), RadialMonomialSum::from_f64(2.0, &[(7.0, -4)])).unwrap();
        assert_eq!(y.eval([0.0, 1.99, 0.0]), 0.0);
        assert_ne!(y.eval([0.3, 2.1, 0.2]), 0.0);
    }

    #[test]
    fn profile_below_support_rejected() {
        let r = HarmonicField::single(2.0, idx(1, 0), RadialMonomialSum::from_f64(1.0, &[(1.0, -2)]));
        assert!(r.is_err());
    }

    #[test]
    fn radial_derivative_examples() {
        let y = HarmonicField::single(1.0, idx(1, 0), RadialMonomialSum::from_f64(1.0, &[(1.0, -2)])).unwrap();
        let d = y.radial_derivative(1).unwrap();
        assert_eq!(
            d.get(idx(1, 0)).unwrap().as_monomial().unwrap(),
            &RadialMonomialSum::from_f64(1.0, &[(-2.0, -3)])
        );
        assert_eq!(y.radial_derivative(3), Err(Error::DerivativeOrder(3)));
        // interior smooth point: no jump of the derivative
        let (a, b) = d.get(idx(1, 0)).unwrap().one_sided(1.7);
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip_keeps_exact_coefficients() {
        let mut y = HarmonicField::new(1.0);
        y.insert(idx(3, 0), RadialMonomialSum::new(1.0, [(ratio(1, 3), -2), (ratio(-4, 1), -4)])).unwrap();
        y.insert(idx(2, 1), PiecewisePolynomial::smoothstep_down(2.0, 3.0).unwrap()).unwrap();
        let s = y.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["xi"], 1.0);
        assert_eq!(v["terms"][1]["profile"]["kind"], "monomial");
        assert!(v["terms"][1]["profile"]["terms"][0].get("exact").is_none());
        assert_eq!(v["terms"][1]["profile"]["terms"][1]["exact"], "1/3");
        let back = HarmonicField::from_json(&s).unwrap();
        assert_eq!(back, y);
    }
}
