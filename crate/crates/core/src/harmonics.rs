//! Legendre polynomials, real orthonormal spherical harmonics, product
//! quadrature on the unit sphere, and the Beltrami–Laplace operator acting on
//! finite harmonic expansions.
//!
//! Conventions: `Y_l^0 = Pbar_l^0(cos θ)`, `Y_l^m = √2 Pbar_l^m(cos θ) cos(mφ)`
//! and `Y_l^{-m} = √2 Pbar_l^m(cos θ) sin(mφ)` for `m > 0`, where `Pbar` is the
//! fully normalized associated Legendre function without the Condon–Shortley
//! phase. With these, `∫ Y_l^m Y_l'^m' dσ = δ_ll' δ_mm'`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Degree/order label of a real spherical harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub l: usize,
    pub m: i64,
}

impl HarmonicIndex {
    pub fn new(l: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > l {
            return Err(Error::InvalidIndex { l: l as i64, m });
        }
        Ok(Self { l, m })
    }

    /// Eigenvalue of `-Δ_ω`.
    pub fn beltrami_eigenvalue(&self) -> f64 {
        (self.l * (self.l + 1)) as f64
    }

    /// Position in the flat `(l, m)` ordering `l² + l + m`.
    pub fn flat(&self) -> usize {
        ((self.l * self.l + self.l) as i64 + self.m) as usize
    }

    pub fn degree_block(l: usize) -> impl Iterator<Item = HarmonicIndex> {
        (-(l as i64)..=l as i64).map(move |m| HarmonicIndex { l, m })
    }

    pub fn all_up_to(band_limit: usize) -> impl Iterator<Item = HarmonicIndex> {
        (0..=band_limit).flat_map(Self::degree_block)
    }
}

impl fmt::Display for HarmonicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Y_{}^{}", self.l, self.m)
    }
}

fn check_unit_interval(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain { value: x });
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// P_l(x) by the three-term recurrence.
pub fn eval_legendre(l: usize, x: f64) -> Result<f64> {
    let x = check_unit_interval(x)?;
    Ok(legendre_unchecked(l, x))
}

pub(crate) fn legendre_unchecked(l: usize, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=l {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// P_l(x) and P_l'(x); the derivative is exact at the endpoints.
pub(crate) fn legendre_and_derivative(l: usize, x: f64) -> (f64, f64) {
    if l == 0 {
        return (1.0, 0.0);
    }
    // Derivative by its own recurrence: P'_{k} = P'_{k-2} + (2k-1) P_{k-1}.
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    for k in 2..=l {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        let d2 = d0 + (2.0 * kf - 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// Fully normalized associated Legendre values `Pbar_l^m(cos θ)`, `0 ≤ m ≤ l ≤ lmax`.
#[derive(Debug, Clone)]
pub struct AssocLegendreTable {
    lmax: usize,
    values: Vec<f64>,
}

impl AssocLegendreTable {
    pub fn new(lmax: usize, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let mut values = vec![0.0; (lmax + 1) * (lmax + 2) / 2];
        let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
        let mut pmm = (1.0 / (4.0 * PI)).sqrt();
        for m in 0..=lmax {
            if m > 0 {
                let mf = m as f64;
                pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
            }
            values[idx(m, m)] = pmm;
            if m < lmax {
                values[idx(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * c * pmm;
            }
            for l in m + 2..=lmax {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lm1 = lf - 1.0;
                let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
                values[idx(l, m)] = a * (c * values[idx(l - 1, m)] - b * values[idx(l - 2, m)]);
            }
        }
        Self { lmax, values }
    }

    pub fn get(&self, l: usize, m: usize) -> f64 {
        debug_assert!(m <= l && l <= self.lmax);
        self.values[l * (l + 1) / 2 + m]
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }
}

fn azimuthal(m: i64, phi: f64) -> f64 {
    match m {
        0 => 1.0,
        m if m > 0 => std::f64::consts::SQRT_2 * (m as f64 * phi).cos(),
        m => std::f64::consts::SQRT_2 * ((-m) as f64 * phi).sin(),
    }
}

/// Real orthonormal harmonic at colatitude `theta` and longitude `phi`.
pub fn eval_harmonic(idx: HarmonicIndex, theta: f64, phi: f64) -> Result<f64> {
    HarmonicIndex::new(idx.l, idx.m)?;
    if !(-1e-12..=PI + 1e-12).contains(&theta) {
        return Err(Error::InvalidArgument(format!("colatitude {theta} outside [0, π]")));
    }
    let table = AssocLegendreTable::new(idx.l, theta);
    Ok(table.get(idx.l, idx.m.unsigned_abs() as usize) * azimuthal(idx.m, phi))
}

/// All harmonics up to `lmax` at one point, in flat `(l, m)` order.
pub fn eval_all(lmax: usize, theta: f64, phi: f64) -> Vec<f64> {
    let table = AssocLegendreTable::new(lmax, theta);
    HarmonicIndex::all_up_to(lmax)
        .map(|i| table.get(i.l, i.m.unsigned_abs() as usize) * azimuthal(i.m, phi))
        .collect()
}

/// Colatitude and longitude of a nonzero vector.
pub fn direction_angles(v: [f64; 3]) -> (f64, f64) {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
    let phi = v[1].atan2(v[0]);
    (theta, phi)
}

/// Harmonic evaluated at the direction of `v`.
pub fn eval_harmonic_at(idx: HarmonicIndex, v: [f64; 3]) -> f64 {
    let (theta, phi) = direction_angles(v);
    let table = AssocLegendreTable::new(idx.l, theta);
    table.get(idx.l, idx.m.unsigned_abs() as usize) * azimuthal(idx.m, phi)
}

/// Unit vector for colatitude/longitude.
pub fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Two unit vectors completing `axis` to a right-handed orthonormal frame.
pub fn orthonormal_frame(axis: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if axis[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = normalize(cross(helper, axis));
    let e2 = cross(axis, e1);
    (e1, e2)
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub(crate) fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Gauss–Legendre (in cos θ) × uniform longitude product grid.
///
/// With `L + 1` colatitude nodes and `2L + 2` longitudes, the grid integrates
/// every product of two harmonics of degree ≤ `L` exactly.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    band_limit: usize,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    nodes: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl AngularGrid {
    pub fn new(band_limit: usize) -> Self {
        let n_theta = band_limit + 1;
        let n_phi = 2 * band_limit + 2;
        let rule = quad::gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let thetas: Vec<f64> = rule.nodes.iter().map(|x| x.clamp(-1.0, 1.0).acos()).collect();
        let phis: Vec<f64> = (0..n_phi).map(|j| j as f64 * dphi).collect();
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (theta, w) in thetas.iter().zip(&rule.weights) {
            for &phi in &phis {
                nodes.push((*theta, phi));
                weights.push(w * dphi);
            }
        }
        Self { band_limit, thetas, phis, nodes, weights }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of sampled values against the surface measure.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        samples.iter().zip(&self.weights).map(|(s, w)| s * w).sum()
    }

    /// Harmonic values up to `lmax` at every node: `result[node][flat index]`.
    fn harmonic_table(&self, lmax: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.len());
        for &theta in &self.thetas {
            let table = AssocLegendreTable::new(lmax, theta);
            for &phi in &self.phis {
                out.push(
                    HarmonicIndex::all_up_to(lmax)
                        .map(|i| table.get(i.l, i.m.unsigned_abs() as usize) * azimuthal(i.m, phi))
                        .collect(),
                );
            }
        }
        out
    }
}

/// Finite real harmonic expansion `Σ c_lm Y_l^m` with declared band limit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AngularExpansion {
    band_limit: usize,
    coeffs: BTreeMap<HarmonicIndex, f64>,
}

impl AngularExpansion {
    pub fn new(band_limit: usize) -> Self {
        Self { band_limit, coeffs: BTreeMap::new() }
    }

    pub fn single(idx: HarmonicIndex, c: f64) -> Self {
        let mut e = Self::new(idx.l);
        e.coeffs.insert(idx, c);
        e
    }

    pub fn from_coeffs(band_limit: usize, coeffs: impl IntoIterator<Item = (HarmonicIndex, f64)>) -> Result<Self> {
        let mut e = Self::new(band_limit);
        for (idx, c) in coeffs {
            e.set(idx, c)?;
        }
        Ok(e)
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn set(&mut self, idx: HarmonicIndex, c: f64) -> Result<()> {
        HarmonicIndex::new(idx.l, idx.m)?;
        if idx.l > self.band_limit {
            return Err(Error::BandLimit { required: idx.l, available: self.band_limit });
        }
        self.coeffs.insert(idx, c);
        Ok(())
    }

    pub fn get(&self, idx: HarmonicIndex) -> f64 {
        self.coeffs.get(&idx).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (HarmonicIndex, f64)> + '_ {
        self.coeffs.iter().map(|(i, c)| (*i, *c))
    }

    /// Degrees carrying a nonzero coefficient.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.iter().filter(|(_, c)| *c != 0.0).map(|(i, _)| i.l).collect();
        d.dedup();
        d
    }

    /// `‖Σ c Y‖²_{L²(S²)} = Σ c²`.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum()
    }

    /// Point value at colatitude/longitude.
    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        let table = AssocLegendreTable::new(self.band_limit, theta);
        self.iter()
            .map(|(i, c)| c * table.get(i.l, i.m.unsigned_abs() as usize) * azimuthal(i.m, phi))
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ExpansionDto::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let dto: ExpansionDto = serde_json::from_str(s)?;
        dto.try_into()
    }
}

/// Applies `Δ_ω`: every degree-`l` coefficient is multiplied by `-l(l+1)`.
pub fn beltrami_apply(e: &AngularExpansion) -> AngularExpansion {
    AngularExpansion {
        band_limit: e.band_limit,
        coeffs: e.iter().map(|(i, c)| (i, -i.beltrami_eigenvalue() * c)).collect(),
    }
}

/// Projects grid samples onto harmonics of degree ≤ `band_limit`.
pub fn analyze(samples: &[f64], grid: &AngularGrid, band_limit: usize) -> Result<AngularExpansion> {
    if grid.band_limit() < band_limit {
        return Err(Error::BandLimit { required: band_limit, available: grid.band_limit() });
    }
    if samples.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for a grid of {} nodes",
            samples.len(),
            grid.len()
        )));
    }
    let table = grid.harmonic_table(band_limit);
    let mut acc = vec![0.0; (band_limit + 1) * (band_limit + 1)];
    for ((row, s), w) in table.iter().zip(samples).zip(grid.weights()) {
        let sw = s * w;
        for (a, y) in acc.iter_mut().zip(row) {
            *a += sw * y;
        }
    }
    Ok(AngularExpansion {
        band_limit,
        coeffs: HarmonicIndex::all_up_to(band_limit).zip(acc).collect(),
    })
}

/// Evaluates an expansion at every grid node.
pub fn synthesize(e: &AngularExpansion, grid: &AngularGrid) -> Result<Vec<f64>> {
    if grid.band_limit() < e.band_limit() {
        return Err(Error::BandLimit { required: e.band_limit(), available: grid.band_limit() });
    }
    let table = grid.harmonic_table(e.band_limit());
    Ok(table
        .iter()
        .map(|row| e.iter().map(|(i, c)| c * row[i.flat()]).sum())
        .collect())
}

#[derive(Serialize, Deserialize)]
struct CoeffDto {
    l: usize,
    m: i64,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct ExpansionDto {
    #[serde(rename = "L")]
    band_limit: usize,
    coeffs: Vec<CoeffDto>,
}

impl From<&AngularExpansion> for ExpansionDto {
    fn from(e: &AngularExpansion) -> Self {
        Self {
            band_limit: e.band_limit,
            coeffs: e.iter().map(|(i, c)| CoeffDto { l: i.l, m: i.m, c }).collect(),
        }
    }
}

impl TryFrom<ExpansionDto> for AngularExpansion {
    type Error = Error;

    fn try_from(dto: ExpansionDto) -> Result<Self> {
        let mut e = AngularExpansion::new(dto.band_limit);
        for c in dto.coeffs {
            e.set(HarmonicIndex::new(c.l, c.m)?, c.c)?;
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(l: usize, m: i64) -> HarmonicIndex {
        HarmonicIndex::new(l, m).unwrap()
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(eval_legendre(1, 0.5).unwrap(), 0.5);
        assert_eq!(eval_legendre(2, 1.0).unwrap(), 1.0);
        let x: f64 = 0.5;
        let closed = (5.0 * x.powi(3) - 3.0 * x) / 2.0;
        assert!((eval_legendre(3, 0.5).unwrap() - closed).abs() < 1e-15);
        assert!((closed + 0.4375).abs() < 1e-15);
    }

    #[test]
    fn legendre_rejects_outside_interval() {
        assert!(matches!(eval_legendre(2, 1.1), Err(Error::Domain { .. })));
        assert!(eval_legendre(2, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn legendre_matches_closed_forms_up_to_degree_five() {
        let closed: [fn(f64) -> f64; 6] = [
            |_| 1.0,
            |x| x,
            |x| (3.0 * x * x - 1.0) / 2.0,
            |x| (5.0 * x.powi(3) - 3.0 * x) / 2.0,
            |x| (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0,
            |x| (63.0 * x.powi(5) - 70.0 * x.powi(3) + 15.0 * x) / 8.0,
        ];
        for i in 0..100 {
            let x = -1.0 + 2.0 * i as f64 / 99.0;
            for (l, f) in closed.iter().enumerate() {
                assert!((eval_legendre(l, x).unwrap() - f(x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn legendre_derivative_matches_difference_quotient() {
        for l in [1, 4, 9, 30] {
            for x in [-0.9, -0.2, 0.3, 0.77] {
                let (_, d) = legendre_and_derivative(l, x);
                let h = 1e-6;
                let fd = (legendre_unchecked(l, x + h) - legendre_unchecked(l, x - h)) / (2.0 * h);
                assert!((d - fd).abs() < 1e-5 * (1.0 + d.abs()), "l={l} x={x}");
            }
            let (_, d1) = legendre_and_derivative(l, 1.0);
            assert!((d1 - (l * (l + 1)) as f64 / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn y00_is_constant() {
        let expected = 1.0 / (4.0 * PI).sqrt();
        for (t, p) in [(0.0, 0.0), (1.0, 2.0), (PI, 5.0)] {
            assert!((eval_harmonic(idx(0, 0), t, p).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_orthonormality() {
        let grid = AngularGrid::new(5);
        let sample = |i: HarmonicIndex| -> Vec<f64> {
            grid.nodes().iter().map(|&(t, p)| eval_harmonic(i, t, p).unwrap()).collect()
        };
        let a = sample(idx(3, 1));
        let b = sample(idx(5, -2));
        let aa: Vec<f64> = a.iter().map(|x| x * x).collect();
        let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        assert!((grid.integrate(&aa) - 1.0).abs() < 1e-10);
        assert!(grid.integrate(&ab).abs() < 1e-10);
        let wsum: f64 = grid.weights().iter().sum();
        assert!((wsum - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn full_gram_matrix_is_identity() {
        let band = 6;
        let grid = AngularGrid::new(band);
        let table = grid.harmonic_table(band);
        let n = (band + 1) * (band + 1);
        for a in 0..n {
            for b in 0..n {
                let v: f64 = table.iter().zip(grid.weights()).map(|(row, w)| w * row[a] * row[b]).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-10, "({a},{b}) -> {v}");
            }
        }
    }

    #[test]
    fn high_degree_values_stay_finite_and_normalized() {
        let grid = AngularGrid::new(300);
        let i = idx(300, 150);
        let mut rows = std::collections::HashMap::new();
        let table: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&(t, p)| {
                let plm = *rows.entry(t.to_bits()).or_insert_with(|| AssocLegendreTable::new(300, t).get(300, 150));
                plm * azimuthal(i.m, p)
            })
            .collect();
        assert_eq!(table[7], eval_harmonic(i, grid.nodes()[7].0, grid.nodes()[7].1).unwrap());
        assert!(table.iter().all(|v| v.is_finite()));
        let sq: Vec<f64> = table.iter().map(|v| v * v).collect();
        assert!((grid.integrate(&sq) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn round_trip_single_mode() {
        let grid = AngularGrid::new(6);
        let e = AngularExpansion::single(idx(6, 2), 1.0);
        let back = analyze(&synthesize(&e, &grid).unwrap(), &grid, 6).unwrap();
        for (i, c) in back.iter() {
            let expected = if i == idx(6, 2) { 1.0 } else { 0.0 };
            assert!((c - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_expansion_synthesizes_to_zero() {
        let grid = AngularGrid::new(3);
        let s = synthesize(&AngularExpansion::new(3), &grid).unwrap();
        assert!(s.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn band_limit_mismatch_is_reported() {
        let grid = AngularGrid::new(2);
        let e = AngularExpansion::single(idx(4, 0), 1.0);
        assert!(matches!(synthesize(&e, &grid), Err(Error::BandLimit { .. })));
        assert!(matches!(analyze(&vec![0.0; grid.len()], &grid, 3), Err(Error::BandLimit { .. })));
    }

    #[test]
    fn beltrami_examples() {
        let e = beltrami_apply(&AngularExpansion::single(idx(6, 2), 1.0));
        assert_eq!(e.get(idx(6, 2)), -42.0);
        let e = beltrami_apply(&AngularExpansion::single(idx(0, 0), 3.5));
        assert_eq!(e.get(idx(0, 0)), 0.0);
        let e = beltrami_apply(&AngularExpansion::single(idx(9, 0), 2.0));
        assert_eq!(e.get(idx(9, 0)), -180.0);
    }

    #[test]
    fn beltrami_twice_squares_the_eigenvalue() {
        let mut e = AngularExpansion::new(7);
        for (k, i) in HarmonicIndex::all_up_to(7).enumerate() {
            e.set(i, 0.1 * k as f64 - 1.3).unwrap();
        }
        let twice = beltrami_apply(&beltrami_apply(&e));
        for (i, c) in e.iter() {
            let lam = i.beltrami_eigenvalue();
            assert!((twice.get(i) - lam * lam * c).abs() < 1e-9 * (1.0 + lam * lam));
        }
    }

    #[test]
    fn invalid_index_rejected() {
        assert!(HarmonicIndex::new(2, 3).is_err());
        assert!(eval_harmonic(HarmonicIndex { l: 1, m: -2 }, 0.3, 0.1).is_err());
    }

    #[test]
    fn json_shape() {
        let e = AngularExpansion::single(idx(2, -1), 0.25);
        let s = e.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["L"], 2);
        assert_eq!(v["coeffs"][0]["m"], -1);
        assert_eq!(AngularExpansion::from_json(&s).unwrap(), e);
    }
}
