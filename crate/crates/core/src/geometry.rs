//! Price simplex arithmetic, convex combinations and lattice grids.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Membership tolerance for the price simplex.
pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("price vector is zero; at least one coordinate must be positive")]
    ZeroPrices,
    #[error("coordinate {index} is {value}, expected a finite non-negative value")]
    InvalidCoordinate { index: usize, value: f64 },
    #[error("coordinates sum to {sum}, expected 1")]
    NotOnSimplex { sum: f64 },
    #[error("mixing weight {0} lies outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("grid resolution must be at least 1")]
    ZeroResolution,
    #[error("a simplex needs at least one coordinate")]
    EmptyDimension,
}

/// A point of the standard price simplex.
#[derive(Debug, Clone, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceVector(Vec<f64>);

impl PriceVector {
    /// Accepts `values` when they already lie on the simplex within [`SIMPLEX_TOL`].
    pub fn new(values: Vec<f64>) -> Result<Self, GeometryError> {
        check_non_negative(&values)?;
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(GeometryError::NotOnSimplex { sum });
        }
        Ok(Self(values))
    }

    /// Barycenter of the simplex with `dim` vertices.
    pub fn uniform(dim: usize) -> Self {
        Self(vec![1.0 / dim as f64; dim])
    }

    /// The unit vertex `e_index`.
    pub fn vertex(dim: usize, index: usize) -> Self {
        let mut values = vec![0.0; dim];
        values[index] = 1.0;
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PriceVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for PriceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// A non-negative consumption bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(Vec<f64>);

impl Bundle {
    pub fn new(quantities: Vec<f64>) -> Result<Self, GeometryError> {
        check_non_negative(&quantities)?;
        Ok(Self(quantities))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub(crate) fn from_clamped(quantities: Vec<f64>) -> Self {
        Self(quantities.into_iter().map(|q| q.max(0.0)).collect())
    }

    pub fn quantities(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Bundle {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// Signed gap between planned consumption and available stocks, per good.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExcessVector(Vec<f64>);

impl ExcessVector {
    pub fn new(gaps: Vec<f64>) -> Self {
        Self(gaps)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn gaps(&self) -> &[f64] {
        &self.0
    }

    /// Largest coordinate; the residual the equilibrium search minimizes.
    pub fn max_gap(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ExcessVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for ExcessVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, values: &[f64]) -> fmt::Result {
    write!(f, "(")?;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, ")")
}

fn check_non_negative(values: &[f64]) -> Result<(), GeometryError> {
    if values.is_empty() {
        return Err(GeometryError::EmptyDimension);
    }
    match values.iter().position(|v| !v.is_finite() || *v < 0.0) {
        Some(index) => Err(GeometryError::InvalidCoordinate { index, value: values[index] }),
        None => Ok(()),
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rescales a non-negative, non-zero vector onto the simplex.
pub fn normalize_prices(raw: &[f64]) -> Result<PriceVector, GeometryError> {
    check_non_negative(raw)?;
    let sum: f64 = raw.iter().sum();
    if sum <= 0.0 {
        return Err(GeometryError::ZeroPrices);
    }
    if !sum.is_finite() {
        // Rescale by the largest coordinate first so huge inputs do not overflow.
        let peak = raw.iter().copied().fold(0.0, f64::max);
        let scaled: Vec<f64> = raw.iter().map(|v| v / peak).collect();
        return normalize_prices(&scaled);
    }
    Ok(PriceVector(raw.iter().map(|v| v / sum).collect()))
}

/// `alpha * a + (1 - alpha) * b`.
pub fn convex_combination(a: &[f64], b: &[f64], alpha: f64) -> Result<Vec<f64>, GeometryError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(GeometryError::AlphaOutOfRange(alpha));
    }
    if a.len() != b.len() {
        return Err(GeometryError::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let beta = 1.0 - alpha;
    Ok(a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect())
}

pub fn simplex_contains(p: &[f64], tol: f64) -> bool {
    if p.is_empty() || p.iter().any(|v| !v.is_finite() || *v < -tol) {
        return false;
    }
    let sum: f64 = p.iter().sum();
    (sum - 1.0).abs() <= tol
}

/// Number of lattice points of resolution `resolution` on a simplex with `dim` vertices,
/// i.e. `C(resolution + dim - 1, dim - 1)`. Saturates at `u128::MAX`.
pub fn simplex_grid_size(dim: usize, resolution: u64) -> u128 {
    if dim == 0 {
        return 0;
    }
    let n = resolution as u128 + dim as u128 - 1;
    let r = (dim as u128 - 1).min(resolution as u128);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Integer lattice points `n` with `sum(n) == resolution`, in lexicographic order.
pub fn simplex_lattice(dim: usize, resolution: u64) -> Result<Vec<Vec<u64>>, GeometryError> {
    if dim == 0 {
        return Err(GeometryError::EmptyDimension);
    }
    if resolution == 0 {
        return Err(GeometryError::ZeroResolution);
    }
    let mut out = Vec::new();
    let mut current = vec![0u64; dim];
    fill_lattice(&mut current, 0, resolution, &mut out);
    Ok(out)
}

fn fill_lattice(current: &mut Vec<u64>, index: usize, remaining: u64, out: &mut Vec<Vec<u64>>) {
    if index + 1 == current.len() {
        current[index] = remaining;
        out.push(current.clone());
        return;
    }
    for n in 0..=remaining {
        current[index] = n;
        fill_lattice(current, index + 1, remaining - n, out);
    }
}

/// Converts a lattice point of the given resolution to a price vector.
pub fn lattice_price(point: &[u64], resolution: u64) -> PriceVector {
    let k = resolution as f64;
    PriceVector(point.iter().map(|&n| n as f64 / k).collect())
}

/// All simplex points with coordinates in `{0, 1/k, ..., 1}`, lexicographically ordered.
pub fn simplex_grid(dim: usize, resolution: u64) -> Result<Vec<PriceVector>, GeometryError> {
    Ok(simplex_lattice(dim, resolution)?
        .iter()
        .map(|n| lattice_price(n, resolution))
        .collect())
}
