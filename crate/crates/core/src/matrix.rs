//! Data matrices, their mean structure and the four centering operators.
//!
//! Matrices follow the objects-as-columns convention: a `d × n` matrix holds
//! `n` data objects, each a point in `R^d`, and `d` traits, each a point in
//! `R^n`. Object centering subtracts the per-trait mean from every column,
//! trait centering subtracts the per-object mean from every row.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite `d × n` real matrix with data objects as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix(DMatrix<f64>);

impl DataMatrix {
    /// Wraps a matrix, rejecting empty shapes and non-finite entries.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidInput(format!(
                "data matrix must be at least 1x1, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for col in 0..entries.ncols() {
            for row in 0..entries.nrows() {
                let value = entries[(row, col)];
                if !value.is_finite() {
                    return Err(Error::NonFinite { row, col, value });
                }
            }
        }
        Ok(DataMatrix(entries))
    }

    /// Builds a matrix from row-major nested vectors (one inner vector per trait).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        Self::new(DMatrix::from_fn(d, n, |i, j| rows[i][j]))
    }

    pub fn from_row_slice(d: usize, n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != d * n {
            return Err(Error::Dimension(format!(
                "{} values cannot fill a {d}x{n} matrix",
                values.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(d, n, values))
    }

    pub fn zeros(d: usize, n: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(d, n))
    }

    /// Number of traits (rows).
    pub fn traits(&self) -> usize {
        self.0.nrows()
    }

    /// Number of data objects (columns).
    pub fn objects(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, trait_idx: usize, object_idx: usize) -> f64 {
        self.0[(trait_idx, object_idx)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Squared Frobenius norm, the total energy of the matrix.
    pub fn energy(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn transpose(&self) -> DataMatrix {
        DataMatrix(self.0.transpose())
    }

    /// Row-major copy, convenient for serialization.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    // Internal constructor for results of finite arithmetic on finite input.
    pub(crate) fn from_finite(entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        DataMatrix(entries)
    }
}

impl AsRef<DMatrix<f64>> for DataMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl TryFrom<DMatrix<f64>> for DataMatrix {
    type Error = Error;

    fn try_from(value: DMatrix<f64>) -> Result<Self> {
        DataMatrix::new(value)
    }
}

/// Which means are removed from a data matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenteringKind {
    None,
    Grand,
    /// Subtract the object-mean vector from every column; rows sum to zero.
    Object,
    /// Subtract each object's own mean from its entries; columns sum to zero.
    Trait,
    /// Object and trait centering together; rows and columns sum to zero.
    Double,
}

impl CenteringKind {
    pub const ALL: [CenteringKind; 5] = [
        CenteringKind::None,
        CenteringKind::Grand,
        CenteringKind::Object,
        CenteringKind::Trait,
        CenteringKind::Double,
    ];

    /// Score vectors (right singular vectors) have entry-mean zero.
    pub fn centers_scores(self) -> bool {
        matches!(self, CenteringKind::Object | CenteringKind::Double)
    }

    /// Loadings vectors (left singular vectors) have entry-mean zero.
    pub fn centers_loadings(self) -> bool {
        matches!(self, CenteringKind::Trait | CenteringKind::Double)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CenteringKind::None => "none",
            CenteringKind::Grand => "grand",
            CenteringKind::Object => "object",
            CenteringKind::Trait => "trait",
            CenteringKind::Double => "double",
        }
    }
}

impl fmt::Display for CenteringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CenteringKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(CenteringKind::None),
            "grand" => Ok(CenteringKind::Grand),
            "object" => Ok(CenteringKind::Object),
            "trait" => Ok(CenteringKind::Trait),
            "double" => Ok(CenteringKind::Double),
            other => Err(Error::InvalidInput(format!(
                "unknown centering '{other}' (expected none, grand, object, trait or double)"
            ))),
        }
    }
}

/// Grand, object and trait means of a data matrix and the matrices they span.
///
/// `double_mean` is `object_mean + trait_mean - grand_mean`, which makes
/// `X - double_mean` exactly double centered. It coincides with the plain sum
/// `object_mean + trait_mean` only when the grand mean is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanDecomposition {
    /// Mean of all `d·n` entries.
    pub grand: f64,
    /// Length-`d` object-mean vector (per-trait averages across objects).
    pub object_vector: DVector<f64>,
    /// Length-`n` trait-mean vector (per-object averages across traits).
    pub trait_vector: DVector<f64>,
    pub grand_mean: DMatrix<f64>,
    /// Every column equals `object_vector`.
    pub object_mean: DMatrix<f64>,
    /// Every row equals `trait_vector^T`.
    pub trait_mean: DMatrix<f64>,
    pub double_mean: DMatrix<f64>,
}

impl MeanDecomposition {
    /// The matrix subtracted by a given centering.
    pub fn mean_matrix(&self, kind: CenteringKind) -> DMatrix<f64> {
        let (d, n) = self.grand_mean.shape();
        match kind {
            CenteringKind::None => DMatrix::zeros(d, n),
            CenteringKind::Grand => self.grand_mean.clone(),
            CenteringKind::Object => self.object_mean.clone(),
            CenteringKind::Trait => self.trait_mean.clone(),
            CenteringKind::Double => self.double_mean.clone(),
        }
    }

    /// `<MO, MT>_F` of the raw mean matrices; equals `d·n·grand²`.
    pub fn raw_cross_inner(&self) -> f64 {
        self.object_mean.dot(&self.trait_mean)
    }

    /// `<MO, MT>_F` computed on the grand-mean-centered matrix. Zero up to
    /// rounding for every input.
    pub fn grand_centered_cross_inner(&self) -> f64 {
        (&self.object_mean - &self.grand_mean).dot(&(&self.trait_mean - &self.grand_mean))
    }
}

/// Computes the grand, object and trait means of `x` and their mean matrices.
pub fn compute_means(x: &DataMatrix) -> MeanDecomposition {
    let m = x.as_matrix();
    let (d, n) = m.shape();
    let object_vector = m.column_mean();
    let trait_vector = m.row_mean().transpose();
    let grand = m.mean();

    let grand_mean = DMatrix::from_element(d, n, grand);
    let object_mean = DMatrix::from_fn(d, n, |i, _| object_vector[i]);
    let trait_mean = DMatrix::from_fn(d, n, |_, j| trait_vector[j]);
    let double_mean = DMatrix::from_fn(d, n, |i, j| object_vector[i] + trait_vector[j] - grand);

    MeanDecomposition {
        grand,
        object_vector,
        trait_vector,
        grand_mean,
        object_mean,
        trait_mean,
        double_mean,
    }
}

/// Removes the means selected by `kind`.
///
/// Double centering subtracts `μ_d[i] + μ_n[j] − μ_G` per entry, which is
/// the same as object centering followed by trait centering in either order.
pub fn center(x: &DataMatrix, kind: CenteringKind) -> DataMatrix {
    if kind == CenteringKind::None {
        return x.clone();
    }
    let means = compute_means(x);
    let m = x.as_matrix();
    let centered = match kind {
        CenteringKind::None => unreachable!(),
        CenteringKind::Grand => m.add_scalar(-means.grand),
        CenteringKind::Object => m - &means.object_mean,
        CenteringKind::Trait => m - &means.trait_mean,
        CenteringKind::Double => m - &means.double_mean,
    };
    DataMatrix::from_finite(centered)
}

/// Checks the row/column sum conditions that `center(_, kind)` guarantees,
/// relative to `max(1, ‖X‖_F)`.
pub fn is_centered(x: &DataMatrix, kind: CenteringKind, tol: f64) -> bool {
    let m = x.as_matrix();
    let bound = tol * x.frobenius_norm().max(1.0);
    let rows_ok = || m.row_iter().all(|r| r.sum().abs() <= bound);
    let cols_ok = || m.column_iter().all(|c| c.sum().abs() <= bound);
    match kind {
        CenteringKind::None => true,
        CenteringKind::Grand => m.sum().abs() <= bound,
        CenteringKind::Object => rows_ok(),
        CenteringKind::Trait => cols_ok(),
        CenteringKind::Double => rows_ok() && cols_ok(),
    }
}

/// Frobenius inner product `Σ A_ij B_ij`.
pub fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "frobenius inner product of {:?} and {:?} matrices",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.dot(b))
}
