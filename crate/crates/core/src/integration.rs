//! Two-block partial least squares under object or double centering.
//!
//! Both methods start from the cross-covariance `(1/n) X1_c X2_c^T` of the
//! centered blocks. [`pls_svd`] takes its top singular pairs as the weight
//! vectors of all components at once. [`pls_sequential`] extracts one pair at
//! a time and deflates each block against its own score vector, so scores
//! within a block come out mutually orthogonal.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sign_flip_needed, thin_svd, DEFAULT_RANK_TOL};
use crate::matrix::{center, CenteringKind, DataMatrix};

/// Two data blocks measured on the same `n` objects.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBlockData {
    x1: DataMatrix,
    x2: DataMatrix,
}

impl TwoBlockData {
    pub fn new(x1: DataMatrix, x2: DataMatrix) -> Result<Self> {
        if x1.objects() != x2.objects() {
            return Err(Error::Dimension(format!(
                "blocks must share the object count: {} vs {}",
                x1.objects(),
                x2.objects()
            )));
        }
        Ok(TwoBlockData { x1, x2 })
    }

    pub fn first(&self) -> &DataMatrix {
        &self.x1
    }

    pub fn second(&self) -> &DataMatrix {
        &self.x2
    }

    pub fn objects(&self) -> usize {
        self.x1.objects()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlsMethod {
    SvdCrossCov,
    Sequential,
}

/// Per-block vectors of one PLS component.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockComponent {
    /// Unit weight vector (a singular vector of the cross-covariance).
    pub weights: DVector<f64>,
    /// `X_c^T w`, length `n`.
    pub scores: DVector<f64>,
    /// Regression loadings `X_c t / ‖t‖²`.
    pub loadings: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlsComponent {
    pub block1: BlockComponent,
    pub block2: BlockComponent,
    /// `t1 · t2 / n`.
    pub covariance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlsModel {
    pub components: Vec<PlsComponent>,
    pub centering: CenteringKind,
    pub method: PlsMethod,
    /// Set when the sequential method ran out of shared signal before
    /// reaching the requested number of components.
    pub truncated: bool,
}

impl PlsModel {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn covariances(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.covariance).collect()
    }

    /// Stacks one kind of per-component vector into a matrix, one column per
    /// component. `block` is 1 or 2.
    pub fn stacked(&self, block: usize, pick: impl Fn(&BlockComponent) -> &DVector<f64>) -> DMatrix<f64> {
        let columns: Vec<DVector<f64>> = self
            .components
            .iter()
            .map(|c| pick(if block == 1 { &c.block1 } else { &c.block2 }).clone())
            .collect();
        if columns.is_empty() {
            return DMatrix::zeros(0, 0);
        }
        DMatrix::from_columns(&columns)
    }
}

/// `(1/n) X1_O X2_O^T`; both blocks are object centered here regardless of
/// any centering already applied.
pub fn cross_covariance(blocks: &TwoBlockData) -> Result<DMatrix<f64>> {
    let n = blocks.objects();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "cross-covariance needs at least 2 objects, got {n}"
        )));
    }
    let x1 = center(&blocks.x1, CenteringKind::Object);
    let x2 = center(&blocks.x2, CenteringKind::Object);
    Ok(x1.as_matrix() * x2.as_matrix().transpose() / n as f64)
}

fn check_centering(centering: CenteringKind) -> Result<()> {
    match centering {
        CenteringKind::Object | CenteringKind::Double => Ok(()),
        other => Err(Error::InvalidInput(format!(
            "PLS supports object or double centering, not {other}: object centering is required \
             to form the cross-covariance matrix"
        ))),
    }
}

fn centered_blocks(blocks: &TwoBlockData, centering: CenteringKind) -> (DMatrix<f64>, DMatrix<f64>) {
    (
        center(&blocks.x1, centering).into_matrix(),
        center(&blocks.x2, centering).into_matrix(),
    )
}

fn block_component(x: &DMatrix<f64>, weights: DVector<f64>) -> BlockComponent {
    let scores = x.tr_mul(&weights);
    let ss = scores.norm_squared();
    let loadings = if ss > 0.0 {
        x * &scores / ss
    } else {
        DVector::zeros(x.nrows())
    };
    BlockComponent {
        weights,
        scores,
        loadings,
    }
}

/// PLS from the SVD of the cross-covariance of the centered blocks.
pub fn pls_svd(blocks: &TwoBlockData, k: usize, centering: CenteringKind) -> Result<PlsModel> {
    check_centering(centering)?;
    let n = blocks.objects();
    if n < 2 {
        return Err(Error::InvalidInput(format!("PLS needs at least 2 objects, got {n}")));
    }
    let (x1, x2) = centered_blocks(blocks, centering);
    let cross = &x1 * x2.transpose() / n as f64;
    let svd = thin_svd(&cross)?;
    let rank = svd.rank(DEFAULT_RANK_TOL);
    if k == 0 || k > rank {
        return Err(Error::out_of_bounds("K", k, 1, rank));
    }
    let components = (0..k)
        .map(|j| {
            let b1 = block_component(&x1, svd.u.column(j).into_owned());
            let b2 = block_component(&x2, svd.v.column(j).into_owned());
            let covariance = b1.scores.dot(&b2.scores) / n as f64;
            PlsComponent {
                block1: b1,
                block2: b2,
                covariance,
            }
        })
        .collect();
    Ok(PlsModel {
        components,
        centering,
        method: PlsMethod::SvdCrossCov,
        truncated: false,
    })
}

/// Leading singular pair of `a`, with the same sign convention as
/// [`thin_svd`].
fn leading_pair(a: &DMatrix<f64>) -> Result<(DVector<f64>, f64, DVector<f64>)> {
    let svd = thin_svd(a)?;
    Ok((
        svd.u.column(0).into_owned(),
        svd.singular_values[0],
        svd.v.column(0).into_owned(),
    ))
}

/// Score-first PLS: per component take the leading singular pair of the
/// current cross-covariance, form scores `t_i = X_i^T w_i`, then deflate
/// `X_i ← X_i (I − t_i t_i^T / ‖t_i‖²)`.
///
/// Stops early, with `truncated` set, once the remaining cross-covariance
/// or a deflated block is numerically zero.
pub fn pls_sequential(blocks: &TwoBlockData, k: usize, centering: CenteringKind) -> Result<PlsModel> {
    check_centering(centering)?;
    let n = blocks.objects();
    if n < 2 {
        return Err(Error::InvalidInput(format!("PLS needs at least 2 objects, got {n}")));
    }
    let (mut x1, mut x2) = centered_blocks(blocks, centering);
    let max_k = x1.nrows().min(x2.nrows()).min(n);
    if k == 0 || k > max_k {
        return Err(Error::out_of_bounds("K", k, 1, max_k));
    }
    // Relative to the raw blocks so rounding residue of a constant block counts as zero.
    let scale1 = blocks.x1.frobenius_norm();
    let scale2 = blocks.x2.frobenius_norm();
    let cross_scale = scale1 * scale2 / n as f64;

    let mut components = Vec::with_capacity(k);
    let mut first_sigma = None;
    let mut truncated = false;
    for j in 0..k {
        let cross = &x1 * x2.transpose() / n as f64;
        let (mut w1, sigma, mut w2) = leading_pair(&cross)?;
        let reference = *first_sigma.get_or_insert(sigma);
        let exhausted = sigma <= DEFAULT_RANK_TOL * cross_scale
            || sigma <= DEFAULT_RANK_TOL * reference
            || x1.norm() <= DEFAULT_RANK_TOL * scale1
            || x2.norm() <= DEFAULT_RANK_TOL * scale2;
        if exhausted {
            log::warn!("sequential PLS stopped after {j} of {k} components: no shared signal left");
            truncated = true;
            break;
        }
        if sign_flip_needed(&w1) {
            w1.neg_mut();
            w2.neg_mut();
        }
        let b1 = block_component(&x1, w1);
        let b2 = block_component(&x2, w2);
        let covariance = b1.scores.dot(&b2.scores) / n as f64;

        deflate(&mut x1, &b1.scores);
        deflate(&mut x2, &b2.scores);
        components.push(PlsComponent {
            block1: b1,
            block2: b2,
            covariance,
        });
    }
    Ok(PlsModel {
        components,
        centering,
        method: PlsMethod::Sequential,
        truncated,
    })
}

fn deflate(x: &mut DMatrix<f64>, t: &DVector<f64>) {
    let ss = t.norm_squared();
    if ss == 0.0 {
        return;
    }
    let p = &*x * t / ss;
    x.ger(-1.0, &p, t, 1.0);
}
