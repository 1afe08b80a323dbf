//! Modes of variation: the SVD of a centered data matrix, energy shares,
//! numerical rank, low-rank reconstruction and the scores/loadings
//! correlation ledger.
//!
//! For `X_c = U D V^T` the columns of `U` are loadings (directions in object
//! space) and the columns of `V` are scores (directions in trait space).
//! Orthogonality of both sets holds for every centering. Zero entry-mean,
//! and therefore zero Pearson correlation between distinct vectors, holds
//! for scores under object or double centering and for loadings under trait
//! or double centering.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{thin_svd, DEFAULT_RANK_TOL};
use crate::matrix::{center, compute_means, CenteringKind, DataMatrix};

/// Which mean matrix a [`MeanComponent`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanPart {
    Grand,
    Object,
    Trait,
    /// `-MG`, added back so that `MO + MT - MG` restores a double-centered matrix.
    GrandCorrection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanComponent {
    pub part: MeanPart,
    pub matrix: DMatrix<f64>,
}

/// Rank-`r` SVD of a centered data matrix together with the means removed
/// before decomposing.
#[derive(Debug, Clone)]
pub struct ModesOfVariation {
    /// `d × r`, orthonormal columns.
    pub loadings: DMatrix<f64>,
    /// Nonincreasing, all positive.
    pub singular_values: Vec<f64>,
    /// `n × r`, orthonormal columns.
    pub scores: DMatrix<f64>,
    pub centering: CenteringKind,
    pub mean_components: Vec<MeanComponent>,
    /// `‖center(X, centering)‖_F²`.
    pub total_energy: f64,
}

/// Per-component energy proportions `σ_k² / Σ_j σ_j²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyShares {
    pub proportions: Vec<f64>,
    pub total_energy: f64,
}

impl ModesOfVariation {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn centering(&self) -> CenteringKind {
        self.centering
    }

    /// Shares relative to the energy of the whole centered matrix; they sum
    /// to one unless the decomposition was truncated with `max_rank`.
    pub fn energy_shares(&self) -> EnergyShares {
        let proportions = if self.total_energy > 0.0 {
            self.singular_values.iter().map(|s| s * s / self.total_energy).collect()
        } else {
            Vec::new()
        };
        EnergyShares {
            proportions,
            total_energy: self.total_energy,
        }
    }

    /// Projections of each object onto each loadings vector, `V·D` (`n × r`).
    pub fn score_coordinates(&self) -> DMatrix<f64> {
        let mut out = self.scores.clone();
        for (k, s) in self.singular_values.iter().enumerate() {
            out.column_mut(k).scale_mut(*s);
        }
        out
    }

    /// Sum of the removed mean matrices.
    pub fn mean_matrix(&self) -> DMatrix<f64> {
        let (d, n) = (self.loadings.nrows(), self.scores.nrows());
        self.mean_components
            .iter()
            .fold(DMatrix::zeros(d, n), |acc, c| acc + &c.matrix)
    }

    pub fn loading(&self, k: usize) -> DVector<f64> {
        self.loadings.column(k).into_owned()
    }

    pub fn score(&self, k: usize) -> DVector<f64> {
        self.scores.column(k).into_owned()
    }
}

/// SVD modes of `center(x, centering)`, truncated at the numerical rank
/// (relative tolerance `1e-10`) or at `max_rank`, whichever is smaller.
pub fn svd_modes(x: &DataMatrix, centering: CenteringKind, max_rank: Option<usize>) -> Result<ModesOfVariation> {
    let (d, n) = x.shape();
    if let Some(k) = max_rank {
        if k > d.min(n) {
            return Err(Error::out_of_bounds("max_rank", k, 0, d.min(n)));
        }
    }
    let means = compute_means(x);
    let centered = center(x, centering);
    let svd = thin_svd(centered.as_matrix())?;
    let mut r = svd.rank(DEFAULT_RANK_TOL);
    if let Some(k) = max_rank {
        r = r.min(k);
    }

    let mean_components = match centering {
        CenteringKind::None => vec![],
        CenteringKind::Grand => vec![MeanComponent {
            part: MeanPart::Grand,
            matrix: means.grand_mean,
        }],
        CenteringKind::Object => vec![MeanComponent {
            part: MeanPart::Object,
            matrix: means.object_mean,
        }],
        CenteringKind::Trait => vec![MeanComponent {
            part: MeanPart::Trait,
            matrix: means.trait_mean,
        }],
        CenteringKind::Double => vec![
            MeanComponent {
                part: MeanPart::Object,
                matrix: means.object_mean,
            },
            MeanComponent {
                part: MeanPart::Trait,
                matrix: means.trait_mean,
            },
            MeanComponent {
                part: MeanPart::GrandCorrection,
                matrix: -means.grand_mean,
            },
        ],
    };

    Ok(ModesOfVariation {
        loadings: svd.u.columns(0, r).into_owned(),
        singular_values: svd.singular_values[..r].to_vec(),
        scores: svd.v.columns(0, r).into_owned(),
        centering,
        mean_components,
        total_energy: centered.energy(),
    })
}

/// Pearson correlation of two equal-length sequences.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "correlation of sequences with lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let m = x.len();
    if m < 2 {
        return Err(Error::UndefinedCorrelation(format!("need at least 2 entries, got {m}")));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / m as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if negligible_spread(sxx, x) || negligible_spread(syy, y) {
        return Err(Error::UndefinedCorrelation("a sequence has zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn negligible_spread(sum_sq: f64, v: &[f64]) -> bool {
    let scale = v.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    sum_sq <= (1e-14 * scale).powi(2) * v.len() as f64
}

/// Largest `|corr|` over all pairs of distinct columns; `None` when fewer
/// than two columns or when every pair is undefined.
fn max_pairwise_correlation(m: &DMatrix<f64>) -> Option<f64> {
    let cols: Vec<Vec<f64>> = m.column_iter().map(|c| c.iter().copied().collect()).collect();
    let mut best: Option<f64> = None;
    for j in 0..cols.len() {
        for k in j + 1..cols.len() {
            if let Ok(c) = pearson_correlation(&cols[j], &cols[k]) {
                best = Some(best.map_or(c.abs(), |b: f64| b.max(c.abs())));
            }
        }
    }
    best
}

fn max_pairwise_inner(m: &DMatrix<f64>) -> Option<f64> {
    if m.ncols() < 2 {
        return None;
    }
    let gram = m.transpose() * m;
    let mut best = 0.0_f64;
    for j in 0..gram.nrows() {
        for k in j + 1..gram.ncols() {
            best = best.max(gram[(j, k)].abs());
        }
    }
    Some(best)
}

/// One centering's row of the ledger. `None` cells are not applicable
/// (fewer than two components survive the centering).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerRow {
    pub centering: CenteringKind,
    pub rank: usize,
    pub scores_max_abs_correlation: Option<f64>,
    pub loadings_max_abs_correlation: Option<f64>,
    pub scores_max_abs_inner: Option<f64>,
    pub loadings_max_abs_inner: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationLedger {
    pub rows: Vec<LedgerRow>,
}

impl CorrelationLedger {
    pub fn row(&self, kind: CenteringKind) -> Option<&LedgerRow> {
        self.rows.iter().find(|r| r.centering == kind)
    }
}

/// Orthogonality and uncorrelatedness of scores and loadings under the four
/// centerings None, Object, Trait and Double.
pub fn correlation_ledger(x: &DataMatrix) -> Result<CorrelationLedger> {
    let (d, n) = x.shape();
    if d.min(n) < 3 {
        return Err(Error::InvalidInput(format!(
            "correlation ledger needs min(d, n) >= 3, got {d}x{n}"
        )));
    }
    let kinds = [
        CenteringKind::None,
        CenteringKind::Object,
        CenteringKind::Trait,
        CenteringKind::Double,
    ];
    let rows = kinds
        .iter()
        .map(|&kind| {
            let modes = svd_modes(x, kind, None)?;
            let applicable = modes.rank() >= 2;
            let cell = |v: Option<f64>| if applicable { v } else { None };
            Ok(LedgerRow {
                centering: kind,
                rank: modes.rank(),
                scores_max_abs_correlation: cell(max_pairwise_correlation(&modes.scores)),
                loadings_max_abs_correlation: cell(max_pairwise_correlation(&modes.loadings)),
                scores_max_abs_inner: cell(max_pairwise_inner(&modes.scores)),
                loadings_max_abs_inner: cell(max_pairwise_inner(&modes.loadings)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationLedger { rows })
}

/// Number of singular values strictly above `rel_tol · σ₁`; zero for the
/// zero matrix.
pub fn numerical_rank(x: &DataMatrix, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidInput(format!(
            "rel_tol must lie in (0, 1), got {rel_tol}"
        )));
    }
    Ok(thin_svd(x.as_matrix())?.rank(rel_tol))
}

/// Mean components plus the first `k` rank-one modes.
pub fn reconstruct(modes: &ModesOfVariation, k: usize) -> Result<DataMatrix> {
    if k > modes.rank() {
        return Err(Error::out_of_bounds("k", k, 0, modes.rank()));
    }
    let mut out = modes.mean_matrix();
    for j in 0..k {
        let u = modes.loadings.column(j);
        let v = modes.scores.column(j);
        out.ger(modes.singular_values[j], &u, &v, 1.0);
    }
    DataMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn example() -> DataMatrix {
        DataMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap()
    }

    #[test]
    fn rank_one_object_centered_example() {
        // X_O = [[-1,0,1],[-1,0,1]]; σ₁ = ‖X_O‖_F = 2, u = (1,1)/√2, v = (-1,0,1)/√2.
        let modes = svd_modes(&example(), CenteringKind::Object, None).unwrap();
        assert_eq!(modes.rank(), 1);
        assert_abs_diff_eq!(modes.singular_values[0], 2.0, epsilon = 1e-12);
        let h = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(modes.loadings[(0, 0)], h, epsilon = 1e-12);
        assert_abs_diff_eq!(modes.loadings[(1, 0)], h, epsilon = 1e-12);
        let v = modes.score(0);
        let sign = v[2].signum();
        assert_abs_diff_eq!(v[0] * sign, -h, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_one_outer_product_uncentered() {
        let u = DVector::from_vec(vec![1.0, -2.0, 2.0]);
        let v = DVector::from_vec(vec![3.0, 4.0]);
        let x = DataMatrix::new(&u * v.transpose()).unwrap();
        let modes = svd_modes(&x, CenteringKind::None, None).unwrap();
        assert_eq!(modes.rank(), 1);
        assert_abs_diff_eq!(modes.singular_values[0], 15.0, epsilon = 1e-12);
        assert!(modes.mean_components.is_empty());
    }

    #[test]
    fn max_rank_is_bounded() {
        let x = example();
        assert!(matches!(
            svd_modes(&x, CenteringKind::None, Some(3)),
            Err(Error::OutOfBounds { .. })
        ));
        let m = svd_modes(&x, CenteringKind::None, Some(1)).unwrap();
        assert_eq!(m.rank(), 1);
        assert!(m.energy_shares().proportions[0] < 1.0);
    }

    #[test]
    fn pearson_examples() {
        assert_abs_diff_eq!(
            pearson_correlation(&[1.0, 0.0, -1.0], &[1.0, -2.0, 1.0]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            pearson_correlation(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        // y = 8 - 2x exactly.
        assert_abs_diff_eq!(
            pearson_correlation(&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0]).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson_correlation(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(matches!(
            pearson_correlation(&[1.0], &[2.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(matches!(
            pearson_correlation(&[1.0, 2.0], &[2.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn numerical_rank_examples() {
        let x = DataMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0]))).unwrap();
        assert_eq!(numerical_rank(&x, 1e-10).unwrap(), 2);
        assert_eq!(numerical_rank(&DataMatrix::zeros(3, 3).unwrap(), 1e-10).unwrap(), 0);
        assert!(numerical_rank(&x, 0.0).is_err());
        assert!(numerical_rank(&x, 1.0).is_err());
    }

    #[test]
    fn reconstruct_bounds_and_means() {
        let x = DataMatrix::from_rows(&[
            vec![1.0, 4.0, 2.0, 8.0],
            vec![0.0, 3.0, -1.0, 2.0],
            vec![5.0, 1.0, 1.0, 0.0],
        ])
        .unwrap();
        let modes = svd_modes(&x, CenteringKind::Double, None).unwrap();
        let k0 = reconstruct(&modes, 0).unwrap();
        assert_abs_diff_eq!(k0.as_matrix(), &compute_means(&x).double_mean, epsilon = 1e-14);
        let full = reconstruct(&modes, modes.rank()).unwrap();
        assert!((full.as_matrix() - x.as_matrix()).norm() <= 1e-8 * x.frobenius_norm());
        assert!(matches!(
            reconstruct(&modes, modes.rank() + 1),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn ledger_rejects_small_inputs() {
        assert!(correlation_ledger(&example()).is_err());
    }

    #[test]
    fn ledger_marks_low_rank_as_not_applicable() {
        // Rank-one structure: after any centering at most one mode remains.
        let u = DVector::from_vec(vec![1.0, 2.0, -1.0, 0.5]);
        let v = DVector::from_vec(vec![2.0, -1.0, 0.0, 3.0, 1.0]);
        let x = DataMatrix::new(&u * v.transpose()).unwrap();
        let ledger = correlation_ledger(&x).unwrap();
        let none = ledger.row(CenteringKind::None).unwrap();
        assert_eq!(none.rank, 1);
        assert_eq!(none.scores_max_abs_correlation, None);
        assert_eq!(none.loadings_max_abs_inner, None);
    }
}
