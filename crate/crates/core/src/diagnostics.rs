//! Direction-energy test for a dominant constant-function mode, and the
//! energy breakdown of object- versus double-centered modes.
//!
//! After object centering, the trait means live in object space as the
//! projections of each object onto the constant direction `1/√d`. The test
//! compares the share of the object-centered energy along that direction
//! with the shares along `B` directions drawn uniformly from the unit sphere
//! of the object-centered column space.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{thin_svd, DEFAULT_RANK_TOL};
use crate::matrix::{center, CenteringKind, DataMatrix};

pub const DEFAULT_NULL_SAMPLES: usize = 500;
pub const DEFAULT_THRESHOLD: f64 = 0.95;

const UNIT_TOL: f64 = 1e-10;

/// The normalized all-ones vector in `R^d`.
pub fn constant_direction(d: usize) -> Result<DVector<f64>> {
    if d == 0 {
        return Err(Error::out_of_bounds("d", 0, 1, usize::MAX));
    }
    Ok(DVector::from_element(d, 1.0 / (d as f64).sqrt()))
}

/// Share of the energy of `x_o` that lies along the unit direction `u`:
/// `‖u^T X_O‖² / ‖X_O‖_F²`.
pub fn direction_energy(x_o: &DataMatrix, u: &DVector<f64>) -> Result<f64> {
    if u.len() != x_o.traits() {
        return Err(Error::Dimension(format!(
            "direction has length {}, matrix has {} traits",
            u.len(),
            x_o.traits()
        )));
    }
    if (u.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidInput(format!(
            "direction must have unit norm, got {}",
            u.norm()
        )));
    }
    let total = x_o.energy();
    if total == 0.0 {
        return Err(Error::Degenerate(
            "energy proportion of a zero matrix is undefined".into(),
        ));
    }
    Ok(projected_energy(x_o.as_matrix(), u) / total)
}

fn projected_energy(m: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    m.tr_mul(u).norm_squared()
}

/// Orthonormal basis of the column space of `x_o`.
fn column_space_basis(x_o: &DataMatrix) -> Result<DMatrix<f64>> {
    let svd = thin_svd(x_o.as_matrix())?;
    let r = svd.rank(DEFAULT_RANK_TOL);
    if r == 0 {
        return Err(Error::Degenerate(
            "object-centered matrix is zero; its column space is empty".into(),
        ));
    }
    Ok(svd.u.columns(0, r).into_owned())
}

fn draw_directions(basis: &DMatrix<f64>, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = basis.ncols();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g: DVector<f64> = DVector::from_fn(r, |_, _| StandardNormal.sample(&mut rng));
        let norm = g.norm();
        if norm == 0.0 {
            continue;
        }
        out.push(basis * (g / norm));
    }
    out
}

/// `count` unit vectors drawn uniformly (rotation-invariantly) from the
/// column space of `x_o`. Gaussian coefficients over an orthonormal basis of
/// the span are normalized; the same seed yields the same set.
pub fn sample_null_directions(x_o: &DataMatrix, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
    if count == 0 {
        return Err(Error::out_of_bounds("B", 0, 1, usize::MAX));
    }
    let basis = column_space_basis(x_o)?;
    Ok(draw_directions(&basis, count, seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyTestConfig {
    /// Number of null directions `B`.
    pub samples: usize,
    pub seed: u64,
    /// Quantile of the null the observed energy must exceed to reject.
    pub threshold: f64,
}

impl Default for EnergyTestConfig {
    fn default() -> Self {
        EnergyTestConfig {
            samples: DEFAULT_NULL_SAMPLES,
            seed: 0,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTestResult {
    /// Constant-direction energy share of the object-centered matrix.
    pub observed: f64,
    pub samples: usize,
    /// Empty when elided from a report.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub null_samples: Vec<f64>,
    /// `(1 + #{null ≥ observed}) / (B + 1)`.
    pub p_value: f64,
    pub percentile_threshold: f64,
    /// Empirical `percentile_threshold` quantile of the null samples.
    pub null_quantile: f64,
    pub reject: bool,
    pub seed: u64,
    /// Dimension of the subspace the null directions were drawn from.
    pub subspace_rank: usize,
    /// Squared norm of the constant direction's projection onto that subspace.
    pub constant_in_span_fraction: f64,
}

/// Linearly interpolated empirical quantile of sorted data (the usual
/// "type 7" definition).
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Runs the direction-energy test on `x` (object-centered internally).
pub fn energy_test(x: &DataMatrix, config: &EnergyTestConfig) -> Result<EnergyTestResult> {
    if config.samples == 0 {
        return Err(Error::out_of_bounds("B", 0, 1, usize::MAX));
    }
    if !(config.threshold > 0.0 && config.threshold < 1.0) {
        return Err(Error::InvalidInput(format!(
            "threshold must lie in (0, 1), got {}",
            config.threshold
        )));
    }
    let x_o = center(x, CenteringKind::Object);
    let total = x_o.energy();
    if total == 0.0 {
        return Err(Error::Degenerate(
            "matrix is constant across objects; nothing remains after object centering".into(),
        ));
    }
    let constant = constant_direction(x.traits())?;
    let observed = direction_energy(&x_o, &constant)?;

    let basis = column_space_basis(&x_o)?;
    let in_span = basis.tr_mul(&constant).norm_squared().min(1.0);
    let directions = draw_directions(&basis, config.samples, config.seed);

    // `collect` on an indexed parallel iterator keeps input order.
    let m = x_o.as_matrix();
    let null_samples: Vec<f64> = directions
        .par_iter()
        .map(|u| (projected_energy(m, u) / total).min(1.0))
        .collect();

    let exceed = null_samples.iter().filter(|&&e| e >= observed).count();
    let p_value = (1 + exceed) as f64 / (config.samples + 1) as f64;
    let mut sorted = null_samples.clone();
    sorted.sort_by(f64::total_cmp);
    let null_quantile = empirical_quantile(&sorted, config.threshold);

    Ok(EnergyTestResult {
        observed,
        samples: config.samples,
        null_samples,
        p_value,
        percentile_threshold: config.threshold,
        null_quantile,
        reject: observed > null_quantile,
        seed: config.seed,
        subspace_rank: basis.ncols(),
        constant_in_span_fraction: in_span,
    })
}

/// Energy shares of object-centered and double-centered modes, all relative
/// to the total energy of the object-centered matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// First `k` object-centered shares.
    pub object_centered_shares: Vec<f64>,
    /// First `k` double-centered shares (zero-padded past the rank of `X_D`).
    pub double_centered_shares: Vec<f64>,
    pub constant_direction_share: f64,
    /// Object-centered energy beyond the first `k` components.
    pub object_centered_remainder: f64,
    /// Double-centered energy beyond the first `k` components.
    pub double_centered_remainder: f64,
    /// `‖X_O‖_F²`.
    pub total_energy: f64,
}

impl EnergyBreakdown {
    /// Drop in the first component's share between the two regimes.
    pub fn first_component_drop(&self) -> Option<f64> {
        Some(self.object_centered_shares.first()? - self.double_centered_shares.first()?)
    }

    /// Fraction of the constant-direction share explained by the first
    /// component's drop; `None` when that share is negligible.
    pub fn drop_fraction_of_constant(&self) -> Option<f64> {
        if self.constant_direction_share <= 1e-12 {
            return None;
        }
        Some(self.first_component_drop()? / self.constant_direction_share)
    }
}

pub fn energy_breakdown(x: &DataMatrix, k: usize) -> Result<EnergyBreakdown> {
    let x_o = center(x, CenteringKind::Object);
    let total = x_o.energy();
    if total == 0.0 {
        return Err(Error::Degenerate(
            "object-centered matrix is zero; energy shares are undefined".into(),
        ));
    }
    let object_svd = thin_svd(x_o.as_matrix())?;
    let rank = object_svd.rank(DEFAULT_RANK_TOL);
    if k > rank {
        return Err(Error::out_of_bounds("k", k, 0, rank));
    }
    let x_d = center(&x_o, CenteringKind::Trait);
    let double_svd = thin_svd(x_d.as_matrix())?;

    let shares =
        |values: &[f64]| -> Vec<f64> { (0..k).map(|j| values.get(j).map_or(0.0, |s| s * s / total)).collect() };
    let object_centered_shares = shares(&object_svd.singular_values);
    let double_centered_shares = shares(&double_svd.singular_values);
    let tail = |values: &[f64]| -> f64 { values.iter().skip(k).map(|s| s * s).sum::<f64>() / total };

    // Equals ‖MT(X_O)‖² / ‖X_O‖², evaluated directly rather than as a difference.
    let ones = constant_direction(x.traits())?;
    let constant_direction_share = projected_energy(x_o.as_matrix(), &ones) / total;

    Ok(EnergyBreakdown {
        object_centered_remainder: tail(&object_svd.singular_values),
        double_centered_remainder: tail(&double_svd.singular_values),
        object_centered_shares,
        double_centered_shares,
        constant_direction_share,
        total_energy: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::svd_modes;
    use approx::assert_abs_diff_eq;

    fn object_centered_example() -> DataMatrix {
        DataMatrix::from_rows(&[vec![-1.0, 0.0, 1.0], vec![-1.0, 0.0, 1.0]]).unwrap()
    }

    fn sample_matrix() -> DataMatrix {
        DataMatrix::from_rows(&[
            vec![1.0, 4.0, 2.0, 8.0, -1.0],
            vec![0.0, 3.0, -1.0, 2.0, 2.5],
            vec![5.0, 1.0, 1.0, 0.0, 3.0],
            vec![2.0, 2.0, 7.0, -3.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn constant_direction_values() {
        let c = constant_direction(4).unwrap();
        assert!(c.iter().all(|&v| v == 0.5));
        assert_eq!(constant_direction(1).unwrap()[0], 1.0);
        assert!(constant_direction(0).is_err());
        let big = constant_direction(1_000_000).unwrap();
        assert!((big.norm() - 1.0).abs() < 1e-15 * 1e3);
    }

    #[test]
    fn identical_rows_put_all_energy_on_constant() {
        // u^T X_O = (-√2, 0, √2); 4 / 4.
        let e = direction_energy(&object_centered_example(), &constant_direction(2).unwrap()).unwrap();
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn orthogonal_direction_has_no_energy() {
        let u = DVector::from_vec(vec![1.0, -1.0]) / 2f64.sqrt();
        let e = direction_energy(&object_centered_example(), &u).unwrap();
        assert_abs_diff_eq!(e, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn first_loading_energy_matches_first_share() {
        let x_o = center(&sample_matrix(), CenteringKind::Object);
        let modes = svd_modes(&x_o, CenteringKind::None, None).unwrap();
        let e = direction_energy(&x_o, &modes.loading(0)).unwrap();
        assert_abs_diff_eq!(e, modes.energy_shares().proportions[0], epsilon = 1e-12);
    }

    #[test]
    fn direction_energy_errors() {
        let x_o = object_centered_example();
        assert!(matches!(
            direction_energy(&x_o, &DVector::from_vec(vec![1.0, 1.0])),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            direction_energy(&DataMatrix::zeros(2, 3).unwrap(), &constant_direction(2).unwrap()),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            direction_energy(&x_o, &constant_direction(3).unwrap()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn rank_one_null_is_the_column_direction() {
        let x_o = object_centered_example();
        let dirs = sample_null_directions(&x_o, 20, 3).unwrap();
        let h = 1.0 / 2f64.sqrt();
        for u in dirs {
            assert_abs_diff_eq!(u[0].abs(), h, epsilon = 1e-12);
            assert_abs_diff_eq!(u[0], u[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn null_directions_are_seeded_unit_in_span() {
        let x_o = center(&sample_matrix(), CenteringKind::Object);
        let a = sample_null_directions(&x_o, 50, 11).unwrap();
        let b = sample_null_directions(&x_o, 50, 11).unwrap();
        assert_eq!(a, b);
        let c = sample_null_directions(&x_o, 50, 12).unwrap();
        assert_ne!(a, c);
        let basis = column_space_basis(&x_o).unwrap();
        for u in &a {
            assert_abs_diff_eq!(u.norm(), 1.0, epsilon = 1e-12);
            let inside = &basis * basis.tr_mul(u);
            assert!((inside - u).norm() < 1e-12);
        }
        assert!(sample_null_directions(&x_o, 0, 1).is_err());
    }

    #[test]
    fn double_centered_input_is_not_rejected() {
        let x = center(&sample_matrix(), CenteringKind::Double);
        let r = energy_test(
            &x,
            &EnergyTestConfig {
                samples: 100,
                seed: 5,
                threshold: 0.95,
            },
        )
        .unwrap();
        assert!(r.observed.abs() < 1e-14);
        assert!(!r.reject);
        assert_eq!(r.null_samples.len(), 100);
        assert!(r.p_value > 0.0 && r.p_value <= 1.0);
    }

    #[test]
    fn energy_test_rejects_constant_objects() {
        let x = DataMatrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(matches!(
            energy_test(&x, &EnergyTestConfig::default()),
            Err(Error::Degenerate(_))
        ));
        let bad = EnergyTestConfig {
            threshold: 1.0,
            ..Default::default()
        };
        assert!(energy_test(&sample_matrix(), &bad).is_err());
    }

    #[test]
    fn quantile_interpolates() {
        let s = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(empirical_quantile(&s, 0.5), 2.0);
        assert_eq!(empirical_quantile(&s, 0.95), 3.8);
        assert_eq!(empirical_quantile(&s, 1.0), 4.0);
    }

    #[test]
    fn breakdown_of_double_centered_input() {
        let x = center(&sample_matrix(), CenteringKind::Double);
        let b = energy_breakdown(&x, 3).unwrap();
        assert!(b.constant_direction_share.abs() < 1e-14);
        for (o, d) in b.object_centered_shares.iter().zip(&b.double_centered_shares) {
            assert_abs_diff_eq!(o, d, epsilon = 1e-12);
        }
        assert_eq!(b.drop_fraction_of_constant(), None);
    }

    #[test]
    fn breakdown_accounts_for_all_energy() {
        let b = energy_breakdown(&sample_matrix(), 4).unwrap();
        let total: f64 =
            b.constant_direction_share + b.double_centered_shares.iter().sum::<f64>() + b.double_centered_remainder;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        let obj: f64 = b.object_centered_shares.iter().sum::<f64>() + b.object_centered_remainder;
        assert_abs_diff_eq!(obj, 1.0, epsilon = 1e-12);
        assert!(matches!(
            energy_breakdown(&sample_matrix(), 5),
            Err(Error::OutOfBounds { .. })
        ));
    }
}
