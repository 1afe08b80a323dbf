use centerlab_core::datagen::{gen_gaussian, gen_toy, ToySpec};
use centerlab_core::{
    center, correlation_ledger, numerical_rank, pearson_correlation, reconstruct, svd_modes, CenteringKind, DMatrix,
    DVector, DataMatrix,
};
use proptest::prelude::*;

fn column_means(m: &DMatrix<f64>) -> Vec<f64> {
    m.column_iter().map(|c| c.mean()).collect()
}

fn orthonormality_error(m: &DMatrix<f64>) -> f64 {
    (m.transpose() * m - DMatrix::identity(m.ncols(), m.ncols())).amax()
}

#[test]
fn modes_invariants_on_random_matrices() {
    for seed in 0..40 {
        let (d, n) = if seed % 2 == 0 {
            (7 + seed as usize % 5, 12)
        } else {
            (20 + seed as usize % 5, 7)
        };
        let x = gen_gaussian(d, n, seed).unwrap();
        for kind in CenteringKind::ALL {
            let modes = svd_modes(&x, kind, None).unwrap();
            assert!(orthonormality_error(&modes.loadings) < 1e-10);
            assert!(orthonormality_error(&modes.scores) < 1e-10);
            assert!(modes.singular_values.windows(2).all(|w| w[0] >= w[1]));
            assert!(modes.singular_values.iter().all(|&s| s >= 0.0));
            if kind.centers_scores() {
                assert!(column_means(&modes.scores).iter().all(|m| m.abs() < 1e-10));
            }
            if kind.centers_loadings() {
                assert!(column_means(&modes.loadings).iter().all(|m| m.abs() < 1e-10));
            }
            let xc = center(&x, kind);
            let rebuilt = &modes.loadings
                * DMatrix::from_diagonal(&DVector::from_vec(modes.singular_values.clone()))
                * modes.scores.transpose();
            assert!((rebuilt - xc.as_matrix()).norm() <= 1e-8 * x.frobenius_norm());
            let energy: f64 = modes.singular_values.iter().map(|s| s * s).sum();
            assert!((energy - xc.energy()).abs() <= 1e-8 * xc.energy().max(1e-300));
            let shares = modes.energy_shares();
            assert!((shares.proportions.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(shares.proportions.iter().all(|p| (0.0..=1.0).contains(p)));
            let full = reconstruct(&modes, modes.rank()).unwrap();
            assert!((full.as_matrix() - x.as_matrix()).norm() <= 1e-8 * x.frobenius_norm());
        }
    }
}

#[test]
fn repeated_decompositions_are_bitwise_identical() {
    let x = gen_gaussian(9, 14, 3).unwrap();
    let a = svd_modes(&x, CenteringKind::Double, None).unwrap();
    let b = svd_modes(&x, CenteringKind::Double, None).unwrap();
    assert_eq!(a.loadings, b.loadings);
    assert_eq!(a.scores, b.scores);
    assert_eq!(a.singular_values, b.singular_values);
}

#[test]
fn ledger_on_random_gaussian() {
    let x = gen_gaussian(10, 20, 17).unwrap();
    let ledger = correlation_ledger(&x).unwrap();
    let obj = ledger.row(CenteringKind::Object).unwrap();
    assert!(obj.scores_max_abs_correlation.unwrap() <= 1e-10);
    let dbl = ledger.row(CenteringKind::Double).unwrap();
    assert!(dbl.scores_max_abs_correlation.unwrap() <= 1e-10);
    assert!(dbl.loadings_max_abs_correlation.unwrap() <= 1e-10);
    let tr = ledger.row(CenteringKind::Trait).unwrap();
    assert!(tr.loadings_max_abs_correlation.unwrap() <= 1e-10);
    for row in &ledger.rows {
        assert!(row.scores_max_abs_inner.unwrap() <= 1e-10);
        assert!(row.loadings_max_abs_inner.unwrap() <= 1e-10);
    }
}

#[test]
fn ledger_of_double_centered_input_is_clean_everywhere() {
    let x = center(&gen_gaussian(8, 11, 2).unwrap(), CenteringKind::Double);
    let ledger = correlation_ledger(&x).unwrap();
    for row in &ledger.rows {
        assert!(row.scores_max_abs_correlation.unwrap() <= 1e-10, "{row:?}");
        assert!(row.loadings_max_abs_correlation.unwrap() <= 1e-10, "{row:?}");
    }
}

#[test]
fn random_wide_matrix_has_full_rank() {
    let x = gen_gaussian(5, 8, 21).unwrap();
    // Independent route: positive eigenvalues of the Gram matrix X X^T.
    let gram = x.as_matrix() * x.as_matrix().transpose();
    let eig = gram.symmetric_eigen().eigenvalues;
    let top = eig.amax();
    let oracle = eig.iter().filter(|&&l| l > 1e-20 * top).count();
    assert_eq!(oracle, 5);
    assert_eq!(numerical_rank(&x, 1e-10).unwrap(), 5);
}

#[test]
fn two_by_twenty_five_loses_rank_under_trait_centering() {
    let x = gen_gaussian(2, 25, 8).unwrap();
    let shifted = DataMatrix::new(x.as_matrix().add_scalar(3.0)).unwrap();
    assert_eq!(numerical_rank(&shifted, 1e-10).unwrap(), 2);
    assert_eq!(
        numerical_rank(&center(&shifted, CenteringKind::Trait), 1e-10).unwrap(),
        1
    );
    assert_eq!(
        numerical_rank(&center(&shifted, CenteringKind::Double), 1e-10).unwrap(),
        1
    );
    assert_eq!(svd_modes(&shifted, CenteringKind::Trait, None).unwrap().rank(), 1);
}

#[test]
fn toy_first_double_mode_captures_residual() {
    let toy = gen_toy(&ToySpec::default()).unwrap();
    let modes = svd_modes(&toy.matrix, CenteringKind::Double, None).unwrap();
    let x_d = center(&toy.matrix, CenteringKind::Double);
    let first = modes.singular_values[0].powi(2) / x_d.energy();
    assert!(first >= 0.99);
    let k0 = reconstruct(&modes, 0).unwrap();
    assert!(numerical_rank(&k0, 1e-10).unwrap() <= 2);
}

proptest! {
    // Orthogonal vectors, one with zero mean, are uncorrelated.
    #[test]
    fn orthogonal_with_zero_mean_is_uncorrelated(
        raw_x in proptest::collection::vec(-10f64..10.0, 6),
        raw_y in proptest::collection::vec(-10f64..10.0, 6),
    ) {
        let x = DVector::from_vec(raw_x);
        let x = x.add_scalar(-x.mean());
        let y = DVector::from_vec(raw_y);
        prop_assume!(x.norm() > 1e-3);
        let y = &y - &x * (x.dot(&y) / x.norm_squared());
        prop_assume!(y.map(|v| v - y.mean()).norm() > 1e-3);
        let r = pearson_correlation(x.as_slice(), y.as_slice()).unwrap();
        prop_assert!(r.abs() < 1e-9);
    }

    #[test]
    fn pearson_is_bounded_and_symmetric(
        pair in proptest::collection::vec((-10f64..10.0, -10f64..10.0), 3..20)
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pair.into_iter().unzip();
        if let Ok(r) = pearson_correlation(&x, &y) {
            prop_assert!((-1.0..=1.0).contains(&r));
            let s = pearson_correlation(&y, &x).unwrap();
            prop_assert!((r - s).abs() < 1e-12);
        }
    }
}
