use centerlab_core::datagen::{gen_gaussian, gen_two_block, TwoBlockSpec};
use centerlab_core::{
    abs_cosine, center, cross_covariance, pls_sequential, pls_svd, CenteringKind, DMatrix, DVector, DataMatrix, Error,
    TwoBlockData,
};

fn rank_one_blocks(noise: f64, seed: u64) -> (TwoBlockData, DVector<f64>, DVector<f64>) {
    let a = DVector::from_fn(12, |i, _| (i as f64 * 0.7).sin()).normalize();
    let b = DVector::from_fn(9, |i, _| (i as f64 * 0.4).cos() - 0.3).normalize();
    let s = DVector::from_fn(40, |j, _| (j as f64 * 1.3).sin() * 5.0);
    let s = s.add_scalar(-s.mean());
    let e1 = gen_gaussian(12, 40, seed).unwrap();
    let e2 = gen_gaussian(9, 40, seed + 1000).unwrap();
    let x1 = &a * s.transpose() + e1.as_matrix() * noise;
    let x2 = &b * s.transpose() + e2.as_matrix() * noise;
    let blocks = TwoBlockData::new(DataMatrix::new(x1).unwrap(), DataMatrix::new(x2).unwrap()).unwrap();
    (blocks, a, b)
}

#[test]
fn noise_free_rank_one_recovery() {
    let (blocks, a, b) = rank_one_blocks(0.0, 0);
    for model in [
        pls_svd(&blocks, 1, CenteringKind::Object).unwrap(),
        pls_sequential(&blocks, 1, CenteringKind::Object).unwrap(),
    ] {
        let c = &model.components[0];
        assert!(abs_cosine(&c.block1.weights, &a) >= 1.0 - 1e-8);
        assert!(abs_cosine(&c.block2.weights, &b) >= 1.0 - 1e-8);
    }
}

#[test]
fn noisy_rank_one_recovery() {
    for seed in 0..5 {
        let (blocks, a, b) = rank_one_blocks(0.1, seed);
        let model = pls_sequential(&blocks, 1, CenteringKind::Object).unwrap();
        let c = &model.components[0];
        assert!(abs_cosine(&c.block1.weights, &a) >= 0.95);
        assert!(abs_cosine(&c.block2.weights, &b) >= 0.95);
    }
}

#[test]
fn svd_and_sequential_agree_on_the_first_component() {
    let x1 = gen_gaussian(6, 20, 1).unwrap();
    let x2 = gen_gaussian(5, 20, 2).unwrap();
    let blocks = TwoBlockData::new(x1, x2).unwrap();
    let a = pls_svd(&blocks, 1, CenteringKind::Double).unwrap();
    let b = pls_sequential(&blocks, 1, CenteringKind::Double).unwrap();
    let (ca, cb) = (&a.components[0], &b.components[0]);
    assert!(abs_cosine(&ca.block1.weights, &cb.block1.weights) > 1.0 - 1e-10);
    assert!((ca.covariance - cb.covariance).abs() < 1e-10 * ca.covariance);
}

#[test]
fn covariance_uses_one_over_n() {
    let x1 = DataMatrix::from_rows(&[vec![1.0, -1.0, 2.0, -2.0]]).unwrap();
    let x2 = DataMatrix::from_rows(&[vec![2.0, -2.0, 0.0, 0.0]]).unwrap();
    let c = cross_covariance(&TwoBlockData::new(x1, x2).unwrap()).unwrap();
    // (2 + 2 + 0 + 0) / 4
    assert!((c[(0, 0)] - 1.0).abs() < 1e-15);
}

#[test]
fn sequential_scores_orthogonal_and_mean_zero() {
    for seed in 0..10 {
        let x1 = gen_gaussian(8, 25, seed).unwrap();
        let x2 = gen_gaussian(7, 25, seed + 50).unwrap();
        let blocks = TwoBlockData::new(x1, x2).unwrap();
        for kind in [CenteringKind::Object, CenteringKind::Double] {
            let m = pls_sequential(&blocks, 5, kind).unwrap();
            for block in 0..2 {
                let t = m.stacked(block, |c| &c.scores);
                let gram = t.transpose() * &t;
                for i in 0..gram.nrows() {
                    for j in 0..i {
                        let rel = gram[(i, j)].abs() / (gram[(i, i)] * gram[(j, j)]).sqrt();
                        assert!(rel <= 1e-8);
                    }
                }
                for col in t.column_iter() {
                    assert!(col.sum().abs() <= 1e-10 * col.norm() * 25.0);
                }
            }
        }
    }
}

#[test]
fn trait_centering_is_rejected() {
    let blocks = TwoBlockData::new(gen_gaussian(3, 6, 0).unwrap(), gen_gaussian(4, 6, 1).unwrap()).unwrap();
    for kind in [CenteringKind::None, CenteringKind::Grand, CenteringKind::Trait] {
        assert!(matches!(pls_sequential(&blocks, 1, kind), Err(Error::InvalidInput(_))));
        assert!(matches!(pls_svd(&blocks, 1, kind), Err(Error::InvalidInput(_))));
    }
}

#[test]
fn mismatched_object_counts_are_rejected() {
    let r = TwoBlockData::new(gen_gaussian(3, 6, 0).unwrap(), gen_gaussian(3, 7, 0).unwrap());
    assert!(matches!(r, Err(Error::Dimension(_))));
}

#[test]
fn default_two_block_recovers_planted_structure() {
    let sample = gen_two_block(&TwoBlockSpec::default()).unwrap();
    let truth = &sample.truth;
    let v = |x: &Vec<f64>| DVector::from_vec(x.clone());

    let obj = pls_sequential(&sample.data, 2, CenteringKind::Object).unwrap();
    assert!(abs_cosine(&obj.components[0].block2.weights, &v(&truth.block2_trait_mean_loading)) >= 0.9);
    assert!(abs_cosine(&obj.components[0].block2.scores, &v(&truth.block2_trait_mean_score)) >= 0.9);

    let dbl = pls_sequential(&sample.data, 2, CenteringKind::Double).unwrap();
    for k in 0..2 {
        let c = &dbl.components[k];
        assert!(abs_cosine(&c.block1.weights, &v(&truth.block1_loadings[k])) >= 0.9);
        assert!(abs_cosine(&c.block2.weights, &v(&truth.block2_loadings[k])) >= 0.9);
        assert!(abs_cosine(&c.block1.scores, &v(&truth.shared_scores[k])) >= 0.9);
    }
}

#[test]
fn double_centered_svd_weights_are_uncorrelated() {
    let blocks = TwoBlockData::new(gen_gaussian(9, 30, 3).unwrap(), gen_gaussian(8, 30, 4).unwrap()).unwrap();
    let m = pls_svd(&blocks, 4, CenteringKind::Double).unwrap();
    for block in 0..2 {
        let w = m.stacked(block, |c| &c.weights);
        for col in w.column_iter() {
            assert!(col.mean().abs() < 1e-12);
        }
        let gram = w.transpose() * &w;
        assert!((gram - DMatrix::identity(4, 4)).amax() < 1e-10);
    }
}

#[test]
fn sequential_weights_are_orthonormal_within_block() {
    let blocks = TwoBlockData::new(gen_gaussian(9, 30, 5).unwrap(), gen_gaussian(8, 30, 6).unwrap()).unwrap();
    let m = pls_sequential(&blocks, 4, CenteringKind::Object).unwrap();
    let w = m.stacked(0, |c| &c.weights);
    assert!((w.transpose() * &w - DMatrix::identity(4, 4)).amax() < 1e-8);
    let x_c = center(blocks.first(), CenteringKind::Object);
    assert_eq!(x_c.shape(), (9, 30));
}
