//! Seeded synthetic data: the additive cubic/linear/sine toy matrix, the
//! planted two-block PLS example and i.i.d. Gaussian matrices.
//!
//! Every generator is a pure function of its parameters; random draws come
//! from `ChaCha8Rng` seeded with the `seed` field and fill matrices column by
//! column (object by object).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integration::TwoBlockData;
use crate::matrix::DataMatrix;

fn gaussian_matrix(rng: &mut ChaCha8Rng, d: usize, n: usize, scale: f64) -> DMatrix<f64> {
    // from_fn visits entries column-major.
    DMatrix::from_fn(d, n, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        scale * z
    })
}

/// `m` points evenly spaced on `[-1, 1]`; a single point sits at 0.
fn symmetric_grid(m: usize) -> DVector<f64> {
    if m == 1 {
        return DVector::zeros(1);
    }
    DVector::from_fn(m, |i, _| -1.0 + 2.0 * i as f64 / (m - 1) as f64)
}

fn demean(mut v: DVector<f64>) -> DVector<f64> {
    let mean = v.mean();
    v.add_scalar_mut(-mean);
    v
}

/// Whole-period sine over `m` samples, with its (round-off) mean removed.
fn sine_vector(m: usize, frequency: f64) -> DVector<f64> {
    demean(DVector::from_fn(m, |i, _| {
        (2.0 * PI * frequency * i as f64 / m as f64).sin()
    }))
}

/// Parameters of the additive toy matrix
/// `X[i,j] = c(i) + l(j) + γ·s(i)·t(j) + σ·ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToySpec {
    pub traits: usize,
    pub objects: usize,
    /// `c(x) = c0 + c1 x + c2 x² + c3 x³` on `x ∈ [-1, 1]` down the traits.
    pub cubic: [f64; 4],
    /// Slope of the zero-mean ramp `l(u) = slope·u`, `u ∈ [-1, 1]` across objects.
    pub linear_slope: f64,
    /// Whole periods of the trait-direction sine `s`.
    pub trait_frequency: f64,
    /// Whole periods of the object-direction sine `t`.
    pub object_frequency: f64,
    pub amplitude: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for ToySpec {
    fn default() -> Self {
        ToySpec {
            traits: 50,
            objects: 25,
            cubic: [0.5, -1.0, 0.0, 2.0],
            linear_slope: 1.5,
            trait_frequency: 1.0,
            object_frequency: 1.0,
            amplitude: 0.25,
            noise: 0.0,
            seed: 0,
        }
    }
}

/// The toy matrix and the curves it was built from.
#[derive(Debug, Clone)]
pub struct ToyData {
    pub matrix: DataMatrix,
    /// `c(i)`, length `d`; carries the grand mean.
    pub object_curve: DVector<f64>,
    /// `l(j)`, length `n`, zero mean.
    pub trait_curve: DVector<f64>,
    /// `s`, length `d`, zero mean.
    pub trait_sine: DVector<f64>,
    /// `t`, length `n`, zero mean.
    pub object_sine: DVector<f64>,
}

/// With zero noise the double-centered residual is exactly `γ·s t^T`.
pub fn gen_toy(spec: &ToySpec) -> Result<ToyData> {
    let (d, n) = (spec.traits, spec.objects);
    if d == 0 || n == 0 {
        return Err(Error::InvalidInput(format!("toy shape must be positive, got {d}x{n}")));
    }
    let x = symmetric_grid(d);
    let [c0, c1, c2, c3] = spec.cubic;
    let object_curve = x.map(|v| c0 + c1 * v + c2 * v * v + c3 * v * v * v);
    let trait_curve = demean(symmetric_grid(n) * spec.linear_slope);
    let trait_sine = sine_vector(d, spec.trait_frequency);
    let object_sine = sine_vector(n, spec.object_frequency);

    let mut m = DMatrix::from_fn(d, n, |i, j| object_curve[i] + trait_curve[j]);
    m.ger(spec.amplitude, &trait_sine, &object_sine, 1.0);
    if spec.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        m += gaussian_matrix(&mut rng, d, n, spec.noise);
    }
    Ok(ToyData {
        matrix: DataMatrix::new(m)?,
        object_curve,
        trait_curve,
        trait_sine,
        object_sine,
    })
}

/// Parameters of the planted two-block example: a shared rank-two
/// double-centered signal, block-specific mean effects and Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoBlockSpec {
    pub traits1: usize,
    pub traits2: usize,
    pub objects: usize,
    /// Entry magnitudes of the long- and short-period checkered components.
    pub signal_amplitudes: [f64; 2],
    /// Checker block counts along the objects for the two components.
    pub object_blocks: [usize; 2],
    /// Checker block counts along the traits for the two components.
    pub trait_blocks: [usize; 2],
    /// Object mean of block 1: `+step` on the first `traits1/3` rows, `-step`
    /// on the last `traits1/3`, zero between.
    pub block1_object_step: f64,
    /// Object mean of block 2: a ramp from `-amp` to `+amp` down the traits.
    pub block2_object_amplitude: f64,
    /// Trait mean of block 2: a ramp from `-range` to `+range` across objects.
    pub block2_trait_gradient: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for TwoBlockSpec {
    fn default() -> Self {
        TwoBlockSpec {
            traits1: 300,
            traits2: 500,
            objects: 200,
            signal_amplitudes: [1.0, 0.7],
            object_blocks: [2, 20],
            trait_blocks: [2, 20],
            block1_object_step: 2.0,
            block2_object_amplitude: 1.0,
            block2_trait_gradient: 10.0,
            noise: 1.0,
            seed: 0,
        }
    }
}

/// Planted structure of a generated two-block data set. Direction vectors
/// are unit norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoBlockTruth {
    /// Shared object-space signal patterns (score directions), length `n`.
    pub shared_scores: [Vec<f64>; 2],
    /// Block-1 loading directions of the two signal components.
    pub block1_loadings: [Vec<f64>; 2],
    /// Block-2 loading directions of the two signal components.
    pub block2_loadings: [Vec<f64>; 2],
    pub block1_object_mean: Vec<f64>,
    pub block2_object_mean: Vec<f64>,
    /// Trait-mean gradient of block 2, length `n`.
    pub block2_trait_mean: Vec<f64>,
    /// Loading direction of the block-2 trait-mean effect `1 μ_n^T` after
    /// object centering: the constant direction in `R^{d2}`.
    pub block2_trait_mean_loading: Vec<f64>,
    /// Unit, zero-mean version of `block2_trait_mean`: the score direction of
    /// the trait-mean effect.
    pub block2_trait_mean_score: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TwoBlockSample {
    pub data: TwoBlockData,
    pub truth: TwoBlockTruth,
}

/// `±1` checker pattern over `m` entries split into `blocks` alternating runs.
fn checker(m: usize, blocks: usize) -> DVector<f64> {
    DVector::from_fn(m, |i, _| {
        let run = i * blocks / m;
        if run.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    })
}

/// Centers and Gram–Schmidt orthonormalizes a pair of vectors.
fn centered_orthonormal_pair(a: DVector<f64>, b: DVector<f64>) -> Result<[DVector<f64>; 2]> {
    let a = demean(a);
    let na = a.norm();
    if na == 0.0 {
        return Err(Error::Degenerate("checker pattern collapses after centering".into()));
    }
    let a = a / na;
    let b = demean(b);
    let b = &b - &a * a.dot(&b);
    let nb = b.norm();
    if nb == 0.0 {
        return Err(Error::Degenerate("checker patterns are collinear".into()));
    }
    Ok([a, b / nb])
}

pub fn gen_two_block(spec: &TwoBlockSpec) -> Result<TwoBlockSample> {
    let (d1, d2, n) = (spec.traits1, spec.traits2, spec.objects);
    if d1 == 0 || d2 == 0 || n < 2 {
        return Err(Error::InvalidInput(format!(
            "two-block shapes must be positive with n >= 2, got {d1}, {d2}, {n}"
        )));
    }
    let pattern = |m: usize, blocks: [usize; 2]| -> Result<[DVector<f64>; 2]> {
        if blocks.iter().any(|&b| b == 0 || b > m) {
            return Err(Error::InvalidInput(format!(
                "checker block counts {blocks:?} do not fit length {m}"
            )));
        }
        centered_orthonormal_pair(checker(m, blocks[0]), checker(m, blocks[1]))
    };
    let scores = pattern(n, spec.object_blocks)?;
    let load1 = pattern(d1, spec.trait_blocks)?;
    let load2 = pattern(d2, spec.trait_blocks)?;

    // Unit patterns rescaled so a ±1 checker has entries ±amplitude.
    let signal = |loads: &[DVector<f64>; 2], d: usize| {
        let mut s = DMatrix::zeros(d, n);
        for k in 0..2 {
            let scale = spec.signal_amplitudes[k] * ((d * n) as f64).sqrt();
            s.ger(scale, &loads[k], &scores[k], 1.0);
        }
        s
    };

    let third = d1 / 3;
    let block1_object_mean = DVector::from_fn(d1, |i, _| {
        if i < third {
            spec.block1_object_step
        } else if i >= d1 - third {
            -spec.block1_object_step
        } else {
            0.0
        }
    });
    let block2_object_mean = symmetric_grid(d2) * spec.block2_object_amplitude;
    let block2_trait_mean = symmetric_grid(n) * spec.block2_trait_gradient;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise1 = gaussian_matrix(&mut rng, d1, n, spec.noise);
    let noise2 = gaussian_matrix(&mut rng, d2, n, spec.noise);

    let x1 = signal(&load1, d1) + DMatrix::from_fn(d1, n, |i, _| block1_object_mean[i]) + noise1;
    let x2 = signal(&load2, d2) + DMatrix::from_fn(d2, n, |i, j| block2_object_mean[i] + block2_trait_mean[j]) + noise2;

    let trait_mean_score = {
        let c = demean(block2_trait_mean.clone());
        let norm = c.norm();
        if norm > 0.0 {
            c / norm
        } else {
            c
        }
    };
    let as_vec = |v: &DVector<f64>| v.iter().copied().collect::<Vec<_>>();
    let truth = TwoBlockTruth {
        shared_scores: [as_vec(&scores[0]), as_vec(&scores[1])],
        block1_loadings: [as_vec(&load1[0]), as_vec(&load1[1])],
        block2_loadings: [as_vec(&load2[0]), as_vec(&load2[1])],
        block1_object_mean: as_vec(&block1_object_mean),
        block2_object_mean: as_vec(&block2_object_mean),
        block2_trait_mean: as_vec(&block2_trait_mean),
        block2_trait_mean_loading: vec![1.0 / (d2 as f64).sqrt(); d2],
        block2_trait_mean_score: as_vec(&trait_mean_score),
    };
    Ok(TwoBlockSample {
        data: TwoBlockData::new(DataMatrix::new(x1)?, DataMatrix::new(x2)?)?,
        truth,
    })
}

/// `d × n` matrix of i.i.d. standard normal entries.
pub fn gen_gaussian(d: usize, n: usize, seed: u64) -> Result<DataMatrix> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidInput(format!("shape must be positive, got {d}x{n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DataMatrix::new(gaussian_matrix(&mut rng, d, n, 1.0))
}
