//! Centering-aware analysis of data matrices.
//!
//! Data matrices are `d × n` with data objects as columns and traits as
//! rows. The crate provides the four centerings (grand, object, trait,
//! double) and their mean matrices, SVD modes of variation under any
//! centering, the direction-energy test for a dominant constant-function
//! mode, two-block partial least squares, and seeded generators for the
//! synthetic examples used throughout the tests.

pub mod datagen;
pub mod decomposition;
pub mod diagnostics;
pub mod error;
pub mod integration;
pub mod linalg;
pub mod matrix;

pub use decomposition::{
    correlation_ledger, numerical_rank, pearson_correlation, reconstruct, svd_modes, CorrelationLedger, EnergyShares,
    LedgerRow, MeanComponent, MeanPart, ModesOfVariation,
};
pub use diagnostics::{
    constant_direction, direction_energy, energy_breakdown, energy_test, sample_null_directions, EnergyBreakdown,
    EnergyTestConfig, EnergyTestResult,
};
pub use error::{Error, Result};
pub use integration::{
    cross_covariance, pls_sequential, pls_svd, BlockComponent, PlsComponent, PlsMethod, PlsModel, TwoBlockData,
};
pub use linalg::{abs_cosine, DEFAULT_RANK_TOL};
pub use matrix::{center, compute_means, frobenius_inner, is_centered, CenteringKind, DataMatrix, MeanDecomposition};

pub use nalgebra::{DMatrix, DVector};
