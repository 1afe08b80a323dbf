//! Shared inputs for the criterion benchmarks.

use centerlab_core::datagen::{gen_gaussian, gen_toy, ToySpec};
use centerlab_core::DataMatrix;

pub fn gaussian(d: usize, n: usize) -> DataMatrix {
    gen_gaussian(d, n, 42).expect("valid shape")
}

pub fn toy() -> DataMatrix {
    gen_toy(&ToySpec::default()).expect("default toy spec").matrix
}
