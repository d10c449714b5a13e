//! Benchmarks for the core kernels; see `benches/kernels.rs`.

use twofold_core::ModelParams;

/// A subcritical point that every solver path accepts.
pub fn subcritical() -> ModelParams {
    ModelParams::new(1.0, 1.0, 0.05, 0.05, 1.0, 1.0).expect("valid weights")
}
