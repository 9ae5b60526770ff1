//! Shared inputs for the kernel benchmarks in `benches/`.

use spt_core::model::ModelParams;

/// Coupling parameters used throughout the benchmarks: a superradiant point
/// of the reference model with the quadratic and squeezing drives switched on.
pub fn reference_params(ratio: f64, boson_dim: usize) -> ModelParams {
    ModelParams::new(ratio, 0.45, 1.1, 0.26, boson_dim)
}
