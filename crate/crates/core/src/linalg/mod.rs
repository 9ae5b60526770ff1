//! Dense linear algebra on complex operators and states.

pub mod eigen;
pub mod matrix;
pub mod state;

pub use eigen::{
    eig_hermitian, eig_hermitian_jacobi, eigvals_hermitian, expm_anti_hermitian, expm_anti_hermitian_gauged,
    expm_hermitian_generator, Eigen, GaugedGenerator,
};
pub use matrix::{inner, norm, pauli, OperatorMatrix, C64};
pub use state::{partial_trace, QuantumState};
