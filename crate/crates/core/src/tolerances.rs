//! Numerical tolerances shared by every module.
//!
//! Values are absolute unless the name says otherwise. Tests and runtime
//! checks read from here so a single edit moves a threshold everywhere.

/// Largest matrix dimension any constructor will build.
pub const MAX_DIM: usize = 1 << 16;

/// Relative Hermiticity tolerance, scaled by the largest entry magnitude.
pub const HERMITIAN_REL: f64 = 1e-12;

/// Looser Hermiticity tolerance accepted on input to the eigensolver.
pub const HERMITIAN_INPUT_REL: f64 = 1e-9;

/// Eigen-residual bound relative to the matrix norm.
pub const EIG_RESIDUAL_REL: f64 = 1e-9;

/// Orthonormality bound on eigenvectors.
pub const EIG_ORTHO: f64 = 1e-9;

/// Unitarity bound on `exp(-iHt)`.
pub const UNITARY: f64 = 1e-9;

/// Pure-state norm tolerance.
pub const STATE_NORM: f64 = 1e-10;

/// Density-matrix trace tolerance.
pub const DENSITY_TRACE: f64 = 1e-10;

/// Most negative eigenvalue accepted for a density matrix.
pub const DENSITY_MIN_EIG: f64 = -1e-9;

/// Imaginary residue tolerated in the expectation of a Hermitian operator.
pub const EXPECTATION_IMAG: f64 = 1e-10;

/// Negative variance tolerated before clamping to zero.
pub const VARIANCE_FLOOR: f64 = -1e-10;

/// Largest |r| accepted by the squeezing operator.
pub const MAX_SQUEEZE: f64 = 3.0;

/// Weight allowed in the top Fock levels before a truncated state is rejected.
pub const TRUNCATION_TAIL: f64 = 1e-6;

/// Weight of a state in its top 10% of Fock levels that triggers a Wigner warning.
pub const WIGNER_TAIL_WARNING: f64 = 0.01;

/// Allowed deviation of the grid integral of `W` from one before warning.
pub const WIGNER_NORMALIZATION: f64 = 0.02;
/// Quadrature variances below `-NEGATIVE_VARIANCE` are reported as numeric errors.
pub const NEGATIVE_VARIANCE: f64 = 1e-10;

/// Norm drift per adiabatic step that aborts a preparation.
pub const ADIABATIC_NORM_DRIFT: f64 = 1e-6;

/// Gap (in units of omega) below which the lowest two levels are treated as one ground space.
pub const DEGENERATE_GAP: f64 = 1e-3;

/// Relative gap below which `exact_ground_state` flags near-degeneracy.
pub const NEAR_DEGENERATE_REL: f64 = 1e-8;

/// Kraus completeness bound.
pub const KRAUS_COMPLETENESS: f64 = 1e-12;
