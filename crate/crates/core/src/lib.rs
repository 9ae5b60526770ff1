//! Numerical toolkit for a two-level system coupled to a single bosonic mode
//! with quadratic and two-photon drives.
//!
//! The crate builds the Hamiltonians on a truncated Fock space
//! ([`model`]), evaluates the infinite-frequency closed forms ([`analytic`]),
//! finds ground states by exact diagonalization or adiabatic evolution
//! ([`groundstate`]), and computes observables such as quadrature moments,
//! entanglement entropy and Wigner functions ([`observables`]). [`mapping`]
//! encodes the truncated mode in qubits, [`noise`] applies per-qubit
//! relaxation and dephasing channels, and [`sweep`] scans parameter grids
//! and locates the transition.
//!
//! ```
//! use spt_core::{analytic, groundstate, model::ModelParams};
//!
//! let p = ModelParams::new(25.0, 0.4, 1.1, 0.26, 48);
//! let g = groundstate::squeezed_frame_ground_state(&p).unwrap();
//! let phi = groundstate::measured_order_parameter(&p, &g.state).unwrap();
//! assert!(phi > 0.0);
//! assert_eq!(analytic::classify_phase(&p).phase, analytic::Phase::SP);
//! ```

pub mod analytic;
pub mod error;
pub mod groundstate;
pub mod linalg;
pub mod mapping;
pub mod model;
pub mod noise;
pub mod observables;
pub mod sweep;
pub mod tolerances;

pub use error::{Error, Result};
pub use linalg::{OperatorMatrix, QuantumState, C64};
pub use model::ModelParams;
