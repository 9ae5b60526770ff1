//! Model parameters, the squeezed frame and Hamiltonian builders.

pub mod boson;
mod frame;
mod hamiltonian;
mod params;

pub use frame::{squeezed_frame, FrameStatus, SqueezedFrame};
pub use hamiltonian::{
    build_a2_term, build_antisqueezing_term, build_hs, build_hs_with, build_nmr_hamiltonian, build_rabi, build_total,
    frame_squeezing, hs_in_lab_frame, on_boson, on_spin, parity_operator,
};
pub use params::{Diagnostic, ModelParams, Severity};
