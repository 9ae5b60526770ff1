use serde::Serialize;

use super::ModelParams;
use crate::error::{Error, Result};

/// Parameters of the Hamiltonian after the squeezing `S(r_tilde)` that
/// absorbs the quadratic terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqueezedFrame {
    pub r_tilde: f64,
    pub omega_s: f64,
    pub lambda_s: f64,
    pub c_s: f64,
    pub lambda_tilde_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrameStatus {
    Stable(SqueezedFrame),
    /// The effective oscillator frequency is imaginary.
    Unstable {
        radicand: f64,
    },
}

impl FrameStatus {
    pub fn is_stable(&self) -> bool {
        matches!(self, FrameStatus::Stable(_))
    }

    pub fn stable(self) -> Result<SqueezedFrame> {
        match self {
            FrameStatus::Stable(f) => Ok(f),
            FrameStatus::Unstable { radicand } => Err(Error::precondition(format!(
                "squeezed frame is unstable (1 + alpha*lambda_tilde^2 - 4*xi/omega = {radicand:.6})"
            ))),
        }
    }
}

pub fn squeezed_frame(p: &ModelParams) -> FrameStatus {
    let radicand = p.stability_radicand();
    if radicand.is_nan() || radicand <= 0.0 {
        return FrameStatus::Unstable { radicand };
    }
    let r = 0.25 * radicand.ln();
    let e2r = (2.0 * r).exp();
    FrameStatus::Stable(SqueezedFrame {
        r_tilde: r,
        omega_s: p.omega * e2r,
        lambda_s: p.lambda() * (-r).exp(),
        c_s: (e2r - 1.0) * p.omega / 2.0,
        lambda_tilde_s: p.lambda_tilde / e2r,
    })
}
