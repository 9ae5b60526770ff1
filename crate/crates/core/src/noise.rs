//! Per-qubit decoherence channels and pseudo-pure initial states.
//!
//! Qubit `q` (0-based) acts on bit `q` of the computational index, so for
//! a `boson (x) spin` state on `M = 2^N` levels qubit 0 is the two-level
//! system and qubits `1..=N` hold the boson register.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{OperatorMatrix, QuantumState, C64};
use crate::tolerances;

/// Order of the two channels within each qubit's step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelOrder {
    #[default]
    PdThenGad,
    GadThenPd,
}

fn default_p_gad() -> f64 {
    0.5
}

/// Relaxation and dephasing times per qubit plus the exposure `dt`.
///
/// There are no built-in hardware values; the example in the README is
/// illustrative only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub dt: f64,
    #[serde(default = "default_p_gad")]
    pub p_gad: f64,
    #[serde(default)]
    pub order: ChannelOrder,
}

impl NoiseParams {
    pub fn new(t1: Vec<f64>, t2: Vec<f64>, dt: f64) -> Result<Self> {
        let np = Self {
            t1,
            t2,
            dt,
            p_gad: default_p_gad(),
            order: ChannelOrder::default(),
        };
        np.validate()?;
        Ok(np)
    }

    /// Same `t1`, `t2` on every qubit.
    pub fn uniform(n_qubits: usize, t1: f64, t2: f64, dt: f64) -> Result<Self> {
        Self::new(vec![t1; n_qubits], vec![t2; n_qubits], dt)
    }

    pub fn n_qubits(&self) -> usize {
        self.t1.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.t1.is_empty() || self.t1.len() != self.t2.len() {
            return Err(Error::validation(format!(
                "t1 and t2 must list the same non-zero number of qubits (got {} and {})",
                self.t1.len(),
                self.t2.len()
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if let Some(q) = (0..self.t1.len()).find(|&q| !positive(self.t1[q]) || !positive(self.t2[q])) {
            return Err(Error::validation(format!("t1 and t2 of qubit {q} must be positive")));
        }
        if !positive(self.dt) {
            return Err(Error::validation("dt must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p_gad) {
            return Err(Error::validation("p_gad must lie in [0, 1]"));
        }
        Ok(())
    }

    /// `p_q = (1 - exp(-dt/T2_q)) / 2`.
    pub fn dephasing_probability(&self, q: usize) -> f64 {
        -0.5 * (-self.dt / self.t2[q]).exp_m1()
    }

    /// `eta_q = 1 - exp(-dt/T1_q)`.
    pub fn damping_strength(&self, q: usize) -> f64 {
        -(-self.dt / self.t1[q]).exp_m1()
    }
}

/// Single-qubit Kraus operator in row-major order `[k00, k01, k10, k11]`.
pub type Kraus2 = [C64; 4];

fn real_kraus(k: [f64; 4]) -> Kraus2 {
    k.map(|v| C64::new(v, 0.0))
}

/// `E_1 = sqrt(p) diag(1, sqrt(1-eta))`, `E_2 = sqrt(1-p) sqrt(eta) |1><0|`,
/// `E_3 = sqrt(1-p) diag(sqrt(1-eta), 1)`, `E_4 = sqrt(p) sqrt(eta) |0><1|`.
pub fn gad_kraus(p: f64, eta: f64) -> Result<[Kraus2; 4]> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&eta) {
        return Err(Error::validation("GAD parameters must lie in [0, 1]"));
    }
    let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
    let (se, sr) = (eta.sqrt(), (1.0 - eta).sqrt());
    let ks = [
        real_kraus([sp, 0.0, 0.0, sp * sr]),
        real_kraus([0.0, 0.0, sq * se, 0.0]),
        real_kraus([sq * sr, 0.0, 0.0, sq]),
        real_kraus([0.0, sp * se, 0.0, 0.0]),
    ];
    let defect = completeness_defect(&ks);
    if defect > tolerances::KRAUS_COMPLETENESS {
        return Err(Error::numeric(
            format!("Kraus completeness violated by {defect:.3e}"),
            0,
        ));
    }
    Ok(ks)
}

/// `sqrt(1-p) I` and `sqrt(p) sigma_z`.
pub fn pd_kraus(p: f64) -> Result<[Kraus2; 2]> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation("dephasing probability must lie in [0, 1]"));
    }
    let (a, b) = ((1.0 - p).sqrt(), p.sqrt());
    Ok([real_kraus([a, 0.0, 0.0, a]), real_kraus([b, 0.0, 0.0, -b])])
}

/// `max |sum_s E_s† E_s - I|`.
pub fn completeness_defect(ks: &[Kraus2]) -> f64 {
    let mut sum = [C64::new(0.0, 0.0); 4];
    for k in ks {
        for i in 0..2 {
            for j in 0..2 {
                sum[2 * i + j] += k[i].conj() * k[j] + k[2 + i].conj() * k[2 + j];
            }
        }
    }
    let id = [1.0, 0.0, 0.0, 1.0];
    sum.iter().zip(id).map(|(s, e)| (s - e).norm()).fold(0.0, f64::max)
}

fn qubit_count(state: &QuantumState) -> Result<usize> {
    let d = state.dim();
    if !d.is_power_of_two() || d < 2 {
        return Err(Error::UnsupportedShape(format!(
            "qubit channels need a power-of-two dimension, got {d}"
        )));
    }
    Ok(d.trailing_zeros() as usize)
}

/// `sum_s K_s rho K_s†` with each `K_s` acting on qubit `q`.
pub fn apply_kraus(state: &QuantumState, q: usize, ks: &[Kraus2]) -> Result<QuantumState> {
    let n = qubit_count(state)?;
    if q >= n {
        return Err(Error::range(format!("qubit index {q} out of range for {n} qubits")));
    }
    let rho = state.density_matrix();
    let d = rho.dim();
    let bit = 1usize << q;
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    let mut tmp = vec![C64::new(0.0, 0.0); d * d];
    let src = rho.as_slice();
    for k in ks {
        // tmp = K rho (row mixing).
        for i0 in (0..d).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            for c in 0..d {
                let (a, b) = (src[i0 * d + c], src[i1 * d + c]);
                tmp[i0 * d + c] = k[0] * a + k[1] * b;
                tmp[i1 * d + c] = k[2] * a + k[3] * b;
            }
        }
        // out += tmp K† (column mixing).
        for r in 0..d {
            let row = &tmp[r * d..(r + 1) * d];
            let dst = &mut out[r * d..(r + 1) * d];
            for j0 in (0..d).filter(|j| j & bit == 0) {
                let j1 = j0 | bit;
                let (a, b) = (row[j0], row[j1]);
                dst[j0] += a * k[0].conj() + b * k[1].conj();
                dst[j1] += a * k[2].conj() + b * k[3].conj();
            }
        }
    }
    let rho = OperatorMatrix::from_row_major(d, out)?;
    Ok(QuantumState::density_unchecked(state.dims().to_vec(), rho))
}

/// `(1 - p) rho + p sigma_z rho sigma_z` on qubit `q`.
pub fn phase_damping(state: &QuantumState, np: &NoiseParams, q: usize) -> Result<QuantumState> {
    check_qubit(np, q)?;
    apply_kraus(state, q, &pd_kraus(np.dephasing_probability(q))?)
}

pub fn generalized_amplitude_damping(state: &QuantumState, np: &NoiseParams, q: usize) -> Result<QuantumState> {
    check_qubit(np, q)?;
    apply_kraus(state, q, &gad_kraus(np.p_gad, np.damping_strength(q))?)
}

fn check_qubit(np: &NoiseParams, q: usize) -> Result<()> {
    np.validate()?;
    if q >= np.n_qubits() {
        return Err(Error::range(format!(
            "qubit index {q} out of range for {} qubits",
            np.n_qubits()
        )));
    }
    Ok(())
}

/// Both channels on every qubit, qubit 0 first, in `np.order` within each qubit.
pub fn apply_all_qubits(state: &QuantumState, np: &NoiseParams) -> Result<QuantumState> {
    np.validate()?;
    let n = qubit_count(state)?;
    if n != np.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << np.n_qubits(),
            found: state.dim(),
        });
    }
    let mut rho = state.to_density();
    for q in 0..n {
        rho = match np.order {
            ChannelOrder::PdThenGad => generalized_amplitude_damping(&phase_damping(&rho, np, q)?, np, q)?,
            ChannelOrder::GadThenPd => phase_damping(&generalized_amplitude_damping(&rho, np, q)?, np, q)?,
        };
    }
    let drift = (rho.density_matrix().trace().re - 1.0).abs();
    if drift > tolerances::DENSITY_TRACE {
        return Err(Error::numeric(format!("trace drifted by {drift:.3e}"), 0));
    }
    Ok(rho)
}

/// Dense density matrices beyond this many qubits exceed a few hundred MB.
pub const MAX_DENSITY_QUBITS: usize = 12;

/// `((1 - eps)/2^n) I + eps |0..0><0..0|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PseudoPureState {
    pub epsilon: f64,
    pub n_qubits: usize,
}

impl PseudoPureState {
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn to_state(&self) -> Result<QuantumState> {
        let d = self.dim();
        let mut diag = vec![(1.0 - self.epsilon) / d as f64; d];
        diag[0] += self.epsilon;
        Ok(QuantumState::density_unchecked(
            vec![d],
            OperatorMatrix::from_real_diagonal(&diag)?,
        ))
    }
}

pub fn pseudo_pure(epsilon: f64, n_qubits: usize) -> Result<PseudoPureState> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::validation("polarization must lie in [0, 1]"));
    }
    if n_qubits == 0 || n_qubits > MAX_DENSITY_QUBITS {
        return Err(Error::validation(format!(
            "pseudo-pure states need 1..={MAX_DENSITY_QUBITS} qubits"
        )));
    }
    Ok(PseudoPureState { epsilon, n_qubits })
}
