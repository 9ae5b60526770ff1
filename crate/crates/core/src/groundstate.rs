//! Exact ground states and the adiabatic preparation protocol.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, inner, norm, pauli, Eigen, OperatorMatrix, QuantumState, C64};
use crate::mapping::{embed_qubit, MappingConfig};
use crate::model::{boson, build_hs, on_boson, on_spin, squeezed_frame, ModelParams};
use crate::tolerances;

/// Lowest eigenpair of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: QuantumState,
    /// `E_1 - E_0`.
    pub gap: f64,
    /// Set when the gap is below `1e-8` times the spectral radius.
    pub near_degenerate: bool,
    /// First excited state, kept so degenerate ground spaces can be used.
    pub first_excited: QuantumState,
}

impl GroundState {
    /// Fidelity of `psi` with the ground space: the single ground state, or the
    /// two lowest states when the gap is below `degenerate_gap`.
    pub fn fidelity(&self, psi: &[C64], degenerate_gap: f64) -> f64 {
        let g0 = self.state.as_pure().expect("ground states are pure");
        let mut f = inner(g0, psi).norm_sqr();
        if self.gap < degenerate_gap {
            let g1 = self.first_excited.as_pure().expect("ground states are pure");
            f += inner(g1, psi).norm_sqr();
        }
        f
    }
}

fn ground_from_eigen(e: &Eigen, dims: &[usize]) -> Result<GroundState> {
    let n = e.values.len();
    if n < 2 {
        return Err(Error::validation("ground state needs at least a two-dimensional space"));
    }
    let radius = e.values[0].abs().max(e.values[n - 1].abs());
    let gap = e.values[1] - e.values[0];
    Ok(GroundState {
        energy: e.values[0],
        state: QuantumState::pure_normalized(dims.to_vec(), e.vector(0))?,
        gap,
        near_degenerate: gap < tolerances::NEAR_DEGENERATE_REL * radius,
        first_excited: QuantumState::pure_normalized(dims.to_vec(), e.vector(1))?,
    })
}

/// Lowest eigenpair of `h`, with `dims` describing its tensor structure.
pub fn exact_ground_state(h: &OperatorMatrix, dims: &[usize]) -> Result<GroundState> {
    if dims.iter().product::<usize>() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: dims.iter().product(),
        });
    }
    ground_from_eigen(&eig_hermitian(h)?, dims)
}

/// Ground state of the squeezed-frame Hamiltonian on `boson_dim (x) 2`.
pub fn squeezed_frame_ground_state(p: &ModelParams) -> Result<GroundState> {
    exact_ground_state(&build_hs(p)?, &[p.boson_dim, 2])
}

/// Boson-only ground state of `omega a†a - xi (a + a†)^2` (with `omega = 1`).
pub fn antisqueezed_oscillator_ground_state(xi_over_omega: f64, m: usize) -> Result<GroundState> {
    if !(xi_over_omega.is_finite() && 1.0 - 4.0 * xi_over_omega > 0.0) {
        return Err(Error::precondition(format!(
            "oscillator is unstable for xi/omega = {xi_over_omega} (needs 4 xi/omega < 1)"
        )));
    }
    let x = boson::position_sum(m)?;
    let h = &boson::number(m)? - &x.matmul(&x).scale_real(xi_over_omega);
    exact_ground_state(&h, &[m])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ramp {
    #[default]
    Linear,
    /// `3x^2 - 2x^3`.
    Smoothstep,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdiabaticSchedule {
    pub steps: usize,
    /// Duration of each step in units of `1/omega`.
    pub dt: f64,
    #[serde(default)]
    pub ramp: Ramp,
}

impl Default for AdiabaticSchedule {
    fn default() -> Self {
        Self {
            steps: 200,
            dt: 0.5,
            ramp: Ramp::Linear,
        }
    }
}

impl AdiabaticSchedule {
    /// Interpolation weight `s(l)` with `s(0) = 0` and `s(L) = 1`.
    pub fn s(&self, l: usize) -> f64 {
        let x = (l as f64 / self.steps as f64).clamp(0.0, 1.0);
        match self.ramp {
            Ramp::Linear => x,
            Ramp::Smoothstep => x * x * (3.0 - 2.0 * x),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::validation("steps must be at least 1"));
        }
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            return Err(Error::validation("dt must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PreparationResult {
    pub final_state: QuantumState,
    /// Entry `l` is the fidelity of `psi(l)` with the ground space of `H(l)`, `l = 0..=L`.
    pub fidelity_trace: Vec<f64>,
    pub energy_trace: Vec<f64>,
    pub s_trace: Vec<f64>,
    /// Fidelity of the final state with the ground space of `H_s`.
    pub final_fidelity: f64,
}

impl PreparationResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,s,energy,fidelity\n");
        for (l, ((s, e), f)) in self
            .s_trace
            .iter()
            .zip(&self.energy_trace)
            .zip(&self.fidelity_trace)
            .enumerate()
        {
            let _ = writeln!(out, "{l},{s:?},{e:?},{f:?}");
        }
        out
    }
}

/// `sum_i sigma_y^{(i)}` over the register qubits and the two-level system.
pub fn initial_hamiltonian(m: usize) -> Result<OperatorMatrix> {
    let cfg = register(m)?;
    let mut h = on_spin(m, &pauli::sigma_y())?;
    for i in 1..=cfg.n_qubits() {
        h = &h + &on_boson(&embed_qubit(cfg, i, &pauli::sigma_y())?)?;
    }
    Ok(h)
}

/// Product ground state of [`initial_hamiltonian`]: every qubit in
/// `(|0> - i|1>)/sqrt(2)`, energy `-(N + 1)`.
pub fn initial_ground_state(m: usize) -> Result<QuantumState> {
    let cfg = register(m)?;
    let qubits = cfg.n_qubits() + 1;
    let amp = 0.5f64.powf(qubits as f64 / 2.0);
    let minus_i = C64::new(0.0, -1.0);
    let v: Vec<C64> = (0..2 * m).map(|k| minus_i.powu(k.count_ones()) * amp).collect();
    QuantumState::pure(vec![m, 2], v)
}

fn register(m: usize) -> Result<MappingConfig> {
    if !m.is_power_of_two() || m < 2 {
        return Err(Error::validation(format!(
            "adiabatic preparation maps the boson onto qubits, so boson_dim must be a power of two (got {m})"
        )));
    }
    MappingConfig::new(m.trailing_zeros() as usize)
}

/// Evolves the initial product state through `H(l) = (1 - s(l)) H_0 + s(l) H_s`
/// with `psi(l) = exp(-i H(l) dt) psi(l - 1)` for `l = 1..=L`.
pub fn adiabatic_prepare(p: &ModelParams, sched: &AdiabaticSchedule) -> Result<PreparationResult> {
    sched.validate()?;
    let m = p.boson_dim;
    let h0 = initial_hamiltonian(m)?;
    let hs = build_hs(p)?;
    let degenerate = tolerances::DEGENERATE_GAP * p.omega;
    let dims = [m, 2];

    let mut psi = initial_ground_state(m)?.as_pure().expect("pure").to_vec();
    let mut fidelity_trace = Vec::with_capacity(sched.steps + 1);
    let mut energy_trace = Vec::with_capacity(sched.steps + 1);
    let mut s_trace = Vec::with_capacity(sched.steps + 1);

    let record = |e: &Eigen, psi: &[C64], fid: &mut Vec<f64>, en: &mut Vec<f64>| -> Result<()> {
        let g = ground_from_eigen(e, &dims)?;
        fid.push(g.fidelity(psi, degenerate));
        // <psi|H|psi> from the spectral decomposition.
        let energy: f64 = (0..e.values.len())
            .map(|k| e.values[k] * inner(&e.vector(k), psi).norm_sqr())
            .sum();
        en.push(energy);
        Ok(())
    };

    s_trace.push(0.0);
    record(&eig_hermitian(&h0)?, &psi, &mut fidelity_trace, &mut energy_trace)?;
    let mut last = None;
    for l in 1..=sched.steps {
        let s = sched.s(l);
        let h = &h0.scale_real(1.0 - s) + &hs.scale_real(s);
        let e = eig_hermitian(&h)?;
        // psi <- V exp(-i E dt) V† psi
        let coeffs: Vec<C64> = (0..e.values.len())
            .map(|k| inner(&e.vector(k), &psi) * C64::from_polar(1.0, -e.values[k] * sched.dt))
            .collect();
        let mut next = vec![C64::new(0.0, 0.0); psi.len()];
        for (k, c) in coeffs.iter().enumerate() {
            for (x, v) in next.iter_mut().zip(e.vector(k)) {
                *x += c * v;
            }
        }
        let drift = (norm(&next) - 1.0).abs();
        if drift > tolerances::ADIABATIC_NORM_DRIFT {
            return Err(Error::numeric(
                format!("state norm drifted by {drift:.3e} at step {l}"),
                l,
            ));
        }
        psi = next;
        s_trace.push(s);
        record(&e, &psi, &mut fidelity_trace, &mut energy_trace)?;
        last = Some(e);
    }
    let target = match (sched.s(sched.steps) == 1.0, last) {
        (true, Some(e)) => ground_from_eigen(&e, &dims)?,
        _ => squeezed_frame_ground_state(p)?,
    };
    let final_fidelity = target.fidelity(&psi, degenerate);
    Ok(PreparationResult {
        final_state: QuantumState::pure_normalized(dims.to_vec(), psi)?,
        fidelity_trace,
        energy_trace,
        s_trace,
        final_fidelity,
    })
}

fn boson_ops_for(state: &QuantumState) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let dims = state.dims();
    let m = dims[0];
    let a = boson::annihilation(m)?;
    let n = boson::number(m)?;
    let a2 = a.matmul(&a);
    let sum = &a2 + &a2.adjoint();
    match dims {
        [_] => Ok((n, sum)),
        [_, 2] => Ok((on_boson(&n)?, on_boson(&sum)?)),
        _ => Err(Error::UnsupportedShape(format!(
            "expected a boson or boson (x) spin state, got dims {dims:?}"
        ))),
    }
}

/// `(omega/Omega)[cosh 2r <a†a> - sinh(2r)(<a†^2> + <a^2>)/2 + sinh^2 r]` on a
/// squeezed-frame state.
pub fn measured_order_parameter(p: &ModelParams, state_s: &QuantumState) -> Result<f64> {
    let r = squeezed_frame(p).stable()?.r_tilde;
    let (n, sq) = boson_ops_for(state_s)?;
    let num = state_s.expect(&n)?.re;
    let pair = state_s.expect(&sq)?.re;
    let bracket = (2.0 * r).cosh() * num - 0.5 * (2.0 * r).sinh() * pair + r.sinh().powi(2);
    Ok(bracket / p.ratio)
}

/// `(omega/Omega)<G|a†a|G>` with `|G> = S(r)|G>_s`, the squeezed-frame state
/// zero-padded to `m_lab` Fock levels first.
pub fn order_parameter_in_lab_frame(p: &ModelParams, state_s: &QuantumState, m_lab: usize) -> Result<f64> {
    let r = squeezed_frame(p).stable()?.r_tilde;
    let dims = state_s.dims();
    let m = dims[0];
    if m_lab < m {
        return Err(Error::range(
            "lab-frame truncation must not be smaller than the state's",
        ));
    }
    let spin = dims.get(1).copied().unwrap_or(1);
    let rho = state_s.density_matrix();
    // rho = sum_k w_k |v_k><v_k|; transport each eigenvector.
    let e = eig_hermitian(&rho)?;
    let mut occupation = 0.0;
    for (k, &w) in e.values.iter().enumerate() {
        if w <= 1e-14 {
            continue;
        }
        let v = e.vector(k);
        for s in 0..spin {
            let mut b = vec![C64::new(0.0, 0.0); m_lab];
            for n in 0..m {
                b[n] = v[n * spin + s];
            }
            let g = boson::squeeze_vector(r, &b)?;
            occupation += w * g.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum::<f64>();
        }
    }
    Ok(occupation / p.ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;

    #[test]
    fn sigma_z_ground_state() {
        let g = exact_ground_state(&pauli::sigma_z(), &[2]).unwrap();
        assert_eq!(g.energy, -1.0);
        assert_eq!(g.gap, 2.0);
        assert!((g.state.as_pure().unwrap()[pauli::DOWN].norm() - 1.0).abs() < 1e-15);
        assert!(!g.near_degenerate);
        let id = OperatorMatrix::identity(2).unwrap();
        assert!(exact_ground_state(&id, &[2]).unwrap().near_degenerate);
    }

    #[test]
    fn initial_state_is_exact_ground_state() {
        for m in [2, 4, 8] {
            let h0 = initial_hamiltonian(m).unwrap();
            let psi = initial_ground_state(m).unwrap();
            let n_qubits = m.trailing_zeros() as f64 + 1.0;
            let e = psi.expect(&h0).unwrap();
            assert!((e.re + n_qubits).abs() < 1e-12);
            let hv = h0.apply(psi.as_pure().unwrap());
            for (x, y) in hv.iter().zip(psi.as_pure().unwrap()) {
                assert!((x + y * n_qubits).norm() < 1e-12);
            }
        }
        assert!(initial_ground_state(6).is_err());
    }

    #[test]
    fn sudden_quench_limit() {
        let p = ModelParams::new(25.0, 1.0, 1.1, 0.26, 4);
        let sched = AdiabaticSchedule {
            steps: 1,
            dt: 1e-9,
            ramp: Ramp::Linear,
        };
        let res = adiabatic_prepare(&p, &sched).unwrap();
        let gs = squeezed_frame_ground_state(&p).unwrap();
        let g0 = initial_ground_state(4).unwrap();
        let overlap = gs.fidelity(g0.as_pure().unwrap(), 1e-3);
        assert!((res.final_fidelity - overlap).abs() < 1e-6);
        assert!((res.fidelity_trace[0] - 1.0).abs() < 1e-12);
        assert_eq!(res.fidelity_trace.len(), 2);
    }

    #[test]
    fn schedule_shapes() {
        for ramp in [Ramp::Linear, Ramp::Smoothstep] {
            let s = AdiabaticSchedule {
                steps: 10,
                dt: 0.1,
                ramp,
            };
            assert_eq!(s.s(0), 0.0);
            assert_eq!(s.s(10), 1.0);
            for l in 0..10 {
                assert!(s.s(l + 1) >= s.s(l));
            }
        }
    }

    #[test]
    fn csv_layout() {
        let p = ModelParams::new(25.0, 1.0, 1.1, 0.26, 2);
        let res = adiabatic_prepare(
            &p,
            &AdiabaticSchedule {
                steps: 3,
                dt: 0.5,
                ramp: Ramp::Linear,
            },
        )
        .unwrap();
        let csv = res.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "l,s,energy,fidelity");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("3,1.0,"));
    }

    #[test]
    fn order_parameter_reduces_without_squeezing() {
        let p = ModelParams::new(10.0, 1.4, 0.0, 0.0, 32);
        let g = squeezed_frame_ground_state(&p).unwrap();
        let n = on_boson(&boson::number(32).unwrap()).unwrap();
        let direct = g.state.expect(&n).unwrap().re / 10.0;
        assert!((measured_order_parameter(&p, &g.state).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn frame_formula_matches_transport() {
        let p = ModelParams::new(5.0, 0.9, 1.1, 0.2, 48);
        let g = squeezed_frame_ground_state(&p).unwrap();
        let a = measured_order_parameter(&p, &g.state).unwrap();
        let b = order_parameter_in_lab_frame(&p, &g.state, 256).unwrap();
        assert!((a - b).abs() < 1e-8 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn np_analytic_state_overlaps_exact() {
        let p = ModelParams::new(2000.0, 1.0, 1.1, 0.26, 256);
        let analytic = analytic::ground_state_np(&p, 256).unwrap();
        let exact = exact_ground_state(&crate::model::build_total(&p).unwrap(), &[256, 2]).unwrap();
        let f = exact.fidelity(analytic.as_pure().unwrap(), 0.0);
        assert!(f >= 0.999, "overlap {f}");
    }

    #[test]
    fn antisqueezed_oscillator_zpf() {
        for xi in [0.0, 0.1, 0.1875, 0.24] {
            let g = antisqueezed_oscillator_ground_state(xi, 128).unwrap();
            let z = crate::observables::zpf(&g.state).unwrap();
            let exact = 0.5 * (1.0 - 4.0 * xi).powf(-0.25);
            assert!((z - exact).abs() < 1e-4, "xi {xi}: {z} vs {exact}");
        }
        assert!(antisqueezed_oscillator_ground_state(0.25, 16).is_err());
    }
}
