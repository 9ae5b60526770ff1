//! Closed-form results in the limit `Omega / omega -> infinity`.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{pauli, QuantumState, C64};
use crate::model::{boson, squeezed_frame, FrameStatus, ModelParams, SqueezedFrame};
use crate::tolerances;

/// `lambda_tilde_s` this close to 1 counts as sitting on the critical line.
const CRITICAL_BAND: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    NP,
    SP,
    UP,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::NP => "NP",
            Phase::SP => "SP",
            Phase::UP => "UP",
        })
    }
}

/// A closed-form value that may be singular.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quantity {
    Finite(f64),
    Divergent,
}

impl Quantity {
    fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            Quantity::Finite(x)
        } else {
            Quantity::Divergent
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Quantity::Finite(x) => Some(x),
            Quantity::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        self == Quantity::Divergent
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Quantity::Finite(x) => s.serialize_f64(*x),
            Quantity::Divergent => s.serialize_str("divergent"),
        }
    }
}

/// Which closed form of the order parameter to report in the superradiant phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiConvention {
    /// `(e^{-4 r}/4)(lambda_s^2 - lambda_s^{-2})`, equal to `(omega/Omega)<a†a>`
    /// evaluated in the lab frame.
    #[default]
    LabFrame,
    /// `(1/4)(lambda_s^2 - lambda_s^{-2})`, the occupation counted in the squeezed frame.
    SqueezedFrame,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AnalyticOptions {
    pub phi_convention: PhiConvention,
    /// Apply the secondary squeezing `S(l_sp)` in superradiant ground states.
    pub include_l_sp: bool,
    /// Return ground states without the outer `S(r)`, i.e. as eigenstates of
    /// the squeezed-frame Hamiltonian. Entanglement is unaffected by this
    /// local factor, so large displacements can be handled on fewer levels.
    pub squeezed_frame_states: bool,
}

/// Phase label plus closed-form quantities at one parameter point.
///
/// Energies are in units of `omega`. The ground energy is split as
/// `e_g + e_g_omega_coefficient * (Omega / omega)` so the part that grows
/// with the two-level splitting stays separate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseReport {
    pub phase: Phase,
    pub ratio: f64,
    pub stability_radicand: f64,
    pub at_critical_point: bool,
    pub r_tilde: Option<f64>,
    pub lambda_tilde_s: Option<f64>,
    pub omega_e: Option<f64>,
    pub e_g: Option<f64>,
    pub e_g_omega_coefficient: Option<f64>,
    pub beta_abs: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub l_np: Option<Quantity>,
    pub l_sp: Option<Quantity>,
}

struct Point {
    frame: SqueezedFrame,
    phase: Phase,
    critical: bool,
}

fn locate(p: &ModelParams) -> std::result::Result<Point, f64> {
    match squeezed_frame(p) {
        FrameStatus::Unstable { radicand } => Err(radicand),
        FrameStatus::Stable(frame) => {
            let ls = frame.lambda_tilde_s;
            let critical = (ls - 1.0).abs() <= CRITICAL_BAND;
            let phase = if ls > 1.0 && !critical { Phase::SP } else { Phase::NP };
            Ok(Point { frame, phase, critical })
        }
    }
}

fn stable_point(p: &ModelParams) -> Result<Point> {
    p.validate()?;
    locate(p).map_err(|radicand| {
        Error::precondition(format!(
            "parameter point is unstable (1 + alpha*lambda_tilde^2 - 4*xi/omega = {radicand:.6})"
        ))
    })
}

pub fn classify_phase(p: &ModelParams) -> PhaseReport {
    classify_phase_with(p, AnalyticOptions::default())
}

pub fn classify_phase_with(p: &ModelParams, opts: AnalyticOptions) -> PhaseReport {
    let mut report = PhaseReport {
        phase: Phase::UP,
        ratio: p.ratio,
        stability_radicand: p.stability_radicand(),
        at_critical_point: false,
        r_tilde: None,
        lambda_tilde_s: None,
        omega_e: None,
        e_g: None,
        e_g_omega_coefficient: None,
        beta_abs: None,
        theta: None,
        phi: None,
        l_np: None,
        l_sp: None,
    };
    let Ok(pt) = locate(p) else {
        return report;
    };
    let f = pt.frame;
    let ls = f.lambda_tilde_s;
    let w = p.omega;
    report.phase = pt.phase;
    report.at_critical_point = pt.critical;
    report.r_tilde = Some(f.r_tilde);
    report.lambda_tilde_s = Some(ls);
    report.omega_e = Some(excitation_from(&pt) / w);
    let (finite, coeff) = energy_from(&pt);
    report.e_g = Some(finite / w);
    report.e_g_omega_coefficient = Some(coeff);
    report.phi = Some(phi_from(&pt, opts.phi_convention));
    match pt.phase {
        Phase::SP => {
            let (b, t) = beta_theta_from(p, &pt);
            report.beta_abs = Some(b);
            report.theta = Some(t);
            report.l_sp = Some(Quantity::from_f64(0.25 * (1.0 - ls.powi(-4)).ln()));
        }
        _ => {
            report.beta_abs = Some(0.0);
            report.theta = Some(0.0);
            report.l_np = Some(if pt.critical {
                Quantity::Divergent
            } else {
                Quantity::from_f64(0.25 * (1.0 - ls * ls).ln())
            });
        }
    }
    report
}

/// Coupling where `lambda_tilde = sqrt(1 + alpha lambda_tilde^2 - 4 xi/omega)`.
pub fn critical_coupling(alpha: f64, xi_over_omega: f64) -> Option<f64> {
    let num = 4.0 * xi_over_omega - 1.0;
    let den = alpha - 1.0;
    if den == 0.0 {
        // lambda^2 = lambda^2 + (1 - 4 xi/omega): no isolated root.
        return None;
    }
    let sq = num / den;
    (sq > 0.0 && sq.is_finite()).then(|| sq.sqrt())
}

/// Coupling below which the point is unstable, `sqrt((4 xi/omega - 1)/alpha)`.
pub fn unstable_boundary(alpha: f64, xi_over_omega: f64) -> Option<f64> {
    let num = 4.0 * xi_over_omega - 1.0;
    (num > 0.0 && alpha > 0.0).then(|| (num / alpha).sqrt())
}

fn excitation_from(pt: &Point) -> f64 {
    if pt.critical {
        return 0.0;
    }
    let (ws, ls) = (pt.frame.omega_s, pt.frame.lambda_tilde_s);
    match pt.phase {
        Phase::SP => ws * (1.0 - ls.powi(-4)).sqrt(),
        _ => ws * (1.0 - ls * ls).sqrt(),
    }
}

/// Lowest excitation energy.
pub fn excitation_energy(p: &ModelParams) -> Result<f64> {
    Ok(excitation_from(&stable_point(p)?))
}

fn energy_from(pt: &Point) -> (f64, f64) {
    let f = &pt.frame;
    let ls = f.lambda_tilde_s;
    match pt.phase {
        Phase::SP => (
            f.omega_s / 2.0 * ((1.0 - ls.powi(-4)).sqrt() - 1.0) + f.c_s,
            -0.25 * (ls * ls + ls.powi(-2)),
        ),
        _ => (f.omega_s / 2.0 * ((1.0 - ls * ls).max(0.0).sqrt() - 1.0) + f.c_s, -0.5),
    }
}

/// Ground energy `E_g` (absolute energy units).
pub fn ground_energy(p: &ModelParams) -> Result<f64> {
    let (finite, coeff) = energy_from(&stable_point(p)?);
    Ok(finite + coeff * p.big_omega())
}

fn phi_from(pt: &Point, convention: PhiConvention) -> f64 {
    if pt.phase != Phase::SP {
        return 0.0;
    }
    let ls = pt.frame.lambda_tilde_s;
    let base = 0.25 * (ls * ls - ls.powi(-2));
    match convention {
        PhiConvention::LabFrame => (-4.0 * pt.frame.r_tilde).exp() * base,
        PhiConvention::SqueezedFrame => base,
    }
}

/// Order parameter `(omega/Omega)<a†a>` in the limit.
pub fn order_parameter_limit(p: &ModelParams) -> Result<f64> {
    order_parameter_limit_with(p, PhiConvention::LabFrame)
}

pub fn order_parameter_limit_with(p: &ModelParams, convention: PhiConvention) -> Result<f64> {
    Ok(phi_from(&stable_point(p)?, convention))
}

fn beta_theta_from(p: &ModelParams, pt: &Point) -> (f64, f64) {
    let f = &pt.frame;
    let ls = f.lambda_tilde_s;
    let beta = (p.big_omega() * (ls * ls - ls.powi(-2)) / (4.0 * f.omega_s))
        .max(0.0)
        .sqrt();
    let theta = 0.5 * (-4.0 * f.lambda_s * beta / p.big_omega()).atan();
    (beta, theta)
}

/// `|beta|` and the spin rotation angle `theta` of the `+` branch.
pub fn displacement_and_angle(p: &ModelParams) -> Result<(f64, f64)> {
    let pt = stable_point(p)?;
    if pt.phase != Phase::SP {
        return Err(Error::precondition(
            "displacement is defined in the superradiant phase only",
        ));
    }
    Ok(beta_theta_from(p, &pt))
}

/// Field coherence `<a>` of the `+` branch: `e^{-r} |beta|` in SP, zero otherwise.
pub fn coherence_limit(p: &ModelParams) -> Result<f64> {
    let pt = stable_point(p)?;
    if pt.phase != Phase::SP {
        return Ok(0.0);
    }
    Ok((-pt.frame.r_tilde).exp() * beta_theta_from(p, &pt).0)
}

fn check_tail(v: &[C64], what: &str) -> Result<()> {
    let tail = boson::tail_weight(v, (v.len() / 4).max(1));
    if tail > tolerances::TRUNCATION_TAIL {
        return Err(Error::range(format!(
            "{what}: weight {tail:.2e} in the top quarter of the Fock space; increase boson_dim"
        )));
    }
    Ok(())
}

fn spin_vector(up: f64, down: f64) -> [C64; 2] {
    let mut s = [C64::new(0.0, 0.0); 2];
    s[pauli::UP] = C64::new(up, 0.0);
    s[pauli::DOWN] = C64::new(down, 0.0);
    s
}

fn boson_spin(boson: &[C64], spin: [C64; 2]) -> Result<QuantumState> {
    let v: Vec<C64> = boson.iter().flat_map(|&b| spin.map(|s| b * s)).collect();
    QuantumState::pure_normalized(vec![boson.len(), 2], v)
}

/// Normal-phase ground state `S(r + l_np)|0>|down>` on `m` Fock levels.
pub fn ground_state_np(p: &ModelParams, m: usize) -> Result<QuantumState> {
    ground_state_np_with(p, m, AnalyticOptions::default())
}

/// As [`ground_state_np`]; with `squeezed_frame_states` the outer `S(r)` is
/// dropped, leaving `S(l_np)|0>|down>`.
pub fn ground_state_np_with(p: &ModelParams, m: usize, opts: AnalyticOptions) -> Result<QuantumState> {
    let pt = stable_point(p)?;
    if pt.phase != Phase::NP || pt.critical {
        return Err(Error::precondition(format!(
            "normal-phase ground state requested at a {} point",
            if pt.critical { "critical" } else { "superradiant" }
        )));
    }
    let ls = pt.frame.lambda_tilde_s;
    let outer = if opts.squeezed_frame_states {
        0.0
    } else {
        pt.frame.r_tilde
    };
    let r = outer + 0.25 * (1.0 - ls * ls).ln();
    let b = boson::squeeze_vector(r, &boson::vacuum(m))?;
    check_tail(&b, "normal-phase ground state")?;
    boson_spin(&b, spin_vector(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpBranch {
    Plus,
    Minus,
    /// `(|G>_+ + |G>_-)/sqrt(2)`, the parity-symmetric spin-oscillator entangled state.
    Entangled,
    CatEven,
    CatOdd,
}

pub fn ground_state_sp(p: &ModelParams, m: usize, branch: SpBranch) -> Result<QuantumState> {
    ground_state_sp_with(p, m, branch, AnalyticOptions::default())
}

/// Superradiant ground states. `Plus`/`Minus` live on `m (x) 2`; the cat
/// branches are boson-only states `S(r)(D(|b|) +- D(-|b|))|0>` normalized.
///
/// Branch `+-` pairs `D(+-|b|)` with the spin state `c_down|down> -+ c_up|up>`:
/// with the coupling `+lambda (a + a†) sigma_x`, a positive displacement
/// produces a positive effective `sigma_x` field, whose lower eigenvector has
/// opposite-sign components.
pub fn ground_state_sp_with(
    p: &ModelParams,
    m: usize,
    branch: SpBranch,
    opts: AnalyticOptions,
) -> Result<QuantumState> {
    let pt = stable_point(p)?;
    if pt.phase != Phase::SP {
        return Err(Error::precondition("superradiant ground state requested outside SP"));
    }
    let (beta, _) = beta_theta_from(p, &pt);
    let ls = pt.frame.lambda_tilde_s;
    let displaced = |sign: f64| -> Result<Vec<C64>> {
        let d = if opts.include_l_sp {
            let seed = boson::squeeze_vector(0.25 * (1.0 - ls.powi(-4)).ln(), &boson::vacuum(m))?;
            boson::displace_vector(sign * beta, &seed)?
        } else {
            boson::coherent_state(sign * beta, m)?
        };
        if opts.squeezed_frame_states {
            Ok(d)
        } else {
            boson::squeeze_vector(pt.frame.r_tilde, &d)
        }
    };
    let cu = (0.5 * (1.0 - ls.powi(-2))).sqrt();
    let cd = (0.5 * (1.0 + ls.powi(-2))).sqrt();
    match branch {
        SpBranch::Plus | SpBranch::Minus => {
            let sign = if branch == SpBranch::Plus { 1.0 } else { -1.0 };
            let b = displaced(sign)?;
            check_tail(&b, "superradiant ground state")?;
            boson_spin(&b, spin_vector(-sign * cu, cd))
        }
        SpBranch::Entangled => {
            let (a, b) = (displaced(1.0)?, displaced(-1.0)?);
            check_tail(&a, "superradiant ground state")?;
            let (sp, sm) = (spin_vector(-cu, cd), spin_vector(cu, cd));
            let v: Vec<C64> = a
                .iter()
                .zip(&b)
                .flat_map(|(x, y)| [0, 1].map(|k| x * sp[k] + y * sm[k]))
                .collect();
            QuantumState::pure_normalized(vec![m, 2], v)
        }
        SpBranch::CatEven | SpBranch::CatOdd => {
            let sign = if branch == SpBranch::CatEven { 1.0 } else { -1.0 };
            let (a, b) = (displaced(1.0)?, displaced(-1.0)?);
            let v: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x + y * sign).collect();
            check_tail(&v, "squeezed cat state")?;
            QuantumState::pure_normalized(vec![m], v)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZpfVariant {
    /// Rabi model alone.
    Rabi,
    /// Rabi model with the A^2 term.
    WithA2,
    /// Rabi model with the A^2 and antisqueezing terms.
    WithA2AndAs,
}

/// Closed-form ground-state position spread `sqrt(<x^2> - <x>^2)`, `x = (a + a†)/2`.
pub fn zpf_formula(p: &ModelParams, variant: ZpfVariant) -> Result<Quantity> {
    p.validate()?;
    let l = p.lambda_tilde;
    match variant {
        ZpfVariant::Rabi => Ok(if l < 1.0 {
            Quantity::from_f64(0.5 * (1.0 - l * l).powf(-0.25))
        } else if l > 1.0 {
            Quantity::from_f64(0.5 * (1.0 - l.powi(-4)).powf(-0.25))
        } else {
            Quantity::Divergent
        }),
        ZpfVariant::WithA2 => {
            let rad = 1.0 + p.alpha * l * l - l * l;
            if rad < 0.0 {
                return Err(Error::precondition(
                    "the A^2 formula covers the normal phase only (1 + (alpha - 1) lambda_tilde^2 < 0)",
                ));
            }
            Ok(if rad == 0.0 {
                Quantity::Divergent
            } else {
                Quantity::from_f64(0.5 * rad.powf(-0.25))
            })
        }
        ZpfVariant::WithA2AndAs => {
            let pt = stable_point(p)?;
            if pt.critical {
                return Ok(Quantity::Divergent);
            }
            let ls = pt.frame.lambda_tilde_s;
            let inner = match pt.phase {
                Phase::SP => 1.0 - ls.powi(-4),
                _ => 1.0 - ls * ls,
            };
            let prefactor = p.stability_radicand().powf(-0.25);
            Ok(Quantity::from_f64(0.5 * inner.powf(-0.25) * prefactor))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;

    fn pt(l: f64, alpha: f64, xi: f64) -> ModelParams {
        ModelParams::new(25.0, l, alpha, xi, 64)
    }

    #[test]
    fn phase_labels() {
        assert_eq!(classify_phase(&pt(0.2, 1.1, 0.26)).phase, Phase::SP);
        assert_eq!(classify_phase(&pt(1.0, 1.1, 0.26)).phase, Phase::NP);
        assert_eq!(classify_phase(&pt(0.1, 1.1, 0.30)).phase, Phase::UP);
        assert_eq!(classify_phase(&pt(0.5, 0.0, 0.0)).phase, Phase::NP);
        assert_eq!(classify_phase(&pt(1.5, 0.0, 0.0)).phase, Phase::SP);
    }

    #[test]
    fn critical_couplings() {
        let lc = critical_coupling(1.1, 0.26).unwrap();
        assert!((lc - 0.4f64.sqrt()).abs() < 1e-12);
        assert!((lc - 0.6325).abs() < 5e-4);
        assert!((critical_coupling(0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((critical_coupling(1.1, 0.35).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(critical_coupling(1.1, 0.0), None);
        assert_eq!(critical_coupling(1.0, 0.3), None);
    }

    #[test]
    fn reversed_transition_boundary() {
        let lc = critical_coupling(1.1, 0.26).unwrap();
        let lu = unstable_boundary(1.1, 0.26).unwrap();
        for i in 0..=300 {
            let l = 3.0 * i as f64 / 300.0;
            if (l - lc).abs() < 1e-6 || (l - lu).abs() < 1e-6 {
                continue;
            }
            let phase = classify_phase(&pt(l, 1.1, 0.26)).phase;
            let expected = if l < lu {
                Phase::UP
            } else if l < lc {
                Phase::SP
            } else {
                Phase::NP
            };
            assert_eq!(phase, expected, "lambda_tilde = {l}");
        }
    }

    #[test]
    fn excitation_energies() {
        assert!((excitation_energy(&pt(0.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let lc = critical_coupling(1.1, 0.26).unwrap();
        assert_eq!(excitation_energy(&pt(lc, 1.1, 0.26)).unwrap(), 0.0);
        assert!(classify_phase(&pt(lc, 1.1, 0.26)).at_critical_point);
        for i in 0..=30 {
            let l = 0.1 * i as f64;
            let w = excitation_energy(&pt(l, 1.1, 0.0)).unwrap();
            assert!((w - (1.0 + 0.1 * l * l).sqrt()).abs() < 1e-12);
            assert!(w >= 1.0);
        }
        // Gap closes monotonically on approach from both sides.
        let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&d| excitation_energy(&pt(lc + d, 1.1, 0.26)).unwrap())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&d| excitation_energy(&pt(lc - d, 1.1, 0.26)).unwrap())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        assert!(matches!(
            excitation_energy(&pt(0.1, 1.1, 0.3)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn order_parameter_values() {
        let p = pt(0.2, 1.1, 0.26);
        let phi = order_parameter_limit(&p).unwrap();
        // lambda_s^2 = 0.04 / 0.004 = 10.
        assert!((phi - 250.0 / 4.0 * (10.0 - 0.1)).abs() < 1e-9);
        assert!((phi - 618.75).abs() < 1e-9);
        let main = order_parameter_limit_with(&p, PhiConvention::SqueezedFrame).unwrap();
        assert!((main - 9.9 / 4.0).abs() < 1e-12);
        assert_eq!(order_parameter_limit(&pt(1.0, 1.1, 0.26)).unwrap(), 0.0);
        let lc = critical_coupling(1.1, 0.26).unwrap();
        let near: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&d| order_parameter_limit(&pt(lc - d, 1.1, 0.26)).unwrap())
            .collect();
        assert!(near[0] > near[1] && near[1] > near[2] && near[2] > 0.0 && near[2] < 1e-4);
    }

    #[test]
    fn displacement_and_spin_angle() {
        let p = pt(0.2, 1.1, 0.26);
        let (b, t) = displacement_and_angle(&p).unwrap();
        let e2r = 0.004f64.sqrt();
        assert!((b - (25.0 * 9.9 / (4.0 * e2r)).sqrt()).abs() < 1e-9);
        // tan 2 theta = -sqrt(lambda_s^4 - 1), independent of Omega/omega.
        assert!(((2.0 * t).tan() + 99f64.sqrt()).abs() < 1e-9);
        let (b100, t100) = displacement_and_angle(&p.with_ratio(100.0)).unwrap();
        assert!((b100 / b - 2.0).abs() < 1e-12);
        assert!((t100 - t).abs() < 1e-15);
        // |theta| grows toward pi/4 as lambda_s increases.
        let lc = critical_coupling(1.1, 0.26).unwrap();
        let mut last = 0.0;
        for l in [lc - 0.01, 0.5, 0.4, 0.3, 0.2] {
            let (_, t) = displacement_and_angle(&pt(l, 1.1, 0.26)).unwrap();
            assert!(t.abs() > last && t.abs() < std::f64::consts::FRAC_PI_4);
            last = t.abs();
        }
        assert!(displacement_and_angle(&pt(1.0, 1.1, 0.26)).is_err());
    }

    #[test]
    fn spin_state_matches_rotation_angle() {
        let p = pt(0.4, 1.1, 0.26);
        let (_, t) = displacement_and_angle(&p).unwrap();
        let ls = classify_phase(&p).lambda_tilde_s.unwrap();
        // The + branch spin state is cos(theta)|down> + sin(theta)|up>, theta < 0.
        let s = ground_state_sp_with(
            &p,
            64,
            SpBranch::Plus,
            AnalyticOptions {
                squeezed_frame_states: true,
                ..Default::default()
            },
        )
        .unwrap();
        let v = s.as_pure().unwrap();
        let (up, down) = (v[pauli::UP].re, v[pauli::DOWN].re);
        let norm = (up * up + down * down).sqrt();
        assert!((down / norm - t.cos()).abs() < 1e-9);
        assert!((up / norm - t.sin()).abs() < 1e-9);
        assert!((t.cos() - (0.5 * (1.0 + ls.powi(-2))).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn report_serialization() {
        let lc = critical_coupling(1.1, 0.26).unwrap();
        let r = classify_phase(&pt(lc, 1.1, 0.26));
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["l_np"], "divergent");
        assert_eq!(js["phase"], "NP");
        let up = serde_json::to_value(classify_phase(&pt(0.1, 1.1, 0.3))).unwrap();
        assert_eq!(up["phase"], "UP");
        assert!(up["phi"].is_null());
        let sp = classify_phase(&pt(0.2, 1.1, 0.26));
        let e_total = sp.e_g.unwrap() + sp.e_g_omega_coefficient.unwrap() * 25.0;
        assert!((e_total - ground_energy(&pt(0.2, 1.1, 0.26)).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn zpf_closed_forms() {
        let z = |p: &ModelParams, v| zpf_formula(p, v).unwrap().value().unwrap();
        assert_eq!(z(&pt(0.0, 0.0, 0.0), ZpfVariant::Rabi), 0.5);
        assert!(zpf_formula(&pt(1.0, 0.0, 0.0), ZpfVariant::Rabi)
            .unwrap()
            .is_divergent());
        for i in 0..=300 {
            let l = 0.01 * i as f64;
            assert!(z(&pt(l, 1.1, 0.0), ZpfVariant::WithA2) <= 0.5);
            // Reductions between the three forms.
            let with_as = z(&pt(l, 1.1, 0.0), ZpfVariant::WithA2AndAs);
            assert!((with_as - z(&pt(l, 1.1, 0.0), ZpfVariant::WithA2)).abs() < 1e-12);
            if l < 1.0 {
                let a2 = z(&pt(l, 0.0, 0.0), ZpfVariant::WithA2);
                assert!((a2 - z(&pt(l, 0.0, 0.0), ZpfVariant::Rabi)).abs() < 1e-12);
            }
        }
        let lc = critical_coupling(1.1, 0.26).unwrap();
        let worst = [-9e-5, -1e-6, 1e-6, 9e-5]
            .iter()
            .map(|d| z(&pt(lc + d, 1.1, 0.26), ZpfVariant::WithA2AndAs))
            .fold(0.0, f64::max);
        assert!(worst > 10.0);
        assert!(zpf_formula(&pt(lc, 1.1, 0.26), ZpfVariant::WithA2AndAs)
            .unwrap()
            .is_divergent());
    }

    #[test]
    fn np_state_is_squeezed_vacuum_with_spin_down() {
        let s = ground_state_np(&pt(0.0, 0.0, 0.0), 8).unwrap();
        let v = s.as_pure().unwrap();
        assert!((v[pauli::DOWN] - C64::new(1.0, 0.0)).norm() < 1e-14);
        let p = ModelParams::new(2000.0, 1.0, 1.1, 0.26, 256);
        let s = ground_state_np(&p, 256).unwrap();
        let x = crate::model::on_boson(&boson::x_quadrature(256).unwrap()).unwrap();
        let x2 = s.expect(&x.matmul(&x)).unwrap().re;
        let zpf = zpf_formula(&p, ZpfVariant::WithA2AndAs).unwrap().value().unwrap();
        assert!((x2 - zpf * zpf).abs() < 1e-6);
        assert!(ground_state_np(&pt(0.2, 1.1, 0.26), 64).is_err());
    }

    #[test]
    fn sp_branches() {
        // Omega/omega small enough for |beta| ~ 2 at the strongly squeezed SP point.
        let p = ModelParams::new(0.1, 0.2, 1.1, 0.26, 512);
        let m = 512;
        let plus = ground_state_sp(&p, m, SpBranch::Plus).unwrap();
        let minus = ground_state_sp(&p, m, SpBranch::Minus).unwrap();
        let a = crate::model::on_boson(&boson::annihilation(m).unwrap()).unwrap();
        let coh = plus.expect(&a).unwrap();
        assert!((coh.re - coherence_limit(&p).unwrap()).abs() < 1e-4);
        // Boson reflection n -> (-1)^n maps one branch's boson part onto the other's.
        let rb_plus = crate::linalg::partial_trace(&plus, 0).unwrap().density_matrix();
        let rb_minus = crate::linalg::partial_trace(&minus, 0).unwrap().density_matrix();
        let refl = boson::parity(m).unwrap();
        assert!(rb_plus.conjugate_by(&refl).max_abs_diff(&rb_minus) < 1e-6);

        let even = ground_state_sp(&p, m, SpBranch::CatEven).unwrap();
        let odd = ground_state_sp(&p, m, SpBranch::CatOdd).unwrap();
        let (b, _) = displacement_and_angle(&p).unwrap();
        assert!(b >= 1.9);
        assert!(inner(even.as_pure().unwrap(), odd.as_pure().unwrap()).norm() < 1e-8);
        assert!(matches!(
            ground_state_sp(&pt(1.0, 1.1, 0.26), 64, SpBranch::Plus),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn entangled_branch_entropy() {
        // Well separated lobes: the spin reduction has eigenvalues (1 +- lambda_s^{-2})/2.
        let p = ModelParams::new(25.0, 0.2, 1.1, 0.26, 2048);
        let opts = AnalyticOptions {
            squeezed_frame_states: true,
            ..Default::default()
        };
        let g = ground_state_sp_with(&p, 2048, SpBranch::Entangled, opts).unwrap();
        let ls = squeezed_frame(&p).stable().unwrap().lambda_tilde_s;
        let q = 0.5 * (1.0 + ls.powi(-2));
        let expected = -q * q.log2() - (1.0 - q) * (1.0 - q).log2();
        let s = crate::observables::entanglement_entropy(&g).unwrap();
        assert!((s - expected).abs() < 1e-8, "{s} vs {expected}");
        // Lab and squeezed-frame states differ by a local unitary.
        let small = ModelParams::new(0.1, 0.2, 1.1, 0.26, 512);
        let lab = ground_state_sp(&small, 512, SpBranch::Entangled).unwrap();
        let sq = ground_state_sp_with(&small, 512, SpBranch::Entangled, opts).unwrap();
        let (a, b) = (
            crate::observables::entanglement_entropy(&lab).unwrap(),
            crate::observables::entanglement_entropy(&sq).unwrap(),
        );
        assert!((a - b).abs() < 1e-8);
    }
}
