//! Parameter sweeps, critical-point detection and scaling-exponent fits.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, Phase, PhaseReport};
use crate::error::{Error, Result};
use crate::groundstate::{measured_order_parameter, squeezed_frame_ground_state};
use crate::model::ModelParams;
use crate::observables::entanglement_entropy;

/// Model parameter a sweep axis varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParameter {
    LambdaTilde,
    Ratio,
    XiOverOmega,
    Alpha,
}

impl AxisParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::LambdaTilde => "lambda_tilde",
            Self::Ratio => "ratio",
            Self::XiOverOmega => "xi_over_omega",
            Self::Alpha => "alpha",
        }
    }

    fn apply(self, p: &ModelParams, v: f64) -> ModelParams {
        match self {
            Self::LambdaTilde => p.with_lambda_tilde(v),
            Self::Ratio => p.with_ratio(v),
            Self::XiOverOmega => p.with_xi_over_omega(v),
            Self::Alpha => p.with_alpha(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AxisPoints {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    Uniform {
        start: f64,
        stop: f64,
        count: usize,
    },
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub parameter: AxisParameter,
    pub points: AxisPoints,
}

impl Axis {
    pub fn uniform(parameter: AxisParameter, start: f64, stop: f64, count: usize) -> Self {
        Self {
            parameter,
            points: AxisPoints::Uniform { start, stop, count },
        }
    }

    pub fn explicit(parameter: AxisParameter, values: Vec<f64>) -> Self {
        Self {
            parameter,
            points: AxisPoints::Explicit(values),
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match &self.points {
            AxisPoints::Uniform { start, stop, count } => match *count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..n)
                    .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                    .collect(),
            },
            AxisPoints::Explicit(v) => v.clone(),
        };
        if v.is_empty() {
            return Err(Error::validation(format!(
                "axis {} has no points",
                self.parameter.name()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation(format!(
                "axis {} has non-finite points",
                self.parameter.name()
            )));
        }
        Ok(v)
    }
}

/// How the Fock truncation is chosen at each grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MPolicy {
    Fixed(usize),
    /// `max(min, round(factor * sqrt(Omega/omega)))`.
    Scaled {
        min: usize,
        factor: f64,
    },
}

impl Default for MPolicy {
    fn default() -> Self {
        Self::Scaled { min: 32, factor: 8.0 }
    }
}

impl MPolicy {
    pub fn boson_dim(&self, ratio: f64) -> usize {
        match *self {
            Self::Fixed(m) => m,
            Self::Scaled { min, factor } => min.max((factor * ratio.max(0.0).sqrt()).round() as usize),
        }
    }

    /// The same policy with every truncation doubled.
    pub fn doubled(&self) -> Self {
        match *self {
            Self::Fixed(m) => Self::Fixed(2 * m),
            Self::Scaled { min, factor } => Self::Scaled {
                min: 2 * min,
                factor: 2.0 * factor,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub report: PhaseReport,
    pub phi_analytic: Option<f64>,
    pub phi_numeric: Option<f64>,
    pub gap: Option<f64>,
    pub entropy: Option<f64>,
    pub m_used: usize,
    /// Set when the numeric part of this point failed; the grid continues.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepGrid {
    pub template: ModelParams,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub m_policy: MPolicy,
    /// Row-major over `(axis1, axis2)`.
    pub records: Vec<SweepRecord>,
}

/// Evaluates one parameter point: closed forms plus the exact squeezed-frame
/// ground state. UP points carry no numbers.
pub fn evaluate_point(p: &ModelParams) -> SweepRecord {
    let report = analytic::classify_phase(p);
    let mut rec = SweepRecord {
        axis1: f64::NAN,
        axis2: None,
        phi_analytic: report.phi,
        phi_numeric: None,
        gap: None,
        entropy: None,
        m_used: p.boson_dim,
        error: None,
        report,
    };
    if rec.report.phase == Phase::UP {
        return rec;
    }
    let numeric = || -> Result<(f64, f64, f64)> {
        p.validate()?;
        let g = squeezed_frame_ground_state(p)?;
        let phi = measured_order_parameter(p, &g.state)?;
        Ok((phi, g.gap, entanglement_entropy(&g.state)?))
    };
    match numeric() {
        Ok((phi, gap, s)) => {
            rec.phi_numeric = Some(phi);
            rec.gap = Some(gap);
            rec.entropy = Some(s);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Evaluates every grid point in parallel; records come back in row-major
/// order and are independent of scheduling.
pub fn run_sweep(template: &ModelParams, axis1: &Axis, axis2: Option<&Axis>, policy: MPolicy) -> Result<SweepGrid> {
    let v1 = axis1.values()?;
    let v2: Vec<Option<f64>> = match axis2 {
        Some(a) => a.values()?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let points: Vec<(f64, Option<f64>)> = v1.iter().flat_map(|&a| v2.iter().map(move |&b| (a, b))).collect();
    let records = points
        .par_iter()
        .map(|&(a, b)| {
            let mut p = axis1.parameter.apply(template, a);
            if let (Some(ax), Some(b)) = (axis2, b) {
                p = ax.parameter.apply(&p, b);
            }
            p = p.with_boson_dim(policy.boson_dim(p.ratio));
            let mut rec = evaluate_point(&p);
            rec.axis1 = a;
            rec.axis2 = b;
            rec
        })
        .collect();
    Ok(SweepGrid {
        template: *template,
        axis1: axis1.clone(),
        axis2: axis2.cloned(),
        m_policy: policy,
        records,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

impl SweepGrid {
    pub const CSV_HEADER: &'static str =
        "axis1,axis2,phase,phi_analytic,phi_numeric,gap,entropy,r_tilde,lambda_tilde_s,m_used";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:?},{},{},{},{},{},{},{},{},{}",
                r.axis1,
                opt(r.axis2),
                r.report.phase,
                opt(r.phi_analytic),
                opt(r.phi_numeric),
                opt(r.gap),
                opt(r.entropy),
                opt(r.report.r_tilde),
                opt(r.report.lambda_tilde_s),
                r.m_used
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "metadata": {
                "template": self.template,
                "axis1": self.axis1,
                "axis2": self.axis2,
                "m_policy": self.m_policy,
                "code_version": env!("CARGO_PKG_VERSION"),
                "methods": {
                    "phi_analytic": "classical-oscillator-limit closed form, lab-frame convention",
                    "phi_numeric": "squeezed-frame order-parameter formula on the exact H_s ground state",
                    "entropy": "boson-spin von Neumann entropy of the exact ground state, bits",
                },
            },
            "records": self.records,
        })
    }

    /// `(axis1 values, numeric phi)` at column `j` of the second axis,
    /// skipping points without a numeric value.
    pub fn slice(&self, j: usize) -> (Vec<f64>, Vec<f64>) {
        let width = self.records.len() / self.axis1_len();
        self.records
            .iter()
            .skip(j)
            .step_by(width.max(1))
            .filter_map(|r| r.phi_numeric.map(|phi| (r.axis1, phi)))
            .unzip()
    }

    fn axis1_len(&self) -> usize {
        self.axis1.values().map(|v| v.len()).unwrap_or(1).max(1)
    }
}

/// Peak criterion used to locate the transition on a 1-D slice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    /// Maximum of `|d ln phi / d lambda|`. In the reversed transition `phi`
    /// grows without bound toward the unstable line, so the plain derivative
    /// peaks at the slice edge instead of at the kink.
    #[default]
    LogDerivative,
    /// Maximum of `|d phi / d lambda|`.
    Derivative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CriticalPoint {
    Found {
        lambda_tilde: f64,
        /// Grid spacing around the peak.
        uncertainty: f64,
        detector: Detector,
    },
    NotFound {
        reason: String,
    },
}

impl CriticalPoint {
    pub fn lambda_tilde(&self) -> Option<f64> {
        match self {
            Self::Found { lambda_tilde, .. } => Some(*lambda_tilde),
            Self::NotFound { .. } => None,
        }
    }
}

/// Order parameter below which a slice is treated as having no ordered region.
pub const ORDERED_PHI: f64 = 0.02;
/// Values below this are clamped before taking logarithms (analytic NP points are exactly zero).
const PHI_FLOOR: f64 = 1e-12;

/// Locates the transition on a slice `(lambda_i, phi_i)` sorted by lambda,
/// using central differences on a possibly non-uniform grid.
pub fn detect_critical_point(lambdas: &[f64], phis: &[f64], detector: Detector) -> Result<CriticalPoint> {
    if lambdas.len() != phis.len() {
        return Err(Error::DimensionMismatch {
            expected: lambdas.len(),
            found: phis.len(),
        });
    }
    if lambdas.len() < 20 {
        return Err(Error::precondition("critical-point detection needs at least 20 points"));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("slice must be strictly increasing in lambda"));
    }
    let peak_phi = phis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak_phi < ORDERED_PHI {
        return Ok(CriticalPoint::NotFound {
            reason: format!("order parameter never exceeds {ORDERED_PHI} (max {peak_phi:.3e})"),
        });
    }
    let f: Vec<f64> = match detector {
        Detector::LogDerivative => phis.iter().map(|p| p.max(PHI_FLOOR).ln()).collect(),
        Detector::Derivative => phis.to_vec(),
    };
    let (mut best, mut at) = (f64::NEG_INFINITY, 1);
    for i in 1..lambdas.len() - 1 {
        let d = ((f[i + 1] - f[i - 1]) / (lambdas[i + 1] - lambdas[i - 1])).abs();
        if d > best {
            best = d;
            at = i;
        }
    }
    let uncertainty = (lambdas[at] - lambdas[at - 1]).max(lambdas[at + 1] - lambdas[at]);
    Ok(CriticalPoint::Found {
        lambda_tilde: lambdas[at],
        uncertainty,
        detector,
    })
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
    pub stderr: f64,
    pub r_squared: f64,
}

pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerLaw> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::precondition("a power-law fit needs at least three points"));
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::validation("power-law data must be finite and positive"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::validation("power-law fit needs at least two distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    let stderr = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(PowerLaw {
        exponent: slope,
        prefactor: intercept.exp(),
        stderr,
        r_squared,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    pub lambda_tilde: f64,
    pub ratios: Vec<f64>,
    pub phi_at_critical: Vec<f64>,
    pub m_used: Vec<usize>,
    pub gamma: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub warnings: Vec<String>,
}

/// Fits `phi(lambda_c) ~ (Omega/omega)^gamma` with the template moved to the
/// closed-form critical coupling of its `(alpha, xi/omega)`.
pub fn fit_scaling_exponent(template: &ModelParams, ratios: &[f64], policy: MPolicy) -> Result<ScalingFit> {
    if ratios.len() < 4 {
        return Err(Error::precondition("scaling fit needs at least four ratios"));
    }
    if ratios.windows(2).any(|w| w[1] <= w[0]) || ratios[0] <= 0.0 {
        return Err(Error::validation("ratios must be positive and strictly increasing"));
    }
    let lc = analytic::critical_coupling(template.alpha, template.xi_over_omega).ok_or_else(|| {
        Error::precondition(format!(
            "no critical coupling at alpha = {}, xi/omega = {}",
            template.alpha, template.xi_over_omega
        ))
    })?;
    let base = template.with_lambda_tilde(lc);
    let evaluated: Vec<(f64, usize, Result<f64>)> = ratios
        .par_iter()
        .map(|&r| {
            let m = policy.boson_dim(r);
            let p = base.with_ratio(r).with_boson_dim(m);
            let phi = squeezed_frame_ground_state(&p).and_then(|g| measured_order_parameter(&p, &g.state));
            (r, m, phi)
        })
        .collect();
    let mut warnings = Vec::new();
    let (mut xs, mut ys, mut ms) = (Vec::new(), Vec::new(), Vec::new());
    for (r, m, phi) in evaluated {
        match phi {
            Ok(v) if v > 0.0 && v.is_finite() => {
                xs.push(r);
                ys.push(v);
                ms.push(m);
            }
            Ok(v) => warnings.push(format!("ratio {r}: non-positive order parameter {v:.3e} dropped")),
            Err(e) => warnings.push(format!("ratio {r}: {e}")),
        }
    }
    if xs.len() < 4 {
        return Err(Error::numeric(
            format!(
                "only {} usable points for the scaling fit: {}",
                xs.len(),
                warnings.join("; ")
            ),
            0,
        ));
    }
    let fit = fit_power_law(&xs, &ys)?;
    Ok(ScalingFit {
        lambda_tilde: lc,
        ratios: xs,
        phi_at_critical: ys,
        m_used: ms,
        gamma: fit.exponent,
        stderr: fit.stderr,
        r_squared: fit.r_squared,
        warnings,
    })
}
