//! Run configuration: the merged view of a config file and command-line flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spt_core::groundstate::Ramp;
use spt_core::model::{Diagnostic, ModelParams, Severity};
use spt_core::noise::ChannelOrder;
use spt_core::sweep::{Axis, AxisParameter, Detector, MPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Phase,
    GroundState,
    Adiabatic,
    Zpf,
    Wigner,
    Sweep,
    Scaling,
    NoiseStudy,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Phase => "phase",
            Self::GroundState => "ground-state",
            Self::Adiabatic => "adiabatic",
            Self::Zpf => "zpf",
            Self::Wigner => "wigner",
            Self::Sweep => "sweep",
            Self::Scaling => "scaling",
            Self::NoiseStudy => "noise-study",
        }
    }

    pub fn default_format(self) -> Format {
        match self {
            Self::Adiabatic | Self::Wigner | Self::Sweep => Format::Csv,
            _ => Format::Json,
        }
    }

    pub fn supports(self, f: Format) -> bool {
        f == Format::Json || !matches!(self, Self::Phase | Self::Zpf | Self::NoiseStudy)
    }

    /// Model fields that must be present (after defaults) for this command.
    fn required_params(self) -> &'static [&'static str] {
        const ALL: &[&str] = &["ratio", "lambda_tilde", "alpha", "xi_over_omega", "boson_dim"];
        match self {
            Self::Phase => &["lambda_tilde", "alpha", "xi_over_omega"],
            Self::Zpf => &["xi_over_omega", "boson_dim"],
            Self::Scaling => &["alpha", "xi_over_omega"],
            Self::Sweep => &["ratio", "lambda_tilde", "alpha", "xi_over_omega"],
            Self::GroundState | Self::Adiabatic | Self::Wigner | Self::NoiseStudy => ALL,
        }
    }

    fn accepted_options(self) -> &'static [&'static str] {
        match self {
            Self::Phase | Self::Zpf => &[],
            Self::GroundState => &[],
            Self::Adiabatic => &["steps", "dt", "ramp"],
            Self::Wigner => &["state", "frame", "x_min", "x_max", "p_min", "p_max", "nx", "np"],
            Self::Sweep => &["axis1", "axis2", "m_min", "m_factor", "detector"],
            Self::Scaling => &["ratios", "m_min", "m_factor"],
            Self::NoiseStudy => &["t1", "t2", "exposure", "p_gad", "order"],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Which boson state `wigner` renders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StateSource {
    /// Boson reduction of the exact ground state.
    Exact,
    CatEven,
    CatOdd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Squeezed,
}

/// Model fields, each optional until validation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_tilde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_over_omega: Option<f64>,
    /// Signed so that a negative value is reported as a diagnostic rather
    /// than a parse failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boson_dim: Option<i64>,
}

impl PartialParams {
    fn is_set(&self, field: &str) -> bool {
        match field {
            "omega" => self.omega.is_some(),
            "ratio" => self.ratio.is_some(),
            "lambda_tilde" => self.lambda_tilde.is_some(),
            "alpha" => self.alpha.is_some(),
            "xi_over_omega" => self.xi_over_omega.is_some(),
            "boson_dim" => self.boson_dim.is_some(),
            _ => false,
        }
    }

    fn merge(&mut self, o: &Self) {
        macro_rules! take {
            ($($f:ident),*) => { $( if o.$f.is_some() { self.$f = o.$f; } )* };
        }
        take!(omega, ratio, lambda_tilde, alpha, xi_over_omega, boson_dim);
    }

    /// Fills unset fields with inert placeholders so per-field checks can run.
    fn with_placeholders(&self) -> ModelParams {
        ModelParams {
            omega: self.omega.unwrap_or(1.0),
            ratio: self.ratio.unwrap_or(1.0),
            lambda_tilde: self.lambda_tilde.unwrap_or(0.0),
            alpha: self.alpha.unwrap_or(0.0),
            xi_over_omega: self.xi_over_omega.unwrap_or(0.0),
            boson_dim: self.boson_dim.map_or(2, |m| m.max(0) as usize),
        }
    }
}

/// Command-specific settings; each command reads the subset it understands.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp: Option<Ramp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Frame>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub np: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis1: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_min: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<Detector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exposure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_gad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<ChannelOrder>,
}

impl Options {
    fn set_fields(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $( if self.$f.is_some() { v.push(stringify!($f)); } )* };
        }
        check!(
            steps, dt, ramp, state, frame, x_min, x_max, p_min, p_max, nx, np, axis1, axis2, m_min, m_factor, detector,
            ratios, t1, t2, exposure, p_gad, order
        );
        v
    }

    fn merge(&mut self, o: &Self) {
        macro_rules! take {
            ($($f:ident),*) => { $( if o.$f.is_some() { self.$f = o.$f.clone(); } )* };
        }
        take!(
            steps, dt, ramp, state, frame, x_min, x_max, p_min, p_max, nx, np, axis1, axis2, m_min, m_factor, detector,
            ratios, t1, t2, exposure, p_gad, order
        );
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    #[serde(default)]
    pub params: PartialParams,
    #[serde(default)]
    pub options: Options,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    /// Overlays every field set in `flags` onto `self`.
    pub fn merge(&mut self, flags: &RunConfig) {
        if flags.command.is_some() {
            self.command = flags.command;
        }
        self.params.merge(&flags.params);
        self.options.merge(&flags.options);
        if flags.output.is_some() {
            self.output = flags.output.clone();
        }
        if flags.format.is_some() {
            self.format = flags.format;
        }
    }

    /// Parses a config file: either a bare `RunConfig` or a manifest written
    /// by a previous run, whose `config` entry is used.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let inner = match value.get("manifest_version") {
            Some(_) => value.get("config").cloned().ok_or("manifest has no `config` entry")?,
            None => value,
        };
        serde_json::from_value(inner).map_err(|e| e.to_string())
    }

    /// Applies per-command defaults so the stored config fully determines the run.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        let Some(cmd) = c.command else { return c };
        c.params.omega.get_or_insert(1.0);
        if cmd == CommandName::Phase {
            c.params.ratio.get_or_insert(1.0);
        }
        if c.format.is_none() {
            c.format = Some(cmd.default_format());
        }
        let o = &mut c.options;
        match cmd {
            CommandName::Adiabatic => {
                o.steps.get_or_insert(200);
                o.dt.get_or_insert(0.5);
                o.ramp.get_or_insert(Ramp::Linear);
            }
            CommandName::Wigner => {
                o.state.get_or_insert(StateSource::Exact);
                o.frame.get_or_insert(Frame::Lab);
            }
            CommandName::Sweep => {
                o.detector.get_or_insert(Detector::default());
            }
            CommandName::NoiseStudy => {
                o.p_gad.get_or_insert(0.5);
                o.order.get_or_insert(ChannelOrder::default());
            }
            _ => {}
        }
        if matches!(cmd, CommandName::Sweep | CommandName::Scaling) && c.params.boson_dim.is_none() {
            let MPolicy::Scaled { min, factor } = MPolicy::default() else {
                unreachable!()
            };
            o.m_min.get_or_insert(min);
            o.m_factor.get_or_insert(factor);
        }
        c
    }

    /// Truncation policy for sweep-like commands: a fixed `boson_dim` wins.
    pub fn m_policy(&self) -> MPolicy {
        match self.params.boson_dim {
            Some(m) => MPolicy::Fixed(m.max(0) as usize),
            None => {
                let MPolicy::Scaled { min, factor } = MPolicy::default() else {
                    unreachable!()
                };
                MPolicy::Scaled {
                    min: self.options.m_min.unwrap_or(min),
                    factor: self.options.m_factor.unwrap_or(factor),
                }
            }
        }
    }

    /// Fully populated model parameters; call after [`validate`] reports no errors.
    pub fn model(&self) -> ModelParams {
        self.params.with_placeholders()
    }
}

fn axis_fields(c: &RunConfig) -> Vec<&'static str> {
    [&c.options.axis1, &c.options.axis2]
        .into_iter()
        .flatten()
        .map(|a| a.parameter.name())
        .collect()
}

/// Every problem with `config`, collected rather than stopping at the first.
pub fn validate(config: &RunConfig) -> Vec<Diagnostic> {
    let c = config.resolved();
    let mut out = Vec::new();
    let Some(cmd) = c.command else {
        out.push(Diagnostic::error("command", "no command given"));
        for f in ["ratio", "lambda_tilde", "alpha", "xi_over_omega", "boson_dim"] {
            if !c.params.is_set(f) {
                out.push(Diagnostic::error(f, "required field is missing"));
            }
        }
        return out;
    };
    let swept = axis_fields(&c);
    for &f in cmd.required_params() {
        if !c.params.is_set(f) && !swept.contains(&f) {
            out.push(Diagnostic::error(f, format!("required by `{}`", cmd.as_str())));
        }
    }
    if let Some(m) = c.params.boson_dim {
        if m < 2 {
            out.push(Diagnostic::error("boson_dim", format!("must be at least 2, got {m}")));
        }
    }
    let placeholder = c.params.with_placeholders();
    for d in placeholder.diagnostics() {
        match &d.field {
            Some(f) if f == "boson_dim" => {} // reported above from the signed value
            Some(f) if c.params.is_set(f) => out.push(d),
            Some(_) => {}
            None => {
                let relevant = ["lambda_tilde", "alpha", "xi_over_omega"]
                    .iter()
                    .all(|f| c.params.is_set(f));
                if relevant && cmd != CommandName::Zpf {
                    out.push(d);
                }
            }
        }
    }
    if let Some(m) = placeholder
        .boson_dim
        .checked_sub(0)
        .filter(|_| c.params.boson_dim.is_some())
    {
        if matches!(cmd, CommandName::Adiabatic | CommandName::NoiseStudy) && m >= 2 && !m.is_power_of_two() {
            out.push(Diagnostic::error(
                "boson_dim",
                format!(
                    "`{}` maps the boson onto qubits, so boson_dim must be a power of two",
                    cmd.as_str()
                ),
            ));
        }
    }
    for f in c.options.set_fields() {
        if !cmd.accepted_options().contains(&f) {
            out.push(Diagnostic::warning(Some(f), format!("ignored by `{}`", cmd.as_str())));
        }
    }
    if let Some(fmt) = c.format {
        if !cmd.supports(fmt) {
            out.push(Diagnostic::error(
                "format",
                format!("`{}` only writes json", cmd.as_str()),
            ));
        }
    }
    command_checks(cmd, &c, &mut out);
    out
}

fn command_checks(cmd: CommandName, c: &RunConfig, out: &mut Vec<Diagnostic>) {
    let o = &c.options;
    let positive = |name: &str, v: Option<f64>, out: &mut Vec<Diagnostic>| {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                out.push(Diagnostic::error(name, format!("must be positive, got {v}")));
            }
        }
    };
    match cmd {
        CommandName::Adiabatic => {
            if o.steps == Some(0) {
                out.push(Diagnostic::error("steps", "must be at least 1"));
            }
            if let Some(dt) = o.dt {
                if !(dt.is_finite() && dt >= 0.0) {
                    out.push(Diagnostic::error("dt", format!("must be non-negative, got {dt}")));
                }
            }
        }
        CommandName::Wigner => {
            for (name, v) in [("nx", o.nx), ("np", o.np)] {
                if v.is_some_and(|n| n < 2) {
                    out.push(Diagnostic::error(name, "needs at least 2 points"));
                }
            }
            for (lo, hi, name) in [(o.x_min, o.x_max, "x_max"), (o.p_min, o.p_max, "p_max")] {
                if let (Some(lo), Some(hi)) = (lo, hi) {
                    if hi <= lo {
                        out.push(Diagnostic::error(name, "must exceed the matching minimum"));
                    }
                }
            }
            let given = [o.x_min, o.x_max, o.p_min, o.p_max]
                .iter()
                .filter(|v| v.is_some())
                .count();
            if given != 0 && given != 4 {
                out.push(Diagnostic::error(
                    "x_min",
                    "give all of x_min, x_max, p_min, p_max or none (automatic grid)",
                ));
            }
        }
        CommandName::Sweep => {
            match &o.axis1 {
                None => out.push(Diagnostic::error("axis1", "required by `sweep`")),
                Some(a) => {
                    if let Err(e) = a.values() {
                        out.push(Diagnostic::error("axis1", e.to_string()));
                    }
                }
            }
            if let Some(a) = &o.axis2 {
                if let Err(e) = a.values() {
                    out.push(Diagnostic::error("axis2", e.to_string()));
                }
                if o.axis1.as_ref().is_some_and(|b| b.parameter == a.parameter) {
                    out.push(Diagnostic::error("axis2", "must vary a different parameter than axis1"));
                }
            }
            positive("m_factor", o.m_factor, out);
        }
        CommandName::Scaling => {
            match &o.ratios {
                None => out.push(Diagnostic::error("ratios", "required by `scaling`")),
                Some(r) if r.len() < 4 => out.push(Diagnostic::error("ratios", "needs at least four values")),
                Some(r) if r.windows(2).any(|w| w[1] <= w[0]) || r[0] <= 0.0 => {
                    out.push(Diagnostic::error("ratios", "must be positive and strictly increasing"))
                }
                _ => {}
            }
            positive("m_factor", o.m_factor, out);
            for (name, v) in [("lambda_tilde", c.params.lambda_tilde), ("ratio", c.params.ratio)] {
                if v.is_some() {
                    out.push(Diagnostic::warning(
                        Some(name),
                        "ignored by `scaling`, which evaluates at the critical coupling for each of `ratios`",
                    ));
                }
            }
            if let (Some(a), Some(x)) = (c.params.alpha, c.params.xi_over_omega) {
                if spt_core::analytic::critical_coupling(a, x).is_none() {
                    out.push(Diagnostic::error(
                        "alpha",
                        format!("no critical coupling exists at alpha = {a}, xi/omega = {x}"),
                    ));
                }
            }
        }
        CommandName::NoiseStudy => {
            for (name, v) in [("t1", &o.t1), ("t2", &o.t2)] {
                match v {
                    None => out.push(Diagnostic::error(name, "required by `noise-study`")),
                    Some(v) if v.is_empty() || v.iter().any(|t| !(t.is_finite() && *t > 0.0)) => {
                        out.push(Diagnostic::error(name, "must list positive times"))
                    }
                    Some(v) => {
                        if let Some(m) = c.params.boson_dim.filter(|m| *m >= 2 && (*m as u64).is_power_of_two()) {
                            let qubits = (m as u64).trailing_zeros() as usize + 1;
                            if v.len() != 1 && v.len() != qubits {
                                out.push(Diagnostic::error(
                                    name,
                                    format!("give one value or one per qubit ({qubits}), got {}", v.len()),
                                ));
                            }
                        }
                    }
                }
            }
            match o.exposure {
                None => out.push(Diagnostic::error("exposure", "required by `noise-study`")),
                v => positive("exposure", v, out),
            }
            if let Some(p) = o.p_gad {
                if !(0.0..=1.0).contains(&p) {
                    out.push(Diagnostic::error("p_gad", "must lie in [0, 1]"));
                }
            }
        }
        CommandName::Zpf => {
            if let Some(x) = c.params.xi_over_omega {
                if 1.0 - 4.0 * x <= 0.0 {
                    out.push(Diagnostic::error(
                        "xi_over_omega",
                        "the bare oscillator is unstable for 4 xi/omega >= 1",
                    ));
                }
            }
        }
        CommandName::Phase | CommandName::GroundState => {}
    }
}

pub fn has_errors(ds: &[Diagnostic]) -> bool {
    ds.iter().any(|d| d.severity == Severity::Error)
}

/// Parses `name=start:stop:count` or `name=v1,v2,...`.
pub fn parse_axis(s: &str) -> Result<Axis, String> {
    let (name, spec) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=START:STOP:COUNT or NAME=V1,V2,..., got `{s}`"))?;
    let parameter = match name.trim().replace('-', "_").as_str() {
        "lambda_tilde" => AxisParameter::LambdaTilde,
        "ratio" => AxisParameter::Ratio,
        "xi_over_omega" => AxisParameter::XiOverOmega,
        "alpha" => AxisParameter::Alpha,
        other => return Err(format!("unknown axis parameter `{other}`")),
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    if let [start, stop, count] = spec.split(':').collect::<Vec<_>>()[..] {
        let count = count.trim().parse::<usize>().map_err(|e| format!("`{count}`: {e}"))?;
        return Ok(Axis::uniform(parameter, num(start)?, num(stop)?, count));
    }
    let values = spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
    Ok(Axis::explicit(parameter, values))
}
