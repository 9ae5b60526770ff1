//! Command-line flags. Names mirror the config fields with dashes.

use std::path::PathBuf;

use clap::Parser;
use serde::de::DeserializeOwned;
use spt_core::groundstate::Ramp;
use spt_core::noise::ChannelOrder;
use spt_core::sweep::{Axis, Detector};

use crate::config::{parse_axis, CommandName, Format, Frame, Options, PartialParams, RunConfig, StateSource};

/// Reads a snake_case serde enum from a dashed or underscored flag value.
fn serde_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "spt-sim",
    version,
    about = "Rabi-model phase diagrams, ground states and noise studies"
)]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// Command to run; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<CommandName>,

    /// JSON RunConfig, or a manifest from an earlier run. Flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Artifact path; stdout when absent. A manifest is written next to it.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Artifact format; defaults to csv for tabular commands, json otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Print diagnostics and exit without running.
    #[arg(long)]
    pub validate_only: bool,

    /// Spin splitting Omega (default 1).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Frequency ratio Omega/omega.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Rescaled coupling.
    #[arg(long)]
    pub lambda_tilde: Option<f64>,
    /// Weight of the quadratic term alpha lambda^2/Omega (a + a†)^2.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Two-photon drive amplitude in units of omega.
    #[arg(long)]
    pub xi_over_omega: Option<f64>,
    /// Fock-space truncation M.
    #[arg(long)]
    pub boson_dim: Option<i64>,

    /// Number of ramp steps (default 200).
    #[arg(long, help_heading = "adiabatic")]
    pub steps: Option<usize>,
    /// Time step in units of 1/omega (default 0.5).
    #[arg(long, help_heading = "adiabatic")]
    pub dt: Option<f64>,
    /// linear or smoothstep.
    #[arg(long, value_parser = serde_enum::<Ramp>, help_heading = "adiabatic")]
    pub ramp: Option<Ramp>,

    /// State to transform (default exact).
    #[arg(long, value_enum, help_heading = "wigner")]
    pub state: Option<StateSource>,
    /// Frame of the Wigner function (default lab).
    #[arg(long, value_enum, help_heading = "wigner")]
    pub frame: Option<Frame>,
    /// Grid bounds; all four must be given, otherwise the grid is sized from the state.
    #[arg(long, help_heading = "wigner")]
    pub x_min: Option<f64>,
    #[arg(long, help_heading = "wigner")]
    pub x_max: Option<f64>,
    #[arg(long, help_heading = "wigner")]
    pub p_min: Option<f64>,
    #[arg(long, help_heading = "wigner")]
    pub p_max: Option<f64>,
    /// Grid points along x.
    #[arg(long, help_heading = "wigner")]
    pub nx: Option<usize>,
    /// Grid points along p.
    #[arg(long, help_heading = "wigner")]
    pub np: Option<usize>,

    /// NAME=START:STOP:COUNT or NAME=V1,V2,...
    #[arg(long, value_parser = parse_axis, help_heading = "sweep")]
    pub axis1: Option<Axis>,
    /// Optional second axis, same syntax as --axis1.
    #[arg(long, value_parser = parse_axis, help_heading = "sweep")]
    pub axis2: Option<Axis>,
    /// Smallest truncation of the scaled policy max(m_min, round(m_factor sqrt(ratio))).
    #[arg(long, help_heading = "sweep")]
    pub m_min: Option<usize>,
    /// Growth factor of the scaled truncation policy.
    #[arg(long, help_heading = "sweep")]
    pub m_factor: Option<f64>,
    /// log-derivative or derivative.
    #[arg(long, value_parser = serde_enum::<Detector>, help_heading = "sweep")]
    pub detector: Option<Detector>,

    /// Comma-separated frequency ratios.
    #[arg(long, value_delimiter = ',', help_heading = "scaling")]
    pub ratios: Option<Vec<f64>>,

    /// One value for every qubit, or one per qubit (two-level system first).
    #[arg(long, value_delimiter = ',', help_heading = "noise-study")]
    pub t1: Option<Vec<f64>>,
    /// Dephasing times, broadcast like --t1.
    #[arg(long, value_delimiter = ',', help_heading = "noise-study")]
    pub t2: Option<Vec<f64>>,
    /// Time the state is exposed to the channels.
    #[arg(long, help_heading = "noise-study")]
    pub exposure: Option<f64>,
    /// Excited-state population of the damping bath (default 0.5).
    #[arg(long, help_heading = "noise-study")]
    pub p_gad: Option<f64>,
    /// pd-then-gad or gad-then-pd.
    #[arg(long, value_parser = serde_enum::<ChannelOrder>, help_heading = "noise-study")]
    pub order: Option<ChannelOrder>,
}

impl Cli {
    /// The flags as a sparse config, ready to overlay on a file.
    pub fn to_config(&self) -> RunConfig {
        RunConfig {
            command: self.command,
            params: PartialParams {
                omega: self.omega,
                ratio: self.ratio,
                lambda_tilde: self.lambda_tilde,
                alpha: self.alpha,
                xi_over_omega: self.xi_over_omega,
                boson_dim: self.boson_dim,
            },
            options: Options {
                steps: self.steps,
                dt: self.dt,
                ramp: self.ramp,
                state: self.state,
                frame: self.frame,
                x_min: self.x_min,
                x_max: self.x_max,
                p_min: self.p_min,
                p_max: self.p_max,
                nx: self.nx,
                np: self.np,
                axis1: self.axis1.clone(),
                axis2: self.axis2.clone(),
                m_min: self.m_min,
                m_factor: self.m_factor,
                detector: self.detector,
                ratios: self.ratios.clone(),
                t1: self.t1.clone(),
                t2: self.t2.clone(),
                exposure: self.exposure,
                p_gad: self.p_gad,
                order: self.order,
            },
            output: self.output.clone(),
            format: self.format,
        }
    }
}
