//! One function per subcommand, each turning a validated config into an artifact.

use serde::Serialize;
use serde_json::{json, Value};
use spt_core::analytic::{self, AnalyticOptions, SpBranch};
use spt_core::groundstate::{self, AdiabaticSchedule};
use spt_core::linalg::partial_trace;
use spt_core::model::{boson, ModelParams};
use spt_core::noise::{self, NoiseParams};
use spt_core::observables::{self, GridSpec};
use spt_core::sweep::{self, AxisParameter, CriticalPoint};
use spt_core::{QuantumState, Result};

use crate::config::{CommandName, Format, Frame, RunConfig, StateSource};

/// Rendered artifact body.
pub type Artifact = String;

fn pretty<T: Serialize>(v: &T) -> Artifact {
    let mut s = serde_json::to_string_pretty(v).expect("artifact values serialize");
    s.push('\n');
    s
}

/// Runs the configured command. `config` must be resolved and validated.
pub fn execute(config: &RunConfig) -> Result<Artifact> {
    let cmd = config.command.expect("validated config has a command");
    let format = config.format.unwrap_or(cmd.default_format());
    let p = config.model();
    match cmd {
        CommandName::Phase => Ok(pretty(&analytic::classify_phase(&p))),
        CommandName::Zpf => zpf(&p),
        CommandName::GroundState => ground_state(&p),
        CommandName::Adiabatic => adiabatic(config, &p, format),
        CommandName::Wigner => wigner(config, &p, format),
        CommandName::Sweep => sweep_cmd(config, &p, format),
        CommandName::Scaling => scaling(config, &p, format),
        CommandName::NoiseStudy => noise_study(config, &p),
    }
}

fn zpf(p: &ModelParams) -> Result<Artifact> {
    let g = groundstate::antisqueezed_oscillator_ground_state(p.xi_over_omega, p.boson_dim)?;
    let numeric = observables::zpf(&g.state)?;
    Ok(pretty(&json!({
        "xi_over_omega": p.xi_over_omega,
        "boson_dim": p.boson_dim,
        "zpf": numeric,
        "zpf_closed_form": 0.5 * (1.0 - 4.0 * p.xi_over_omega).powf(-0.25),
        "ground_energy": g.energy,
    })))
}

fn ground_state(p: &ModelParams) -> Result<Artifact> {
    let report = analytic::classify_phase(p);
    let g = groundstate::squeezed_frame_ground_state(p)?;
    let boson = partial_trace(&g.state, 0)?;
    let out = json!({
        "params": p,
        "report": report,
        "frame": "squeezed",
        "energy": g.energy,
        "gap": g.gap,
        "near_degenerate": g.near_degenerate,
        "phi_numeric": groundstate::measured_order_parameter(p, &g.state)?,
        "entropy": observables::entanglement_entropy(&g.state)?,
        "zpf_squeezed_frame": observables::zpf(&boson)?,
        "fock_tail_weight": boson::tail_weight(&fock_populations(&boson), p.boson_dim / 10),
    });
    Ok(pretty(&out))
}

/// Square roots of the Fock populations, so tail weights can be read off with
/// the same helper used for pure vectors.
fn fock_populations(boson: &QuantumState) -> Vec<spt_core::C64> {
    boson
        .density_matrix()
        .diagonal()
        .into_iter()
        .map(|d| spt_core::C64::new(d.re.max(0.0).sqrt(), 0.0))
        .collect()
}

fn adiabatic(c: &RunConfig, p: &ModelParams, format: Format) -> Result<Artifact> {
    let sched = AdiabaticSchedule {
        steps: c.options.steps.unwrap_or(200),
        dt: c.options.dt.unwrap_or(0.5),
        ramp: c.options.ramp.unwrap_or_default(),
    };
    let r = groundstate::adiabatic_prepare(p, &sched)?;
    Ok(match format {
        Format::Csv => r.to_csv(),
        Format::Json => pretty(&json!({
            "params": p,
            "schedule": sched,
            "final_fidelity": r.final_fidelity,
            "s": r.s_trace,
            "energy": r.energy_trace,
            "fidelity": r.fidelity_trace,
        })),
    })
}

fn wigner_state(c: &RunConfig, p: &ModelParams) -> Result<QuantumState> {
    let frame = c.options.frame.unwrap_or(Frame::Lab);
    match c.options.state.unwrap_or(StateSource::Exact) {
        StateSource::Exact => {
            let g = groundstate::squeezed_frame_ground_state(p)?;
            let rho = partial_trace(&g.state, 0)?;
            match frame {
                Frame::Squeezed => Ok(rho),
                Frame::Lab => {
                    let r = spt_core::model::squeezed_frame(p).stable()?.r_tilde;
                    let s = boson::squeezing_operator(r, p.boson_dim)?;
                    QuantumState::density(vec![p.boson_dim], rho.density_matrix().conjugate_by(&s))
                }
            }
        }
        src => {
            let branch = if src == StateSource::CatEven {
                SpBranch::CatEven
            } else {
                SpBranch::CatOdd
            };
            let opts = AnalyticOptions {
                squeezed_frame_states: frame == Frame::Squeezed,
                ..AnalyticOptions::default()
            };
            analytic::ground_state_sp_with(p, p.boson_dim, branch, opts)
        }
    }
}

fn wigner(c: &RunConfig, p: &ModelParams, format: Format) -> Result<Artifact> {
    let state = wigner_state(c, p)?;
    let o = &c.options;
    let mut grid = match (o.x_min, o.x_max, o.p_min, o.p_max) {
        (Some(x_min), Some(x_max), Some(p_min), Some(p_max)) => GridSpec {
            x_min,
            x_max,
            p_min,
            p_max,
            nx: 101,
            np: 101,
        },
        _ => GridSpec::auto(&state)?,
    };
    grid.nx = o.nx.unwrap_or(grid.nx);
    grid.np = o.np.unwrap_or(grid.np);
    let w = observables::wigner(&state, &grid)?;
    for warning in &w.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(match format {
        Format::Csv => w.to_csv(),
        Format::Json => pretty(&w.to_json()),
    })
}

fn sweep_cmd(c: &RunConfig, p: &ModelParams, format: Format) -> Result<Artifact> {
    let axis1 = c.options.axis1.as_ref().expect("validated sweep has axis1");
    let grid = sweep::run_sweep(p, axis1, c.options.axis2.as_ref(), c.m_policy())?;
    for r in grid.records.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: point ({}, {:?}): {}",
            r.axis1,
            r.axis2,
            r.error.as_deref().unwrap_or("")
        );
    }
    if format == Format::Csv {
        return Ok(grid.to_csv());
    }
    let mut doc = grid.to_json();
    if axis1.parameter == AxisParameter::LambdaTilde && grid.axis2.is_none() {
        let (lambdas, phis) = grid.slice(0);
        let detector = c.options.detector.unwrap_or_default();
        let found = sweep::detect_critical_point(&lambdas, &phis, detector)
            .unwrap_or_else(|e| CriticalPoint::NotFound { reason: e.to_string() });
        doc["critical_point"] = serde_json::to_value(found).expect("serializable");
        doc["critical_point_closed_form"] = json!(analytic::critical_coupling(p.alpha, p.xi_over_omega));
    }
    Ok(pretty(&doc))
}

fn scaling(c: &RunConfig, p: &ModelParams, format: Format) -> Result<Artifact> {
    let ratios = c.options.ratios.as_deref().expect("validated scaling has ratios");
    // The ratio and coupling of the template are overwritten per point.
    let template = p.with_ratio(ratios[0]);
    let fit = sweep::fit_scaling_exponent(&template, ratios, c.m_policy())?;
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
    Ok(match format {
        Format::Json => pretty(&fit),
        Format::Csv => {
            let mut out = String::from("ratio,phi,m_used\n");
            for ((r, phi), m) in fit.ratios.iter().zip(&fit.phi_at_critical).zip(&fit.m_used) {
                out.push_str(&format!("{r},{phi},{m}\n"));
            }
            out
        }
    })
}

fn noise_study(c: &RunConfig, p: &ModelParams) -> Result<Artifact> {
    let o = &c.options;
    let qubits = p.boson_dim.trailing_zeros() as usize + 1;
    let spread = |v: &[f64]| if v.len() == 1 { vec![v[0]; qubits] } else { v.to_vec() };
    let np = NoiseParams {
        p_gad: o.p_gad.unwrap_or(0.5),
        order: o.order.unwrap_or_default(),
        ..NoiseParams::new(
            spread(o.t1.as_deref().unwrap_or_default()),
            spread(o.t2.as_deref().unwrap_or_default()),
            o.exposure.unwrap_or_default(),
        )?
    };
    let g = groundstate::squeezed_frame_ground_state(p)?;
    let noisy = noise::apply_all_qubits(&g.state, &np)?;
    let phi_ideal = groundstate::measured_order_parameter(p, &g.state)?;
    let phi_noisy = groundstate::measured_order_parameter(p, &noisy)?;
    let out: Value = json!({
        "params": p,
        "noise": np,
        "n_qubits": qubits,
        "phi_ideal": phi_ideal,
        "phi_noisy": phi_noisy,
        "fidelity": noisy.fidelity(&g.state)?,
        "purity": noisy.purity(),
        "dephasing_probability": (0..qubits).map(|q| np.dephasing_probability(q)).collect::<Vec<_>>(),
        "damping_strength": (0..qubits).map(|q| np.damping_strength(q)).collect::<Vec<_>>(),
    });
    Ok(pretty(&out))
}
