//! Sweep evaluation: one row of requested metrics per grid point,
//! evaluated by a worker pool and assembled strictly in input order.

use catalynet::homodyne;
use catalynet::loss;
use catalynet::metrics;
use catalynet::probes::{self, ProbeSpec, UncatalyzedFamily};
use catalynet::Error as CoreError;
use rayon::prelude::*;

use crate::config::SweepConfig;

/// Apply the swept parameter to a probe/reference pair. `n_resource`
/// solves both amplitudes from the shared resource budget.
fn apply_parameter(
    base: &ProbeSpec,
    reference: Option<&ProbeSpec>,
    parameter: &str,
    value: f64,
) -> Result<(ProbeSpec, Option<ProbeSpec>), CoreError> {
    let mut probe = *base;
    let mut rf = reference.copied();
    match parameter {
        "amplitude" => {
            probe.amplitude = value;
            if let Some(r) = rf.as_mut() {
                r.amplitude = value;
            }
        }
        "theta" => probe.theta = value,
        "m" => probe.m = value.round() as usize,
        "d" => {
            probe.d = value.round() as usize;
            if probe.s > probe.d {
                probe.s = probe.d;
            }
            if let Some(r) = rf.as_mut() {
                r.d = probe.d;
            }
        }
        "s" => probe.s = value.round() as usize,
        "n_resource" => {
            let fam = if probe.family.is_coherent() {
                UncatalyzedFamily::Wc
            } else {
                UncatalyzedFamily::Ws
            };
            let amp = probes::solve_amplitude_for_resource(value, probe.d, fam)?;
            probe.amplitude = amp;
            if let Some(r) = rf.as_mut() {
                let rfam = if r.family.is_coherent() {
                    UncatalyzedFamily::Wc
                } else {
                    UncatalyzedFamily::Ws
                };
                r.amplitude = if rfam == fam {
                    amp
                } else {
                    probes::solve_amplitude_for_resource(value, r.d, rfam)?
                };
            }
        }
        // eta and phi_bar are read back in evaluate_row
        "eta" | "phi_bar" => {}
        other => {
            return Err(CoreError::InvalidArgument(format!("unknown sweep parameter '{other}'")))
        }
    }
    probe.validate()?;
    if let Some(r) = &rf {
        r.validate()?;
    }
    Ok((probe, rf))
}

fn evaluate_row(cfg: &SweepConfig, value: f64) -> Result<Vec<f64>, CoreError> {
    let base = cfg
        .probe
        .to_spec()
        .map_err(CoreError::InvalidArgument)?;
    let reference = match &cfg.reference {
        Some(r) => Some(r.to_spec().map_err(CoreError::InvalidArgument)?),
        None => None,
    };
    let (probe, reference) =
        apply_parameter(&base, reference.as_ref(), &cfg.sweep.parameter, value)?;
    let eta = if cfg.sweep.parameter == "eta" { value } else { cfg.eta };
    let phi = if cfg.sweep.parameter == "phi_bar" { value } else { cfg.phi_bar };

    let mut row = vec![value];
    for output in &cfg.outputs {
        let v = match output.as_str() {
            "H" => metrics::effective_qfi(&probe)?,
            "N_bar" => probes::mean_photon(&probe)?,
            "P" => metrics::success_probability(&probe)?,
            "G" => {
                let r = reference.as_ref().expect("validated");
                metrics::gain_db(metrics::effective_qfi(&probe)?, metrics::effective_qfi(r)?)?
            }
            "R" => {
                let r = reference.as_ref().expect("validated");
                metrics::cooperation(&probe, r)?
            }
            "delta_phi" => homodyne::phase_sensitivity(&probe, phi)?,
            "H_l" => loss::lossy_effective_qfi(&probe, eta)?,
            other => {
                return Err(CoreError::InvalidArgument(format!("unknown output '{other}'")))
            }
        };
        row.push(v);
    }
    Ok(row)
}

/// Evaluate the whole grid; rows come back in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<Vec<f64>>, CoreError> {
    let points = cfg
        .sweep
        .points()
        .map_err(CoreError::InvalidArgument)?;
    points
        .par_iter()
        .map(|&v| evaluate_row(cfg, v))
        .collect()
}

pub fn header(cfg: &SweepConfig) -> Vec<String> {
    let mut h = vec![cfg.sweep.parameter.clone()];
    h.extend(cfg.outputs.iter().cloned());
    h
}
