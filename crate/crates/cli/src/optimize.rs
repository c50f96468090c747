//! Optimization searches behind `catalynet optimize`: the catalyzed-mode
//! scan, the theta search, the loss crossover / optimal loss rate, and
//! the loss-enhanced-region intervals.

use std::f64::consts::PI;

use catalynet::loss::{crossover_eta, lesr_interval, optimal_loss_eta};
use catalynet::metrics::{effective_qfi, gain_db, optimal_catalysis_modes};
use catalynet::probes::{self, ProbeFamily, ProbeSpec, UncatalyzedFamily};
use serde_json::json;

use crate::report::library_version;

fn solver_amp(n: f64, d: usize, squeezed: bool) -> Result<f64, String> {
    probes::solve_amplitude_for_resource(
        n,
        d,
        if squeezed { UncatalyzedFamily::Ws } else { UncatalyzedFamily::Wc },
    )
    .map_err(|e| e.to_string())
}

/// Exhaustive s-scan of the partial-catalysis gain.
pub fn run_modes(family: ProbeFamily, d: usize, m: usize, theta: f64, n_resource: f64) -> Result<serde_json::Value, String> {
    if !family.is_partial() {
        return Err(format!("modes search needs pcwc or pcws, got {}", family.name()));
    }
    let (s_opt, g_opt) =
        optimal_catalysis_modes(d, m, theta, n_resource, family).map_err(|e| e.to_string())?;
    let amp = solver_amp(n_resource, d, !family.is_coherent())?;
    let h_ref = effective_qfi(&if family.is_coherent() {
        ProbeSpec::wc(amp, d)
    } else {
        ProbeSpec::ws(amp, d)
    })
    .map_err(|e| e.to_string())?;
    let mut grid = Vec::new();
    for s in 0..=d {
        let probe = if family.is_coherent() {
            ProbeSpec::pcwc(amp, theta, m, d, s)
        } else {
            ProbeSpec::pcws(amp, theta, m, d, s)
        };
        let g = gain_db(effective_qfi(&probe).map_err(|e| e.to_string())?, h_ref)
            .map_err(|e| e.to_string())?;
        grid.push(json!({"s": s, "gain_db": g}));
    }
    Ok(json!({
        "kind": "modes",
        "library_version": library_version(),
        "family": family.name(), "d": d, "m": m, "theta": theta,
        "n_resource": n_resource, "amplitude": amp,
        "optimum": {"s_opt": s_opt, "gain_db": g_opt},
        "grid": grid,
    }))
}

/// Theta scan of the catalyzed-vs-uncatalyzed gain at fixed resource.
pub fn run_theta(family: ProbeFamily, d: usize, m: usize, n_resource: f64) -> Result<serde_json::Value, String> {
    if !family.is_catalyzed() {
        return Err("theta search needs a catalyzed family".into());
    }
    let squeezed = !family.is_coherent();
    let amp = solver_amp(n_resource, d, squeezed)?;
    let h_ref = effective_qfi(&if squeezed { ProbeSpec::ws(amp, d) } else { ProbeSpec::wc(amp, d) })
        .map_err(|e| e.to_string())?;
    let mut grid = Vec::new();
    let mut best = (0.0f64, f64::NEG_INFINITY);
    let mut t = 1e-3;
    while t < PI / 2.0 - 1e-3 {
        let probe = match family {
            ProbeFamily::Cwc => ProbeSpec::cwc(amp, t, m, d),
            ProbeFamily::Cws => ProbeSpec::cws(amp, t, m, d),
            ProbeFamily::Pcwc => ProbeSpec::pcwc(amp, t, m, d, d.saturating_sub(1)),
            ProbeFamily::Pcws => ProbeSpec::pcws(amp, t, m, d, d.saturating_sub(1)),
            _ => unreachable!(),
        };
        let g = gain_db(effective_qfi(&probe).map_err(|e| e.to_string())?, h_ref)
            .map_err(|e| e.to_string())?;
        if g > best.1 {
            best = (t, g);
        }
        grid.push(json!({"theta": t, "gain_db": g}));
        t += 1e-3;
    }
    Ok(json!({
        "kind": "theta",
        "library_version": library_version(),
        "family": family.name(), "d": d, "m": m,
        "n_resource": n_resource, "amplitude": amp,
        "optimum": {"theta_opt": best.0, "gain_db": best.1},
        "grid_resolution": 1e-3,
        "grid_points": grid.len(),
    }))
}

/// Loss crossover and the optimal loss rate (stationary point of H_l).
pub fn run_eta_crossover(
    family: ProbeFamily,
    d: usize,
    m: usize,
    theta: f64,
    n_resource: f64,
    s: Option<usize>,
) -> Result<serde_json::Value, String> {
    if !family.is_catalyzed() {
        return Err("eta-crossover needs a catalyzed family".into());
    }
    let squeezed = !family.is_coherent();
    let amp = solver_amp(n_resource, d, squeezed)?;
    let cat = match family {
        ProbeFamily::Cwc => ProbeSpec::cwc(amp, theta, m, d),
        ProbeFamily::Cws => ProbeSpec::cws(amp, theta, m, d),
        ProbeFamily::Pcwc => ProbeSpec::pcwc(amp, theta, m, d, s.unwrap_or(d)),
        ProbeFamily::Pcws => ProbeSpec::pcws(amp, theta, m, d, s.unwrap_or(d)),
        _ => unreachable!(),
    };
    let reference = if squeezed { ProbeSpec::ws(amp, d) } else { ProbeSpec::wc(amp, d) };
    let crossing = crossover_eta(&cat, &reference).map_err(|e| e.to_string())?;
    let eta_opt = optimal_loss_eta(&cat).map_err(|e| e.to_string())?;
    Ok(json!({
        "kind": "eta_crossover",
        "library_version": library_version(),
        "family": family.name(), "d": d, "m": m, "theta": theta, "s": s,
        "n_resource": n_resource, "amplitude": amp,
        "crossover_eta": crossing,
        "optimal_loss_eta": eta_opt,
        "note": "optimal_loss_eta is the stationary point of the lossy-QFI parabola (the published critical value); crossover_eta is the largest root of H_cat,l = H_ref,l when one exists",
    }))
}

/// Loss-enhanced-region intervals in theta.
pub fn run_lesr(
    family: ProbeFamily,
    d: usize,
    m: usize,
    n_resource: f64,
    s: Option<usize>,
) -> Result<serde_json::Value, String> {
    let intervals = lesr_interval(family, m, d, n_resource, s).map_err(|e| e.to_string())?;
    Ok(json!({
        "kind": "lesr",
        "library_version": library_version(),
        "family": family.name(), "d": d, "m": m, "s": s,
        "n_resource": n_resource,
        "intervals": intervals.iter().map(|(a, b)| json!({"theta_from": a, "theta_to": b})).collect::<Vec<_>>(),
        "scan_resolution": 1e-3,
    }))
}
