//! Browser bindings for the catalynet engine: three interactive curve
//! generators behind `wasm-bindgen`, each returning a JSON payload that
//! the demo page plots directly.

use catalynet::homodyne::phase_sensitivity;
use catalynet::loss::{lossy_effective_qfi, optimal_loss_eta};
use catalynet::metrics::{effective_qfi, gain_db, success_probability, weak_qcrb};
use catalynet::probes::{self, ProbeFamily, ProbeSpec, UncatalyzedFamily};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse_family(name: &str) -> Result<ProbeFamily, String> {
    ProbeFamily::parse(name).map_err(|e| e.to_string())
}

fn solver_amp(n: f64, d: usize, squeezed: bool) -> Result<f64, String> {
    probes::solve_amplitude_for_resource(
        n,
        d,
        if squeezed { UncatalyzedFamily::Ws } else { UncatalyzedFamily::Wc },
    )
    .map_err(|e| e.to_string())
}

fn build_probe(
    family: ProbeFamily,
    amp: f64,
    theta: f64,
    m: usize,
    d: usize,
    s: usize,
) -> ProbeSpec {
    match family {
        ProbeFamily::Wc => ProbeSpec::wc(amp, d),
        ProbeFamily::Cwc => ProbeSpec::cwc(amp, theta, m, d),
        ProbeFamily::Pcwc => ProbeSpec::pcwc(amp, theta, m, d, s),
        ProbeFamily::Ws => ProbeSpec::ws(amp, d),
        ProbeFamily::Cws => ProbeSpec::cws(amp, theta, m, d),
        ProbeFamily::Pcws => ProbeSpec::pcws(amp, theta, m, d, s),
    }
}

/// Effective QFI and gain of a catalyzed family over its uncatalyzed
/// reference, swept over the BS angle theta at a fixed resource budget.
#[wasm_bindgen]
pub fn gain_curve(family: &str, d: usize, m: usize, n_resource: f64, s: usize) -> Result<String, String> {
    let family = parse_family(family)?;
    if !family.is_catalyzed() {
        return Err("pick a catalyzed family (cwc, pcwc, cws, pcws)".into());
    }
    let squeezed = !family.is_coherent();
    let amp = solver_amp(n_resource, d, squeezed)?;
    let reference = if squeezed { ProbeSpec::ws(amp, d) } else { ProbeSpec::wc(amp, d) };
    let h_ref = effective_qfi(&reference).map_err(|e| e.to_string())?;
    let count = 240usize;
    let hi = std::f64::consts::FRAC_PI_2 - 1e-3;
    let mut thetas = Vec::with_capacity(count);
    let mut h = Vec::with_capacity(count);
    let mut g = Vec::with_capacity(count);
    let mut p = Vec::with_capacity(count);
    for k in 0..count {
        let theta = 1e-3 + (hi - 1e-3) * k as f64 / (count - 1) as f64;
        let probe = build_probe(family, amp, theta, m, d, s.min(d));
        let hv = effective_qfi(&probe).map_err(|e| e.to_string())?;
        thetas.push(theta);
        h.push(hv);
        g.push(gain_db(hv, h_ref).map_err(|e| e.to_string())?);
        p.push(success_probability(&probe).map_err(|e| e.to_string())?);
    }
    Ok(json!({
        "theta": thetas, "h": h, "gain_db": g, "p_success": p,
        "h_ref": h_ref, "amplitude": amp,
    })
    .to_string())
}

/// Homodyne phase sensitivity over the average phase, with the weak-QCRB
/// floor, for globally or partially catalyzed W-coherent probes.
#[wasm_bindgen]
pub fn sensitivity_vs_phase(
    family: &str,
    d: usize,
    m: usize,
    theta: f64,
    n_resource: f64,
    s: usize,
) -> Result<String, String> {
    let family = parse_family(family)?;
    if !matches!(family, ProbeFamily::Cwc | ProbeFamily::Pcwc) {
        return Err("homodyne sensitivity is defined for cwc and pcwc".into());
    }
    let amp = solver_amp(n_resource, d, false)?;
    let probe = build_probe(family, amp, theta, m, d, s.min(d));
    let qcrb = weak_qcrb(effective_qfi(&probe).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let count = 400usize;
    let mut phis = Vec::with_capacity(count);
    let mut dphi = Vec::with_capacity(count);
    for k in 1..=count {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / (count + 1) as f64;
        let v = phase_sensitivity(&probe, phi).map_err(|e| e.to_string())?;
        phis.push(phi);
        dphi.push(if v.is_finite() { v } else { -1.0 }); // -1 marks divergence
    }
    Ok(json!({
        "phi_bar": phis, "delta_phi": dphi, "qcrb": qcrb, "amplitude": amp,
    })
    .to_string())
}

/// Lossy effective QFI of all six families against the transmittance,
/// with the loss-enhanced-window edges of the coherent catalyzed pair.
#[wasm_bindgen]
pub fn lossy_qfi_curves(
    d: usize,
    m: usize,
    n_resource: f64,
    theta_coherent: f64,
    theta_squeezed: f64,
    s: usize,
) -> Result<String, String> {
    let alpha = solver_amp(n_resource, d, false)?;
    let r = solver_amp(n_resource, d, true)?;
    let s = s.min(d);
    let probes_list = [
        ("wc", ProbeSpec::wc(alpha, d)),
        ("cwc", ProbeSpec::cwc(alpha, theta_coherent, m, d)),
        ("pcwc", ProbeSpec::pcwc(alpha, theta_coherent, m, d, s)),
        ("ws", ProbeSpec::ws(r, d)),
        ("cws", ProbeSpec::cws(r, theta_squeezed, m, d)),
        ("pcws", ProbeSpec::pcws(r, theta_squeezed, m, d, s)),
    ];
    let count = 160usize;
    let etas: Vec<f64> = (0..count).map(|k| k as f64 / (count - 1) as f64).collect();
    let mut curves = serde_json::Map::new();
    for (name, probe) in &probes_list {
        let mut values = Vec::with_capacity(count);
        for &eta in &etas {
            values.push(lossy_effective_qfi(probe, eta).map_err(|e| e.to_string())?);
        }
        curves.insert(name.to_string(), json!(values));
    }
    let eta_opt_cwc = optimal_loss_eta(&probes_list[1].1).map_err(|e| e.to_string())?;
    let eta_opt_pcwc = optimal_loss_eta(&probes_list[2].1).map_err(|e| e.to_string())?;
    Ok(json!({
        "eta": etas, "curves": curves,
        "eta_opt": {"cwc": eta_opt_cwc, "pcwc": eta_opt_pcwc},
        "alpha": alpha, "r": r,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payloads_parse_and_carry_data() {
        let g: serde_json::Value =
            serde_json::from_str(&gain_curve("cws", 5, 8, 1.0, 0).unwrap()).unwrap();
        assert_eq!(g["theta"].as_array().unwrap().len(), 240);
        assert!(g["h_ref"].as_f64().unwrap() > 0.0);

        let s: serde_json::Value =
            serde_json::from_str(&sensitivity_vs_phase("cwc", 3, 2, 0.9, 1.0, 0).unwrap()).unwrap();
        assert!(s["qcrb"].as_f64().unwrap() > 0.0);
        assert_eq!(s["phi_bar"].as_array().unwrap().len(), 400);

        let l: serde_json::Value =
            serde_json::from_str(&lossy_qfi_curves(4, 2, 0.5, 1.2, 1.0, 3).unwrap()).unwrap();
        assert!(l["curves"]["pcws"].as_array().unwrap().len() == 160);

        assert!(gain_curve("wc", 3, 1, 1.0, 0).is_err());
        assert!(sensitivity_vs_phase("cws", 3, 1, 0.5, 1.0, 0).is_err());
    }
}
