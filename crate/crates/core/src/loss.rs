//! Photon-loss channel via Kraus operators, lossy effective QFI for all
//! six families, the loss-enhanced-region discriminant, and the
//! loss-catalysis dual-enhancement map.
//!
//! Loss is uniform over the d signal modes (the reference mode carries no
//! phase and does not enter H_l); gamma is kept only for the h1/h2
//! coefficients, every lossy-QFI path runs at gamma = 0.

use rayon::prelude::*;

use crate::metrics::effective_qfi;
use crate::probes::{self, ProbeFamily, ProbeSpec, UncatalyzedFamily, THETA_GUARD};
use crate::{Error, Result};

/// Photon-loss channel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    /// transmittance; 1 = no loss, 0 = complete loss
    pub eta: f64,
    /// loss-position constant (0 = loss before the phase shifter)
    pub gamma: f64,
}

impl LossChannel {
    pub fn new(eta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidArgument(format!("eta = {eta} outside [0, 1]")));
        }
        Ok(Self { eta, gamma })
    }
}

/// (|h1|^2, h2) with h1 = i[(gamma+1)(1-eta) - 1] and
/// h2 = (gamma+1)^2 (1-eta) eta; at gamma = 0 these are (eta^2, (1-eta) eta).
pub fn kraus_coeffs(ch: LossChannel) -> (f64, f64) {
    let g1 = (ch.gamma + 1.0) * (1.0 - ch.eta) - 1.0;
    let h2 = (ch.gamma + 1.0).powi(2) * (1.0 - ch.eta) * ch.eta;
    (g1 * g1, h2)
}

/// Effective QFI under uniform photon loss at gamma = 0:
/// H_l = eta^2 H + 4 (1-eta) eta * (sum of signal-mode mean photons).
pub fn lossy_effective_qfi(probe: &ProbeSpec, eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("eta = {eta} outside [0, 1]")));
    }
    let h = effective_qfi(probe)?;
    if eta == 1.0 {
        return Ok(h);
    }
    let signal = probes::signal_mean_photons(probe)?;
    Ok(eta * eta * h + 4.0 * (1.0 - eta) * eta * signal)
}

/// True iff H_l(eta) has negative slope at eta = 1, i.e. some transmittance
/// below 1 yields a larger lossy QFI than the lossless case. Equivalent to
/// the printed discriminant H < 2 (N_bar - N^2 <psi_0|n|psi_0>).
pub fn loss_enhanced_discriminant(probe: &ProbeSpec) -> Result<bool> {
    let h = effective_qfi(probe)?;
    let signal = probes::signal_mean_photons(probe)?;
    // d/d eta [eta^2 H + 4 (1-eta) eta S] at eta = 1 is 2H - 4S
    Ok(2.0 * h - 4.0 * signal < 0.0)
}

/// Theta intervals over (0, pi/2) where the loss-enhanced discriminant
/// holds, found by sign-change bisection on a 1e-3-resolution scan. The
/// amplitude is solved from `n_resource` for the uncatalyzed family.
pub fn lesr_interval(
    family: ProbeFamily,
    m: usize,
    d: usize,
    n_resource: f64,
    s: Option<usize>,
) -> Result<Vec<(f64, f64)>> {
    if !family.is_catalyzed() {
        return Err(Error::FamilyMismatch(
            "LESR intervals are defined for catalyzed families".into(),
        ));
    }
    let amp = probes::solve_amplitude_for_resource(
        n_resource,
        d,
        if family.is_coherent() { UncatalyzedFamily::Wc } else { UncatalyzedFamily::Ws },
    )?;
    let probe_at = |theta: f64| -> ProbeSpec {
        match family {
            ProbeFamily::Cwc => ProbeSpec::cwc(amp, theta, m, d),
            ProbeFamily::Cws => ProbeSpec::cws(amp, theta, m, d),
            ProbeFamily::Pcwc => ProbeSpec::pcwc(amp, theta, m, d, s.unwrap_or(d)),
            ProbeFamily::Pcws => ProbeSpec::pcws(amp, theta, m, d, s.unwrap_or(d)),
            _ => unreachable!(),
        }
    };
    // discriminant margin: positive inside the loss-enhanced region
    let margin = |theta: f64| -> Result<f64> {
        let p = probe_at(theta);
        Ok(4.0 * probes::signal_mean_photons(&p)? - 2.0 * effective_qfi(&p)?)
    };
    let hi_edge = std::f64::consts::FRAC_PI_2 - THETA_GUARD;
    let step = 1e-3;
    let steps = (hi_edge / step).floor() as usize;
    let grid: Vec<f64> = (1..=steps).map(|k| (k as f64 * step).min(hi_edge)).collect();
    let values: Result<Vec<f64>> = grid.iter().map(|&t| margin(t)).collect();
    let values = values?;

    let refine = |mut lo: f64, mut hi: f64| -> Result<f64> {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if margin(lo)?.signum() == margin(mid)?.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };

    let mut intervals = Vec::new();
    let mut open_at: Option<f64> = if values[0] > 0.0 { Some(grid[0]) } else { None };
    for k in 1..grid.len() {
        let was_in = values[k - 1] > 0.0;
        let is_in = values[k] > 0.0;
        if !was_in && is_in {
            open_at = Some(refine(grid[k - 1], grid[k])?);
        } else if was_in && !is_in {
            let start = open_at.take().expect("interval was open");
            intervals.push((start, refine(grid[k - 1], grid[k])?));
        }
    }
    if let Some(start) = open_at {
        intervals.push((start, hi_edge));
    }
    Ok(intervals)
}

/// Stationary point of the lossy-QFI parabola in (0, 1): the edge of the
/// loss-enhanced window, eta* = 2 S' / (4 S' - H). `None` when H_l is
/// monotone on the unit interval (no loss-enhanced region).
pub fn optimal_loss_eta(probe: &ProbeSpec) -> Result<Option<f64>> {
    let h = effective_qfi(probe)?;
    let s = probes::signal_mean_photons(probe)?;
    let denom = 4.0 * s - h;
    if denom <= 0.0 {
        return Ok(None);
    }
    let eta = 2.0 * s / denom;
    Ok(if eta < 1.0 { Some(eta) } else { None })
}

/// Largest eta in (0, 1) where the lossy QFIs of a catalyzed probe and
/// its reference cross, by bisection; `None` when one dominates the other
/// on the whole interval.
pub fn crossover_eta(probe_cat: &ProbeSpec, probe_ref: &ProbeSpec) -> Result<Option<f64>> {
    if probe_cat.d != probe_ref.d {
        return Err(Error::FamilyMismatch("crossover requires the same d".into()));
    }
    let diff = |eta: f64| -> Result<f64> {
        Ok(lossy_effective_qfi(probe_cat, eta)? - lossy_effective_qfi(probe_ref, eta)?)
    };
    let n = 1000usize;
    let grid: Vec<f64> = (1..=n).map(|k| k as f64 / n as f64).collect();
    let mut last_root: Option<f64> = None;
    let mut prev = diff(grid[0])?;
    for k in 1..grid.len() {
        let cur = diff(grid[k])?;
        if prev == 0.0 {
            last_root = Some(grid[k - 1]);
        } else if prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (grid[k - 1], grid[k]);
            let f_lo = prev;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if diff(mid)?.signum() == f_lo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            if root < 1.0 - 1e-9 {
                last_root = Some(root);
            }
        }
        prev = cur;
    }
    Ok(last_root)
}

/// One point of the loss-catalysis map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcbesrPoint {
    pub theta: f64,
    pub eta: f64,
    /// H_cat,l - H_ref,l
    pub delta_h: f64,
    /// whether theta lies in the catalyzed probe's loss-enhanced region
    pub in_lesr: bool,
}

/// Grid map of Delta H_l and LESR membership; the LCBESR is the subset
/// with delta_h > 0 and in_lesr.
pub fn lcbesr_map(
    family: ProbeFamily,
    m: usize,
    d: usize,
    n_resource: f64,
    s: Option<usize>,
    theta_grid: &[f64],
    eta_grid: &[f64],
) -> Result<Vec<LcbesrPoint>> {
    if !family.is_catalyzed() {
        return Err(Error::FamilyMismatch(
            "the loss-catalysis map is defined for catalyzed families".into(),
        ));
    }
    if theta_grid.is_empty() || eta_grid.is_empty() {
        return Err(Error::InvalidArgument("grids must be non-empty".into()));
    }
    let amp = probes::solve_amplitude_for_resource(
        n_resource,
        d,
        if family.is_coherent() { UncatalyzedFamily::Wc } else { UncatalyzedFamily::Ws },
    )?;
    let reference = if family.is_coherent() { ProbeSpec::wc(amp, d) } else { ProbeSpec::ws(amp, d) };
    let h_ref = effective_qfi(&reference)?;
    let s_ref = probes::signal_mean_photons(&reference)?;
    // H and the signal photon sum depend on theta only; each eta point is
    // then two quadratic evaluations
    let per_theta: Result<Vec<(f64, f64, f64, bool)>> = theta_grid
        .par_iter()
        .map(|&theta| {
            let cat = match family {
                ProbeFamily::Cwc => ProbeSpec::cwc(amp, theta, m, d),
                ProbeFamily::Cws => ProbeSpec::cws(amp, theta, m, d),
                ProbeFamily::Pcwc => ProbeSpec::pcwc(amp, theta, m, d, s.unwrap_or(d)),
                ProbeFamily::Pcws => ProbeSpec::pcws(amp, theta, m, d, s.unwrap_or(d)),
                _ => unreachable!(),
            };
            let h = effective_qfi(&cat)?;
            let sig = probes::signal_mean_photons(&cat)?;
            Ok((theta, h, sig, 2.0 * h - 4.0 * sig < 0.0))
        })
        .collect();
    let per_theta = per_theta?;
    let quad = |h: f64, sig: f64, eta: f64| eta * eta * h + 4.0 * (1.0 - eta) * eta * sig;
    let mut out = Vec::with_capacity(theta_grid.len() * eta_grid.len());
    for &(theta, h, sig, in_lesr) in &per_theta {
        for &eta in eta_grid {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidArgument(format!("eta = {eta} outside [0, 1]")));
            }
            out.push(LcbesrPoint {
                theta,
                eta,
                delta_h: quad(h, sig, eta) - quad(h_ref, s_ref, eta),
                in_lesr,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kraus_coefficients() {
        assert_eq!(kraus_coeffs(LossChannel::new(1.0, 0.0).unwrap()), (1.0, 0.0));
        assert_eq!(kraus_coeffs(LossChannel::new(0.0, 0.0).unwrap()), (0.0, 0.0));
        let (h1, h2) = kraus_coeffs(LossChannel::new(0.5, 0.0).unwrap());
        assert_relative_eq!(h1, 0.25);
        assert_relative_eq!(h2, 0.25);
        // gamma = -1 kills both the damping of h1 and h2
        let (h1, h2) = kraus_coeffs(LossChannel::new(0.3, -1.0).unwrap());
        assert_relative_eq!(h1, 1.0);
        assert_relative_eq!(h2, 0.0);
        assert!(LossChannel::new(1.2, 0.0).is_err());
    }

    #[test]
    fn lossy_qfi_limits() {
        let probe = ProbeSpec::cwc(1.0, 0.7, 2, 3);
        let h = effective_qfi(&probe).unwrap();
        assert_eq!(lossy_effective_qfi(&probe, 1.0).unwrap(), h);
        assert_relative_eq!(lossy_effective_qfi(&probe, 0.0).unwrap(), 0.0);
        assert!(lossy_effective_qfi(&probe, 1.5).is_err());
    }

    #[test]
    fn lossy_qfi_is_quadratic_in_eta() {
        let probe = ProbeSpec::cws(0.8, 0.7, 2, 3);
        let f = |eta: f64| lossy_effective_qfi(&probe, eta).unwrap();
        // exact quadratic through three samples reproduces a fourth
        let (x0, x1, x2, x3) = (0.2, 0.5, 0.9, 0.7);
        let (y0, y1, y2) = (f(x0), f(x1), f(x2));
        let lagrange = |x: f64| {
            y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
                + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
                + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1))
        };
        assert_relative_eq!(lagrange(x3), f(x3), epsilon = 1e-12, max_relative = 1e-12);
    }

    #[test]
    fn lossy_qfi_nonnegative_on_unit_interval() {
        for probe in [
            ProbeSpec::wc(0.6, 2),
            ProbeSpec::cwc(1.0, 1.1, 3, 3),
            ProbeSpec::pcws(0.8, 0.3, 1, 3, 2),
        ] {
            for k in 0..=20 {
                let eta = k as f64 / 20.0;
                assert!(lossy_effective_qfi(&probe, eta).unwrap() >= -1e-12);
            }
        }
    }

    #[test]
    fn plain_families_never_loss_enhanced() {
        let alpha = probes::solve_amplitude_for_resource(0.5, 20, UncatalyzedFamily::Wc).unwrap();
        assert!(!loss_enhanced_discriminant(&ProbeSpec::wc(alpha, 20)).unwrap());
        let r = probes::solve_amplitude_for_resource(0.5, 20, UncatalyzedFamily::Ws).unwrap();
        assert!(!loss_enhanced_discriminant(&ProbeSpec::ws(r, 20)).unwrap());
    }
}
