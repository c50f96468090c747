//! Readout network, output-mode quadrature moments for globally and
//! partially catalyzed W-coherent probes, and error-propagation phase
//! sensitivity.
//!
//! Only the symmetric encoding phi_j = phi_bar is supported; the moment
//! closed forms exist for that case alone. Squeezed-family homodyne is a
//! non-goal.

use num_complex::Complex64;

use crate::probes::{self, ProbeFamily, ProbeSpec, SingleModeMoments};
use crate::{Error, Result};

/// The (d+1)-port DFT readout network V_kj = exp(2 pi i k j / (d+1)) / sqrt(d+1);
/// output mode 0 is the equal-weight superposition of all inputs.
#[derive(Debug, Clone)]
pub struct ReadoutNetwork {
    pub d: usize,
    matrix: Vec<Complex64>,
}

impl ReadoutNetwork {
    pub fn entry(&self, k: usize, j: usize) -> Complex64 {
        self.matrix[k * (self.d + 1) + j]
    }

    /// Max |(V^dag V - I)_kj| over all entries.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.d + 1;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.entry(k, i).conj() * self.entry(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }
}

/// Build the readout DFT for d signal modes (d + 1 ports).
pub fn readout_matrix(d: usize) -> Result<ReadoutNetwork> {
    if d == 0 {
        return Err(Error::InvalidArgument("readout network needs d >= 1".into()));
    }
    let n = d + 1;
    let mut matrix = Vec::with_capacity(n * n);
    let scale = 1.0 / (n as f64).sqrt();
    for k in 0..n {
        for j in 0..n {
            let phase = 2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
            matrix.push(Complex64::from_polar(scale, phase));
        }
    }
    Ok(ReadoutNetwork { d, matrix })
}

/// First and second moments of X = (c_0 + c_0^dag)/sqrt(2) at one value
/// of the average phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub mean_x: f64,
    pub mean_x2: f64,
    /// phi_bar at which the moments were evaluated
    pub phase: f64,
}

impl QuadratureMoments {
    pub fn variance(&self) -> f64 {
        self.mean_x2 - self.mean_x * self.mean_x
    }
}

/// Building blocks shared by the global and partial moment formulas.
struct CoherentBlocks {
    /// N^2 / sqrt(2 (d+1)) with N the multimode normalization
    nd: f64,
    /// N^2 (multimode normalization squared)
    n_sq: f64,
    a1: Complex64,
    a2: Complex64,
    a3: Complex64,
    a4: Complex64,
    a5: Complex64,
    a6: f64,
    a7: f64,
}

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Assemble the A_1..A_7 cross-branch blocks for a partially catalyzed
/// W-coherent probe (s = d reproduces the global case).
fn coherent_blocks(alpha: f64, theta: f64, m: usize, d: usize, s: usize) -> Result<CoherentBlocks> {
    let mm = SingleModeMoments::cat_coherent(alpha, theta, m)?;
    let probe = if s == d {
        ProbeSpec::cwc(alpha, theta, m, d)
    } else {
        ProbeSpec::pcwc(alpha, theta, m, d, s)
    };
    let n_sq = probes::normalization(&probe)?.powi(2);
    let df = d as f64;
    let sf = s as f64;
    let vac = (-alpha * alpha / 2.0).exp();
    let lam = mm.lambda_c;
    let eps = mm.epsilon_c;
    let ome = mm.omega_c;
    let a = c64(alpha);

    let a1 = mm.a10 + sf * eps * lam.conj() + (df - sf) * eps * vac;
    let a2 = a * (1.0 + (df - sf - 1.0) * vac * vac + (sf + 1.0) * lam.re * vac);
    let a3 = mm.a20 + 2.0f64.sqrt() * sf * lam.conj() * ome
        + 2.0f64.sqrt() * (df - sf) * ome * vac;
    let a4 = a * a * (1.0 + (df - sf - 1.0) * vac * vac + (sf + 1.0) * lam.conj().re * vac);
    let a5 = sf * eps.norm_sqr() + (df - sf) * eps.conj() * a * vac;
    let a6 = (sf + 1.0) * (mm.a11 - 1.0) + (df - sf) * alpha * alpha
        + sf * (sf - 1.0) * eps.norm_sqr();
    let a7 = (df - sf)
        * vac
        * (sf * 2.0 * (a * eps.conj()).re + alpha * alpha * (df - sf - 1.0) * vac);

    Ok(CoherentBlocks {
        nd: n_sq / (2.0 * (df + 1.0)).sqrt(),
        n_sq,
        a1,
        a2,
        a3,
        a4,
        a5,
        a6,
        a7,
    })
}

fn moments_from_blocks(b: &CoherentBlocks, d: usize, s: usize, phi_bar: f64) -> QuadratureMoments {
    let df = d as f64;
    let sf = s as f64;
    let e1 = Complex64::from_polar(1.0, -phi_bar);
    let e2 = Complex64::from_polar(1.0, -2.0 * phi_bar);
    let mean_x = 2.0 * b.nd * (b.a1 + e1 * (sf * b.a1 + (df - sf) * b.a2)).re;
    // <X^2> = 1/2 + Re<c0^2> + <c0^dag c0>; both assembled from the blocks
    let curly = (b.a6 + b.a7)
        + (b.a3 + 2.0 * e1 * b.a5 + e2 * (sf * b.a3 + (df - sf) * b.a4)).re;
    let mean_x2 = 0.5 + b.n_sq / (df + 1.0) * curly;
    QuadratureMoments { mean_x, mean_x2, phase: phi_bar }
}

/// d <X>/d phi_bar, closed form: the phase enters only through e^{-i phi_bar}.
fn dmean_x_dphi(b: &CoherentBlocks, d: usize, s: usize, phi_bar: f64) -> f64 {
    let df = d as f64;
    let sf = s as f64;
    let e1 = Complex64::from_polar(1.0, -phi_bar);
    2.0 * b.nd * (e1 * (sf * b.a1 + (df - sf) * b.a2)).im
}

/// Quadrature moments of the globally catalyzed W-coherent probe.
pub fn x_moments_global(alpha: f64, theta: f64, m: usize, d: usize, phi_bar: f64) -> Result<QuadratureMoments> {
    let b = coherent_blocks(alpha, theta, m, d, d)?;
    Ok(moments_from_blocks(&b, d, d, phi_bar))
}

/// Quadrature moments of the partially catalyzed W-coherent probe
/// (modes 0..s catalyzed).
pub fn x_moments_partial(
    alpha: f64,
    theta: f64,
    m: usize,
    d: usize,
    s: usize,
    phi_bar: f64,
) -> Result<QuadratureMoments> {
    if s > d {
        return Err(Error::InvalidArgument(format!("s = {s} exceeds d = {d}")));
    }
    let b = coherent_blocks(alpha, theta, m, d, s)?;
    Ok(moments_from_blocks(&b, d, s, phi_bar))
}

/// Error-transfer phase sensitivity
/// delta phi_bar = sqrt(<X^2> - <X>^2) / |d<X>/d phi_bar|
/// for cwc/pcwc probes; +infinity at stationary points of <X>.
pub fn phase_sensitivity(probe: &ProbeSpec, phi_bar: f64) -> Result<f64> {
    probe.validate()?;
    let (s, family_ok) = match probe.family {
        ProbeFamily::Cwc => (probe.d, true),
        ProbeFamily::Pcwc => (probe.s, true),
        _ => (0, false),
    };
    if !family_ok {
        return Err(Error::FamilyMismatch(format!(
            "homodyne sensitivity is defined for cwc/pcwc, got {}",
            probe.family.name()
        )));
    }
    let b = coherent_blocks(probe.amplitude, probe.theta, probe.m, probe.d, s)?;
    let mom = moments_from_blocks(&b, probe.d, s, phi_bar);
    let slope = dmean_x_dphi(&b, probe.d, s, phi_bar);
    let var = mom.variance().max(0.0);
    if slope.abs() < 1e-300 {
        return Ok(f64::INFINITY);
    }
    Ok(var.sqrt() / slope.abs())
}

/// Element-wise [`phase_sensitivity`] over a grid, preserving order.
pub fn sensitivity_curve(probe: &ProbeSpec, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("sensitivity grid must be non-empty".into()));
    }
    let (s, _) = match probe.family {
        ProbeFamily::Cwc => (probe.d, true),
        ProbeFamily::Pcwc => (probe.s, true),
        other => {
            return Err(Error::FamilyMismatch(format!(
                "homodyne sensitivity is defined for cwc/pcwc, got {}",
                other.name()
            )))
        }
    };
    probe.validate()?;
    let b = coherent_blocks(probe.amplitude, probe.theta, probe.m, probe.d, s)?;
    Ok(grid
        .iter()
        .map(|&phi| {
            let mom = moments_from_blocks(&b, probe.d, s, phi);
            let slope = dmean_x_dphi(&b, probe.d, s, phi);
            let var = mom.variance().max(0.0);
            let dphi = if slope.abs() < 1e-300 { f64::INFINITY } else { var.sqrt() / slope.abs() };
            (phi, dphi)
        })
        .collect())
}

/// Finite-difference slope of <X>; test oracle for the analytic derivative.
pub fn numeric_dmean_x_dphi(probe: &ProbeSpec, phi_bar: f64, step: f64) -> Result<f64> {
    let s = match probe.family {
        ProbeFamily::Cwc => probe.d,
        ProbeFamily::Pcwc => probe.s,
        other => {
            return Err(Error::FamilyMismatch(format!(
                "homodyne sensitivity is defined for cwc/pcwc, got {}",
                other.name()
            )))
        }
    };
    let b = coherent_blocks(probe.amplitude, probe.theta, probe.m, probe.d, s)?;
    let hi = moments_from_blocks(&b, probe.d, s, phi_bar + step).mean_x;
    let lo = moments_from_blocks(&b, probe.d, s, phi_bar - step).mean_x;
    Ok((hi - lo) / (2.0 * step))
}

/// Analytic slope of <X> (exported for tests and the CLI).
pub fn analytic_dmean_x_dphi(probe: &ProbeSpec, phi_bar: f64) -> Result<f64> {
    let s = match probe.family {
        ProbeFamily::Cwc => probe.d,
        ProbeFamily::Pcwc => probe.s,
        other => {
            return Err(Error::FamilyMismatch(format!(
                "homodyne sensitivity is defined for cwc/pcwc, got {}",
                other.name()
            )))
        }
    };
    let b = coherent_blocks(probe.amplitude, probe.theta, probe.m, probe.d, s)?;
    Ok(dmean_x_dphi(&b, probe.d, s, phi_bar))
}

/// Smallest sensitivity over a phase grid together with its location,
/// ignoring stationary points.
pub fn min_sensitivity(probe: &ProbeSpec, grid: &[f64]) -> Result<(f64, f64)> {
    let curve = sensitivity_curve(probe, grid)?;
    curve
        .into_iter()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::InvalidArgument("no finite sensitivity on grid".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn readout_matrix_small_cases() {
        let v = readout_matrix(1).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert_relative_eq!(v.entry(0, 0).re, s, epsilon = 1e-14);
        assert_relative_eq!(v.entry(1, 1).re, -s, epsilon = 1e-14);
        assert!(v.unitarity_residual() <= 1e-12);

        let v2 = readout_matrix(2).unwrap();
        let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((v2.entry(1, 1) - omega / 3.0f64.sqrt()).norm() < 1e-14);
        assert!(v2.unitarity_residual() <= 1e-12);

        for d in [3usize, 5, 8] {
            assert!(readout_matrix(d).unwrap().unitarity_residual() <= 1e-12);
        }
    }

    #[test]
    fn partial_reduces_to_global() {
        for phi in [0.0, 0.7, 2.9] {
            let g = x_moments_global(1.0, 0.7, 2, 3, phi).unwrap();
            let p = x_moments_partial(1.0, 0.7, 2, 3, 3, phi).unwrap();
            assert_relative_eq!(g.mean_x, p.mean_x, max_relative = 1e-10);
            assert_relative_eq!(g.mean_x2, p.mean_x2, max_relative = 1e-10);
        }
    }

    #[test]
    fn variance_nonnegative_over_phase_grid() {
        for k in 0..40 {
            let phi = 2.0 * PI * k as f64 / 40.0;
            let mom = x_moments_global(1.0, 0.6, 1, 2, phi).unwrap();
            assert!(mom.variance() >= -1e-10);
            let mom = x_moments_partial(0.8, 1.1, 2, 3, 1, phi).unwrap();
            assert!(mom.variance() >= -1e-10);
        }
    }

    #[test]
    fn sensitivity_periodic_and_bounded_by_qcrb() {
        let probe = ProbeSpec::cwc(1.0, 0.7, 2, 2);
        let d1 = phase_sensitivity(&probe, 1.1).unwrap();
        let d2 = phase_sensitivity(&probe, 1.1 + 2.0 * PI).unwrap();
        assert_relative_eq!(d1, d2, max_relative = 1e-9);

        let qcrb = metrics::weak_qcrb(metrics::effective_qfi(&probe).unwrap()).unwrap();
        for k in 1..60 {
            let phi = 2.0 * PI * k as f64 / 60.0;
            let dphi = phase_sensitivity(&probe, phi).unwrap();
            assert!(dphi >= qcrb - 1e-9, "phi = {phi}: {dphi} < {qcrb}");
        }
    }

    #[test]
    fn stationary_point_is_infinite_not_error() {
        let probe = ProbeSpec::cwc(1.0, 0.5, 1, 2);
        assert!(phase_sensitivity(&probe, 0.0).unwrap().is_infinite());
    }

    #[test]
    fn analytic_derivative_matches_finite_difference() {
        let probes = [ProbeSpec::cwc(1.0, 0.7, 2, 3), ProbeSpec::pcwc(0.9, 1.1, 3, 4, 2)];
        for probe in &probes {
            for k in 1..12 {
                let phi = 0.37 + 0.5 * k as f64;
                let a = analytic_dmean_x_dphi(probe, phi).unwrap();
                let n = numeric_dmean_x_dphi(probe, phi, 1e-6).unwrap();
                assert_relative_eq!(a, n, max_relative = 1e-6, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn curve_preserves_grid_order() {
        let probe = ProbeSpec::cwc(1.0, 0.5, 1, 2);
        let grid = [0.4];
        let curve = sensitivity_curve(&probe, &grid).unwrap();
        assert_eq!(curve.len(), 1);
        assert_relative_eq!(curve[0].0, 0.4);
        assert!(sensitivity_curve(&probe, &[]).is_err());
        assert!(sensitivity_curve(&ProbeSpec::ws(1.0, 2), &grid).is_err());
    }
}
