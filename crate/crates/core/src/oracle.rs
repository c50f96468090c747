//! Brute-force Fock-space verification harness.
//!
//! Every probe is rebuilt here by literal simulation — W superposition,
//! beam-splitter catalysis with ancilla projection, phase encoding — and
//! every analytic quantity is recomputed independently from exact moments
//! of the simulated state. Also simulates the three-mode W-squeezed
//! generation protocol.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fock::{ancilla_cutoff, coherent_cutoff, squeezed_cutoff, FockVector};
use crate::homodyne::{self, QuadratureMoments};
use crate::loss;
use crate::metrics;
use crate::probes::{self, ProbeSpec};
use crate::special_fn::binomial;
use crate::{Error, Result};

/// Resource guard: the literal simulation is exponential in d; everything
/// the closed forms need is verifiable at this scale.
pub const MAX_ORACLE_D: usize = 3;
/// Resource guard on the catalytic photon number.
pub const MAX_ORACLE_M: usize = 3;

fn guard(probe: &ProbeSpec) -> Result<()> {
    if probe.d > MAX_ORACLE_D || (probe.family.is_catalyzed() && probe.m > MAX_ORACLE_M) {
        return Err(Error::ResourceGuard { max_d: MAX_ORACLE_D, max_m: MAX_ORACLE_M });
    }
    Ok(())
}

/// Computational-basis state |occ> with the given cutoffs.
pub fn fock_basis(cutoffs: &[usize], occ: &[usize]) -> Result<FockVector> {
    if occ.len() != cutoffs.len() {
        return Err(Error::DimensionMismatch { expected: cutoffs.len(), got: occ.len() });
    }
    for (k, (&n, &c)) in occ.iter().zip(cutoffs).enumerate() {
        if n > c {
            return Err(Error::ModeOutOfRange { index: k, modes: c + 1 });
        }
    }
    let dims: Vec<usize> = cutoffs.iter().map(|c| c + 1).collect();
    let len: usize = dims.iter().product();
    let mut amps = vec![Complex64::new(0.0, 0.0); len];
    let mut idx = 0usize;
    for (k, &n) in occ.iter().enumerate() {
        idx = idx * dims[k] + n;
    }
    amps[idx] = Complex64::new(1.0, 0.0);
    FockVector::from_amplitudes(cutoffs, amps)
}

fn excited_single_mode(probe: &ProbeSpec, cutoff: usize) -> Result<FockVector> {
    if probe.family.is_coherent() {
        FockVector::coherent_state(Complex64::new(probe.amplitude, 0.0), cutoff)
    } else {
        FockVector::squeezed_vacuum(probe.amplitude, cutoff)
    }
}

/// Default oracle cutoff for a probe's excited states.
pub fn default_cutoff(probe: &ProbeSpec) -> usize {
    if probe.family.is_coherent() {
        coherent_cutoff(probe.amplitude)
    } else {
        squeezed_cutoff(probe.amplitude)
    }
}

/// W superposition of d+1 branches of `excited`, normalized; also returns
/// the multimode normalization constant (1 / norm of the branch sum).
fn w_superposition(excited: &FockVector, d: usize) -> (FockVector, f64) {
    let cutoff = excited.cutoffs()[0];
    let dims = vec![cutoff + 1; d + 1];
    let len: usize = dims.iter().product();
    let mut amps = vec![Complex64::new(0.0, 0.0); len];
    // stride of mode k in row-major, last fastest
    for k in 0..=d {
        let stride: usize = dims[k + 1..].iter().product();
        for (n, a) in excited.amplitudes().iter().enumerate() {
            amps[n * stride] += a;
        }
    }
    let cutoffs = vec![cutoff; d + 1];
    let state = FockVector::from_amplitudes(&cutoffs, amps).expect("consistent dims");
    let norm = 1.0 / state.norm_sqr().sqrt();
    (state.normalized(), norm)
}

/// Apply m-photon catalysis to mode `site`: attach an ancilla in |m>, mix
/// on the BS, project the ancilla back onto |m>. Returns the conditional
/// state and the detection probability.
fn catalyze_mode(state: &FockVector, site: usize, theta: f64, m: usize) -> Result<(FockVector, f64)> {
    let anc_cut = ancilla_cutoff(m);
    let ancilla = fock_basis(&[anc_cut], &[m])?;
    let joint = state.tensor(&ancilla);
    let anc_index = joint.num_modes() - 1;
    let mixed = joint.apply_bs(site, anc_index, theta)?;
    mixed.project_mode(anc_index, m)
}

/// Equal-coefficient branch sum: branch k carries `cat` on mode k when
/// marked, `plain` otherwise, vacuum elsewhere. Returns the normalized
/// state and the normalization constant.
fn assemble_branches(
    plain: &FockVector,
    cat: &FockVector,
    cat_mask: &[bool],
) -> (FockVector, f64) {
    let cutoff = plain.cutoffs()[0];
    let d = cat_mask.len() - 1;
    let dims = vec![cutoff + 1; d + 1];
    let len: usize = dims.iter().product();
    let mut amps = vec![Complex64::new(0.0, 0.0); len];
    for (k, &is_cat) in cat_mask.iter().enumerate() {
        let branch = if is_cat { cat } else { plain };
        let stride: usize = dims[k + 1..].iter().product();
        for (n, a) in branch.amplitudes().iter().enumerate() {
            amps[n * stride] += a;
        }
    }
    let cutoffs = vec![cutoff; d + 1];
    let state = FockVector::from_amplitudes(&cutoffs, amps).expect("consistent dims");
    let norm = 1.0 / state.norm_sqr().sqrt();
    (state.normalized(), norm)
}

fn catalysis_mask(probe: &ProbeSpec) -> Vec<bool> {
    let n_cat_signal = probe.catalyzed_signal_modes();
    (0..=probe.d)
        .map(|k| probe.family.is_catalyzed() && (k == 0 || k <= n_cat_signal))
        .collect()
}

/// Build the probe in Fock space. The returned state is the probe-family
/// definition: the branch sum with unit-normalized (catalyzed) excited
/// states and equal branch coefficients. The success probability is the
/// joint herald probability of the literal catalysis pipeline — W
/// superposition, ancilla per catalyzed mode, BS, m-photon projection.
/// For global catalysis the pipeline output and the branch sum are the
/// same state; for partial catalysis the pipeline weights catalyzed
/// branches by N_m^{-1} against cos^m(theta), while the closed forms all
/// follow the equal-coefficient convention.
pub fn build_probe_fock(probe: &ProbeSpec, cutoff: usize) -> Result<(FockVector, f64)> {
    probe.validate()?;
    guard(probe)?;
    let plain = excited_single_mode(probe, cutoff)?;
    if !probe.family.is_catalyzed() {
        let (state, _) = w_superposition(&plain, probe.d);
        return Ok((state, 1.0));
    }
    let prob = pipeline_success_probability(probe, cutoff)?.1;
    let (cat, _) = catalyze_single(probe, cutoff)?;
    let (state, _) = assemble_branches(&plain, &cat, &catalysis_mask(probe));
    Ok((state, prob))
}

/// Literal catalysis pipeline on the W superposition; returns the
/// conditional output state and the joint herald probability.
pub fn pipeline_success_probability(probe: &ProbeSpec, cutoff: usize) -> Result<(FockVector, f64)> {
    probe.validate()?;
    guard(probe)?;
    let excited = excited_single_mode(probe, cutoff)?;
    let (mut state, _) = w_superposition(&excited, probe.d);
    let mut prob = 1.0;
    if probe.family.is_catalyzed() {
        let last = if probe.family.is_partial() { probe.s } else { probe.d };
        for site in 0..=last {
            let (next, p) = catalyze_mode(&state, site, probe.theta, probe.m)?;
            state = next;
            prob *= p;
        }
    }
    Ok((state, prob))
}

/// Multimode normalization constant recomputed in Fock space: the branch
/// sum of unit-normalized (catalyzed) excited states.
pub fn oracle_normalization(probe: &ProbeSpec, cutoff: usize) -> Result<f64> {
    probe.validate()?;
    guard(probe)?;
    let plain = excited_single_mode(probe, cutoff)?;
    let cat = if probe.family.is_catalyzed() {
        catalyze_single(probe, cutoff)?.0
    } else {
        plain.clone()
    };
    Ok(assemble_branches(&plain, &cat, &catalysis_mask(probe)).1)
}

/// Single-mode catalysis of the probe's excited state; exposed for
/// moment-level checks of A_qp / B_pq.
pub fn catalyze_single(probe: &ProbeSpec, cutoff: usize) -> Result<(FockVector, f64)> {
    let excited = excited_single_mode(probe, cutoff)?;
    catalyze_mode(&excited, 0, probe.theta, probe.m)
}

/// Closed-form catalytic-operator image N_m :L_m(n tan^2 theta): cos^{n+m} |alpha>
/// expanded in the Fock basis (normalized). Eigenvalue on |n> of the
/// normal-ordered Laguerre factor is sum_k (-1)^k C(m,k) C(n,k) tan^{2k}.
pub fn catalytic_operator_image(alpha: f64, theta: f64, m: usize, cutoff: usize) -> Result<FockVector> {
    let coh = FockVector::coherent_state(Complex64::new(alpha, 0.0), cutoff)?;
    let tan2 = theta.tan().powi(2);
    let cosn = theta.cos();
    let mut amps: Vec<Complex64> = coh
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let mut lag = 0.0;
            for k in 0..=m.min(n) {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                lag += sign * binomial(m, k) * binomial(n, k) * tan2.powi(k as i32);
            }
            a * lag * cosn.powi((n + m) as i32)
        })
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    FockVector::from_amplitudes(&[cutoff], amps)
}

/// Effective QFI from exact moments: 4 (<N_s^2> - <N_s>^2) with
/// N_s = sum of n_j over signal modes 1..d.
pub fn oracle_effective_qfi(state: &FockVector, d: usize) -> Result<f64> {
    if state.num_modes() < d + 1 {
        return Err(Error::DimensionMismatch { expected: d + 1, got: state.num_modes() });
    }
    let mut mean = 0.0;
    let mut second = 0.0;
    for i in 1..=d {
        mean += state.moment(&[(i, "n")])?.re;
        for j in 1..=d {
            second += if i == j {
                state.moment(&[(i, "n n")])?.re
            } else {
                state.moment(&[(i, "n"), (j, "n")])?.re
            };
        }
    }
    Ok(4.0 * (second - mean * mean))
}

/// Quadrature moments of the equal-weight readout output c_0, from
/// mode-operator linear combinations after phase encoding.
pub fn oracle_homodyne(state: &FockVector, d: usize, phi_bar: f64) -> Result<QuadratureMoments> {
    if state.num_modes() < d + 1 {
        return Err(Error::DimensionMismatch { expected: d + 1, got: state.num_modes() });
    }
    let mut encoded = state.clone();
    for j in 1..=d {
        encoded = encoded.apply_phase(j, phi_bar)?;
    }
    let w = 1.0 / ((d + 1) as f64).sqrt();
    // <c0>, <c0^2>, <c0^dag c0> as sums over mode moments
    let mut c0 = Complex64::new(0.0, 0.0);
    let mut c0sq = Complex64::new(0.0, 0.0);
    let mut c0dc0 = Complex64::new(0.0, 0.0);
    for j in 0..=d {
        c0 += w * encoded.moment(&[(j, "a")])?;
        for k in 0..=d {
            let jk = if j == k {
                encoded.moment(&[(j, "a a")])?
            } else {
                encoded.moment(&[(j, "a"), (k, "a")])?
            };
            c0sq += w * w * jk;
            let dag = if j == k {
                encoded.moment(&[(j, "adag a")])?
            } else {
                encoded.moment(&[(j, "adag"), (k, "a")])?
            };
            c0dc0 += w * w * dag;
        }
    }
    let mean_x = 2.0f64.sqrt() * c0.re;
    let mean_x2 = 0.5 + c0sq.re + c0dc0.re;
    Ok(QuadratureMoments { mean_x, mean_x2, phase: phi_bar })
}

/// Lossy effective QFI from exact Fock moments:
/// sum_{i != j} 4 |h1|^2 Cov(n_i, n_j) + sum_i 4 (|h1|^2 Var(n_i) + h2 <n_i>).
pub fn oracle_lossy_qfi(state: &FockVector, d: usize, eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("eta = {eta} outside [0, 1]")));
    }
    let h1_sq = eta * eta;
    let h2 = (1.0 - eta) * eta;
    let mut means = vec![0.0; d + 1];
    for (i, slot) in means.iter_mut().enumerate().skip(1) {
        *slot = state.moment(&[(i, "n")])?.re;
    }
    let mut acc = 0.0;
    for i in 1..=d {
        for j in 1..=d {
            let nn = if i == j {
                state.moment(&[(i, "n n")])?.re
            } else {
                state.moment(&[(i, "n"), (j, "n")])?.re
            };
            acc += 4.0 * h1_sq * (nn - means[i] * means[j]);
        }
        acc += 4.0 * h2 * means[i];
    }
    Ok(acc)
}

/// Outcome of the three-mode W-squeezed generation protocol.
#[derive(Debug, Clone)]
pub struct WsqOutcome {
    /// heralded three-mode state (single photon detected on path 1)
    pub state: FockVector,
    /// overlap-squared with the normalized target
    /// N (|xi,0,0> + |0,xi,0> + |0,0,xi>), xi = -2r
    pub fidelity: f64,
    /// probability of the path-1 herald
    pub herald_prob: f64,
    /// probabilities of the three single-photon path outcomes
    pub path_probs: [f64; 3],
}

/// State of the generation protocol after the Kerr couplings and local
/// anti-squeezing, i.e. everything that depends only on (theta1, theta2)
/// and r; the recombination angles act on this prefix.
fn wsq_prefix(theta1: f64, theta2: f64, r: f64, cutoff: usize) -> Result<FockVector> {
    // modes: [path1, path2, path3, sq_a, sq_b, sq_c]
    let paths = fock_basis(&[1, 1, 1], &[1, 0, 0])?;
    let sq = FockVector::squeezed_vacuum(r, cutoff)?;
    let mut state = paths.tensor(&sq).tensor(&sq).tensor(&sq);
    state = state.apply_bs(0, 1, theta1)?;
    state = state.apply_bs(0, 2, theta2)?;
    // cross-Kerr at kt = pi/2: path1 <-> c, path2 <-> a, path3 <-> b
    let half_pi = std::f64::consts::FRAC_PI_2;
    state = state.apply_number_number_phase(0, 5, half_pi)?;
    state = state.apply_number_number_phase(1, 3, half_pi)?;
    state = state.apply_number_number_phase(2, 4, half_pi)?;
    // local anti-squeezing S(-r) on each squeezed mode
    for mode in 3..6 {
        state = state.apply_squeeze(mode, -r)?;
    }
    Ok(state)
}

fn wsq_finish(prefix: &FockVector, theta3: f64, theta4: f64, r: f64, cutoff: usize) -> Result<WsqOutcome> {
    let mut state = prefix.apply_bs(1, 2, theta3)?;
    state = state.apply_bs(0, 1, theta4)?;

    let mut path_probs = [0.0; 3];
    for (k, occ) in [[1usize, 0, 0], [0, 1, 0], [0, 0, 1]].iter().enumerate() {
        let mut s = state.clone();
        let mut p = 1.0;
        // project path modes in place; earlier removals shift indices
        let mut ok = true;
        for (step, &n) in occ.iter().enumerate() {
            match s.project_mode(0, n) {
                Ok((next, q)) => {
                    s = next;
                    p *= q;
                }
                Err(Error::NullOutcome { .. }) => {
                    ok = false;
                    p = 0.0;
                    break;
                }
                Err(e) => return Err(e),
            }
            let _ = step;
        }
        path_probs[k] = if ok { p } else { 0.0 };
    }

    // herald on path 1
    let (s1, p1) = state.project_mode(0, 1)?;
    let (s2, p2) = s1.project_mode(0, 0)?;
    let (heralded, p3) = s2.project_mode(0, 0)?;
    let herald_prob = p1 * p2 * p3;

    // target: normalized three-branch W of |xi = -2r>
    let target_branch = FockVector::squeezed_vacuum(-2.0 * r, cutoff)?;
    let (target, _) = w_superposition(&target_branch, 2);
    let fidelity = target.inner(&heralded)?.norm_sqr();
    Ok(WsqOutcome { state: heralded, fidelity, herald_prob, path_probs })
}

/// Simulate the six-mode generation protocol: a single photon split over
/// three paths (BS1, BS2), cross-Kerr sign flips onto three squeezed
/// modes, local anti-squeezing, path recombination (BS3, BS4), and a
/// single-photon herald on path 1.
pub fn simulate_wsq_generation(angles: [f64; 4], r: f64, cutoff: usize) -> Result<WsqOutcome> {
    for &a in &angles {
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&a) {
            return Err(Error::InvalidArgument(format!("BS angle {a} outside (0, pi/2)")));
        }
    }
    let prefix = wsq_prefix(angles[0], angles[1], r, cutoff)?;
    wsq_finish(&prefix, angles[2], angles[3], r, cutoff)
}

/// Result of the balanced-angle search for the generation protocol.
#[derive(Debug, Clone)]
pub struct WsqOptimum {
    pub angles: [f64; 4],
    pub fidelity: f64,
    pub herald_prob: f64,
    /// |tau1 tau2 tau4 - (1-tau1)(1-tau3)(1-tau4)| at the optimum, with
    /// tau_i = cos^2(angle_i): the printed angle constraint is violated
    /// because it equates quantities of opposite sign.
    pub constraint_residual: f64,
}

/// Coordinate-descent maximization of the heralded fidelity over the four
/// BS angles. The state before the recombination splitters depends only
/// on the first two angles, so sweeps of theta3/theta4 reuse it.
pub fn optimize_wsq_angles(r: f64, cutoff: usize) -> Result<WsqOptimum> {
    let lo = 0.02f64;
    let hi = std::f64::consts::FRAC_PI_2 - 0.02;
    // balanced-split guess: arccos(1/sqrt(3)), pi/4, pi/4, arctan(1/sqrt(2))
    let mut angles = [0.9553f64, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4, 0.6155];
    let mut prefix = wsq_prefix(angles[0], angles[1], r, cutoff)?;
    let mut best = wsq_finish(&prefix, angles[2], angles[3], r, cutoff)?.fidelity;
    for _round in 0..3 {
        for i in 0..4 {
            let eval = |v: f64, angles: [f64; 4], prefix: &FockVector| -> Result<f64> {
                let mut t = angles;
                t[i] = v;
                let out = if i < 2 {
                    simulate_wsq_generation(t, r, cutoff)?
                } else {
                    wsq_finish(prefix, t[2], t[3], r, cutoff)?
                };
                Ok(out.fidelity)
            };
            // golden-section over one coordinate
            let (mut a, mut b) = (lo, hi);
            let phi = 0.5 * (5.0f64.sqrt() - 1.0);
            let mut x1 = b - phi * (b - a);
            let mut x2 = a + phi * (b - a);
            let mut f1 = eval(x1, angles, &prefix)?;
            let mut f2 = eval(x2, angles, &prefix)?;
            for _ in 0..22 {
                if f1 < f2 {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + phi * (b - a);
                    f2 = eval(x2, angles, &prefix)?;
                } else {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - phi * (b - a);
                    f1 = eval(x1, angles, &prefix)?;
                }
            }
            let x = 0.5 * (a + b);
            let fx = eval(x, angles, &prefix)?;
            if fx > best {
                best = fx;
                angles[i] = x;
                if i < 2 {
                    prefix = wsq_prefix(angles[0], angles[1], r, cutoff)?;
                }
            }
        }
    }
    let out = simulate_wsq_generation(angles, r, cutoff)?;
    let tau: Vec<f64> = angles.iter().map(|a| a.cos().powi(2)).collect();
    let residual = (tau[0] * tau[1] * tau[3] - (1.0 - tau[0]) * (1.0 - tau[2]) * (1.0 - tau[3])).abs();
    Ok(WsqOptimum {
        angles,
        fidelity: out.fidelity,
        herald_prob: out.herald_prob,
        constraint_residual: residual,
    })
}

/// Exact sparse representation of a W-type probe: one excited single-mode
/// vector per branch, vacuum elsewhere. Catalysis acts per branch through
/// a literal two-mode simulation (BS plus ancilla projection), so no
/// closed-form expression from `probes` or `special_fn` is involved;
/// multimode moments contract branch products mechanically. This backend
/// has no cutoff pressure from the number of modes, which the dense
/// simulation cross-checks at feasible sizes.
#[derive(Debug, Clone)]
pub struct BranchOracle {
    d: usize,
    weights: Vec<Complex64>,
    /// excited single-mode vector of branch k (lives on mode k)
    excited: Vec<Vec<Complex64>>,
    /// multimode normalization of the final state
    norm_const: f64,
}

/// Single-mode cutoff for the branch oracle, doubled until the state
/// constructor leaves less than 1e-15 outside.
fn branch_cutoff(probe: &ProbeSpec) -> Result<usize> {
    let mut cutoff = default_cutoff(probe);
    for _ in 0..6 {
        let s = excited_single_mode(probe, cutoff);
        match s {
            Ok(v) if v.leakage() <= 1e-15 => return Ok(cutoff),
            _ => cutoff *= 2,
        }
    }
    Err(Error::CutoffTooSmall { cutoff, leakage: f64::NAN })
}

impl BranchOracle {
    /// Build the probe branch by branch; returns the oracle state and the
    /// joint catalysis success probability.
    pub fn build(probe: &ProbeSpec) -> Result<(Self, f64)> {
        probe.validate()?;
        let cutoff = branch_cutoff(probe)?;
        let excited0 = excited_single_mode(probe, cutoff)?;
        let d = probe.d;
        let mut weights = vec![Complex64::new(1.0, 0.0); d + 1];
        let mut excited: Vec<Vec<Complex64>> =
            vec![excited0.amplitudes().to_vec(); d + 1];
        // normalize the uncatalyzed W superposition
        let pre_norm = branch_norm(&weights, &excited);
        let n_w = 1.0 / pre_norm.sqrt();
        for w in weights.iter_mut() {
            *w *= n_w;
        }

        let mut success = 1.0;
        if probe.family.is_catalyzed() {
            let last = if probe.family.is_partial() { probe.s } else { probe.d };
            // vacuum branch factor of one catalysis module
            let vac_state = fock_basis(&[cutoff], &[0])?;
            let (vac_post, vac_p) = catalyze_mode(&vac_state, 0, probe.theta, probe.m)?;
            let vac_amp = vac_post.amplitudes()[0] * vac_p.sqrt();
            // excited branch factor
            let exc_state = FockVector::from_amplitudes(&[cutoff], excited[0].clone())?;
            let (exc_post, exc_p) = catalyze_mode(&exc_state, 0, probe.theta, probe.m)?;
            let exc_scale = exc_p.sqrt();
            // herald probability carries the true pipeline weights
            for (site, exc) in excited.iter_mut().enumerate().take(last + 1) {
                for (k, w) in weights.iter_mut().enumerate() {
                    if k == site {
                        *w *= exc_scale;
                    } else {
                        *w *= vac_amp;
                    }
                }
                *exc = exc_post.amplitudes().to_vec();
            }
            success = branch_norm(&weights, &excited);
        }
        // the probe state itself follows the equal-coefficient convention
        let norm_const = branch_normalization_constant(&weights, &excited);
        for w in weights.iter_mut() {
            *w = Complex64::new(norm_const, 0.0);
        }
        Ok((Self { d, weights, excited, norm_const }, success))
    }

    /// Multimode normalization constant: inverse norm of the plain branch
    /// sum with unit-normalized excited factors.
    pub fn normalization(&self) -> f64 {
        self.norm_const
    }

    /// Phase rotation exp(-i n_j phi) on mode j.
    pub fn apply_phase(&self, j: usize, phi: f64) -> Result<Self> {
        if j > self.d {
            return Err(Error::ModeOutOfRange { index: j, modes: self.d + 1 });
        }
        let mut out = self.clone();
        for (n, a) in out.excited[j].iter_mut().enumerate() {
            *a *= Complex64::from_polar(1.0, -(n as f64) * phi);
        }
        Ok(out)
    }

    /// Exact expectation value of an operator-product spec, in the same
    /// token language as [`FockVector::moment`].
    pub fn moment(&self, spec: &[(usize, &str)]) -> Result<Complex64> {
        let mut per_mode: Vec<Vec<crate::fock::LadderOp>> = vec![Vec::new(); self.d + 1];
        for (mode, ops) in spec {
            if *mode > self.d {
                return Err(Error::ModeOutOfRange { index: *mode, modes: self.d + 1 });
            }
            per_mode[*mode].extend(crate::fock::parse_ops(ops)?);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=self.d {
            for k in 0..=self.d {
                let mut term = self.weights[i].conj() * self.weights[k];
                if term.norm_sqr() == 0.0 {
                    continue;
                }
                for (mode, ops) in per_mode.iter().enumerate() {
                    let bra = if mode == i { Some(&self.excited[i]) } else { None };
                    let ket = if mode == k { Some(&self.excited[k]) } else { None };
                    term *= single_mode_element(bra, ops, ket);
                    if term.norm_sqr() == 0.0 {
                        break;
                    }
                }
                acc += term;
            }
        }
        Ok(acc)
    }

    pub fn mean_photons_total(&self) -> Result<f64> {
        let mut acc = 0.0;
        for j in 0..=self.d {
            acc += self.moment(&[(j, "n")])?.re;
        }
        Ok(acc)
    }

    pub fn effective_qfi(&self) -> Result<f64> {
        let d = self.d;
        let mut mean = 0.0;
        let mut second = 0.0;
        for i in 1..=d {
            mean += self.moment(&[(i, "n")])?.re;
            for j in 1..=d {
                second += if i == j {
                    self.moment(&[(i, "n n")])?.re
                } else {
                    self.moment(&[(i, "n"), (j, "n")])?.re
                };
            }
        }
        Ok(4.0 * (second - mean * mean))
    }

    pub fn lossy_qfi(&self, eta: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidArgument(format!("eta = {eta} outside [0, 1]")));
        }
        let d = self.d;
        let h1_sq = eta * eta;
        let h2 = (1.0 - eta) * eta;
        let mut means = vec![0.0; d + 1];
        for (i, slot) in means.iter_mut().enumerate().skip(1) {
            *slot = self.moment(&[(i, "n")])?.re;
        }
        let mut acc = 0.0;
        for i in 1..=d {
            for j in 1..=d {
                let nn = if i == j {
                    self.moment(&[(i, "n n")])?.re
                } else {
                    self.moment(&[(i, "n"), (j, "n")])?.re
                };
                acc += 4.0 * h1_sq * (nn - means[i] * means[j]);
            }
            acc += 4.0 * h2 * means[i];
        }
        Ok(acc)
    }

    /// Quadrature moments of the equal-weight readout output after
    /// symmetric phase encoding.
    pub fn homodyne(&self, phi_bar: f64) -> Result<QuadratureMoments> {
        let d = self.d;
        let mut encoded = self.clone();
        for j in 1..=d {
            encoded = encoded.apply_phase(j, phi_bar)?;
        }
        let w = 1.0 / ((d + 1) as f64).sqrt();
        let mut c0 = Complex64::new(0.0, 0.0);
        let mut c0sq = Complex64::new(0.0, 0.0);
        let mut c0dc0 = Complex64::new(0.0, 0.0);
        for j in 0..=d {
            c0 += w * encoded.moment(&[(j, "a")])?;
            for k in 0..=d {
                let jk = if j == k {
                    encoded.moment(&[(j, "a a")])?
                } else {
                    encoded.moment(&[(j, "a"), (k, "a")])?
                };
                c0sq += w * w * jk;
                let dag = if j == k {
                    encoded.moment(&[(j, "adag a")])?
                } else {
                    encoded.moment(&[(j, "adag"), (k, "a")])?
                };
                c0dc0 += w * w * dag;
            }
        }
        Ok(QuadratureMoments {
            mean_x: 2.0f64.sqrt() * c0.re,
            mean_x2: 0.5 + c0sq.re + c0dc0.re,
            phase: phi_bar,
        })
    }
}

/// ||sum_k w_k b_k||^2 for branch vectors with unit-norm excited factors.
fn branch_norm(weights: &[Complex64], excited: &[Vec<Complex64>]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, wi) in weights.iter().enumerate() {
        for (k, wk) in weights.iter().enumerate() {
            let ov = if i == k {
                Complex64::new(norm_sqr_vec(&excited[i]), 0.0)
            } else {
                // modes i and k differ: <e_i|0> <0|e_k>
                excited[i][0].conj() * excited[k][0]
            };
            acc += wi.conj() * wk * ov;
        }
    }
    acc.re
}

fn branch_normalization_constant(weights: &[Complex64], excited: &[Vec<Complex64>]) -> f64 {
    // strip the weights: norm of the equal-coefficient branch sum with
    // re-normalized excited factors
    let unit: Vec<Vec<Complex64>> = excited
        .iter()
        .map(|e| {
            let n = norm_sqr_vec(e).sqrt();
            e.iter().map(|a| a / n).collect()
        })
        .collect();
    let ones = vec![Complex64::new(1.0, 0.0); weights.len()];
    1.0 / branch_norm(&ones, &unit).sqrt()
}

fn norm_sqr_vec(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// <bra| ops |ket> for single-mode vectors; `None` denotes vacuum.
fn single_mode_element(
    bra: Option<&Vec<Complex64>>,
    ops: &[crate::fock::LadderOp],
    ket: Option<&Vec<Complex64>>,
) -> Complex64 {
    use crate::fock::LadderOp;
    let vac = vec![Complex64::new(1.0, 0.0)];
    let bra_v: &[Complex64] = bra.map(|v| v.as_slice()).unwrap_or(&vac);
    let ket_v: &[Complex64] = ket.map(|v| v.as_slice()).unwrap_or(&vac);
    let raises = ops.iter().filter(|o| matches!(o, LadderOp::Raise)).count();
    let dim = bra_v.len().max(ket_v.len()) + raises;
    let mut work = vec![Complex64::new(0.0, 0.0); dim];
    work[..ket_v.len()].copy_from_slice(ket_v);
    for op in ops.iter().rev() {
        match op {
            LadderOp::Number => {
                for (n, a) in work.iter_mut().enumerate() {
                    *a *= n as f64;
                }
            }
            LadderOp::Lower => {
                for n in 0..dim - 1 {
                    work[n] = ((n + 1) as f64).sqrt() * work[n + 1];
                }
                work[dim - 1] = Complex64::new(0.0, 0.0);
            }
            LadderOp::Raise => {
                for n in (1..dim).rev() {
                    work[n] = (n as f64).sqrt() * work[n - 1];
                }
                work[0] = Complex64::new(0.0, 0.0);
            }
        }
    }
    bra_v
        .iter()
        .zip(&work)
        .map(|(b, k)| b.conj() * k)
        .sum()
}

/// Validation depth for [`validate_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationLevel {
    /// d <= 2, m <= 2
    Fast,
    /// d <= 3, m <= 3
    Full,
}

/// Worst relative error observed for one quantity across the grid.
#[derive(Debug, Clone)]
pub struct QuantityError {
    pub quantity: String,
    pub worst_rel_err: f64,
    pub worst_case: String,
    pub points: usize,
}

/// Oracle-equivalence report over the full parameter grid.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub level: ValidationLevel,
    pub tolerance: f64,
    pub pass: bool,
    pub grid_points: usize,
    pub quantities: Vec<QuantityError>,
}

/// Oracle-equivalence tolerance (relative).
pub const ORACLE_TOLERANCE: f64 = 1e-8;

fn rel_err(analytic: f64, oracle: f64) -> f64 {
    (analytic - oracle).abs() / oracle.abs().max(1e-12)
}

struct PointErrors {
    label: String,
    errors: Vec<(&'static str, f64)>,
}

/// Analytic quantities of one probe, packaged for comparison.
struct AnalyticSide {
    norm: f64,
    n_bar: f64,
    h: f64,
    p: f64,
    h_l: [f64; 2],
    homodyne: Option<[QuadratureMoments; 2]>,
}

const ETA_GRID: [f64; 2] = [0.3, 0.7];
const PHI_GRID: [f64; 2] = [0.0, 1.0];

fn analytic_side(probe: &ProbeSpec) -> Result<AnalyticSide> {
    let homodyne = if probe.family.is_coherent() && probe.family.is_catalyzed() {
        let at = |phi: f64| {
            if probe.family.is_partial() {
                homodyne::x_moments_partial(probe.amplitude, probe.theta, probe.m, probe.d, probe.s, phi)
            } else {
                homodyne::x_moments_global(probe.amplitude, probe.theta, probe.m, probe.d, phi)
            }
        };
        Some([at(PHI_GRID[0])?, at(PHI_GRID[1])?])
    } else {
        None
    };
    Ok(AnalyticSide {
        norm: probes::normalization(probe)?,
        n_bar: probes::mean_photon(probe)?,
        h: metrics::effective_qfi(probe)?,
        p: metrics::success_probability(probe)?,
        h_l: [
            loss::lossy_effective_qfi(probe, ETA_GRID[0])?,
            loss::lossy_effective_qfi(probe, ETA_GRID[1])?,
        ],
        homodyne,
    })
}

#[allow(clippy::too_many_arguments)]
fn compare_sides(
    label: String,
    an: &AnalyticSide,
    norm_or: f64,
    n_bar_or: f64,
    h_or: f64,
    p_or: f64,
    h_l_or: [f64; 2],
    homodyne_or: Option<[QuadratureMoments; 2]>,
) -> PointErrors {
    let mut errors: Vec<(&'static str, f64)> = vec![
        ("normalization", rel_err(an.norm, norm_or)),
        ("n_bar", rel_err(an.n_bar, n_bar_or)),
        ("effective_qfi", rel_err(an.h, h_or)),
        ("success_probability", rel_err(an.p, p_or)),
        ("lossy_qfi", rel_err(an.h_l[0], h_l_or[0])),
        ("lossy_qfi", rel_err(an.h_l[1], h_l_or[1])),
    ];
    if let (Some(a), Some(o)) = (&an.homodyne, &homodyne_or) {
        for (ma, mo) in a.iter().zip(o) {
            errors.push(("homodyne_x", rel_err(ma.mean_x, mo.mean_x)));
            errors.push(("homodyne_x2", rel_err(ma.mean_x2, mo.mean_x2)));
        }
    }
    PointErrors { label, errors }
}

/// Compare analytics against the sparse branch oracle.
fn validate_point_branch(probe: &ProbeSpec) -> Result<PointErrors> {
    let label = format!("{} (branch oracle)", probe_label(probe));
    let an = analytic_side(probe)?;
    let (oracle, p_or) = BranchOracle::build(probe)?;
    let homodyne_or = if an.homodyne.is_some() {
        Some([oracle.homodyne(PHI_GRID[0])?, oracle.homodyne(PHI_GRID[1])?])
    } else {
        None
    };
    Ok(compare_sides(
        label,
        &an,
        oracle.normalization(),
        oracle.mean_photons_total()?,
        oracle.effective_qfi()?,
        p_or,
        [oracle.lossy_qfi(ETA_GRID[0])?, oracle.lossy_qfi(ETA_GRID[1])?],
        homodyne_or,
    ))
}

/// Compare analytics against the dense full-Hilbert-space simulation.
fn validate_point_dense(probe: &ProbeSpec) -> Result<PointErrors> {
    let label = format!("{} (dense oracle)", probe_label(probe));
    let cutoff = dense_cutoff(probe).expect("caller checked feasibility");
    let an = analytic_side(probe)?;
    let (state, p_or) = build_probe_fock(probe, cutoff)?;
    let mut n_bar_or = 0.0;
    for j in 0..=probe.d {
        n_bar_or += state.moment(&[(j, "n")])?.re;
    }
    let homodyne_or = if an.homodyne.is_some() {
        Some([
            oracle_homodyne(&state, probe.d, PHI_GRID[0])?,
            oracle_homodyne(&state, probe.d, PHI_GRID[1])?,
        ])
    } else {
        None
    };
    Ok(compare_sides(
        label,
        &an,
        oracle_normalization(probe, cutoff)?,
        n_bar_or,
        oracle_effective_qfi(&state, probe.d)?,
        p_or,
        [
            oracle_lossy_qfi(&state, probe.d, ETA_GRID[0])?,
            oracle_lossy_qfi(&state, probe.d, ETA_GRID[1])?,
        ],
        homodyne_or,
    ))
}

fn probe_label(probe: &ProbeSpec) -> String {
    format!(
        "{} d={} m={} theta={} amp={} s={}",
        probe.family.name(),
        probe.d,
        probe.m,
        probe.theta,
        probe.amplitude,
        probe.s
    )
}

/// Cutoff at which the dense simulation reaches oracle precision, or
/// `None` when the state size would be impractical (heavy squeezed tails
/// at d = 3 need cutoffs whose dense product state no longer fits).
fn dense_cutoff(probe: &ProbeSpec) -> Option<usize> {
    if probe.family.is_coherent() {
        Some(coherent_cutoff(probe.amplitude))
    } else if probe.amplitude <= 0.5 {
        Some(26)
    } else if probe.d <= 2 {
        Some(64)
    } else {
        None
    }
}

fn grid_probes(level: ValidationLevel) -> Vec<ProbeSpec> {
    let (max_d, max_m) = match level {
        ValidationLevel::Fast => (2usize, 2usize),
        ValidationLevel::Full => (3, 3),
    };
    let thetas = [0.3, 0.7, 1.1];
    let alphas = [0.5, 1.0];
    let rs = [0.3, 0.8];
    let mut probes_list = Vec::new();
    for d in 1..=max_d {
        for &alpha in &alphas {
            probes_list.push(ProbeSpec::wc(alpha, d));
        }
        for &r in &rs {
            probes_list.push(ProbeSpec::ws(r, d));
        }
        for m in 0..=max_m {
            for &theta in &thetas {
                for &alpha in &alphas {
                    probes_list.push(ProbeSpec::cwc(alpha, theta, m, d));
                }
                for &r in &rs {
                    probes_list.push(ProbeSpec::cws(r, theta, m, d));
                }
                let mut ss = vec![0usize, 1, d];
                ss.dedup();
                ss.retain(|&s| s <= d);
                for s in ss {
                    for &alpha in &alphas {
                        probes_list.push(ProbeSpec::pcwc(alpha, theta, m, d, s));
                    }
                    for &r in &rs {
                        probes_list.push(ProbeSpec::pcws(r, theta, m, d, s));
                    }
                }
            }
        }
    }
    probes_list
}

/// Run the oracle-equivalence grid and aggregate worst relative errors
/// per quantity. Every point runs against the branch oracle; points whose
/// dense state fits in memory additionally run against the literal
/// full-Hilbert-space simulation, which guards the branch bookkeeping.
pub fn validate_grid(level: ValidationLevel) -> Result<ValidationReport> {
    let probes_list = grid_probes(level);
    let mut jobs: Vec<(ProbeSpec, bool)> = Vec::new();
    for p in probes_list {
        jobs.push((p, false));
        if dense_cutoff(&p).is_some() {
            jobs.push((p, true));
        }
    }
    let results: Result<Vec<PointErrors>> = jobs
        .par_iter()
        .map(|(p, dense)| if *dense { validate_point_dense(p) } else { validate_point_branch(p) })
        .collect();
    let results = results?;
    let mut agg: Vec<QuantityError> = Vec::new();
    for pt in &results {
        for &(name, err) in &pt.errors {
            match agg.iter_mut().find(|q| q.quantity == name) {
                Some(q) => {
                    q.points += 1;
                    if err > q.worst_rel_err {
                        q.worst_rel_err = err;
                        q.worst_case = pt.label.clone();
                    }
                }
                None => agg.push(QuantityError {
                    quantity: name.to_string(),
                    worst_rel_err: err,
                    worst_case: pt.label.clone(),
                    points: 1,
                }),
            }
        }
    }
    let pass = agg.iter().all(|q| q.worst_rel_err <= ORACLE_TOLERANCE);
    Ok(ValidationReport {
        level,
        tolerance: ORACLE_TOLERANCE,
        pass,
        grid_points: results.len(),
        quantities: agg,
    })
}
