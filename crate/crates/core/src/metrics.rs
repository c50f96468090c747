//! Quantum Fisher information matrices, effective QFI per family, success
//! probabilities, gain and cooperation factors, and optimal-mode search.
//!
//! With commuting number generators, the pure-state QFIM reduces to
//! photon-number covariances, which the W-type branch structure makes
//! diagonal-plus-rank-one: F_ii = 4 (N^2 <n_i^2> - N^4 <n_i>^2) and
//! F_ij = -4 N^4 <n_i><n_j> for i != j.

use crate::probes::{
    self, branch_moments, cat_coherent_nm_inv_sq, cat_squeezed_norm_sq,
    plain_coherent_moments, plain_squeezed_moments, ProbeFamily, ProbeSpec, SingleModeMoments,
    UncatalyzedFamily,
};
use crate::special_fn::factorial;
use crate::{Error, Result};

/// Bundle of headline metrics for one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// effective QFI
    pub h: f64,
    /// mean photon number over all d+1 modes
    pub n_bar: f64,
    /// catalysis success probability (1 for uncatalyzed families)
    pub p: f64,
    /// gain over a reference probe, dB (when a reference was given)
    pub g_db: Option<f64>,
    /// cooperation factor (when a reference was given)
    pub r: Option<f64>,
}

impl MetricReport {
    /// Metrics of one probe, optionally with gain/cooperation against an
    /// uncatalyzed reference of the same resource.
    pub fn for_probe(probe: &ProbeSpec, reference: Option<&ProbeSpec>) -> Result<Self> {
        let h = effective_qfi(probe)?;
        let report = Self {
            h,
            n_bar: probes::mean_photon(probe)?,
            p: success_probability(probe)?,
            g_db: None,
            r: None,
        };
        match reference {
            None => Ok(report),
            Some(r) => {
                let h_ref = effective_qfi(r)?;
                Ok(Self {
                    g_db: Some(gain_db(h, h_ref)?),
                    r: Some(cooperation(probe, r)?),
                    ..report
                })
            }
        }
    }
}

/// Non-negative weights over the d encoded phases, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("weight vector must be non-empty".into()));
        }
        if w.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "weights must sum to 1 (got {sum})"
            )));
        }
        Ok(Self { w })
    }

    pub fn uniform(d: usize) -> Self {
        Self { w: vec![1.0 / d as f64; d] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// QFIM over the d signal modes, F_ij = 4 (<n_i n_j> - <n_i><n_j>).
pub fn qfim(probe: &ProbeSpec) -> Result<Vec<Vec<f64>>> {
    let bm = branch_moments(probe)?;
    let n2 = bm.norm * bm.norm;
    let n4 = n2 * n2;
    let d = probe.d;
    let mut f = vec![vec![0.0; d]; d];
    for (i, row) in f.iter_mut().enumerate() {
        let (ni, ni2) = bm.signal[i];
        for (j, entry) in row.iter_mut().enumerate() {
            let (nj, _) = bm.signal[j];
            *entry = if i == j {
                4.0 * (n2 * ni2 - n4 * ni * ni)
            } else {
                -4.0 * n4 * ni * nj
            };
        }
    }
    Ok(f)
}

/// Weighted QFI w^T F w.
pub fn weighted_qfi(probe: &ProbeSpec, w: &WeightVector) -> Result<f64> {
    if w.weights().len() != probe.d {
        return Err(Error::DimensionMismatch { expected: probe.d, got: w.weights().len() });
    }
    let f = qfim(probe)?;
    let mut acc = 0.0;
    for (i, wi) in w.weights().iter().enumerate() {
        for (j, wj) in w.weights().iter().enumerate() {
            acc += wi * f[i][j] * wj;
        }
    }
    Ok(acc)
}

/// Effective QFI H = sum_ij F_ij through the per-family closed form.
pub fn effective_qfi(probe: &ProbeSpec) -> Result<f64> {
    probe.validate()?;
    let d = probe.d as f64;
    match probe.family {
        ProbeFamily::Wc => {
            // H_wc = 4 N1^2 |alpha|^2 d [1 + (1 - d N1^2) |alpha|^2]
            let n2 = probes::normalization(probe)?.powi(2);
            let a2 = probe.amplitude * probe.amplitude;
            Ok(4.0 * n2 * a2 * d * (1.0 + (1.0 - d * n2) * a2))
        }
        ProbeFamily::Ws => {
            // H_ws = 4 N3^2 [(3d - N3^2 d^2) sinh^4 r + 2 d sinh^2 r]
            let n2 = probes::normalization(probe)?.powi(2);
            let sh2 = probe.amplitude.sinh().powi(2);
            Ok(4.0 * n2 * ((3.0 * d - n2 * d * d) * sh2 * sh2 + 2.0 * d * sh2))
        }
        ProbeFamily::Cwc | ProbeFamily::Cws => {
            // global catalysis: 4 d N^2 [<n'^2> + 1 - 1] ... written via the
            // anti-normal moments: H = 4 d N^2 (<n'^2> - N^2 d <n'>^2)
            let mm = global_moments(probe)?;
            let n2 = probes::normalization(probe)?.powi(2);
            Ok(4.0 * n2 * (d * mm.n_sq - n2 * d * d * mm.n_mean * mm.n_mean))
        }
        ProbeFamily::Pcwc | ProbeFamily::Pcws => {
            // H = 4 N'^2 [s <n'^2> + (d-s) <n^2>]
            //     - 4 N'^4 [s <n'> + (d-s) <n>]^2
            let mm = global_moments(probe)?;
            let (pn, pn2) = if probe.family.is_coherent() {
                plain_coherent_moments(probe.amplitude)
            } else {
                plain_squeezed_moments(probe.amplitude)
            };
            let s = probe.s as f64;
            let n2 = probes::normalization(probe)?.powi(2);
            let first = s * mm.n_sq + (d - s) * pn2;
            let lin = s * mm.n_mean + (d - s) * pn;
            Ok(4.0 * n2 * first - 4.0 * n2 * n2 * lin * lin)
        }
    }
}

fn global_moments(probe: &ProbeSpec) -> Result<SingleModeMoments> {
    if probe.family.is_coherent() {
        SingleModeMoments::cat_coherent(probe.amplitude, probe.theta, probe.m)
    } else {
        SingleModeMoments::cat_squeezed(probe.amplitude, probe.theta, probe.m)
    }
}

/// Joint success probability of all conditional m-photon detections.
pub fn success_probability(probe: &ProbeSpec) -> Result<f64> {
    probe.validate()?;
    let d = probe.d as f64;
    let cos2m = probe.theta.cos().powi(2 * probe.m as i32);
    match probe.family {
        ProbeFamily::Wc | ProbeFamily::Ws => Ok(1.0),
        ProbeFamily::Cwc | ProbeFamily::Cws => {
            // P = N_uncat^2 N_m^{-2} N_cat^{-2} cos^{2 m d}
            let nm_inv_sq = nm_inv_sq(probe)?;
            let n_uncat = probes::normalization(&uncatalyzed_of(probe))?.powi(2);
            let n_cat = probes::normalization(probe)?.powi(2);
            Ok(n_uncat * nm_inv_sq * cos2m.powi(probe.d as i32) / n_cat)
        }
        ProbeFamily::Pcwc | ProbeFamily::Pcws => {
            let nm_inv_sq = nm_inv_sq(probe)?;
            let n_uncat = probes::normalization(&uncatalyzed_of(probe))?.powi(2);
            let s = probe.s as f64;
            let plain_ov_sq = if probe.family.is_coherent() {
                (-probe.amplitude * probe.amplitude).exp()
            } else {
                1.0 / probe.amplitude.cosh()
            };
            let inner = (s + 1.0) * (nm_inv_sq + d * cos2m * plain_ov_sq)
                + (d - s) * cos2m * (1.0 + d * plain_ov_sq);
            Ok(n_uncat * cos2m.powi(probe.s as i32) * inner)
        }
    }
}

/// N_m^{-2} (coherent) or N_m'^{-2} (squeezed): the squared norm of the
/// raw catalytic-operator image C|psi>.
fn nm_inv_sq(probe: &ProbeSpec) -> Result<f64> {
    if probe.family.is_coherent() {
        cat_coherent_nm_inv_sq(probe.amplitude, probe.theta, probe.m)
    } else {
        let ntilde_sq = cat_squeezed_norm_sq(probe.amplitude, probe.theta, probe.m)?;
        let sech = 1.0 / probe.amplitude.cosh();
        let chain = sech * probe.theta.cos().powi(2 * probe.m as i32) / factorial(probe.m).powi(2);
        Ok(chain / ntilde_sq)
    }
}

fn uncatalyzed_of(probe: &ProbeSpec) -> ProbeSpec {
    match probe.family.uncatalyzed() {
        ProbeFamily::Wc => ProbeSpec::wc(probe.amplitude, probe.d),
        _ => ProbeSpec::ws(probe.amplitude, probe.d),
    }
}

/// Gain factor 10 log10(h_new / h_ref) in decibels.
pub fn gain_db(h_new: f64, h_ref: f64) -> Result<f64> {
    if h_new <= 0.0 {
        return Err(Error::NonPositive { name: "h_new", value: h_new });
    }
    if h_ref <= 0.0 {
        return Err(Error::NonPositive { name: "h_ref", value: h_ref });
    }
    Ok(10.0 * (h_new / h_ref).log10())
}

/// Cooperation factor R = (H_cat - H_ref) * P_cat for a catalyzed probe
/// against its uncatalyzed reference at the same amplitude and d.
pub fn cooperation(probe_cat: &ProbeSpec, probe_ref: &ProbeSpec) -> Result<f64> {
    if probe_ref.family != probe_cat.family.uncatalyzed() {
        return Err(Error::FamilyMismatch(format!(
            "reference must be {}, got {}",
            probe_cat.family.uncatalyzed().name(),
            probe_ref.family.name()
        )));
    }
    if probe_ref.d != probe_cat.d || probe_ref.amplitude != probe_cat.amplitude {
        return Err(Error::FamilyMismatch(
            "cooperation requires the same amplitude and d on both probes".into(),
        ));
    }
    let dh = effective_qfi(probe_cat)? - effective_qfi(probe_ref)?;
    Ok(dh * success_probability(probe_cat)?)
}

/// Single-mode states whose QFI has a closed form here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleModeKind {
    Coherent,
    Squeezed,
    CatCoherent,
    CatSqueezed,
}

/// QFI 4 (<n^2> - <n>^2) of one (catalyzed) single-mode state.
pub fn single_mode_qfi(kind: SingleModeKind, amplitude: f64, theta: f64, m: usize) -> Result<f64> {
    let (n, n2) = match kind {
        SingleModeKind::Coherent => plain_coherent_moments(amplitude),
        SingleModeKind::Squeezed => plain_squeezed_moments(amplitude),
        SingleModeKind::CatCoherent => {
            let mm = SingleModeMoments::cat_coherent(amplitude, theta, m)?;
            (mm.n_mean, mm.n_sq)
        }
        SingleModeKind::CatSqueezed => {
            let mm = SingleModeMoments::cat_squeezed(amplitude, theta, m)?;
            (mm.n_mean, mm.n_sq)
        }
    };
    Ok(4.0 * (n2 - n * n))
}

/// Standard-deviation form of the weak quantum Cramer-Rao bound, 1/sqrt(H).
pub fn weak_qcrb(h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::NonPositive { name: "h", value: h });
    }
    Ok(1.0 / h.sqrt())
}

/// Exhaustive scan of the partial-catalysis mode count s = 0..d for the
/// largest gain over the uncatalyzed probe at the same resource; ties
/// break toward smaller s. The amplitude is solved from `n_resource` for
/// the uncatalyzed family.
pub fn optimal_catalysis_modes(
    d: usize,
    m: usize,
    theta: f64,
    n_resource: f64,
    family: ProbeFamily,
) -> Result<(usize, f64)> {
    if !family.is_partial() {
        return Err(Error::FamilyMismatch(format!(
            "mode scan applies to pcwc/pcws, got {}",
            family.name()
        )));
    }
    let coherent = family.is_coherent();
    let amp = probes::solve_amplitude_for_resource(
        n_resource,
        d,
        if coherent { UncatalyzedFamily::Wc } else { UncatalyzedFamily::Ws },
    )?;
    let h_ref = effective_qfi(&if coherent {
        ProbeSpec::wc(amp, d)
    } else {
        ProbeSpec::ws(amp, d)
    })?;
    let mut best: Option<(usize, f64)> = None;
    for s in 0..=d {
        let probe = if coherent {
            ProbeSpec::pcwc(amp, theta, m, d, s)
        } else {
            ProbeSpec::pcws(amp, theta, m, d, s)
        };
        let g = gain_db(effective_qfi(&probe)?, h_ref)?;
        let better = match best {
            None => true,
            Some((_, gb)) => g > gb,
        };
        if better {
            best = Some((s, g));
        }
    }
    Ok(best.expect("scan is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn effective_qfi_known_values() {
        // frozen from the closed forms verified against the Fock oracle
        let h = effective_qfi(&ProbeSpec::wc(1.0, 1)).unwrap();
        assert_relative_eq!(h, 2.3898, epsilon = 2e-4);
        let h = effective_qfi(&ProbeSpec::ws(1.0, 1)).unwrap();
        assert_relative_eq!(h, 9.594, epsilon = 2e-3);
        // reduction: catalysis with m = 0, theta = 0 is the identity
        assert_relative_eq!(
            effective_qfi(&ProbeSpec::cwc(1.0, 0.0, 0, 1)).unwrap(),
            effective_qfi(&ProbeSpec::wc(1.0, 1)).unwrap(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            effective_qfi(&ProbeSpec::cws(0.8, 0.0, 0, 2)).unwrap(),
            effective_qfi(&ProbeSpec::ws(0.8, 2)).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn qfim_sums_to_effective_qfi() {
        let probes = [
            ProbeSpec::wc(0.8, 3),
            ProbeSpec::cwc(1.0, 0.7, 2, 2),
            ProbeSpec::pcwc(0.5, 1.1, 3, 3, 1),
            ProbeSpec::ws(0.8, 2),
            ProbeSpec::cws(0.3, 0.3, 1, 3),
            ProbeSpec::pcws(0.8, 0.7, 2, 3, 2),
        ];
        for p in &probes {
            let f = qfim(p).unwrap();
            let sum: f64 = f.iter().flatten().sum();
            let h = effective_qfi(p).unwrap();
            assert_relative_eq!(sum, h, max_relative = 1e-10);
        }
    }

    #[test]
    fn qfim_structure() {
        // wc, d = 2: off-diagonal F_12 = -4 (N1^2 |alpha|^2)^2
        let p = ProbeSpec::wc(1.0, 2);
        let f = qfim(&p).unwrap();
        let n2 = probes::normalization(&p).unwrap().powi(2);
        assert_relative_eq!(f[0][1], -4.0 * (n2 * 1.0f64).powi(2), max_relative = 1e-12);
        assert_relative_eq!(f[0][1], f[1][0], max_relative = 1e-12);
        // d = 1: single-mode variance formula restricted to the branch
        let p1 = ProbeSpec::wc(1.0, 1);
        let f1 = qfim(&p1).unwrap();
        assert_relative_eq!(f1[0][0], effective_qfi(&p1).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn weighted_qfi_cases() {
        let p = ProbeSpec::wc(0.9, 3);
        let h = effective_qfi(&p).unwrap();
        let w = WeightVector::uniform(3);
        assert_relative_eq!(weighted_qfi(&p, &w).unwrap(), h / 9.0, max_relative = 1e-12);
        let e1 = WeightVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        let f = qfim(&p).unwrap();
        assert_relative_eq!(weighted_qfi(&p, &e1).unwrap(), f[0][0], max_relative = 1e-12);
        assert!(weighted_qfi(&p, &WeightVector::uniform(2)).is_err());
        assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
        assert!(WeightVector::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn success_probability_basics() {
        for p in [
            ProbeSpec::cwc(1.0, 0.0, 3, 2),
            ProbeSpec::cws(0.8, 0.0, 2, 3),
            ProbeSpec::pcwc(1.0, 0.0, 2, 3, 1),
            ProbeSpec::pcws(0.8, 0.0, 1, 3, 2),
        ] {
            assert_relative_eq!(success_probability(&p).unwrap(), 1.0, epsilon = 1e-10);
        }
        // success probability falls as the BS angle grows at fixed m
        let grid = [0.2, 0.6, 1.0];
        let mut last = f64::INFINITY;
        for &theta in &grid {
            let p = success_probability(&ProbeSpec::cwc(1.0, theta, 5, 5)).unwrap();
            assert!(p < last, "P must decrease with theta");
            assert!(p > 0.0 && p <= 1.0);
            last = p;
        }
    }

    #[test]
    fn partial_reduces_to_global_at_s_equals_d() {
        let pairs = [
            (ProbeSpec::pcwc(1.0, 0.7, 2, 3, 3), ProbeSpec::cwc(1.0, 0.7, 2, 3)),
            (ProbeSpec::pcws(0.8, 0.3, 1, 2, 2), ProbeSpec::cws(0.8, 0.3, 1, 2)),
        ];
        for (partial, global) in &pairs {
            assert_relative_eq!(
                effective_qfi(partial).unwrap(),
                effective_qfi(global).unwrap(),
                max_relative = 1e-10
            );
            assert_relative_eq!(
                success_probability(partial).unwrap(),
                success_probability(global).unwrap(),
                max_relative = 1e-10
            );
            assert_relative_eq!(
                probes::mean_photon(partial).unwrap(),
                probes::mean_photon(global).unwrap(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn gain_db_basics() {
        assert_relative_eq!(gain_db(3.0, 3.0).unwrap(), 0.0);
        assert_relative_eq!(gain_db(30.0, 3.0).unwrap(), 10.0, epsilon = 1e-12);
        assert!(gain_db(-1.0, 3.0).is_err());
        // ratio invariance under common rescaling
        let g1 = gain_db(7.3, 2.1).unwrap();
        let g2 = gain_db(7.3e3, 2.1e3).unwrap();
        assert_relative_eq!(g1, g2, epsilon = 1e-12);
    }

    #[test]
    fn cooperation_basics() {
        let cat = ProbeSpec::cwc(1.0, 0.0, 3, 2);
        let re = ProbeSpec::wc(1.0, 2);
        assert_relative_eq!(cooperation(&cat, &re).unwrap(), 0.0, epsilon = 1e-10);
        assert!(cooperation(&cat, &ProbeSpec::ws(1.0, 2)).is_err());
        assert!(cooperation(&cat, &ProbeSpec::wc(0.9, 2)).is_err());
    }

    #[test]
    fn single_mode_qfi_values() {
        assert_relative_eq!(
            single_mode_qfi(SingleModeKind::Coherent, 1.0, 0.0, 0).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        // 8 sinh^2(r) (sinh^2(r) + 1) at r = 1
        let sh2 = 1.0f64.sinh().powi(2);
        assert_relative_eq!(
            single_mode_qfi(SingleModeKind::Squeezed, 1.0, 0.0, 0).unwrap(),
            8.0 * sh2 * (sh2 + 1.0),
            epsilon = 1e-10
        );
        assert_relative_eq!(
            single_mode_qfi(SingleModeKind::CatCoherent, 1.0, 0.0, 0).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            single_mode_qfi(SingleModeKind::CatSqueezed, 0.9, 0.0, 0).unwrap(),
            single_mode_qfi(SingleModeKind::Squeezed, 0.9, 0.0, 0).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn weak_qcrb_values() {
        assert_relative_eq!(weak_qcrb(4.0).unwrap(), 0.5);
        assert_relative_eq!(weak_qcrb(1.0).unwrap(), 1.0);
        assert!(weak_qcrb(0.0).is_err());
    }

    #[test]
    fn metric_report_bundles() {
        let cat = ProbeSpec::cwc(1.0, 0.5, 1, 2);
        let re = ProbeSpec::wc(1.0, 2);
        let rep = MetricReport::for_probe(&cat, Some(&re)).unwrap();
        assert!(rep.h > 0.0);
        assert!(rep.p > 0.0 && rep.p <= 1.0);
        assert!(rep.g_db.is_some() && rep.r.is_some());
        let plain = MetricReport::for_probe(&re, None).unwrap();
        assert_relative_eq!(plain.p, 1.0);
        assert!(plain.g_db.is_none());
    }
}
