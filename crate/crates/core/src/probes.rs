//! The six probe families, their normalization constants, single-mode
//! catalyzed-state moments, vacuum overlaps, and resource solvers.
//!
//! A W-type probe over d+1 modes is a superposition of d+1 branches, each
//! holding one excited single-mode state with vacuum elsewhere. Every
//! multimode quantity in this crate is assembled from single-mode moments
//! and vacuum overlaps of those branches, which is exact and O(d).

use num_complex::Complex64;

use crate::special_fn::{
    binomial, factorial, hermite2, BivariateSeries, SeriesKind,
};
use crate::{Error, Result};

/// Angles at or beyond pi/2 - THETA_GUARD collapse the catalyzed state
/// onto vacuum; every normalizer diverges there.
pub const THETA_GUARD: f64 = 1e-6;

/// The six probe families: plain, globally catalyzed, and partially
/// catalyzed W-type coherent / squeezed states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeFamily {
    /// W-type coherent (uncatalyzed)
    Wc,
    /// globally catalyzed W-type coherent
    Cwc,
    /// partially catalyzed W-type coherent (modes 0..s catalyzed)
    Pcwc,
    /// W-type squeezed (uncatalyzed)
    Ws,
    /// globally catalyzed W-type squeezed
    Cws,
    /// partially catalyzed W-type squeezed
    Pcws,
}

impl ProbeFamily {
    pub fn is_coherent(self) -> bool {
        matches!(self, ProbeFamily::Wc | ProbeFamily::Cwc | ProbeFamily::Pcwc)
    }

    pub fn is_catalyzed(self) -> bool {
        !matches!(self, ProbeFamily::Wc | ProbeFamily::Ws)
    }

    pub fn is_partial(self) -> bool {
        matches!(self, ProbeFamily::Pcwc | ProbeFamily::Pcws)
    }

    /// The uncatalyzed family carrying the same resource.
    pub fn uncatalyzed(self) -> ProbeFamily {
        if self.is_coherent() {
            ProbeFamily::Wc
        } else {
            ProbeFamily::Ws
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProbeFamily::Wc => "wc",
            ProbeFamily::Cwc => "cwc",
            ProbeFamily::Pcwc => "pcwc",
            ProbeFamily::Ws => "ws",
            ProbeFamily::Cws => "cws",
            ProbeFamily::Pcws => "pcws",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "wc" => Ok(ProbeFamily::Wc),
            "cwc" => Ok(ProbeFamily::Cwc),
            "pcwc" => Ok(ProbeFamily::Pcwc),
            "ws" => Ok(ProbeFamily::Ws),
            "cws" => Ok(ProbeFamily::Cws),
            "pcws" => Ok(ProbeFamily::Pcws),
            other => Err(Error::InvalidArgument(format!("unknown probe family '{other}'"))),
        }
    }
}

/// One probe configuration. `amplitude` is the coherent amplitude alpha
/// for coherent families and the squeezing parameter r for squeezed ones;
/// both are restricted to non-negative reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    pub family: ProbeFamily,
    pub amplitude: f64,
    /// BS angle of catalysis, in [0, pi/2); ignored by wc/ws.
    pub theta: f64,
    /// Catalytic photon number; ignored by wc/ws.
    pub m: usize,
    /// Number of encoded phases (total modes d+1).
    pub d: usize,
    /// Partial families only: modes 0..s are catalyzed.
    pub s: usize,
}

impl ProbeSpec {
    pub fn wc(alpha: f64, d: usize) -> Self {
        Self { family: ProbeFamily::Wc, amplitude: alpha, theta: 0.0, m: 0, d, s: 0 }
    }

    pub fn cwc(alpha: f64, theta: f64, m: usize, d: usize) -> Self {
        Self { family: ProbeFamily::Cwc, amplitude: alpha, theta, m, d, s: 0 }
    }

    pub fn pcwc(alpha: f64, theta: f64, m: usize, d: usize, s: usize) -> Self {
        Self { family: ProbeFamily::Pcwc, amplitude: alpha, theta, m, d, s }
    }

    pub fn ws(r: f64, d: usize) -> Self {
        Self { family: ProbeFamily::Ws, amplitude: r, theta: 0.0, m: 0, d, s: 0 }
    }

    pub fn cws(r: f64, theta: f64, m: usize, d: usize) -> Self {
        Self { family: ProbeFamily::Cws, amplitude: r, theta, m, d, s: 0 }
    }

    pub fn pcws(r: f64, theta: f64, m: usize, d: usize, s: usize) -> Self {
        Self { family: ProbeFamily::Pcws, amplitude: r, theta, m, d, s }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidArgument("d must be >= 1".into()));
        }
        if self.amplitude < 0.0 || !self.amplitude.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "amplitude must be a non-negative real, got {}",
                self.amplitude
            )));
        }
        if self.family.is_catalyzed() {
            check_theta(self.theta)?;
        }
        if self.family.is_partial() && self.s > self.d {
            return Err(Error::InvalidArgument(format!(
                "partial catalysis count s = {} exceeds d = {}",
                self.s, self.d
            )));
        }
        Ok(())
    }

    /// Number of catalyzed signal modes (modes 1..d).
    pub(crate) fn catalyzed_signal_modes(&self) -> usize {
        match self.family {
            ProbeFamily::Wc | ProbeFamily::Ws => 0,
            ProbeFamily::Cwc | ProbeFamily::Cws => self.d,
            ProbeFamily::Pcwc | ProbeFamily::Pcws => self.s,
        }
    }

    /// Whether the reference mode 0 is catalyzed.
    pub(crate) fn reference_catalyzed(&self) -> bool {
        self.family.is_catalyzed()
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..std::f64::consts::FRAC_PI_2 - THETA_GUARD).contains(&theta) {
        return Err(Error::DegenerateCatalysis { theta });
    }
    Ok(())
}

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A_qp = <psi'| a^q adag^p |psi'> on the m-photon catalyzed coherent
/// state, through the two-variable Hermite expansion. Normalization is
/// included, so A_00 = 1.
pub fn cat_coherent_aqp(q: usize, p: usize, alpha: f64, theta: f64, m: usize) -> Result<Complex64> {
    check_theta(theta)?;
    let raw = cat_coherent_hermite_sum(q, p, alpha, theta, m);
    let norm = cat_coherent_hermite_sum(0, 0, alpha, theta, m);
    if norm.norm() < 1e-300 {
        return Err(Error::DegenerateCatalysis { theta });
    }
    Ok(raw / norm)
}

/// sum_{n,k}^m Pi^m_{n,k}(-mu, mu*) (-1)^q H_{p+n, q+k}(alpha_theta*, -alpha_theta);
/// at (q, p) = (0, 0) this is Nbar_m^{-2}.
fn cat_coherent_hermite_sum(q: usize, p: usize, alpha: f64, theta: f64, m: usize) -> Complex64 {
    let at = alpha * theta.cos();
    let mu = at * theta.tan().powi(2);
    let xi = c64(at);
    let eta = c64(-at);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..=m {
        for k in 0..=m {
            let pi = binomial(m, n) * binomial(m, k) / (factorial(n) * factorial(k))
                * (-mu).powi(n as i32)
                * mu.powi(k as i32);
            if pi == 0.0 {
                continue;
            }
            acc += pi * hermite2(p + n, q + k, xi, eta);
        }
    }
    if q % 2 == 1 {
        acc = -acc;
    }
    acc
}

/// Nbar_m^2, the squared normalization of the catalyzed coherent state
/// written as Nbar_m L_m(adag mu) |alpha_theta>.
pub fn cat_coherent_norm_sq(alpha: f64, theta: f64, m: usize) -> Result<f64> {
    check_theta(theta)?;
    let inv = cat_coherent_hermite_sum(0, 0, alpha, theta, m).re;
    if !(inv.is_finite()) || inv < 1e-300 {
        return Err(Error::DegenerateCatalysis { theta });
    }
    Ok(1.0 / inv)
}

/// Fock overlap <n|psi'> of the catalyzed coherent state (exact finite
/// sum; real for real alpha).
pub fn cat_coherent_overlap(n: usize, alpha: f64, theta: f64, m: usize) -> Result<f64> {
    let nbar = cat_coherent_norm_sq(alpha, theta, m)?.sqrt();
    let at = alpha * theta.cos();
    let mu = at * theta.tan().powi(2);
    let mut acc = 0.0;
    for k in 0..=m.min(n) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(m, k) / factorial(k) * mu.powi(k as i32)
            * factorial(n).sqrt()
            / factorial(n - k)
            * at.powi((n - k) as i32);
    }
    Ok(nbar * (-at * at / 2.0).exp() * acc)
}

/// Vacuum, one- and two-photon overlaps (lambda_c, epsilon_c, omega_c)
/// of the catalyzed coherent state.
pub fn overlaps_coherent(alpha: f64, theta: f64, m: usize) -> Result<(Complex64, Complex64, Complex64)> {
    Ok((
        c64(cat_coherent_overlap(0, alpha, theta, m)?),
        c64(cat_coherent_overlap(1, alpha, theta, m)?),
        c64(cat_coherent_overlap(2, alpha, theta, m)?),
    ))
}

/// N_m, the normalization of |psi'> = N_m C(theta) |alpha>; related to
/// Nbar_m by Nbar_m = cos^m(theta) e^{-|alpha|^2 sin^2(theta)/2} N_m.
pub fn cat_coherent_nm_inv_sq(alpha: f64, theta: f64, m: usize) -> Result<f64> {
    let nbar_sq = cat_coherent_norm_sq(alpha, theta, m)?;
    let chain = theta.cos().powi(2 * m as i32) * (-(alpha * alpha) * theta.sin().powi(2)).exp();
    // N_m^{-2} = Nbar_m^{-2} * cos^{2m} e^{-alpha^2 sin^2}
    Ok(chain / nbar_sq)
}

/// B_pq = <psi_s'| a^p adag^q |psi_s'> on the m-photon catalyzed squeezed
/// state, evaluated through the D_m series machinery. Only (1,1) and
/// (2,2) have printed closed forms and only those are needed.
pub fn cat_squeezed_bpq(p: usize, q: usize, r: f64, theta: f64, m: usize) -> Result<f64> {
    check_theta(theta)?;
    let k = SqueezedKernel::new(r, theta, m)?;
    match (p, q) {
        (1, 1) => Ok(k.b11),
        (2, 2) => Ok(k.b22),
        _ => Err(Error::InvalidArgument(format!(
            "cat_squeezed_bpq implemented for (1,1) and (2,2) only, got ({p},{q})"
        ))),
    }
}

/// Shared series evaluation for the catalyzed squeezed state.
struct SqueezedKernel {
    /// Ntilde_m^2
    norm_sq: f64,
    b11: f64,
    b22: f64,
}

impl SqueezedKernel {
    fn new(r: f64, theta: f64, m: usize) -> Result<Self> {
        check_theta(theta)?;
        let b = theta.cos().powi(2) * r.tanh();
        let order = m;
        let a_t = BivariateSeries::build(SeriesKind::ATheta, &[theta], order);
        let c_tau = BivariateSeries::build(SeriesKind::CTheta, &[theta], order);
        let delta = BivariateSeries::build(SeriesKind::Delta, &[], order);
        let prod = a_t
            .mul(&a_t)?
            .mul(&c_tau.mul(&c_tau)?)?
            .scale(c64(b * b));
        // g = 1 - B^2 A_t^2 C_tau^2, h = 2 + B^2 A_t^2 C_tau^2
        let one = BivariateSeries::constant(c64(1.0), order);
        let two = BivariateSeries::constant(c64(2.0), order);
        let g = one.sub(&prod)?;
        if g.coeff(0, 0).re <= 0.0 {
            return Err(Error::ZeroConstantTerm { magnitude: g.coeff(0, 0).norm() });
        }
        let h = two.add(&prod)?;

        let inv_norm = delta.mul(&g.powf(-0.5)?)?.dm_eval(m)?.re;
        if !inv_norm.is_finite() || inv_norm < 1e-300 {
            return Err(Error::DegenerateCatalysis { theta });
        }
        let norm_sq = 1.0 / inv_norm;
        let b11 = norm_sq * delta.mul(&g.powf(-1.5)?)?.dm_eval(m)?.re;
        let b22 = norm_sq * delta.mul(&h)?.mul(&g.powf(-2.5)?)?.dm_eval(m)?.re;
        Ok(Self { norm_sq, b11, b22 })
    }
}

/// Ntilde_m^2, the squared normalization coefficient of the catalyzed
/// squeezed state; <0|psi_s'> = Ntilde_m m!.
pub fn cat_squeezed_norm_sq(r: f64, theta: f64, m: usize) -> Result<f64> {
    Ok(SqueezedKernel::new(r, theta, m)?.norm_sq)
}

/// Which single-mode state a catalyzed/uncatalyzed branch carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleModeKind {
    CatCoherent,
    CatSqueezed,
}

/// Cached single-mode moments of one catalyzed excited state, plus the
/// overlaps the homodyne formulas need (coherent families only).
#[derive(Debug, Clone)]
pub struct SingleModeMoments {
    pub kind: SingleModeKind,
    /// Nbar_m^2 (coherent) or Ntilde_m^2 (squeezed).
    pub norm_sq: f64,
    /// <n>
    pub n_mean: f64,
    /// <n^2>
    pub n_sq: f64,
    /// <a adag>
    pub a11: f64,
    /// coherent-only extras
    pub a10: Complex64,
    pub a20: Complex64,
    pub lambda_c: Complex64,
    pub epsilon_c: Complex64,
    pub omega_c: Complex64,
}

impl SingleModeMoments {
    pub fn cat_coherent(alpha: f64, theta: f64, m: usize) -> Result<Self> {
        let a11 = cat_coherent_aqp(1, 1, alpha, theta, m)?.re;
        let a22 = cat_coherent_aqp(2, 2, alpha, theta, m)?.re;
        let (l, e, w) = overlaps_coherent(alpha, theta, m)?;
        Ok(Self {
            kind: SingleModeKind::CatCoherent,
            norm_sq: cat_coherent_norm_sq(alpha, theta, m)?,
            n_mean: a11 - 1.0,
            n_sq: a22 - 3.0 * a11 + 1.0,
            a11,
            a10: cat_coherent_aqp(1, 0, alpha, theta, m)?,
            a20: cat_coherent_aqp(2, 0, alpha, theta, m)?,
            lambda_c: l,
            epsilon_c: e,
            omega_c: w,
        })
    }

    pub fn cat_squeezed(r: f64, theta: f64, m: usize) -> Result<Self> {
        let k = SqueezedKernel::new(r, theta, m)?;
        Ok(Self {
            kind: SingleModeKind::CatSqueezed,
            norm_sq: k.norm_sq,
            n_mean: k.b11 - 1.0,
            n_sq: k.b22 - 3.0 * k.b11 + 1.0,
            a11: k.b11,
            a10: c64(0.0),
            a20: c64(0.0),
            lambda_c: c64(0.0),
            epsilon_c: c64(0.0),
            omega_c: c64(0.0),
        })
    }
}

/// Per-mode branch moments of a probe: the multimode normalization and
/// the (n_mean, n_sq) of each mode's excited state.
#[derive(Debug, Clone)]
pub(crate) struct BranchMoments {
    /// multimode normalization constant N
    pub norm: f64,
    /// (n_mean, n_sq) of the excited state on each signal mode 1..d
    pub signal: Vec<(f64, f64)>,
    /// n_mean of the excited state on the reference mode 0
    pub ref_n_mean: f64,
}

pub(crate) fn plain_coherent_moments(alpha: f64) -> (f64, f64) {
    let n = alpha * alpha;
    (n, n * (1.0 + n))
}

pub(crate) fn plain_squeezed_moments(r: f64) -> (f64, f64) {
    let n = r.sinh().powi(2);
    (n, n * (3.0 * n + 2.0))
}

pub(crate) fn branch_moments(probe: &ProbeSpec) -> Result<BranchMoments> {
    probe.validate()?;
    let plain = if probe.family.is_coherent() {
        plain_coherent_moments(probe.amplitude)
    } else {
        plain_squeezed_moments(probe.amplitude)
    };
    let cat = if probe.family.is_catalyzed() {
        let mm = if probe.family.is_coherent() {
            SingleModeMoments::cat_coherent(probe.amplitude, probe.theta, probe.m)?
        } else {
            SingleModeMoments::cat_squeezed(probe.amplitude, probe.theta, probe.m)?
        };
        (mm.n_mean, mm.n_sq)
    } else {
        plain
    };
    let n_cat = probe.catalyzed_signal_modes();
    let mut signal = Vec::with_capacity(probe.d);
    for j in 1..=probe.d {
        signal.push(if j <= n_cat { cat } else { plain });
    }
    let ref_n_mean = if probe.reference_catalyzed() { cat.0 } else { plain.0 };
    Ok(BranchMoments { norm: normalization(probe)?, signal, ref_n_mean })
}

/// Multimode normalization constant of the probe (N_1, N_2, N_1', N_3,
/// N_4, N_3' depending on family).
pub fn normalization(probe: &ProbeSpec) -> Result<f64> {
    probe.validate()?;
    let d = probe.d as f64;
    // vacuum overlap of the uncatalyzed excited state
    let plain_ov = if probe.family.is_coherent() {
        (-probe.amplitude * probe.amplitude / 2.0).exp()
    } else {
        (1.0 / probe.amplitude.cosh()).sqrt()
    };
    let inv_sq = match probe.family {
        ProbeFamily::Wc | ProbeFamily::Ws => (d + 1.0) * (1.0 + d * plain_ov * plain_ov),
        ProbeFamily::Cwc | ProbeFamily::Cws => {
            let cat_ov = catalyzed_vacuum_overlap(probe)?;
            (d + 1.0) * (1.0 + d * cat_ov * cat_ov)
        }
        ProbeFamily::Pcwc | ProbeFamily::Pcws => {
            let cat_ov = catalyzed_vacuum_overlap(probe)?;
            let s = probe.s as f64;
            (s + 1.0) * (1.0 + s * cat_ov * cat_ov)
                + (d - s) * (1.0 + (d - s - 1.0) * plain_ov * plain_ov)
                + 2.0 * (s + 1.0) * (d - s) * cat_ov * plain_ov
        }
    };
    if !(inv_sq.is_finite()) || inv_sq <= 0.0 {
        return Err(Error::NonPositive { name: "normalization^-2", value: inv_sq });
    }
    Ok(1.0 / inv_sq.sqrt())
}

/// <0|psi'> of the catalyzed excited state of the probe's family.
fn catalyzed_vacuum_overlap(probe: &ProbeSpec) -> Result<f64> {
    if probe.family.is_coherent() {
        cat_coherent_overlap(0, probe.amplitude, probe.theta, probe.m)
    } else {
        Ok(cat_squeezed_norm_sq(probe.amplitude, probe.theta, probe.m)?.sqrt()
            * factorial(probe.m))
    }
}

/// Average total photon number of the probe over all d+1 modes.
pub fn mean_photon(probe: &ProbeSpec) -> Result<f64> {
    let bm = branch_moments(probe)?;
    let signal_sum: f64 = bm.signal.iter().map(|(n, _)| n).sum();
    Ok(bm.norm * bm.norm * (signal_sum + bm.ref_n_mean))
}

/// Sum of signal-mode mean photon numbers (modes 1..d only); the quantity
/// entering the lossy effective QFI.
pub(crate) fn signal_mean_photons(probe: &ProbeSpec) -> Result<f64> {
    let bm = branch_moments(probe)?;
    let signal_sum: f64 = bm.signal.iter().map(|(n, _)| n).sum();
    Ok(bm.norm * bm.norm * signal_sum)
}

/// Families the resource solver accepts: the uncatalyzed ones, whose
/// mean photon number is monotone in the amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncatalyzedFamily {
    Wc,
    Ws,
}

/// Solve amplitude (alpha or r) so that the uncatalyzed probe carries
/// exactly `n_resource` photons on average, by bisection.
pub fn solve_amplitude_for_resource(n_resource: f64, d: usize, family: UncatalyzedFamily) -> Result<f64> {
    if n_resource <= 0.0 || !n_resource.is_finite() {
        return Err(Error::NonPositive { name: "n_resource", value: n_resource });
    }
    let nbar = |x: f64| -> f64 {
        let probe = match family {
            UncatalyzedFamily::Wc => ProbeSpec::wc(x, d),
            UncatalyzedFamily::Ws => ProbeSpec::ws(x, d),
        };
        mean_photon(&probe).expect("uncatalyzed mean photon is total")
    };
    let mut hi = 1.0;
    while nbar(hi) < n_resource {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::NonBracketing(format!(
                "resource N = {n_resource} not reachable below amplitude 1e3"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if nbar(mid) < n_resource {
            lo = mid;
        } else {
            hi = mid;
        }
        if (nbar(0.5 * (lo + hi)) - n_resource).abs() <= 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Squeezing strength in decibels: 10 log10(e^{2r}).
pub fn squeezing_db(r: f64) -> f64 {
    10.0 * (2.0 * r) * std::f64::consts::LOG10_E
}

/// Inverse of [`squeezing_db`].
pub fn squeezing_from_db(db: f64) -> f64 {
    db / (20.0 * std::f64::consts::LOG10_E)
}
