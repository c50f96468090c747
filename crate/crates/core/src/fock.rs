//! Dense truncated multimode Fock states and exact linear-optics operations.
//!
//! States are immutable: every operation returns a new [`FockVector`].
//! Beam splitters act per photon-number sector through the exact sector
//! unitary, so no truncation error is introduced away from the cutoff
//! boundary.

use num_complex::Complex64;

use crate::special_fn::ln_factorial;
use crate::{Error, Result};

/// Leakage above this in a state constructor is a hard error.
pub const LEAK_HARD_LIMIT: f64 = 1e-8;
/// Target constructor leakage for the default cutoff rule.
pub const LEAK_TARGET: f64 = 1e-12;

/// Default per-mode cutoff for a coherent state of amplitude `alpha`.
pub fn coherent_cutoff(alpha: f64) -> usize {
    let a = alpha.abs();
    20usize.max((a * a + 8.0 * a).ceil() as usize)
}

/// Default per-mode cutoff for a squeezed vacuum of parameter `r`,
/// rounded up to even.
pub fn squeezed_cutoff(r: f64) -> usize {
    let n = 10.0 * r.sinh().powi(2);
    let mut c = 30usize.max(n.ceil() as usize);
    if c % 2 == 1 {
        c += 1;
    }
    c
}

/// Default cutoff for an `m`-photon catalysis ancilla.
pub fn ancilla_cutoff(m: usize) -> usize {
    m + 4
}

/// Ladder-operator tokens accepted by [`FockVector::moment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LadderOp {
    Lower,
    Raise,
    Number,
}

pub(crate) fn parse_ops(s: &str) -> Result<Vec<LadderOp>> {
    s.split_whitespace()
        .map(|tok| match tok {
            "a" => Ok(LadderOp::Lower),
            "adag" => Ok(LadderOp::Raise),
            "n" => Ok(LadderOp::Number),
            other => Err(Error::InvalidArgument(format!(
                "unknown ladder operator token '{other}' (expected a, adag, n)"
            ))),
        })
        .collect()
}

/// Truncated multimode Fock-space state: per-mode cutoffs and a dense
/// complex amplitude array indexed by the photon-number tuple
/// (row-major, last mode fastest).
#[derive(Debug, Clone)]
pub struct FockVector {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
    /// Pre-renormalization truncation leakage recorded by constructors.
    leakage: f64,
    /// Set when an operation saw significant amplitude near a cutoff.
    truncation_warning: bool,
}

impl FockVector {
    /// Vacuum state over the given per-mode cutoffs.
    pub fn vacuum(cutoffs: &[usize]) -> Self {
        let dims: Vec<usize> = cutoffs.iter().map(|c| c + 1).collect();
        let len = dims.iter().product();
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { dims, amps, leakage: 0.0, truncation_warning: false }
    }

    pub fn from_amplitudes(cutoffs: &[usize], amps: Vec<Complex64>) -> Result<Self> {
        let dims: Vec<usize> = cutoffs.iter().map(|c| c + 1).collect();
        let len: usize = dims.iter().product();
        if amps.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: amps.len() });
        }
        Ok(Self { dims, amps, leakage: 0.0, truncation_warning: false })
    }

    /// Single-mode coherent state |alpha>, renormalized after truncation.
    pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<Self> {
        let mut amps = Vec::with_capacity(cutoff + 1);
        // e^{-|alpha|^2/2} alpha^n / sqrt(n!)
        let mut cur = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        amps.push(cur);
        for n in 1..=cutoff {
            cur *= alpha / (n as f64).sqrt();
            amps.push(cur);
        }
        Self::from_truncated(vec![cutoff + 1], amps, cutoff)
    }

    /// Single-mode squeezed vacuum with amplitudes
    /// sqrt(sech r) sqrt((2k)!) (tanh r / 2)^k / k! on even levels.
    pub fn squeezed_vacuum(r: f64, cutoff: usize) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        let sech = 1.0 / r.cosh();
        let lam = r.tanh() / 2.0;
        let mut cur = sech.sqrt();
        amps[0] = Complex64::new(cur, 0.0);
        let mut k = 1usize;
        while 2 * k <= cutoff {
            // ratio c_{2k} / c_{2(k-1)} = lam * sqrt((2k)(2k-1)) / k
            let kk = k as f64;
            cur *= lam * ((2.0 * kk) * (2.0 * kk - 1.0)).sqrt() / kk;
            amps[2 * k] = Complex64::new(cur, 0.0);
            k += 1;
        }
        Self::from_truncated(vec![cutoff + 1], amps, cutoff)
    }

    fn from_truncated(dims: Vec<usize>, mut amps: Vec<Complex64>, cutoff: usize) -> Result<Self> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let leakage = 1.0 - norm_sqr;
        if leakage > LEAK_HARD_LIMIT {
            return Err(Error::CutoffTooSmall { cutoff, leakage });
        }
        let scale = 1.0 / norm_sqr.sqrt();
        for a in amps.iter_mut() {
            *a *= scale;
        }
        Ok(Self { dims, amps, leakage: leakage.max(0.0), truncation_warning: false })
    }

    /// Coherent state at the default cutoff rule, doubling once if the
    /// leakage target is missed.
    pub fn coherent_state_auto(alpha: Complex64) -> Result<Self> {
        let cut = coherent_cutoff(alpha.norm());
        let s = Self::coherent_state(alpha, cut)?;
        if s.leakage <= LEAK_TARGET {
            return Ok(s);
        }
        Self::coherent_state(alpha, 2 * cut)
    }

    /// Squeezed vacuum at the default cutoff rule, doubling once if the
    /// leakage target is missed.
    pub fn squeezed_vacuum_auto(r: f64) -> Result<Self> {
        let cut = squeezed_cutoff(r);
        let s = Self::squeezed_vacuum(r, cut)?;
        if s.leakage <= LEAK_TARGET {
            return Ok(s);
        }
        Self::squeezed_vacuum(r, 2 * cut)
    }

    pub fn num_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn cutoffs(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d - 1).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn truncation_warning(&self) -> bool {
        self.truncation_warning
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-10
    }

    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        let scale = 1.0 / out.norm_sqr().sqrt();
        for a in out.amps.iter_mut() {
            *a *= scale;
        }
        out
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { expected: self.amps.len(), got: other.amps.len() });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Amplitude of one photon-number tuple.
    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        let mut idx = 0usize;
        for (k, &n) in occupation.iter().enumerate() {
            idx = idx * self.dims[k] + n;
        }
        self.amps[idx]
    }

    fn stride(&self, mode: usize) -> usize {
        self.dims[mode + 1..].iter().product()
    }

    fn check_mode(&self, j: usize) -> Result<()> {
        if j >= self.dims.len() {
            return Err(Error::ModeOutOfRange { index: j, modes: self.dims.len() });
        }
        Ok(())
    }

    /// Tensor product, `self` modes first.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self {
            dims,
            amps,
            leakage: self.leakage + other.leakage,
            truncation_warning: self.truncation_warning || other.truncation_warning,
        }
    }

    /// Total weight |amp|^2 on occupations within `margin` of any cutoff.
    pub fn boundary_weight(&self, margin: usize) -> f64 {
        let mut acc = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut rem = idx;
            let mut near = false;
            for &d in self.dims.iter().rev() {
                let n = rem % d;
                rem /= d;
                if n + margin >= d {
                    near = true;
                    break;
                }
            }
            if near {
                acc += a.norm_sqr();
            }
        }
        acc
    }

    /// Phase rotation exp(-i n_j phi) on mode `j`.
    pub fn apply_phase(&self, j: usize, phi: f64) -> Result<Self> {
        self.check_mode(j)?;
        let mut out = self.clone();
        let stride = self.stride(j);
        let dim = self.dims[j];
        for (idx, a) in out.amps.iter_mut().enumerate() {
            let n = (idx / stride) % dim;
            if n > 0 {
                *a *= Complex64::from_polar(1.0, -(n as f64) * phi);
            }
        }
        Ok(out)
    }

    /// Cross-Kerr interaction exp(-i lambda n_i n_j).
    pub fn apply_number_number_phase(&self, i: usize, j: usize, lambda: f64) -> Result<Self> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::InvalidArgument("cross-Kerr needs two distinct modes".into()));
        }
        let mut out = self.clone();
        let (si, sj) = (self.stride(i), self.stride(j));
        let (di, dj) = (self.dims[i], self.dims[j]);
        for (idx, a) in out.amps.iter_mut().enumerate() {
            let ni = (idx / si) % di;
            let nj = (idx / sj) % dj;
            if ni > 0 && nj > 0 {
                *a *= Complex64::from_polar(1.0, -lambda * (ni as f64) * (nj as f64));
            }
        }
        Ok(out)
    }

    /// Two-mode beam splitter with mode mixing
    /// a_i -> cos(theta) a_i + sin(theta) a_j,
    /// a_j -> -sin(theta) a_i + cos(theta) a_j,
    /// applied exactly within each total-photon sector.
    pub fn apply_bs(&self, i: usize, j: usize, theta: f64) -> Result<Self> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::InvalidArgument("beam splitter needs two distinct modes".into()));
        }
        let mut out = self.clone();
        if self.boundary_weight(2) > LEAK_HARD_LIMIT {
            out.truncation_warning = true;
        }
        let (ci, cj) = (self.dims[i] - 1, self.dims[j] - 1);
        let sectors = bs_sector_unitaries(theta, ci, cj);
        let (si, sj) = (self.stride(i), self.stride(j));
        let (di, dj) = (self.dims[i], self.dims[j]);

        for base in rest_offsets(&self.dims, i, j) {
            for (t, u) in sectors.iter().enumerate() {
                let k_lo = t.saturating_sub(cj);
                let k_hi = ci.min(t);
                if k_lo > k_hi {
                    continue;
                }
                let len = k_hi - k_lo + 1;
                let mut x = vec![Complex64::new(0.0, 0.0); len];
                for (v, k) in x.iter_mut().zip(k_lo..=k_hi) {
                    *v = self.amps[base + k * si + (t - k) * sj];
                }
                for p in k_lo..=k_hi {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (col, k) in (k_lo..=k_hi).enumerate() {
                        acc += u[p * (t + 1) + k] * x[col];
                    }
                    out.amps[base + p * si + (t - p) * sj] = acc;
                }
            }
        }
        let _ = (di, dj);
        Ok(out)
    }

    /// Projective measurement of `n` photons on mode `j`: returns the
    /// renormalized post-measurement state on the remaining modes and the
    /// outcome probability.
    pub fn project_mode(&self, j: usize, n: usize) -> Result<(Self, f64)> {
        self.check_mode(j)?;
        if n >= self.dims[j] {
            return Err(Error::InvalidArgument(format!(
                "projection outcome {n} exceeds cutoff {}",
                self.dims[j] - 1
            )));
        }
        let stride = self.stride(j);
        let dim = self.dims[j];
        let mut new_dims = self.dims.clone();
        new_dims.remove(j);
        let new_len: usize = new_dims.iter().product();
        let mut new_amps = Vec::with_capacity(new_len.max(1));
        let mut prob = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            if (idx / stride) % dim == n {
                prob += a.norm_sqr();
                new_amps.push(*a);
            }
        }
        if prob < 1e-300 {
            return Err(Error::NullOutcome { probability: prob });
        }
        let scale = 1.0 / prob.sqrt();
        for a in new_amps.iter_mut() {
            *a *= scale;
        }
        if new_dims.is_empty() {
            // fully measured; keep a scalar "state"
            return Ok((
                Self {
                    dims: vec![1],
                    amps: vec![Complex64::new(1.0, 0.0)],
                    leakage: self.leakage,
                    truncation_warning: self.truncation_warning,
                },
                prob,
            ));
        }
        Ok((
            Self {
                dims: new_dims,
                amps: new_amps,
                leakage: self.leakage,
                truncation_warning: self.truncation_warning,
            },
            prob,
        ))
    }

    /// Single-mode squeezing S(r) = exp[(r/2)(adag^2 - a^2)] applied to
    /// mode `j` through the exact (truncated) matrix exponential.
    pub fn apply_squeeze(&self, j: usize, r: f64) -> Result<Self> {
        self.check_mode(j)?;
        let dim = self.dims[j];
        let u = squeeze_matrix(r, dim);
        let mut out = self.clone();
        let stride = self.stride(j);
        for base in rest_offsets(&self.dims, j, j) {
            let mut x = vec![Complex64::new(0.0, 0.0); dim];
            for (n, v) in x.iter_mut().enumerate() {
                *v = self.amps[base + n * stride];
            }
            for p in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, xv) in x.iter().enumerate() {
                    acc += u[p * dim + k] * xv;
                }
                out.amps[base + p * stride] = acc;
            }
        }
        Ok(out)
    }

    /// Exact expectation value of an operator-product spec, e.g.
    /// `[(0, "adag"), (1, "a")]` for <adag_0 a_1> or `[(2, "n n")]` for
    /// <n_2^2>. Tokens act as written: the leftmost factor is applied to
    /// the ket last. Raising is lossless: modes are padded internally.
    pub fn moment(&self, spec: &[(usize, &str)]) -> Result<Complex64> {
        let mut per_mode: Vec<Vec<LadderOp>> = vec![Vec::new(); self.dims.len()];
        let mut order: Vec<(usize, LadderOp)> = Vec::new();
        for (mode, ops) in spec {
            self.check_mode(*mode)?;
            for op in parse_ops(ops)? {
                per_mode[*mode].push(op);
                order.push((*mode, op));
            }
        }
        // headroom so adag never clips
        let pad: Vec<usize> = per_mode
            .iter()
            .map(|ops| ops.iter().filter(|o| matches!(o, LadderOp::Raise)).count())
            .collect();
        let padded_dims: Vec<usize> = self.dims.iter().zip(&pad).map(|(d, p)| d + p).collect();
        let mut ket = embed(&self.amps, &self.dims, &padded_dims);
        let bra = ket.clone();
        // apply right-to-left
        for &(mode, op) in order.iter().rev() {
            apply_ladder(&mut ket, &padded_dims, mode, op);
        }
        Ok(bra.iter().zip(&ket).map(|(b, k)| b.conj() * k).sum())
    }

    /// Mean photon number of mode `j`.
    pub fn mean_photons(&self, j: usize) -> Result<f64> {
        Ok(self.moment(&[(j, "n")])?.re)
    }
}

fn embed(amps: &[Complex64], dims: &[usize], padded: &[usize]) -> Vec<Complex64> {
    if dims == padded {
        return amps.to_vec();
    }
    let len: usize = padded.iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    // walk the source indices in order, tracking the padded index with an
    // incremental mixed-radix counter
    let mut pstrides = vec![1usize; padded.len()];
    for k in (0..padded.len() - 1).rev() {
        pstrides[k] = pstrides[k + 1] * padded[k + 1];
    }
    let mut occ = vec![0usize; dims.len()];
    let mut pidx = 0usize;
    let last = amps.len() - 1;
    for (idx, a) in amps.iter().enumerate() {
        out[pidx] = *a;
        if idx == last {
            break;
        }
        for k in (0..dims.len()).rev() {
            occ[k] += 1;
            pidx += pstrides[k];
            if occ[k] < dims[k] {
                break;
            }
            pidx -= occ[k] * pstrides[k];
            occ[k] = 0;
        }
    }
    out
}

fn apply_ladder(amps: &mut [Complex64], dims: &[usize], mode: usize, op: LadderOp) {
    let stride: usize = dims[mode + 1..].iter().product();
    let dim = dims[mode];
    match op {
        LadderOp::Number => {
            for (idx, a) in amps.iter_mut().enumerate() {
                let n = (idx / stride) % dim;
                *a *= n as f64;
            }
        }
        LadderOp::Lower => {
            // a |n> = sqrt(n) |n-1>
            for base in rest_offsets(dims, mode, mode) {
                for n in 0..dim - 1 {
                    amps[base + n * stride] =
                        ((n + 1) as f64).sqrt() * amps[base + (n + 1) * stride];
                }
                amps[base + (dim - 1) * stride] = Complex64::new(0.0, 0.0);
            }
        }
        LadderOp::Raise => {
            // adag |n> = sqrt(n+1) |n+1>
            for base in rest_offsets(dims, mode, mode) {
                for n in (1..dim).rev() {
                    amps[base + n * stride] = (n as f64).sqrt() * amps[base + (n - 1) * stride];
                }
                amps[base] = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// Linear offsets of all amplitude entries with modes `i` and `j` at
/// occupation zero (i == j enumerates holding only mode i at zero).
fn rest_offsets(dims: &[usize], i: usize, j: usize) -> Vec<usize> {
    let mut offsets = vec![0usize];
    let mut stride = 1usize;
    for (k, &d) in dims.iter().enumerate().rev() {
        if k == i || k == j {
            stride *= d;
            continue;
        }
        let mut next = Vec::with_capacity(offsets.len() * d);
        for n in 0..d {
            let add = n * stride;
            next.extend(offsets.iter().map(|&o| o + add));
        }
        offsets = next;
        stride *= d;
    }
    offsets
}

/// Sector unitaries of the two-mode beam splitter for every total photon
/// number T <= ci + cj; entry [p * (T+1) + k] = <p, T-p| B |k, T-k>.
fn bs_sector_unitaries(theta: f64, ci: usize, cj: usize) -> Vec<Vec<f64>> {
    let (c, s) = (theta.cos(), theta.sin());
    let tmax = ci + cj;
    let mut sectors = Vec::with_capacity(tmax + 1);
    for t in 0..=tmax {
        let mut u = vec![0.0f64; (t + 1) * (t + 1)];
        for k in 0..=t {
            let l = t - k;
            for p in 0..=t {
                let q = t - p;
                let mut acc = 0.0f64;
                let a_lo = p.saturating_sub(l);
                let a_hi = k.min(p);
                for a in a_lo..=a_hi {
                    let b = p - a;
                    // C(k,a) C(l,b) c^{a+l-b} (-s)^{k-a} s^b
                    let ln_mag = ln_factorial(k) - ln_factorial(a) - ln_factorial(k - a)
                        + ln_factorial(l)
                        - ln_factorial(b)
                        - ln_factorial(l - b);
                    let mut term = ln_mag.exp()
                        * c.powi((a + l - b) as i32)
                        * s.powi((k - a + b) as i32);
                    if (k - a) % 2 == 1 {
                        term = -term;
                    }
                    acc += term;
                }
                if acc != 0.0 {
                    let ln_norm = 0.5
                        * (ln_factorial(p) + ln_factorial(q) - ln_factorial(k) - ln_factorial(l));
                    acc *= ln_norm.exp();
                }
                u[p * (t + 1) + k] = acc;
            }
        }
        sectors.push(u);
    }
    sectors
}

/// Fock-basis matrix of S(r) = exp[(r/2)(adag^2 - a^2)] truncated to
/// `dim` levels, by scaling-and-squaring of the Taylor series.
fn squeeze_matrix(r: f64, dim: usize) -> Vec<f64> {
    let mut gen = vec![0.0f64; dim * dim];
    for n in 0..dim {
        if n + 2 < dim {
            let v = 0.5 * r * (((n + 1) * (n + 2)) as f64).sqrt();
            gen[(n + 2) * dim + n] = v;
            gen[n * dim + (n + 2)] = -v;
        }
    }
    // scale so the Taylor series converges quickly
    let norm: f64 = gen.iter().map(|x| x.abs()).fold(0.0, f64::max) * dim as f64;
    let squarings = norm.log2().ceil().max(0.0) as usize + 1;
    let scale = 1.0 / (1u64 << squarings) as f64;
    for g in gen.iter_mut() {
        *g *= scale;
    }
    let mut result = identity(dim);
    let mut term = identity(dim);
    for k in 1..=24 {
        term = mat_mul(&term, &gen, dim);
        for t in term.iter_mut() {
            *t /= k as f64;
        }
        for (rv, tv) in result.iter_mut().zip(&term) {
            *rv += tv;
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result, dim);
    }
    result
}

fn identity(dim: usize) -> Vec<f64> {
    let mut m = vec![0.0f64; dim * dim];
    for i in 0..dim {
        m[i * dim + i] = 1.0;
    }
    m
}

fn mat_mul(a: &[f64], b: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let av = a[i * dim + k];
            if av == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += av * b[k * dim + j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c64(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn coherent_state_basics() {
        let vac = FockVector::coherent_state(c64(0.0), 5).unwrap();
        assert_relative_eq!(vac.amplitudes()[0].re, 1.0);
        let s = FockVector::coherent_state(c64(1.0), 30).unwrap();
        let ratio = s.amplitudes()[1] / s.amplitudes()[0];
        assert_relative_eq!(ratio.re, 1.0, epsilon = 1e-12);
        let s = FockVector::coherent_state(c64(1.4686), 40).unwrap();
        assert_relative_eq!(s.mean_photons(0).unwrap(), 1.4686f64.powi(2), epsilon = 1e-10);
    }

    #[test]
    fn coherent_cutoff_too_small_errors() {
        assert!(matches!(
            FockVector::coherent_state(c64(4.0), 8),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn squeezed_vacuum_basics() {
        let vac = FockVector::squeezed_vacuum(0.0, 6).unwrap();
        assert_relative_eq!(vac.amplitudes()[0].re, 1.0);
        let s = FockVector::squeezed_vacuum(0.5, 40).unwrap();
        assert_relative_eq!(s.mean_photons(0).unwrap(), 0.5f64.sinh().powi(2), epsilon = 1e-12);
        // the heavy tail at r = 1.5501 (tanh^2 r = 0.83 decay) needs a
        // large cutoff; 80 leaves ~1e-4 outside and must be rejected
        assert!(matches!(
            FockVector::squeezed_vacuum(1.5501, 80),
            Err(Error::CutoffTooSmall { .. })
        ));
        let s = FockVector::squeezed_vacuum(1.5501, 300).unwrap();
        assert_relative_eq!(s.mean_photons(0).unwrap(), 1.5501f64.sinh().powi(2), epsilon = 1e-9);
        // odd levels stay empty
        assert_relative_eq!(s.amplitudes()[3].norm(), 0.0);
    }

    #[test]
    fn bs_single_photon_and_identity() {
        let mut one_zero = FockVector::vacuum(&[3, 3]);
        one_zero = {
            let mut s = one_zero.clone();
            let amps = s.amps.as_mut_slice();
            amps[0] = Complex64::new(0.0, 0.0);
            amps[4] = Complex64::new(1.0, 0.0); // |1,0>
            s
        };
        let out = one_zero.apply_bs(0, 1, FRAC_PI_4).unwrap();
        assert_relative_eq!(out.amplitude(&[1, 0]).re, 1.0 / 2.0f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(out.amplitude(&[0, 1]).re, -1.0 / 2.0f64.sqrt(), epsilon = 1e-12);

        let same = one_zero.apply_bs(0, 1, 0.0).unwrap();
        assert_relative_eq!(same.inner(&one_zero).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bs_hong_ou_mandel() {
        let mut s = FockVector::vacuum(&[4, 4]);
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[5 + 1] = Complex64::new(1.0, 0.0); // |1,1>
        let out = s.apply_bs(0, 1, FRAC_PI_4).unwrap();
        assert_relative_eq!(out.amplitude(&[2, 0]).re, 1.0 / 2.0f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(out.amplitude(&[0, 2]).re, -1.0 / 2.0f64.sqrt(), epsilon = 1e-12);
        assert!(out.amplitude(&[1, 1]).norm() < 1e-12);
    }

    #[test]
    fn bs_preserves_norm_and_photon_number() {
        let a = FockVector::coherent_state(c64(0.7), 25).unwrap();
        let b = FockVector::squeezed_vacuum(0.4, 24).unwrap();
        let s = a.tensor(&b);
        let out = s.apply_bs(0, 1, 0.9).unwrap();
        assert_relative_eq!(out.norm_sqr(), 1.0, epsilon = 1e-10);
        let n_before = s.mean_photons(0).unwrap() + s.mean_photons(1).unwrap();
        let n_after = out.mean_photons(0).unwrap() + out.mean_photons(1).unwrap();
        assert_relative_eq!(n_before, n_after, epsilon = 1e-9);
        // inverse angle undoes the splitter
        let back = out.apply_bs(0, 1, -0.9).unwrap();
        assert_relative_eq!((back.inner(&s).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn phase_rotation() {
        let s = FockVector::coherent_state(c64(1.0), 25).unwrap();
        let out = s.apply_phase(0, 0.0).unwrap();
        assert_relative_eq!((out.inner(&s).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-14);
        let mut one = FockVector::vacuum(&[2]);
        one.amps[0] = Complex64::new(0.0, 0.0);
        one.amps[1] = Complex64::new(1.0, 0.0);
        let flipped = one.apply_phase(0, PI).unwrap();
        assert_relative_eq!(flipped.amps[1].re, -1.0, epsilon = 1e-12);
        let rot = s.apply_phase(0, 1.234).unwrap();
        assert_relative_eq!(rot.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_basics() {
        let vac = FockVector::vacuum(&[3, 3]);
        let (post, p) = vac.project_mode(1, 0).unwrap();
        assert_relative_eq!(p, 1.0);
        assert_eq!(post.num_modes(), 1);

        // (|1,0> + |0,1>)/sqrt(2), project mode 1 onto 0 -> (|1>, 0.5)
        let mut s = FockVector::vacuum(&[1, 1]);
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[2] = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
        s.amps[1] = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
        let (post, p) = s.project_mode(1, 0).unwrap();
        assert_relative_eq!(p, 0.5, epsilon = 1e-12);
        assert_relative_eq!(post.amplitude(&[1]).re, 1.0, epsilon = 1e-12);

        let coh = FockVector::coherent_state(c64(1.0), 30).unwrap();
        let (_, p1) = coh.project_mode(0, 1).unwrap();
        assert_relative_eq!(p1, (-1.0f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn projection_completeness() {
        let s = FockVector::coherent_state(c64(0.9), 25)
            .unwrap()
            .tensor(&FockVector::coherent_state(c64(0.3), 20).unwrap());
        let total: f64 = (0..=25)
            .map(|n| s.project_mode(0, n).map(|(_, p)| p).unwrap_or(0.0))
            .sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn moments() {
        let mut two = FockVector::vacuum(&[4]);
        two.amps[0] = Complex64::new(0.0, 0.0);
        two.amps[2] = Complex64::new(1.0, 0.0);
        assert_relative_eq!(two.moment(&[(0, "n")]).unwrap().re, 2.0);

        let coh = FockVector::coherent_state(c64(1.0), 30).unwrap();
        assert_relative_eq!(coh.moment(&[(0, "a")]).unwrap().re, 1.0, epsilon = 1e-10);

        let sq = FockVector::squeezed_vacuum(0.5, 40).unwrap();
        assert_relative_eq!(
            sq.moment(&[(0, "a adag")]).unwrap().re,
            0.5f64.cosh().powi(2),
            epsilon = 1e-10
        );
        // raising at the cutoff must not clip: <adag a> == <a adag> - 1
        assert_relative_eq!(
            sq.moment(&[(0, "adag a")]).unwrap().re + 1.0,
            sq.moment(&[(0, "a adag")]).unwrap().re,
            epsilon = 1e-10
        );
    }

    #[test]
    fn squeeze_operator_matches_closed_form() {
        let vac = FockVector::vacuum(&[40]);
        let via_op = vac.apply_squeeze(0, 0.5).unwrap();
        let direct = FockVector::squeezed_vacuum(0.5, 40).unwrap();
        assert!((via_op.inner(&direct).unwrap().re - 1.0).abs() < 1e-10);
        // anti-squeezing inverts
        let back = via_op.apply_squeeze(0, -0.5).unwrap();
        assert!((back.inner(&vac).unwrap().re - 1.0).abs() < 1e-10);
    }
}
