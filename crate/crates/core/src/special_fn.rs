//! Special functions and truncated bivariate power-series arithmetic.
//!
//! Everything here is exact up to f64 rounding: the `D_m` derivative
//! operator is evaluated through truncated formal series rather than
//! numeric differentiation, so there is no step size to tune.

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest order kept by [`BivariateSeries`]; catalytic photon numbers in
/// all reproductions stay at or below 20.
pub const MAX_ORDER: usize = 64;

const EXACT_FACTORIALS: usize = 20;

/// n! — exact integer arithmetic up to 20!, log-gamma beyond.
pub fn factorial(n: usize) -> f64 {
    if n <= EXACT_FACTORIALS {
        let mut acc: u64 = 1;
        for k in 2..=n as u64 {
            acc *= k;
        }
        acc as f64
    } else {
        ln_factorial(n).exp()
    }
}

/// ln(n!) from a cumulative table; error stays near machine precision for
/// the arguments used here (n <= a few thousand).
pub fn ln_factorial(n: usize) -> f64 {
    use std::sync::OnceLock;
    const TABLE_LEN: usize = 4096;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0f64; TABLE_LEN];
        for k in 2..TABLE_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    });
    if n < TABLE_LEN {
        table[n]
    } else {
        table[TABLE_LEN - 1] + (TABLE_LEN..=n).map(|k| (k as f64).ln()).sum::<f64>()
    }
}

/// Binomial coefficient C(n, k) in floating point.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 62 {
        // exact in u128, representable in f64 for all n used by the crate
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for i in 0..k as u128 {
            num *= n as u128 - i;
            den *= i + 1;
        }
        (num / den) as f64
    } else {
        (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp()
    }
}

/// Laguerre polynomial L_m(x) = sum_k (-1)^k m! x^k / (k! k! (m-k)!).
pub fn laguerre(m: usize, x: Complex64) -> Complex64 {
    // stable three-term recurrence; matches the expansion above
    let mut prev = Complex64::new(1.0, 0.0);
    if m == 0 {
        return prev;
    }
    let mut cur = Complex64::new(1.0, 0.0) - x;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Laguerre polynomial L_n^{(a)}(x) for integer a >= 0.
fn laguerre_assoc(n: usize, a: usize, x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(binomial(n + a, n), 0.0);
    acc += term;
    for j in 1..=n {
        // term_j = (-1)^j C(n+a, n-j) x^j / j!
        term = term * (-x) * ((n - j + 1) as f64) / ((j * (j + a)) as f64);
        acc += term;
    }
    acc
}

/// Two-variable Hermite polynomial H_{p,q}(xi, eta), defined by the
/// generating function exp(u xi + v eta - u v) = sum H_{p,q} u^p v^q / (p! q!).
///
/// Computed through the associated-Laguerre form
/// H_{p,q}(xi, eta) = (-1)^q q! xi^{p-q} L_q^{(p-q)}(xi eta) for p >= q,
/// which keeps every term of the inner sum the same sign for the
/// xi eta <= 0 arguments that dominate this crate.
pub fn hermite2(p: usize, q: usize, xi: Complex64, eta: Complex64) -> Complex64 {
    if p < q {
        // generating function is symmetric under (u, xi) <-> (v, eta)
        return hermite2(q, p, eta, xi);
    }
    let sign = if q.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * factorial(q) * xi.powu((p - q) as u32) * laguerre_assoc(q, p - q, xi * eta)
}

/// Multinomial coefficient Pi^m_{n,k}(x, y) = C(m,n) C(m,k) x^n y^k / (n! k!).
pub fn pi_coeff(m: usize, n: usize, k: usize, x: Complex64, y: Complex64) -> Result<Complex64> {
    if n > m || k > m {
        return Err(Error::InvalidArgument(format!(
            "pi_coeff requires n <= m and k <= m (m = {m}, n = {n}, k = {k})"
        )));
    }
    Ok(binomial(m, n) * binomial(m, k) / (factorial(n) * factorial(k))
        * x.powu(n as u32)
        * y.powu(k as u32))
}

/// Named series the closed-form expressions are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Delta_{t,tau} = 1 / ((1-t)(1-tau))
    Delta,
    /// A_t = (1 - t sec^2 theta) / (1 - t); params = [theta]
    ATheta,
    /// C_tau = (1 - tau sec^2 theta) / (1 - tau); params = [theta]
    CTheta,
    /// params = [re, im] (im optional)
    Constant,
    VariableT,
    VariableTau,
}

/// Truncated formal power series in two variables (t, tau), kept to the
/// same maximum degree `order` in each variable.
///
/// Entry (i, j) is the coefficient of t^i tau^j. Arithmetic closes on the
/// order: add/mul/recip/powf of equal-order series return that order.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries {
    order: usize,
    coeffs: Vec<Complex64>,
}

impl BivariateSeries {
    pub fn zero(order: usize) -> Self {
        assert!(order <= MAX_ORDER, "series order capped at {MAX_ORDER}");
        Self {
            order,
            coeffs: vec![Complex64::new(0.0, 0.0); (order + 1) * (order + 1)],
        }
    }

    pub fn constant(value: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.order + 1) + j
    }

    /// Coefficient of t^i tau^j (zero outside the kept block).
    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        if i > self.order || j > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[self.idx(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, value: Complex64) {
        let at = self.idx(i, j);
        self.coeffs[at] = value;
    }

    /// Build one of the named series truncated to `order`.
    pub fn build(kind: SeriesKind, params: &[f64], order: usize) -> Self {
        match kind {
            SeriesKind::Delta => {
                // geometric series in each variable
                let mut s = Self::zero(order);
                for i in 0..=order {
                    for j in 0..=order {
                        s.set_coeff(i, j, Complex64::new(1.0, 0.0));
                    }
                }
                s
            }
            SeriesKind::ATheta | SeriesKind::CTheta => {
                let theta = params[0];
                let sec2 = 1.0 / theta.cos().powi(2);
                // (1 - x sec^2) / (1 - x) = 1 + (1 - sec^2) (x + x^2 + ...)
                let mut s = Self::zero(order);
                s.set_coeff(0, 0, Complex64::new(1.0, 0.0));
                let tail = Complex64::new(1.0 - sec2, 0.0);
                for k in 1..=order {
                    match kind {
                        SeriesKind::ATheta => s.set_coeff(k, 0, tail),
                        _ => s.set_coeff(0, k, tail),
                    }
                }
                s
            }
            SeriesKind::Constant => {
                let re = params.first().copied().unwrap_or(0.0);
                let im = params.get(1).copied().unwrap_or(0.0);
                Self::constant(Complex64::new(re, im), order)
            }
            SeriesKind::VariableT => {
                let mut s = Self::zero(order);
                if order >= 1 {
                    s.set_coeff(1, 0, Complex64::new(1.0, 0.0));
                }
                s
            }
            SeriesKind::VariableTau => {
                let mut s = Self::zero(order);
                if order >= 1 {
                    s.set_coeff(0, 1, Complex64::new(1.0, 0.0));
                }
                s
            }
        }
    }

    fn assert_same_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                got: other.order,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.assert_same_order(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.assert_same_order(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c -= o;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= factor;
        }
        out
    }

    /// Truncated ring product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.assert_same_order(other)?;
        let n = self.order;
        let mut out = Self::zero(n);
        for i1 in 0..=n {
            for j1 in 0..=n {
                let a = self.coeffs[self.idx(i1, j1)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for i2 in 0..=(n - i1) {
                    for j2 in 0..=(n - j1) {
                        let b = other.coeffs[other.idx(i2, j2)];
                        if b.norm_sqr() != 0.0 {
                            let at = (i1 + i2) * (n + 1) + (j1 + j2);
                            out.coeffs[at] += a * b;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn constant_term_checked(&self) -> Result<Complex64> {
        let c = self.coeffs[0];
        if c.norm() < 1e-300 {
            return Err(Error::ZeroConstantTerm { magnitude: c.norm() });
        }
        Ok(c)
    }

    /// Multiplicative inverse in the truncated ring, by Newton iteration
    /// g <- g (2 - f g); each step doubles the correct order and the
    /// self-correction keeps rounding at the scale of the result.
    pub fn recip(&self) -> Result<Self> {
        let c = self.constant_term_checked()?;
        let n = self.order;
        let mut g = Self::constant(1.0 / c, n);
        let two = Self::constant(Complex64::new(2.0, 0.0), n);
        let mut correct: usize = 1;
        while correct <= 2 * n + 1 {
            let t = two.sub(&self.mul(&g)?)?;
            g = g.mul(&t)?;
            correct *= 2;
        }
        // one polishing step at full order
        let t = two.sub(&self.mul(&g)?)?;
        g.mul(&t)
    }

    /// Real power f^p = c^p (1 + w)^p with w = (f - c)/c, via the
    /// generalized binomial series; w is nilpotent in the truncated ring
    /// so the sum terminates after 2 * order terms.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let c = self.constant_term_checked()?;
        let n = self.order;
        let mut w = self.scale(1.0 / c);
        w.coeffs[0] -= Complex64::new(1.0, 0.0);

        let c_pow = if c.im == 0.0 && c.re > 0.0 {
            Complex64::new(c.re.powf(p), 0.0)
        } else {
            c.powf(p)
        };
        let mut acc = Self::constant(Complex64::new(1.0, 0.0), n);
        let mut term = Self::constant(Complex64::new(1.0, 0.0), n);
        let max_k = 2 * n;
        for k in 0..max_k {
            // binom(p, k+1) / binom(p, k) = (p - k) / (k + 1)
            let ratio = (p - k as f64) / (k as f64 + 1.0);
            if ratio == 0.0 {
                break;
            }
            term = term.mul(&w)?.scale(Complex64::new(ratio, 0.0));
            if term.coeffs.iter().all(|c| c.norm() == 0.0) {
                break;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc.scale(c_pow))
    }

    /// D_m evaluation: (m!)^2 times the coefficient of t^m tau^m, i.e.
    /// the m-th mixed partial derivative at t = tau = 0.
    pub fn dm_eval(&self, m: usize) -> Result<Complex64> {
        if m > self.order {
            return Err(Error::OrderTooSmall { order: self.order, m });
        }
        let f = factorial(m);
        Ok(self.coeff(m, m) * f * f)
    }
}

/// Convenience free-function form used by callers that dispatch on kind.
pub fn series_build(kind: SeriesKind, params: &[f64], order: usize) -> BivariateSeries {
    BivariateSeries::build(kind, params, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn laguerre_low_orders() {
        assert_relative_eq!(laguerre(0, c(0.7)).re, 1.0);
        assert_relative_eq!(laguerre(1, c(3.0)).re, -2.0);
        assert_relative_eq!(laguerre(2, c(1.0)).re, -0.5);
    }

    #[test]
    fn laguerre_matches_expansion() {
        // direct sum from the defining expansion, complex argument
        let x = Complex64::new(0.83, -0.41);
        for m in 0..=12usize {
            let mut direct = Complex64::new(0.0, 0.0);
            for k in 0..=m {
                let coef = factorial(m)
                    / (factorial(k) * factorial(k) * factorial(m - k))
                    * if k % 2 == 0 { 1.0 } else { -1.0 };
                direct += coef * x.powu(k as u32);
            }
            let got = laguerre(m, x);
            assert!((got - direct).norm() <= 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn hermite2_low_orders() {
        let any = Complex64::new(0.3, 0.1);
        assert_relative_eq!(hermite2(0, 0, any, any).re, 1.0);
        assert_relative_eq!(hermite2(1, 1, c(2.0), c(3.0)).re, 5.0);
        assert_relative_eq!(hermite2(2, 1, c(1.0), c(2.0)).norm(), 0.0, epsilon = 1e-14);
    }

    /// Independent oracle: expand exp(u xi + v eta - u v) as a double
    /// power series and read off p! q! [u^p v^q].
    fn hermite2_from_generating_function(p: usize, q: usize, xi: Complex64, eta: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        // u^a v^b (-uv)^l terms with a + l = p, b + l = q
        for l in 0..=p.min(q) {
            let a = p - l;
            let b = q - l;
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * xi.powu(a as u32) * eta.powu(b as u32)
                / (factorial(a) * factorial(b) * factorial(l));
        }
        acc * factorial(p) * factorial(q)
    }

    #[test]
    fn hermite2_matches_generating_function() {
        let xi = Complex64::new(0.9, 0.4);
        let eta = Complex64::new(-1.3, 0.2);
        for p in 0..=8usize {
            for q in 0..=8usize {
                let got = hermite2(p, q, xi, eta);
                let want = hermite2_from_generating_function(p, q, xi, eta);
                assert!(
                    (got - want).norm() <= 1e-10 * want.norm().max(1.0),
                    "H_{{{p},{q}}}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn pi_coeff_examples() {
        assert_relative_eq!(pi_coeff(3, 0, 0, c(2.0), c(9.0)).unwrap().re, 1.0);
        assert_relative_eq!(pi_coeff(2, 1, 1, c(2.0), c(3.0)).unwrap().re, 24.0);
        assert_relative_eq!(pi_coeff(2, 2, 0, c(-1.0), c(5.0)).unwrap().re, 0.5);
        assert!(pi_coeff(2, 3, 0, c(1.0), c(1.0)).is_err());
    }

    #[test]
    fn delta_series_coefficients_are_one() {
        let d = BivariateSeries::build(SeriesKind::Delta, &[], 2);
        assert_relative_eq!(d.coeff(2, 2).re, 1.0);
        assert_relative_eq!(d.coeff(0, 1).re, 1.0);
    }

    #[test]
    fn a_theta_series() {
        let a0 = BivariateSeries::build(SeriesKind::ATheta, &[0.0], 5);
        for i in 1..=5 {
            assert_relative_eq!(a0.coeff(i, 0).norm(), 0.0, epsilon = 1e-15);
        }
        let a = BivariateSeries::build(SeriesKind::ATheta, &[std::f64::consts::FRAC_PI_3], 5);
        assert_relative_eq!(a.coeff(1, 0).re, -3.0, epsilon = 1e-12);
    }

    #[test]
    fn recip_of_one_minus_t() {
        let one = BivariateSeries::constant(c(1.0), 6);
        let t = BivariateSeries::build(SeriesKind::VariableT, &[], 6);
        let f = one.sub(&t).unwrap();
        let g = f.recip().unwrap();
        for k in 0..=6 {
            assert_relative_eq!(g.coeff(k, 0).re, 1.0, epsilon = 1e-12);
        }
        // cancellation: Delta * (1 - t) = 1 / (1 - tau)
        let delta = BivariateSeries::build(SeriesKind::Delta, &[], 6);
        let h = delta.mul(&f).unwrap();
        for k in 0..=6 {
            assert_relative_eq!(h.coeff(0, k).re, 1.0, epsilon = 1e-12);
            assert_relative_eq!(h.coeff(1, k).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn powf_binomial_series() {
        let one = BivariateSeries::constant(c(1.0), 4);
        let u = BivariateSeries::build(SeriesKind::VariableT, &[], 4);
        let f = one.sub(&u).unwrap();
        let g = f.powf(-0.5).unwrap();
        assert_relative_eq!(g.coeff(1, 0).re, 0.5, epsilon = 1e-12);
        assert_relative_eq!(g.coeff(2, 0).re, 0.375, epsilon = 1e-12);
        // (f^{-1/2})^2 * f = 1
        let sq = g.mul(&g).unwrap().mul(&f).unwrap();
        assert_relative_eq!(sq.coeff(0, 0).re, 1.0, epsilon = 1e-12);
        for i in 0..=4 {
            for j in 0..=4 {
                if i + j > 0 {
                    assert!(sq.coeff(i, j).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dm_eval_examples() {
        let delta = BivariateSeries::build(SeriesKind::Delta, &[], 4);
        assert_relative_eq!(delta.dm_eval(2).unwrap().re, 4.0);
        let one = BivariateSeries::constant(c(1.0), 4);
        assert_relative_eq!(one.dm_eval(1).unwrap().norm(), 0.0);
        assert!(one.dm_eval(5).is_err());
    }

    #[test]
    fn recip_and_powf_reject_zero_constant() {
        let t = BivariateSeries::build(SeriesKind::VariableT, &[], 3);
        assert!(t.recip().is_err());
        assert!(t.powf(0.5).is_err());
    }
}
