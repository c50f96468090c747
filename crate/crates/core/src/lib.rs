//! Computation engine for distributed-network multiphase sensing with
//! catalyzed W-type coherent and squeezed probes.
//!
//! The crate is split into closed-form analytics and a brute-force check:
//!
//! * [`special_fn`] — Laguerre / two-variable Hermite polynomials and
//!   truncated bivariate power-series arithmetic (the `D_m` evaluator).
//! * [`fock`] — dense truncated multimode Fock states and linear optics.
//! * [`probes`] — the six probe families, normalizations, single-mode
//!   catalyzed moments, overlaps, and resource solvers.
//! * [`metrics`] — QFI matrices, effective QFI, success probabilities,
//!   gain and cooperation factors, optimal-mode search.
//! * [`homodyne`] — readout network, quadrature moments, phase sensitivity.
//! * [`loss`] — photon-loss channel and lossy effective QFI.
//! * [`oracle`] — literal Fock-space simulation of every probe, used to
//!   cross-validate all closed forms.

pub mod fock;
pub mod homodyne;
pub mod loss;
pub mod metrics;
pub mod oracle;
pub mod probes;
pub mod special_fn;

mod error;

pub use error::{Error, Result};
pub use fock::FockVector;
pub use homodyne::{QuadratureMoments, ReadoutNetwork};
pub use loss::LossChannel;
pub use metrics::{MetricReport, WeightVector};
pub use probes::{ProbeFamily, ProbeSpec};

pub use num_complex::Complex64;
