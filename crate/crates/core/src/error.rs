use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by all modules of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// BS angle so close to π/2 that the catalyzed state collapses onto
    /// vacuum and every normalizer diverges.
    #[error("degenerate catalysis: theta = {theta} too close to pi/2")]
    DegenerateCatalysis { theta: f64 },

    /// A Fock-space constructor left more than the allowed norm outside
    /// the requested cutoff.
    #[error("cutoff {cutoff} too small: truncation leakage {leakage:.3e}")]
    CutoffTooSmall { cutoff: usize, leakage: f64 },

    /// Series order below the derivative order requested from it.
    #[error("series order {order} too small for D_{m} evaluation")]
    OrderTooSmall { order: usize, m: usize },

    /// Reciprocal or real power of a series whose constant term vanishes.
    #[error("series has (near-)zero constant term: |c| = {magnitude:.3e}")]
    ZeroConstantTerm { magnitude: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    /// Conditional projection landed on an outcome of vanishing probability.
    #[error("projection outcome has vanishing probability {probability:.3e}")]
    NullOutcome { probability: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Gain/cooperation comparison between probes that are not an
    /// (uncatalyzed reference, catalyzed) pair of the same resource.
    #[error("probe family mismatch: {0}")]
    FamilyMismatch(String),

    /// Bisection bracket never enclosed the requested value.
    #[error("no bracketing interval found: {0}")]
    NonBracketing(String),

    #[error("quantity must be positive: {name} = {value}")]
    NonPositive { name: &'static str, value: f64 },

    /// Oracle resource guard: literal simulation is restricted to small
    /// networks and catalytic photon numbers.
    #[error("oracle resource guard: requires d <= {max_d} and m <= {max_m}")]
    ResourceGuard { max_d: usize, max_m: usize },
}
