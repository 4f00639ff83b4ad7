//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A point was on or outside the unit circle.
    #[error("point ({0}, {1}) is not strictly inside the unit disk")]
    OutsideDisk(f64, f64),

    /// The Green function was evaluated at zero separation.
    #[error("kernel singularity: evaluation at zero hyperbolic distance")]
    KernelSingularity,

    /// Two points coincide where a pair quantity needs them distinct.
    #[error("coincident points: |x - y| = {0} below threshold")]
    CoincidentPoints(f64),

    /// A sampled-function operator was asked to run on too few points.
    #[error("grid too coarse: {got} points, need at least {need}")]
    GridTooCoarse { got: usize, need: usize },

    /// Invalid scalar parameter (wrong sign, out of range, ...).
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// An initial density puts too much mass outside the truncated domain.
    #[error("initial density leaves {fraction:.3e} of its mass outside rho_max (limit 1e-2)")]
    MassTruncated { fraction: f64 },

    /// A time step violated the positivity-preserving bound.
    #[error("time step {dt:.3e} violates the positivity bound {limit:.3e}")]
    StepTooLarge { dt: f64, limit: f64 },

    /// A quadrature budget was exhausted before reaching the tolerance.
    #[error("quadrature budget exhausted: error estimate {estimate:.3e} above {tolerance:.3e}")]
    BudgetExhausted { estimate: f64, tolerance: f64 },

    /// A time window for a fit is empty or too narrow.
    #[error("window [{lo}, {hi}] too narrow for a rate fit")]
    WindowTooNarrow { lo: f64, hi: f64 },

    /// A series-level diagnostic received no snapshots.
    #[error("empty time series")]
    EmptySeries,

    /// Bound only defined in the subcritical regime.
    #[error("chi * M = {chi_m:.6} is not below 8*pi; bound undefined")]
    Supercritical { chi_m: f64 },

    /// A density family does not support the requested operation.
    #[error("unsupported density family: {0}")]
    UnsupportedDensity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
