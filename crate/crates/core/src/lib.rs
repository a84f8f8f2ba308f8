//! Toolkit for (N,k)-crosses over planar disc factors: relative extremal
//! functions (closed forms and a grid solver), cross/hull membership,
//! envelope identities, and desk-scale holomorphic extension from crosses
//! to their hulls.
//!
//! The crate is organized around the objects it computes with:
//!
//! * [`geometry`] — planar domains, base sets, validated `(A, D)` factor pairs
//!   and conformal transport between them,
//! * [`extremal`] — the relative extremal function `h_{A,D}`,
//! * [`cross`] — multi-index combinatorics and membership in `X`, `T`, `Y`
//!   crosses,
//! * [`singular`] — singularity-set descriptors, fibers, and the `Δ`/`Δ̃`
//!   center defects,
//! * [`hull`] — hull membership via `Σ h < k`, envelope formulas, and
//!   composite 2-fold hulls,
//! * [`extend`] — separate-holomorphy checking and least-squares recovery of
//!   holomorphic extensions on the hull,
//! * [`poly`] — dense multivariate polynomials shared by the modules above.
//!
//! Batch operations are data-parallel (rayon) when the `parallel` feature is
//! enabled (the default) and fall back to sequential loops otherwise; both
//! paths produce bit-identical results.

pub mod cross;
pub mod extend;
pub mod extremal;
pub mod geometry;
pub mod hull;
pub mod par;
pub mod poly;
pub mod sampling;
pub mod singular;

use thiserror::Error;

pub use num_complex::Complex64;
pub use par::Parallelism;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid base set: {0}")]
    InvalidBase(String),
    #[error("unsupported disc automorphism: {0}")]
    UnsupportedMap(String),
    #[error("point lies outside the factor domain")]
    OutsideDomain,
    #[error("no closed form for this pair; fall back to the grid solver")]
    NoClosedForm,
    #[error("relaxation stalled at residual {residual:e} after {sweeps} sweeps (tol {tol:e})")]
    NoConvergence { sweeps: usize, tol: f64, residual: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("empty input")]
    EmptyInput,
    #[error("order k out of range: {0}")]
    BadOrder(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("coordinate {index} lies outside its factor domain")]
    OutsideAmbient { index: usize },
    #[error("point is not a member of the cross")]
    NotMember,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sigma sets of this kind are not supported by this operation")]
    UnsupportedSigmaKind,
    #[error("point is not in the hull")]
    NotInHull,
    #[error("rejection sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: usize },
    #[error("least-squares system too ill-conditioned: estimate {estimate:e}")]
    IllConditioned { estimate: f64 },
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("denominator polynomial vanishes identically")]
    DenominatorVanishesIdentically,
    #[error("evaluator undefined outside the declared exclusion set: {0}")]
    UndefinedValue(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects NaN/Inf components at construction boundaries.
pub(crate) fn ensure_finite(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::InvalidInput(format!("{what}: non-finite component")))
    }
}
