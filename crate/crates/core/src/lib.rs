//! Numerical laboratory for the fine-scale structure of roots of random
//! Gaussian polynomials near the unit circle.
//!
//! A degree-`n` draw `f(z) = sum_k eps_k z^k` with iid coefficients puts its
//! roots in a thin annulus around `|z| = 1`; at the scale `n^-2` the scaled
//! radial distances form (asymptotically) a homogeneous Poisson process of
//! intensity 1/12, and the closest root sits at an Exp(1/6)-distributed
//! scaled distance (mean 6). This crate builds both sides of that picture
//! numerically:
//!
//! - [`gpoly`] — coefficient sampling and accurate evaluation of `f`, its
//!   circle restriction `X + iY`, and their derivatives;
//! - [`roots`] — an Aberth-Ehrlich simultaneous solver for all complex
//!   roots, plus zero finding for `X` and `Y` on the circle;
//! - [`process`] — the annulus point process built from complex roots, the
//!   circle-pair process built from zero collisions, and the predictors that
//!   map one to the other;
//! - [`kacrice`] — exact finite-`n` covariance kernels, Gaussian
//!   conditioning, Kac-Rice densities and their integrals, divided
//!   differences, the limiting sinc-kernel process, and the bound monitors;
//! - [`stats`] — aggregation of Monte Carlo trials into goodness-of-fit
//!   tests (exponential minimum, Poisson window counts, argument
//!   uniformity);
//! - [`trial`] — deterministic per-trial seeding and the sampling pipeline
//!   shared by the CLI and the verification suites.

pub mod gpoly;
pub mod kacrice;
pub mod process;
pub mod roots;
pub mod stats;
pub mod trial;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degree must be at least 1")]
    DegenerateDegree,
    #[error("leading coefficient is zero; deflate before root finding")]
    ZeroLeadingCoefficient,
    #[error("grid size {got} is below the required minimum {min}")]
    GridTooCoarse { got: usize, min: usize },
    #[error("target function is identically zero on the circle")]
    DegenerateTarget,
    #[error("derivative floor violated: |X'|={dx:.3e}, |Y'|={dy:.3e}, floor={floor:.3e}")]
    DerivativeFloor { dx: f64, dy: f64, floor: f64 },
    #[error("pinned block is numerically singular near locations {locations:?}")]
    SingularPinnedBlock { locations: Vec<f64> },
    #[error("duplicate covariance row {0}")]
    DuplicateRow(String),
    #[error("abscissae must be strictly increasing")]
    NonIncreasingAbscissae,
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { got: usize, min: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
