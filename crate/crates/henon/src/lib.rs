//! Numerical toolkit for the Hénon equation `-Δu = |x|^α u^p` on the unit
//! ball and its perturbations.
//!
//! The crate covers the constructive side of the problem at desk scale:
//!
//! * [`problem`] — parameters, critical exponents, the fractional-dimension
//!   change of variables that removes the `|x|^α` weight from the radial
//!   equation.
//! * [`radial_shoot`] — the positive radial solution on the unit ball via
//!   Lane–Emden shooting in the (possibly fractional) effective dimension.
//! * [`spectrum`] — the linearized operator split into spherical-harmonic
//!   modes, the weighted first eigenvalue `ν(p)` computed by two independent
//!   discretizations, and the degenerate exponents `p_k` where `ν(p) = -λ_k`.
//! * [`domain_map`] — perturbations `Ω_t = {x + tψ(x)}` of the ball, the
//!   numerically inverted map and the coefficients of the transplanted
//!   operator.
//! * [`perturbed`] — the contraction iteration that corrects the radial
//!   solution into a solution on the perturbed ball.
//! * [`analysis`] — Pohozaev identity diagnostics, a nonexistence
//!   certificate for shifted domains, and the Kelvin-transform pipeline that
//!   produces fast-decay exterior solutions.
//! * [`cli`] — the command-line front end used by the `henon` binary.
//!
//! Every solver is a pure function of its inputs; results are deterministic
//! for a fixed configuration.

// index-heavy stencil code reads better with explicit loops
#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` deliberately rejects NaN alongside nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod domain_map;
pub mod grid;
pub mod linalg;
pub mod ode;
pub mod perturbed;
pub mod problem;
pub mod quad;
pub mod radial_shoot;
pub mod spectrum;

pub use problem::{ProblemParams, RadialProfile, SphericalSpectrum};

/// Crate-wide error type. Variants map onto the CLI exit codes:
/// invalid input → 4, forbidden/degenerate exponent → 2, no convergence → 3,
/// internal solver failure → 5.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("supercritical exponent: p = {p} >= p_alpha(N) = {p_crit}: no radial solution")]
    Supercritical { p: f64, p_crit: f64 },
    #[error("exponent p = {p} lies in the forbidden set (degenerate mode k = {mode}, residual {residual:.3e})")]
    ForbiddenExponent { p: f64, mode: usize, residual: f64 },
    #[error("no convergence after {iters} iterations (last increment {increment:.3e}, measured kappa {kappa:.3})")]
    NoConvergence { iters: usize, increment: f64, kappa: f64 },
    #[error("iterate left the trust ball: sup|phi/v_p| = {ratio:.3e} >= 0.25")]
    TrustBall { ratio: f64 },
    #[error("integration failure: {0}")]
    Integration(String),
    #[error("eigensolve failure: {0}")]
    Eigensolve(String),
    #[error("map inversion failed: {0}")]
    MapInversion(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
