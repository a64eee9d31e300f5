//! Spectral analysis on warped-product ends.
//!
//! A warped end carries the metric dr² + h(r)² g_S on [r0, ∞) × S. Everything
//! the spectrum of the Laplacian sees is encoded in the scalar profile h and
//! the cross-section eigenvalues, and this crate works at that reduction:
//!
//! - [`geometry`] — warping profiles h(r) and the radial quantities
//!   A = h′/h, K = −h″/h they induce;
//! - [`conditions`] — window checks of the decay/band hypotheses placed on
//!   the metric, plus tightest-constant fitting;
//! - [`thresholds`] — closed-form spectral thresholds (λ₁, y₁, β, η₁, …)
//!   evaluated from a constants bundle;
//! - [`separation`] — reduction to half-line operators −d²/dx² + q_i(x), one
//!   per cross-section mode, and a boundary-integral identity check;
//! - [`solver`] — Prüfer shooting, trial-λ classification (oscillatory vs.
//!   square-integrable candidate), resonance refinement, decay fits;
//! - [`counterexample`] — end-to-end search for an embedded eigenvalue on a
//!   critically oscillating profile, cross-checked against the thresholds;
//! - [`config`] / [`cli`] — the batch front door used by the `warpspec`
//!   binary.

// Validation uses `!(x > 0.0)` deliberately: the negation also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conditions;
pub mod config;
pub mod counterexample;
pub mod geometry;
pub mod separation;
pub mod solver;
pub mod thresholds;

mod fit;
mod quad;

pub use fit::LinFit;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Query outside the domain an object was built on.
    #[error("domain: {0}")]
    Domain(String),
    /// Parameter combination violates a documented precondition.
    #[error("parameter: {0}")]
    Parameter(String),
    /// Radial window empty, reversed, or too short for the requested analysis.
    #[error("window: {0}")]
    Window(String),
    /// Adaptive integration failed to converge.
    #[error("integration at x = {x}: {message}")]
    Integration { x: f64, message: String },
    /// Search bracket contains no usable interior extremum.
    #[error("bracket: {0}")]
    Bracket(String),
    /// Fit quality below the acceptance threshold.
    #[error("estimation: {0}")]
    Estimation(String),
    /// No admissible constants exist on the window.
    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),
    /// Malformed run configuration.
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
