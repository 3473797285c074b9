//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by operators, solvers, controllers, the simulation
/// engine, and the CLI front end.
#[derive(Debug, Error)]
pub enum Error {
    /// Gamma function evaluated at a non-positive integer.
    #[error("gamma pole: s = {s} is a non-positive integer")]
    GammaPole { s: f64 },

    /// Gamma function result exceeds the double range (s beyond ~171.62).
    #[error("gamma overflow: gamma({s}) exceeds the f64 range")]
    GammaOverflow { s: f64 },

    /// Gamma function argument outside the supported domain (NaN).
    #[error("gamma domain error: s = {s}")]
    GammaDomain { s: f64 },

    /// A fractional order outside the range an operation supports.
    #[error("invalid fractional order {alpha}: {reason}")]
    InvalidOrder { alpha: f64, reason: &'static str },

    /// A sampled signal violating its construction invariants.
    #[error("invalid signal: {0}")]
    InvalidSignal(&'static str),

    /// Mittag-Leffler argument outside the series-safe region.
    #[error("mittag-leffler argument z = {z} outside the series region |z| <= {limit}")]
    MittagLefflerRegime { z: f64, limit: f64 },

    /// Series summation hit the iteration cap before the terms fell below
    /// the cutoff.
    #[error("series did not converge within {max_terms} terms")]
    SeriesDivergence { max_terms: usize },

    /// Ill-formed solver problem or out-of-range coefficient index.
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// A trajectory left the representable range.
    #[error("state blow-up at step {step} (t = {t}): trajectory is no longer finite")]
    BlowUp { step: usize, t: f64 },

    /// One-step plant integration produced a non-finite state.
    #[error("non-finite plant state after the step starting at t = {t}")]
    PlantBlowUp { t: f64 },

    /// A computed quantity that must be finite is not.
    #[error("non-finite value: {what}")]
    NonFinite { what: &'static str },

    /// Eigenvalue computation failed to converge.
    #[error("eigenvalue computation did not converge")]
    EigenFailed,

    /// Controller gains violating a design condition.
    #[error("invalid gain: {0}")]
    InvalidGain(String),

    /// A modelling bound was violated along a simulated trajectory.
    #[error("{assumption} violated at t = {t}: |{quantity}| = {value} exceeds the bound {bound}")]
    AssumptionViolated {
        assumption: &'static str,
        quantity: &'static str,
        t: f64,
        value: f64,
        bound: f64,
    },

    /// A controller was asked to act on too short a history.
    #[error("insufficient history: {0}")]
    InsufficientHistory(&'static str),

    /// Semantic configuration problem (missing key, bad pairing, bad value).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Syntactic configuration problem with a line diagnostic.
    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
