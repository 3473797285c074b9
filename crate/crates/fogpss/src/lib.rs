//! Fractional-order practical tracking control toolkit.
//!
//! The crate provides, bottom up:
//!
//! - [`fraccalc`] — gamma function, fractional integral (product-rectangle
//!   quadrature), Caputo derivative (L1 scheme), and a Mittag-Leffler series
//!   oracle on uniformly sampled signals;
//! - [`fde`] — the fractional Adams predictor-corrector solver for
//!   `D^alpha x = f(t, x)` with convergence-order estimation;
//! - [`fostab`] — the eigenvalue-argument stability test for linear
//!   fractional systems and a numerical audit of the fractional Lyapunov
//!   inequality;
//! - [`plants`] — the uncertain first-order plant, a decoupled robot, bounded
//!   references, and the bounded measurement channel;
//! - [`controllers`] — the fractional-order error-feedback tracking law, its
//!   integer-order counterpart, an adaptive high-gain tracker, and
//!   saturation utilities;
//! - [`simkit`] — fixed-step closed-loop engines with full trace records and
//!   runtime bound assertions;
//! - [`cli`] — config files, CSV/SVG emission, and reproduction commands for
//!   the `fogpss` binary;
//! - [`presets`] — the bundled experiment configurations.
//!
//! Start with the crate examples: each major capability has a runnable
//! example (`cargo run --release --example fogpss_tracking`, etc.).

pub mod cli;
pub mod controllers;
pub mod error;
pub mod fde;
pub mod fostab;
pub mod fraccalc;
pub mod plants;
pub mod presets;
pub mod signal;
pub mod simkit;

pub use error::{Error, Result};
pub use signal::{FracOrder, SampledSignal};
