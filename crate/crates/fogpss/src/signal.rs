//! Uniformly sampled scalar time series and fractional orders — the substrate
//! every discrete operator in this crate works on.

use crate::error::{Error, Result};

/// A fractional order `alpha > 0`.
///
/// Operators accept any positive order; the tracking controllers and the
/// Caputo differentiator additionally restrict to the open unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder(f64);

impl FracOrder {
    /// Any positive finite order.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidOrder {
                alpha,
                reason: "order must be positive and finite",
            });
        }
        Ok(Self(alpha))
    }

    /// An order restricted to (0, 1).
    pub fn unit(alpha: f64) -> Result<Self> {
        let order = Self::new(alpha)?;
        if !order.is_unit_interval() {
            return Err(Error::InvalidOrder {
                alpha,
                reason: "order must lie in (0, 1)",
            });
        }
        Ok(order)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_unit_interval(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }
}

/// A scalar signal sampled on the uniform grid `t0 + k*h`.
///
/// Invariants enforced at construction: positive finite step, at least one
/// sample, every sample finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    t0: f64,
    h: f64,
    values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(t0: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::InvalidSignal("start time must be finite"));
        }
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::InvalidSignal("step must be positive and finite"));
        }
        if values.is_empty() {
            return Err(Error::InvalidSignal("signal must hold at least one sample"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal("all samples must be finite"));
        }
        Ok(Self { t0, h, values })
    }

    /// Samples `f` at `n` grid points starting at `t0`.
    pub fn from_fn(t0: f64, h: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..n).map(|k| f(t0 + k as f64 * h)).collect();
        Self::new(t0, h, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one sample by construction
    }

    /// Time of sample `k`, exactly `t0 + k*h`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.h
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("non-empty by construction")
    }
}
