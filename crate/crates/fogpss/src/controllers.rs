//! Control laws: the fractional-order tracking law (feedback of the Caputo
//! derivative of the measured error plus a proportional term), its
//! integer-order counterpart, an adaptive high-gain tracker whose gain grows
//! only outside a prescribed error ball, and saturation utilities.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fraccalc::{gamma, CaputoDifferentiator};
use crate::signal::{FracOrder, SampledSignal};

/// Gains of the fractional-order tracking law `u = beta_bar * s~` with
/// `s~ = D^alpha xe_tilde + delta * xe_tilde`.
///
/// Construction enforces the strict gain condition
/// `beta_bar > u_max / (delta * epsilon0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FogpssConfig {
    pub delta: f64,
    pub beta_bar: f64,
    pub epsilon0: f64,
    pub alpha: f64,
    pub u_max: f64,
}

impl FogpssConfig {
    pub fn new(delta: f64, beta_bar: f64, epsilon0: f64, alpha: f64, u_max: f64) -> Result<Self> {
        for (name, v) in [
            ("delta", delta),
            ("beta_bar", beta_bar),
            ("epsilon0", epsilon0),
            ("u_max", u_max),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidGain(format!("{name} must be positive, got {v}")));
            }
        }
        FracOrder::unit(alpha)?;
        let min_gain = fogpss_min_gain(u_max, delta, epsilon0)?;
        if beta_bar <= min_gain {
            return Err(Error::InvalidGain(format!(
                "gain condition beta_bar > u_max/(delta*epsilon0) violated: \
                 beta_bar = {beta_bar} but u_max/(delta*epsilon0) = {min_gain}"
            )));
        }
        Ok(Self {
            delta,
            beta_bar,
            epsilon0,
            alpha,
            u_max,
        })
    }
}

/// Lower bound on admissible `beta_bar`: `u_max / (delta * epsilon0)`.
/// Callers must choose the gain strictly above it.
pub fn fogpss_min_gain(u_max: f64, delta: f64, epsilon0: f64) -> Result<f64> {
    if !u_max.is_finite() || u_max < 0.0 {
        return Err(Error::InvalidGain(format!(
            "u_max must be non-negative, got {u_max}"
        )));
    }
    for (name, v) in [("delta", delta), ("epsilon0", epsilon0)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::InvalidGain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(u_max / (delta * epsilon0))
}

/// Radius of the terminal error ball: `(delta c2 + c1)/delta + epsilon0`.
pub fn fogpss_bound_radius(cfg: &FogpssConfig, c1: f64, c2: f64) -> f64 {
    (cfg.delta * c2 + c1) / cfg.delta + cfg.epsilon0
}

/// Control value at the newest sample of the measured-error history:
/// `u = beta_bar * (D^alpha xe_tilde + delta * xe_tilde)`, the Caputo term
/// evaluated by the L1 scheme over the whole history. At a single-sample
/// history the derivative term is zero.
pub fn fogpss_control(history: &SampledSignal, cfg: &FogpssConfig) -> Result<f64> {
    let order = FracOrder::unit(cfg.alpha)?;
    let mut diff = CaputoDifferentiator::new(order, history.step())?;
    let mut derivative = 0.0;
    for &v in history.values() {
        derivative = diff.push(v);
    }
    Ok(cfg.beta_bar * (derivative + cfg.delta * history.last()))
}

/// Per-joint gains of the integer-order law `u_i = -b_i s_i` with
/// `s_i = d(e~_i)/dt + rho_i e~_i`.
///
/// Construction enforces the strict selection rule
/// `b_i > u_i_max / (rho_i * epsilon)` for every joint.
#[derive(Debug, Clone, PartialEq)]
pub struct PssGains {
    pub b: Vec<f64>,
    pub rho: Vec<f64>,
    pub epsilon: f64,
    pub u_max: Vec<f64>,
}

impl PssGains {
    pub fn new(b: Vec<f64>, rho: Vec<f64>, epsilon: f64, u_max: Vec<f64>) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::InvalidGain("need at least one joint".into()));
        }
        if rho.len() != n || u_max.len() != n {
            return Err(Error::InvalidGain(
                "per-joint gain lists must share one length".into(),
            ));
        }
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidGain(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        for i in 0..n {
            if !b[i].is_finite() || b[i] <= 0.0 || !rho[i].is_finite() || rho[i] <= 0.0 {
                return Err(Error::InvalidGain(format!(
                    "joint {i}: b and rho must be positive"
                )));
            }
            if !u_max[i].is_finite() || u_max[i] < 0.0 {
                return Err(Error::InvalidGain(format!(
                    "joint {i}: u_max must be non-negative"
                )));
            }
            let min = u_max[i] / (rho[i] * epsilon);
            if b[i] <= min {
                return Err(Error::InvalidGain(format!(
                    "joint {i}: selection rule b > u_max/(rho*epsilon) violated: \
                     b = {} but u_max/(rho*epsilon) = {min}",
                    b[i]
                )));
            }
        }
        Ok(Self {
            b,
            rho,
            epsilon,
            u_max,
        })
    }

    pub fn joints(&self) -> usize {
        self.b.len()
    }

    /// Terminal ball radius for one joint: `(rho c2 + c1)/rho + epsilon`.
    pub fn ball_radius(&self, joint: usize, c1: f64, c2: f64) -> f64 {
        (self.rho[joint] * c2 + c1) / self.rho[joint] + self.epsilon
    }
}

/// Integer-order law on per-joint measured-error histories: each history
/// needs at least two samples; the derivative is the backward difference of
/// the last two.
pub fn pss_control(histories: &[SampledSignal], gains: &PssGains) -> Result<Vec<f64>> {
    if histories.len() != gains.joints() {
        return Err(Error::InvalidGain(
            "history count must match the joint count".into(),
        ));
    }
    let mut out = Vec::with_capacity(histories.len());
    for (i, history) in histories.iter().enumerate() {
        let n = history.len();
        if n < 2 {
            return Err(Error::InsufficientHistory(
                "the integer-order law needs two samples for its backward difference",
            ));
        }
        let v = history.values();
        let derivative = (v[n - 1] - v[n - 2]) / history.step();
        out.push(-gains.b[i] * (derivative + gains.rho[i] * v[n - 1]));
    }
    Ok(out)
}

/// Adaptation right-hand sides for the high-gain tracker, selected by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdaptationLaw {
    /// `(||e|| - lambda) * ||e||` (default)
    ExcessTimesNorm,
    /// `||e||^2`, the classical high-gain adaptation rate
    NormSquared,
}

impl AdaptationLaw {
    pub fn eval(&self, error_norm: f64, lambda: f64) -> f64 {
        match self {
            AdaptationLaw::ExcessTimesNorm => (error_norm - lambda) * error_norm,
            AdaptationLaw::NormSquared => error_norm * error_norm,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AdaptationLaw::ExcessTimesNorm => "excess-times-norm",
            AdaptationLaw::NormSquared => "norm-squared",
        }
    }
}

/// Adaptive high-gain tracker `u = -k e`: the gain obeys
/// `D^alpha k = f(e, lambda)` while `||e|| >= lambda` and is frozen inside
/// the lambda-ball.
///
/// Each step advances the gain by the non-negative single-step increment
/// `h^alpha / Gamma(1+alpha) * f(e, lambda)` (explicit Euler at `alpha = 1`).
/// The exact switched fractional dynamics would let the gain decay through
/// its memory during frozen phases; the discrete law trades that for the two
/// properties the design needs: the gain never decreases, and it is frozen
/// exactly whenever `||e|| < lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTracker {
    gain: f64,
    lambda: f64,
    alpha: f64,
    law: AdaptationLaw,
}

impl LambdaTracker {
    pub fn new(k0: f64, lambda: f64, alpha: f64, law: AdaptationLaw) -> Result<Self> {
        if !k0.is_finite() {
            return Err(Error::InvalidGain("initial gain must be finite".into()));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidGain(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
            return Err(Error::InvalidOrder {
                alpha,
                reason: "tracker order must lie in (0, 1]",
            });
        }
        Ok(Self {
            gain: k0,
            lambda,
            alpha,
            law,
        })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Advances the gain one step from the current error and returns
    /// `u = -k e`.
    pub fn step(&mut self, error: &[f64], h: f64) -> Result<Vec<f64>> {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::InvalidConfig("step must be positive".into()));
        }
        if error.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite {
                what: "tracking error",
            });
        }
        let norm = error.iter().map(|e| e * e).sum::<f64>().sqrt();
        if norm >= self.lambda {
            let rate = self.law.eval(norm, self.lambda);
            let increment = h.powf(self.alpha) / gamma(1.0 + self.alpha)? * rate;
            self.gain += increment.max(0.0);
        }
        if !self.gain.is_finite() {
            return Err(Error::NonFinite {
                what: "adaptive gain",
            });
        }
        Ok(error.iter().map(|e| -self.gain * e).collect())
    }
}

/// Saturation shapes: all are odd, monotone, and bounded by `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaturationKind {
    Tanh,
    Atan,
    Clip,
}

/// `epsilon * tanh(z)`, `(2 epsilon / pi) * atan(z)`, or a hard clip at
/// `+/- epsilon`. Requires `epsilon > 0`.
pub fn saturate(value: f64, epsilon: f64, kind: SaturationKind) -> f64 {
    assert!(
        epsilon > 0.0 && epsilon.is_finite(),
        "saturation level must be positive"
    );
    match kind {
        SaturationKind::Tanh => epsilon * value.tanh(),
        SaturationKind::Atan => 2.0 * epsilon / PI * value.atan(),
        SaturationKind::Clip => value.clamp(-epsilon, epsilon),
    }
}
