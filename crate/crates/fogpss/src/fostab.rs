//! Stability utilities for linear fractional-order systems.
//!
//! The eigenvalue-argument test classifies `D^alpha x = A x` (commensurate
//! order in (0, 1]) as stable when every eigenvalue satisfies
//! `|arg(lambda)| > alpha pi / 2`, strictly. The module also provides a
//! discretization-aware audit of the fractional Lyapunov inequality
//! `1/2 D^alpha(x^2) <= x D^alpha x`, which holds exactly in the continuum
//! for differentiable trajectories; the audit checks that the L1
//! discretization respects it up to its own truncation error.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};
use crate::fraccalc::caputo_derivative;
use crate::signal::{FracOrder, SampledSignal};

/// `D^alpha x = A x` with commensurate order `alpha` in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFoSystem {
    matrix: DMatrix<f64>,
    alpha: f64,
}

impl LinearFoSystem {
    pub fn new(matrix: DMatrix<f64>, alpha: f64) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidProblem(format!(
                "system matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("system matrix must be finite".into()));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
            return Err(Error::InvalidOrder {
                alpha,
                reason: "the argument test applies for orders in (0, 1]",
            });
        }
        Ok(Self { matrix, alpha })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Outcome of the eigenvalue-argument test.
///
/// `margin` is `min_i |arg(lambda_i)| - alpha pi / 2`; the verdict is stable
/// exactly when the margin is positive (the boundary case counts as
/// unstable, the condition being strict). The argument of a zero eigenvalue
/// is taken as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub margin: f64,
    pub eigen_args: Vec<f64>,
}

pub fn check_linear_fo_stability(system: &LinearFoSystem) -> Result<StabilityVerdict> {
    let schur =
        Schur::try_new(system.matrix.clone(), 1e-14, 100_000).ok_or(Error::EigenFailed)?;
    let eigenvalues = schur.complex_eigenvalues();
    let eigen_args: Vec<f64> = eigenvalues
        .iter()
        .map(|l| {
            if l.re == 0.0 && l.im == 0.0 {
                0.0
            } else {
                l.im.atan2(l.re).abs()
            }
        })
        .collect();
    let min_arg = eigen_args.iter().copied().fold(f64::INFINITY, f64::min);
    let margin = min_arg - system.alpha * PI / 2.0;
    Ok(StabilityVerdict {
        stable: margin > 0.0,
        margin,
        eigen_args,
    })
}

/// Report of the discrete Lyapunov-inequality audit.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityAudit {
    /// Largest value of `1/2 D^alpha(x^2) - x D^alpha x` over the grid.
    pub max_violation: f64,
    /// Allowance for the L1 truncation error, `10 h^(2-alpha) * roughness`.
    pub tolerance: f64,
    pub pass: bool,
}

// Multiple of the observed power-function truncation constant; the audit
// must not flag discretization noise as a violation of an inequality that
// is exact in the continuum.
const AUDIT_TOLERANCE_FACTOR: f64 = 10.0;

/// Audits `1/2 D^alpha(x^2) <= x D^alpha x` on a sampled trajectory.
///
/// Both sides are evaluated with the L1 scheme on the signal's grid. The
/// signal is assumed to be sampled from a differentiable function; the
/// tolerance scales a second-difference roughness estimate by
/// `h^(2-alpha)`, so genuine violations are separated from truncation
/// error. This is a numerical audit, not a proof.
pub fn audit_lyapunov_inequality(signal: &SampledSignal, alpha: f64) -> Result<InequalityAudit> {
    let order = FracOrder::unit(alpha)?;
    if signal.len() < 3 {
        return Err(Error::InsufficientHistory(
            "the inequality audit needs at least three samples",
        ));
    }
    let h = signal.step();
    let squared = SampledSignal::new(
        signal.t0(),
        h,
        signal.values().iter().map(|&v| v * v).collect(),
    )?;
    let lhs = caputo_derivative(&squared, order)?;
    let rhs = caputo_derivative(signal, order)?;

    // the initial node is skipped: both sides are identically zero there
    let mut max_violation = f64::NEG_INFINITY;
    for k in 1..signal.len() {
        let violation = 0.5 * lhs.values()[k] - signal.values()[k] * rhs.values()[k];
        max_violation = max_violation.max(violation);
    }

    // curvature estimates for x and x^2 by second divided differences
    let curvature = |v: &[f64]| {
        v.windows(3)
            .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs() / (h * h))
            .fold(0.0_f64, f64::max)
    };
    let amp = signal.values().iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let roughness = curvature(squared.values())
        .max(amp * curvature(signal.values()))
        .max(1e-12);
    let tolerance = AUDIT_TOLERANCE_FACTOR * h.powf(2.0 - alpha) * roughness;

    Ok(InequalityAudit {
        max_violation,
        tolerance,
        pass: max_violation <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::gamma;
    use approx::assert_relative_eq;

    fn scalar_system(a: f64, alpha: f64) -> LinearFoSystem {
        LinearFoSystem::new(DMatrix::from_row_slice(1, 1, &[a]), alpha).unwrap()
    }

    #[test]
    fn scalar_negative_system_is_stable() {
        let v = check_linear_fo_stability(&scalar_system(-1.0, 0.5)).unwrap();
        assert!(v.stable);
        assert_relative_eq!(v.margin, 0.75 * PI, max_relative = 1e-12);
        assert_relative_eq!(v.eigen_args[0], PI, max_relative = 1e-12);
    }

    #[test]
    fn scalar_positive_system_is_unstable() {
        let v = check_linear_fo_stability(&scalar_system(1.0, 0.5)).unwrap();
        assert!(!v.stable);
        assert!(v.margin < 0.0);
    }

    #[test]
    fn rotation_system_boundary_behaviour() {
        // eigenvalues +/- i: args pi/2
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let half = check_linear_fo_stability(&LinearFoSystem::new(m.clone(), 0.5).unwrap())
            .unwrap();
        assert!(half.stable);
        assert_relative_eq!(half.margin, PI / 4.0, max_relative = 1e-9);

        // at alpha = 1 the margin is exactly zero: strictly unstable
        let one = check_linear_fo_stability(&LinearFoSystem::new(m, 1.0).unwrap()).unwrap();
        assert!(!one.stable);
        assert!(one.margin.abs() < 1e-9);
    }

    #[test]
    fn zero_eigenvalue_counts_as_unstable() {
        let v = check_linear_fo_stability(&scalar_system(0.0, 0.5)).unwrap();
        assert!(!v.stable);
        assert_relative_eq!(v.margin, -0.25 * PI, max_relative = 1e-12);
    }

    #[test]
    fn system_validation() {
        assert!(LinearFoSystem::new(DMatrix::from_row_slice(1, 2, &[1.0, 2.0]), 0.5).is_err());
        assert!(LinearFoSystem::new(DMatrix::from_row_slice(1, 1, &[1.0]), 1.5).is_err());
        assert!(LinearFoSystem::new(DMatrix::from_row_slice(1, 1, &[1.0]), 0.0).is_err());
    }

    #[test]
    fn verdict_invariant_under_similarity() {
        // eigenvalues are similarity invariants; random mild transforms must
        // not move the verdict, and the margin must agree to 1e-8
        let cases = [
            DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, 0.0, -3.0]),
            DMatrix::from_row_slice(2, 2, &[0.3, 1.1, -1.1, 0.3]),
            DMatrix::from_row_slice(2, 2, &[-0.5, 0.9, -0.9, -0.5]),
        ];
        // deterministic pseudo-random entries for the transforms
        let mut state = 0x243f6a8885a308d3_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64 - 1.0) * 0.35
        };
        for a in &cases {
            let va = check_linear_fo_stability(&LinearFoSystem::new(a.clone(), 0.6).unwrap())
                .unwrap();
            for _ in 0..20 {
                let p = DMatrix::from_row_slice(2, 2, &[1.0, next(), next(), 1.0]);
                let p_inv = match p.clone().try_inverse() {
                    Some(inv) => inv,
                    None => continue,
                };
                let similar = &p * a * &p_inv;
                let vs =
                    check_linear_fo_stability(&LinearFoSystem::new(similar, 0.6).unwrap())
                        .unwrap();
                assert_eq!(va.stable, vs.stable);
                assert!(
                    (va.margin - vs.margin).abs() <= 1e-8,
                    "margins {} vs {}",
                    va.margin,
                    vs.margin
                );
            }
        }
    }

    #[test]
    fn audit_constant_signal_passes_trivially() {
        // both Caputo derivatives vanish identically on a constant
        let s = SampledSignal::from_fn(0.0, 1e-3, 1001, |_| 2.0).unwrap();
        let audit = audit_lyapunov_inequality(&s, 0.5).unwrap();
        assert!(audit.pass);
        assert_eq!(audit.max_violation, 0.0);
    }

    #[test]
    fn audit_identity_signal_has_analytic_margin() {
        // For x = t both sides have closed forms:
        // LHS = t^(2-a)/Gamma(3-a), RHS = t^(2-a)/Gamma(2-a); RHS - LHS > 0.
        let alpha = 0.5;
        let s = SampledSignal::from_fn(0.0, 1e-3, 1001, |t| t).unwrap();
        let audit = audit_lyapunov_inequality(&s, alpha).unwrap();
        assert!(audit.pass);
        assert!(audit.max_violation <= 0.0, "{}", audit.max_violation);
        let analytic_margin_at_1 =
            1.0 / gamma(2.0 - alpha).unwrap() - 1.0 / gamma(3.0 - alpha).unwrap();
        assert!(analytic_margin_at_1 > 0.35); // the inequality is comfortably strict
    }

    #[test]
    fn audit_sine_signal_regression_margin() {
        let s = SampledSignal::from_fn(0.0, 1e-3, 1001, |t| t.sin()).unwrap();
        let audit = audit_lyapunov_inequality(&s, 0.3).unwrap();
        assert!(audit.pass);
        // regression pin of the observed discrete margin
        assert!(
            audit.max_violation < -4.0e-6 && audit.max_violation > -5.0e-6,
            "observed margin drifted: {}",
            audit.max_violation
        );
    }
}
