//! Predictor-corrector solver for Caputo-type fractional initial value
//! problems `D^alpha x = f(t, x)`, in the fractional Adams form: an explicit
//! fractional Adams-Bashforth predictor followed by exactly one
//! Adams-Moulton corrector evaluation per step. Global error order is
//! `min(2, 1 + alpha)`.

use crate::error::{Error, Result};
use crate::fraccalc::gamma;
use crate::signal::SampledSignal;

/// Right-hand side of `D^alpha x = f(t, x)`.
pub type Rhs = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;

/// A Caputo initial value problem on `[0, horizon]`.
///
/// `initial[k]` holds the k-th derivative initial vector `x^(k)(0)` for
/// `k = 0 .. ceil(alpha) - 1`.
pub struct FdeProblem {
    alpha: f64,
    initial: Vec<Vec<f64>>,
    horizon: f64,
    steps: usize,
    rhs: Box<Rhs>,
}

impl FdeProblem {
    pub fn new(
        alpha: f64,
        initial: Vec<Vec<f64>>,
        horizon: f64,
        steps: usize,
        rhs: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 2.0 {
            return Err(Error::InvalidOrder {
                alpha,
                reason: "the solver supports orders in (0, 2)",
            });
        }
        let m = alpha.ceil() as usize;
        if initial.len() != m {
            return Err(Error::InvalidProblem(format!(
                "expected {m} initial derivative vectors for order {alpha}, got {}",
                initial.len()
            )));
        }
        let dim = initial[0].len();
        if dim == 0 {
            return Err(Error::InvalidProblem("empty state vector".into()));
        }
        if initial.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidProblem(
                "initial derivative vectors must share one dimension".into(),
            ));
        }
        if initial.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("initial data must be finite".into()));
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidProblem("horizon must be positive".into()));
        }
        if steps == 0 {
            return Err(Error::InvalidProblem("need at least one step".into()));
        }
        Ok(Self {
            alpha,
            initial,
            horizon,
            steps,
            rhs: Box::new(rhs),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dim(&self) -> usize {
        self.initial[0].len()
    }
}

/// Trajectory produced by [`abm_solve`]: states on the grid `t_n = n h` with
/// `h = horizon / steps`, plus the predictor pass (aligned with the grid; the
/// entry at `t_0` is the initial state, where no prediction happens).
#[derive(Debug, Clone, PartialEq)]
pub struct FdeSolution {
    h: f64,
    states: Vec<Vec<f64>>,
    predictor_states: Option<Vec<Vec<f64>>>,
}

impl FdeSolution {
    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn predictor_states(&self) -> Option<&[Vec<f64>]> {
        self.predictor_states.as_deref()
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.h
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("at least the initial state")
    }

    /// One state component as a sampled signal on the solver grid.
    pub fn component(&self, i: usize) -> Result<SampledSignal> {
        if i >= self.states[0].len() {
            return Err(Error::InvalidProblem(format!(
                "component {i} out of range for dimension {}",
                self.states[0].len()
            )));
        }
        SampledSignal::new(0.0, self.h, self.states.iter().map(|s| s[i]).collect())
    }
}

/// Corrector weight `a_(j, n+1)`.
///
/// `j = 0`: `n^(alpha+1) - (n - alpha)(n + 1)^alpha`;
/// `1 <= j <= n`: `(n-j+2)^(alpha+1) + (n-j)^(alpha+1) - 2 (n-j+1)^(alpha+1)`;
/// `j = n + 1`: 1.
pub fn abm_coeff_a(j: usize, n: usize, alpha: f64) -> Result<f64> {
    if j > n + 1 {
        return Err(Error::InvalidProblem(format!(
            "corrector weight index j = {j} out of range for n = {n}"
        )));
    }
    let nf = n as f64;
    Ok(if j == n + 1 {
        1.0
    } else if j == 0 {
        nf.powf(alpha + 1.0) - (nf - alpha) * (nf + 1.0).powf(alpha)
    } else {
        let d = (n - j) as f64;
        (d + 2.0).powf(alpha + 1.0) + d.powf(alpha + 1.0) - 2.0 * (d + 1.0).powf(alpha + 1.0)
    })
}

/// Predictor weight `b_(j, n+1) = h^alpha / alpha ((n-j+1)^alpha - (n-j)^alpha)`.
pub fn abm_coeff_b(j: usize, n: usize, alpha: f64, h: f64) -> Result<f64> {
    if j > n {
        return Err(Error::InvalidProblem(format!(
            "predictor weight index j = {j} out of range for n = {n}"
        )));
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidProblem("step must be positive".into()));
    }
    let d = (n - j) as f64;
    Ok(h.powf(alpha) / alpha * ((d + 1.0).powf(alpha) - d.powf(alpha)))
}

/// Solves the problem on its own grid.
pub fn abm_solve(problem: &FdeProblem) -> Result<FdeSolution> {
    abm_solve_n(problem, problem.steps)
}

/// Solves the problem with an overridden step count (same horizon).
pub fn abm_solve_n(problem: &FdeProblem, steps: usize) -> Result<FdeSolution> {
    if steps == 0 {
        return Err(Error::InvalidProblem("need at least one step".into()));
    }
    let alpha = problem.alpha;
    let dim = problem.dim();
    let h = problem.horizon / steps as f64;
    let h_alpha = h.powf(alpha);
    let inv_gamma_a = 1.0 / gamma(alpha)?;
    let corrector_scale = h_alpha / gamma(alpha + 2.0)?;
    let predictor_scale = h_alpha / alpha * inv_gamma_a;

    // m^alpha and m^(alpha+1) tables; the weight formulas become lookups.
    let pow_a: Vec<f64> = (0..=steps + 1).map(|m| (m as f64).powf(alpha)).collect();
    let pow_a1: Vec<f64> = (0..=steps + 1)
        .map(|m| (m as f64).powf(alpha + 1.0))
        .collect();

    let eval = |t: f64, x: &[f64]| -> Result<Vec<f64>> {
        let f = (problem.rhs)(t, x);
        if f.len() != dim {
            return Err(Error::InvalidProblem(format!(
                "right-hand side returned dimension {} instead of {dim}",
                f.len()
            )));
        }
        Ok(f)
    };

    let mut states: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    let mut predictors: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    let mut f_hist: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);

    states.push(problem.initial[0].clone());
    predictors.push(problem.initial[0].clone());
    f_hist.push(eval(0.0, &states[0])?);

    for n in 0..steps {
        let t_next = (n + 1) as f64 * h;

        // initial-condition polynomial sum_k t^k/k! x0^(k)
        let mut ic = vec![0.0; dim];
        let mut t_pow_over_fact = 1.0;
        for (k, x0k) in problem.initial.iter().enumerate() {
            if k > 0 {
                t_pow_over_fact *= t_next / k as f64;
            }
            for d in 0..dim {
                ic[d] += t_pow_over_fact * x0k[d];
            }
        }

        // predictor
        let mut xp = ic.clone();
        for (j, fj) in f_hist.iter().enumerate() {
            let w = predictor_scale * (pow_a[n - j + 1] - pow_a[n - j]);
            for d in 0..dim {
                xp[d] += w * fj[d];
            }
        }
        let fp = eval(t_next, &xp)?;

        // single corrector pass
        let mut xn = ic;
        for d in 0..dim {
            xn[d] += corrector_scale * fp[d];
        }
        for (j, fj) in f_hist.iter().enumerate() {
            let w = corrector_scale
                * if j == 0 {
                    pow_a1[n] - (n as f64 - alpha) * pow_a[n + 1]
                } else {
                    let d = n - j;
                    pow_a1[d + 2] + pow_a1[d] - 2.0 * pow_a1[d + 1]
                };
            for dd in 0..dim {
                xn[dd] += w * fj[dd];
            }
        }

        if xn.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: n + 1,
                t: t_next,
            });
        }
        let fn_next = eval(t_next, &xn)?;
        if fn_next.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: n + 1,
                t: t_next,
            });
        }
        f_hist.push(fn_next);
        predictors.push(xp);
        states.push(xn);
    }

    Ok(FdeSolution {
        h,
        states,
        predictor_states: Some(predictors),
    })
}

/// Result of a convergence-order study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceEstimate {
    /// Least-squares slope of `ln(error)` against `ln(h)`.
    pub order: f64,
    /// Set when the measured errors were exactly zero (order reported as
    /// infinity).
    pub degenerate: bool,
    /// `(steps, max error)` pairs as measured.
    pub errors: Vec<(usize, f64)>,
}

/// Fraction of the horizon excluded from the error norm: the scheme's
/// startup error at the first nodes has reduced order `O(h^(2 alpha))` when
/// the solution has the usual `t^alpha` expansion at the origin and would
/// mask the asymptotic rate.
const STARTUP_LAYER_FRACTION: f64 = 0.1;

/// Measures the solver's convergence order against an exact solution by
/// re-solving the problem with each step count in `ns` and fitting the
/// max-error decay.
///
/// The error is `max |x(t_j) - x_h(t_j)|` over grid points with
/// `t_j >= 0.1 * horizon`; see [`ConvergenceEstimate`].
pub fn estimate_convergence_order(
    problem: &FdeProblem,
    reference: &dyn Fn(f64) -> Vec<f64>,
    ns: &[usize],
) -> Result<ConvergenceEstimate> {
    if ns.len() < 3 {
        return Err(Error::InvalidProblem(
            "need at least three step counts".into(),
        ));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidProblem(
            "step counts must be strictly increasing".into(),
        ));
    }

    let dim = problem.dim();
    let mut errors = Vec::with_capacity(ns.len());
    for &n in ns {
        let sol = abm_solve_n(problem, n)?;
        let from = ((STARTUP_LAYER_FRACTION * n as f64).ceil() as usize).min(n);
        let mut worst = 0.0_f64;
        for (jj, state) in sol.states().iter().enumerate().skip(from) {
            let exact = reference(sol.time(jj));
            if exact.len() != dim {
                return Err(Error::InvalidProblem(
                    "reference dimension mismatch".into(),
                ));
            }
            for d in 0..dim {
                worst = worst.max((state[d] - exact[d]).abs());
            }
        }
        errors.push((n, worst));
    }

    if errors.iter().any(|&(_, e)| e == 0.0) {
        return Ok(ConvergenceEstimate {
            order: f64::INFINITY,
            degenerate: true,
            errors,
        });
    }

    let xs: Vec<f64> = errors
        .iter()
        .map(|&(n, _)| (problem.horizon / n as f64).ln())
        .collect();
    let ys: Vec<f64> = errors.iter().map(|&(_, e)| e.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xm) * (y - ym))
        .sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    Ok(ConvergenceEstimate {
        order: sxy / sxx,
        degenerate: false,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::mittag_leffler;
    use crate::signal::FracOrder;
    use approx::assert_relative_eq;

    fn linear_problem(alpha: f64, lambda: f64, x0: f64, horizon: f64, steps: usize) -> FdeProblem {
        FdeProblem::new(
            alpha,
            vec![vec![x0]],
            horizon,
            steps,
            move |_t, x| vec![lambda * x[0]],
        )
        .unwrap()
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(abm_coeff_a(2, 1, 0.37).unwrap(), 1.0); // j = n + 1
        assert_eq!(abm_coeff_a(5, 4, 1.9).unwrap(), 1.0);
        assert_relative_eq!(abm_coeff_a(1, 1, 1.0).unwrap(), 2.0); // 4 + 0 - 2
        assert_relative_eq!(abm_coeff_a(0, 0, 0.5).unwrap(), 0.5); // 0 - (0-1/2)*1
        assert!(abm_coeff_a(3, 1, 0.5).is_err());

        assert_relative_eq!(abm_coeff_b(3, 3, 1.0, 0.1).unwrap(), 0.1);
        assert_relative_eq!(abm_coeff_b(0, 0, 0.5, 1.0).unwrap(), 2.0);
        assert_relative_eq!(
            abm_coeff_b(0, 1, 0.5, 1.0).unwrap(),
            2.0 * (2.0_f64.sqrt() - 1.0),
            max_relative = 1e-14
        );
        assert!(abm_coeff_b(2, 1, 0.5, 1.0).is_err());
        assert!(abm_coeff_b(0, 0, 0.5, 0.0).is_err());
    }

    #[test]
    fn problem_validation() {
        assert!(FdeProblem::new(0.0, vec![vec![1.0]], 1.0, 10, |_, x| x.to_vec()).is_err());
        assert!(FdeProblem::new(2.0, vec![vec![1.0]], 1.0, 10, |_, x| x.to_vec()).is_err());
        // order in (1,2) needs two initial vectors
        assert!(FdeProblem::new(1.5, vec![vec![1.0]], 1.0, 10, |_, x| x.to_vec()).is_err());
        assert!(
            FdeProblem::new(1.5, vec![vec![1.0], vec![0.0]], 1.0, 10, |_, x| x.to_vec()).is_ok()
        );
        assert!(FdeProblem::new(0.5, vec![vec![]], 1.0, 10, |_, x| x.to_vec()).is_err());
        assert!(FdeProblem::new(0.5, vec![vec![1.0]], 0.0, 10, |_, x| x.to_vec()).is_err());
        assert!(FdeProblem::new(0.5, vec![vec![1.0]], 1.0, 0, |_, x| x.to_vec()).is_err());
    }

    #[test]
    fn integer_order_reduction_matches_exponential() {
        let p = linear_problem(1.0, -1.0, 1.0, 1.0, 1000);
        let sol = abm_solve(&p).unwrap();
        assert!((sol.final_state()[0] - (-1.0_f64).exp()).abs() <= 2e-4);
    }

    #[test]
    fn zero_rhs_keeps_the_state_constant() {
        let p = FdeProblem::new(0.5, vec![vec![3.0]], 2.0, 100, |_t, _x| vec![0.0]).unwrap();
        let sol = abm_solve(&p).unwrap();
        assert!(sol.states().iter().all(|s| s[0] == 3.0));
    }

    #[test]
    fn half_order_decay_matches_mittag_leffler() {
        let p = linear_problem(0.5, -1.0, 1.0, 1.0, 2000);
        let sol = abm_solve(&p).unwrap();
        let exact = mittag_leffler(0.5, -1.0).unwrap();
        assert!(
            (sol.final_state()[0] - exact).abs() <= 1e-3,
            "{} vs {exact}",
            sol.final_state()[0]
        );
    }

    #[test]
    fn grid_metadata_is_exact() {
        let p = linear_problem(0.5, -1.0, 1.0, 2.0, 128);
        let sol = abm_solve(&p).unwrap();
        assert_eq!(sol.step(), 2.0 / 128.0);
        assert_eq!(sol.states().len(), 129);
        assert_eq!(sol.time(64), 64.0 * sol.step());
        assert_eq!(sol.states()[0], vec![1.0]);
    }

    #[test]
    fn solver_is_deterministic() {
        let p = linear_problem(0.7, -0.8, 1.3, 3.0, 500);
        let a = abm_solve(&p).unwrap();
        let b = abm_solve(&p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn blow_up_is_reported_with_the_step() {
        // finite-time blow-up of dx/dt = x^2, x(0) = 2 at t = 0.5
        let p = FdeProblem::new(1.0, vec![vec![2.0]], 1.0, 200, |_t, x| vec![x[0] * x[0]])
            .unwrap();
        match abm_solve(&p) {
            Err(Error::BlowUp { step, .. }) => assert!(step > 50),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn integer_order_agrees_with_rk4_reference() {
        // independent classical reference on dx/dt = -x over [0, 5]
        let steps = 5000;
        let h = 5.0 / steps as f64;
        let mut x = 1.0_f64;
        let mut reference = Vec::with_capacity(steps + 1);
        reference.push(x);
        let f = |x: f64| -x;
        for _ in 0..steps {
            let k1 = f(x);
            let k2 = f(x + 0.5 * h * k1);
            let k3 = f(x + 0.5 * h * k2);
            let k4 = f(x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            reference.push(x);
        }
        let p = linear_problem(1.0, -1.0, 1.0, 5.0, steps);
        let sol = abm_solve(&p).unwrap();
        let worst = sol
            .states()
            .iter()
            .zip(&reference)
            .map(|(s, r)| (s[0] - r).abs())
            .fold(0.0_f64, f64::max);
        assert!(worst < 5e-3, "max deviation {worst}");
    }

    #[test]
    fn solved_trajectory_is_consistent_with_the_caputo_operator() {
        // Applying the L1 derivative to the solved trajectory of
        // D^alpha x = -x recovers -x with error vanishing under refinement
        // (measured beyond the startup layer t >= 0.1 T).
        for &alpha in &[0.3, 0.5, 0.8] {
            let order = FracOrder::unit(alpha).unwrap();
            let mut errs = Vec::new();
            for &n in &[400usize, 800] {
                let p = linear_problem(alpha, -1.0, 1.0, 1.0, n);
                let sol = abm_solve(&p).unwrap();
                let x = sol.component(0).unwrap();
                let d = crate::fraccalc::caputo_derivative(&x, order).unwrap();
                let from = n / 10;
                let worst = (from..=n)
                    .map(|k| (d.values()[k] + x.values()[k]).abs())
                    .fold(0.0_f64, f64::max);
                errs.push(worst);
            }
            assert!(
                errs[1] < errs[0],
                "alpha = {alpha}: no improvement {errs:?}"
            );
        }
    }

    #[test]
    fn convergence_order_examples() {
        let ns = [250usize, 500, 1000, 2000];

        let p1 = linear_problem(1.0, -1.0, 1.0, 1.0, 1000);
        let est = estimate_convergence_order(&p1, &|t| vec![(-t).exp()], &ns).unwrap();
        assert!((est.order - 2.0).abs() <= 0.3, "order {}", est.order);

        let p05 = linear_problem(0.5, -1.0, 1.0, 1.0, 1000);
        let est = estimate_convergence_order(
            &p05,
            &|t| vec![mittag_leffler(0.5, -t.sqrt()).unwrap()],
            &ns,
        )
        .unwrap();
        assert!((est.order - 1.5).abs() <= 0.3, "order {}", est.order);
    }

    #[test]
    fn degenerate_errors_report_infinite_order() {
        // zero right-hand side is reproduced exactly at any resolution
        let p = FdeProblem::new(0.5, vec![vec![2.0]], 1.0, 100, |_t, _x| vec![0.0]).unwrap();
        let est = estimate_convergence_order(&p, &|_t| vec![2.0], &[10, 20, 40]).unwrap();
        assert!(est.degenerate);
        assert_eq!(est.order, f64::INFINITY);
    }

    #[test]
    fn order_study_input_validation() {
        let p = linear_problem(0.5, -1.0, 1.0, 1.0, 100);
        let r = |t: f64| vec![mittag_leffler(0.5, -t.sqrt()).unwrap()];
        assert!(estimate_convergence_order(&p, &r, &[10, 20]).is_err());
        assert!(estimate_convergence_order(&p, &r, &[20, 10, 40]).is_err());
    }
}
