//! Fixed-step closed-loop simulation engine.
//!
//! One engine couples the first-order plant with a fractional-memory
//! controller through the bounded measurement channel (measure, control,
//! actuate with zero-order hold, integrate one RK4 step); a second runs the
//! integer-order two-joint robot experiment. Both record full traces and
//! assert every declared modelling bound at runtime — a violated bound is an
//! error, never a silent clamp.

use crate::controllers::{
    fogpss_bound_radius, AdaptationLaw, FogpssConfig, LambdaTracker, PssGains,
};
use crate::error::{Error, Result};
use crate::fraccalc::{CaputoDifferentiator, RlIntegrator};
use crate::plants::{
    plant_step_rk4, reference_eval, robot_step_rk4, FirstOrderPlant, MeasurementModel,
    ReferenceSpec, RobotPlant,
};
use crate::signal::FracOrder;

/// Desk-scale guard on the number of steps.
pub const MAX_STEPS: usize = 1_000_000;

// States beyond this magnitude are treated as divergence of the closed loop.
const STATE_GUARD: f64 = 1e12;

// Relative slack applied to runtime bound assertions so boundary-tight
// catalog functions are not rejected for roundoff.
const BOUND_SLACK: f64 = 1.0 + 1e-9;

/// Controller selection for the scalar loop.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarController {
    Fogpss(FogpssConfig),
    Lambda(LambdaTrackerSpec),
}

/// Configuration of the adaptive tracker (the stateful tracker itself is
/// created per run).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaTrackerSpec {
    pub k0: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub law: AdaptationLaw,
}

/// Full description of one scalar closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub step: f64,
    pub horizon: f64,
    pub plant: FirstOrderPlant,
    pub reference: ReferenceSpec,
    pub measurement: MeasurementModel,
    pub controller: ScalarController,
    pub x0: f64,
    pub seed: u64,
    pub negate_u: bool,
}

impl SimConfig {
    pub fn steps(&self) -> Result<usize> {
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::InvalidConfig("step must be positive".into()));
        }
        if !self.horizon.is_finite() || self.horizon < self.step {
            return Err(Error::InvalidConfig(
                "horizon must be at least one step".into(),
            ));
        }
        if !self.x0.is_finite() {
            return Err(Error::InvalidConfig("initial state must be finite".into()));
        }
        let n = (self.horizon / self.step).round() as usize;
        if n == 0 || n > MAX_STEPS {
            return Err(Error::InvalidConfig(format!(
                "step count {n} outside [1, {MAX_STEPS}]"
            )));
        }
        Ok(n)
    }

    /// Canonical one-line rendering used for the trace hash.
    pub fn canonical_string(&self) -> String {
        let controller = match &self.controller {
            ScalarController::Fogpss(c) => format!(
                "fogpss(delta={:e},beta_bar={:e},epsilon0={:e},alpha={:e},u_max={:e})",
                c.delta, c.beta_bar, c.epsilon0, c.alpha, c.u_max
            ),
            ScalarController::Lambda(s) => format!(
                "lambda(k0={:e},lambda={:e},alpha={:e},law={})",
                s.k0, s.lambda, s.alpha, s.law.name()
            ),
        };
        let b = self.plant.bounds();
        format!(
            "h={:e};T={:e};plant(a_p={:e},b_p={:e},d={:?},bounds=({:e},{:e},{:e},{:e},{:e}));\
             ref={:?};meas(omega={:?},c1={:e},c2={:e},alpha={:e});ctrl={};x0={:e};seed={};neg={}",
            self.step,
            self.horizon,
            self.plant.a_p(),
            self.plant.b_p(),
            self.plant.disturbance(),
            b.a_lo,
            b.a_hi,
            b.b_lo,
            b.b_hi,
            b.d_bar,
            self.reference,
            self.measurement.omega,
            self.measurement.c1,
            self.measurement.c2,
            self.measurement.alpha,
            controller,
            self.x0,
            self.seed,
            self.negate_u
        )
    }
}

/// Closed-loop record: one row per grid point with exact column identities
/// `x_e = x_d - x` and `xe_tilde = x_e - I^alpha omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub x_d: Vec<f64>,
    pub x_e: Vec<f64>,
    pub xe_tilde: Vec<f64>,
    pub u: Vec<f64>,
    pub config_hash: String,
    pub bound_radius: Option<f64>,
    pub entry_time: Option<f64>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn step(&self) -> f64 {
        if self.t.len() > 1 {
            self.t[1] - self.t[0]
        } else {
            0.0
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Runs the scalar closed loop.
///
/// Per step: evaluate the reference, form the true error `x_e = x_d - x`,
/// evaluate the measurement error and its fractional integral to form
/// `xe_tilde`, compute the control from the accumulated history, then hold
/// it over one RK4 plant step. All declared bounds are asserted each step.
pub fn simulate(config: &SimConfig) -> Result<SimTrace> {
    let n_steps = config.steps()?;
    let h = config.step;

    let mut omega_integral = RlIntegrator::new(FracOrder::new(config.measurement.alpha)?, h)?;
    enum LoopController {
        Fogpss {
            cfg: FogpssConfig,
            differentiator: CaputoDifferentiator,
        },
        Lambda(LambdaTracker),
    }
    let mut controller = match &config.controller {
        ScalarController::Fogpss(cfg) => LoopController::Fogpss {
            cfg: *cfg,
            differentiator: CaputoDifferentiator::new(FracOrder::unit(cfg.alpha)?, h)?,
        },
        ScalarController::Lambda(spec) => LoopController::Lambda(LambdaTracker::new(
            spec.k0, spec.lambda, spec.alpha, spec.law,
        )?),
    };

    let mut x = config.x0;
    let mut t_col = Vec::with_capacity(n_steps + 1);
    let mut x_col = Vec::with_capacity(n_steps + 1);
    let mut xd_col = Vec::with_capacity(n_steps + 1);
    let mut xe_col = Vec::with_capacity(n_steps + 1);
    let mut xt_col = Vec::with_capacity(n_steps + 1);
    let mut u_col = Vec::with_capacity(n_steps + 1);

    for n in 0..=n_steps {
        let t = n as f64 * h;

        let reference = reference_eval(&config.reference, t)?;
        let x_e = reference.position - x;

        let omega = config.measurement.omega.eval(x_e, t);
        if omega.abs() > config.measurement.c1 * BOUND_SLACK {
            return Err(Error::AssumptionViolated {
                assumption: "measurement magnitude bound c1",
                quantity: "omega",
                t,
                value: omega.abs(),
                bound: config.measurement.c1,
            });
        }
        let omega_int = omega_integral.push(omega);
        if omega_int.abs() > config.measurement.c2 * BOUND_SLACK {
            return Err(Error::AssumptionViolated {
                assumption: "measurement integral bound c2",
                quantity: "I^alpha omega",
                t,
                value: omega_int.abs(),
                bound: config.measurement.c2,
            });
        }
        let xe_tilde = x_e - omega_int;

        let u_law = match &mut controller {
            LoopController::Fogpss {
                cfg,
                differentiator,
            } => {
                let derivative = differentiator.push(xe_tilde);
                cfg.beta_bar * (derivative + cfg.delta * xe_tilde)
            }
            // The adaptive tracker works on the output-error convention
            // (actual minus desired): the measured estimate of that error
            // is -xe_tilde.
            LoopController::Lambda(tracker) => tracker.step(&[-xe_tilde], h)?[0],
        };
        let u = if config.negate_u { -u_law } else { u_law };
        if !u.is_finite() {
            return Err(Error::NonFinite {
                what: "control input",
            });
        }

        t_col.push(t);
        x_col.push(x);
        xd_col.push(reference.position);
        xe_col.push(x_e);
        xt_col.push(xe_tilde);
        u_col.push(u);

        if n < n_steps {
            let d = config.plant.disturbance_at(x, t);
            if d.abs() > config.plant.bounds().d_bar * BOUND_SLACK {
                return Err(Error::AssumptionViolated {
                    assumption: "disturbance bound d_bar",
                    quantity: "d(x, t)",
                    t,
                    value: d.abs(),
                    bound: config.plant.bounds().d_bar,
                });
            }
            x = plant_step_rk4(&config.plant, x, u, t, h).map_err(|e| match e {
                Error::PlantBlowUp { .. } => Error::BlowUp {
                    step: n + 1,
                    t: t + h,
                },
                other => other,
            })?;
            if x.abs() > STATE_GUARD {
                return Err(Error::BlowUp {
                    step: n + 1,
                    t: t + h,
                });
            }
        }
    }

    let bound_radius = match &config.controller {
        ScalarController::Fogpss(cfg) => Some(fogpss_bound_radius(
            cfg,
            config.measurement.c1,
            config.measurement.c2,
        )),
        ScalarController::Lambda(_) => None,
    };

    let mut trace = SimTrace {
        t: t_col,
        x: x_col,
        x_d: xd_col,
        x_e: xe_col,
        xe_tilde: xt_col,
        u: u_col,
        config_hash: format!("{:016x}", fnv1a64(config.canonical_string().as_bytes())),
        bound_radius,
        entry_time: None,
    };
    trace.entry_time = bound_radius.and_then(|r| entry_time(&trace, r));
    Ok(trace)
}

/// Earliest `t*` such that `|x_e(t)| <= radius` for every grid point in
/// `[t*, T]`; `None` if the trace never settles inside.
pub fn entry_time(trace: &SimTrace, radius: f64) -> Option<f64> {
    assert!(radius > 0.0, "entry radius must be positive");
    let mut last_outside = None;
    for (i, &v) in trace.x_e.iter().enumerate() {
        if v.abs() > radius {
            last_outside = Some(i);
        }
    }
    match last_outside {
        None => Some(trace.t[0]),
        Some(i) if i + 1 == trace.t.len() => None,
        Some(i) => Some(trace.t[i + 1]),
    }
}

/// Runs independent configurations concurrently and collects their traces
/// in input order.
pub fn simulate_batch(configs: &[SimConfig]) -> Vec<Result<SimTrace>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|config| scope.spawn(move || simulate(config)))
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("simulation thread panicked"))
            .collect()
    })
}

/// Configuration of the two-joint (in general n-joint) integer-order
/// experiment: the decoupled robot under the per-joint law
/// `u_i = -b_i (d(e~_i)/dt + rho_i e~_i)` with the integer measurement
/// channel `e~_i = e_i - Int omega_i`.
///
/// The torque actually applied is `-u_i` (the orientation that makes the
/// error dynamics dissipative on `m qddot + d = torque` with
/// `e = q_d - q`); setting `negate_u` applies the raw law output instead,
/// which destabilizes the loop and exists for sensitivity runs.
#[derive(Debug, Clone, PartialEq)]
pub struct PssExperimentConfig {
    pub step: f64,
    pub horizon: f64,
    pub plant: RobotPlant,
    pub references: Vec<ReferenceSpec>,
    pub measurements: Vec<MeasurementModel>,
    pub gains: PssGains,
    pub q0: Vec<f64>,
    pub qdot0: Vec<f64>,
    pub negate_u: bool,
}

impl PssExperimentConfig {
    fn validate(&self) -> Result<usize> {
        let n = self.plant.joints();
        if self.references.len() != n
            || self.measurements.len() != n
            || self.gains.joints() != n
            || self.q0.len() != n
            || self.qdot0.len() != n
        {
            return Err(Error::InvalidConfig(
                "per-joint lists must match the robot's joint count".into(),
            ));
        }
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::InvalidConfig("step must be positive".into()));
        }
        if !self.horizon.is_finite() || self.horizon < self.step {
            return Err(Error::InvalidConfig(
                "horizon must be at least one step".into(),
            ));
        }
        let steps = (self.horizon / self.step).round() as usize;
        if steps == 0 || steps > MAX_STEPS {
            return Err(Error::InvalidConfig(format!(
                "step count {steps} outside [1, {MAX_STEPS}]"
            )));
        }
        Ok(steps)
    }

    fn canonical_string(&self) -> String {
        format!(
            "pss;h={:e};T={:e};m={:?};gains(b={:?},rho={:?},eps={:e},umax={:?});q0={:?};qd0={:?};neg={}",
            self.step,
            self.horizon,
            self.plant.inertia(),
            self.gains.b,
            self.gains.rho,
            self.gains.epsilon,
            self.gains.u_max,
            self.q0,
            self.qdot0,
            self.negate_u
        )
    }
}

/// Per-joint verdicts of the integer-order experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PssJointReport {
    /// Terminal ball radius `(rho c2 + c1)/rho + epsilon`.
    pub radius: f64,
    /// Entry time of `|e_i|` into the ball (stay-in definition).
    pub entry_time: Option<f64>,
    /// Largest `|e_i|` from the entry time on.
    pub max_error_after_entry: f64,
    /// Derivative bound `2 rho (c2 + c1/rho + epsilon)`.
    pub edot_bound: f64,
    /// Largest backward-difference `|de_i/dt|` observed inside the ball.
    pub max_edot_inside: f64,
    /// Whether the measured derivative stays within the bound with 10% slack.
    pub edot_ok: bool,
}

/// Report of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct PssReport {
    pub joints: Vec<PssJointReport>,
}

// Discretization slack on the inside-ball derivative bound check.
const EDOT_SLACK: f64 = 1.10;

/// Runs the decoupled-robot tracking experiment and reports per-joint ball
/// entry and the inside-ball derivative bound check.
pub fn pss_robot_experiment(config: &PssExperimentConfig) -> Result<(Vec<SimTrace>, PssReport)> {
    let n_steps = config.validate()?;
    let h = config.step;
    let joints = config.plant.joints();

    let mut omega_integrals = Vec::with_capacity(joints);
    for m in &config.measurements {
        omega_integrals.push(RlIntegrator::new(FracOrder::new(m.alpha)?, h)?);
    }

    let mut q = config.q0.clone();
    let mut qdot = config.qdot0.clone();
    let mut previous_etilde: Option<Vec<f64>> = None;

    let hash = format!(
        "{:016x}",
        fnv1a64(config.canonical_string().as_bytes())
    );
    let mut traces: Vec<SimTrace> = (0..joints)
        .map(|_| SimTrace {
            t: Vec::with_capacity(n_steps + 1),
            x: Vec::with_capacity(n_steps + 1),
            x_d: Vec::with_capacity(n_steps + 1),
            x_e: Vec::with_capacity(n_steps + 1),
            xe_tilde: Vec::with_capacity(n_steps + 1),
            u: Vec::with_capacity(n_steps + 1),
            config_hash: hash.clone(),
            bound_radius: None,
            entry_time: None,
        })
        .collect();

    for n in 0..=n_steps {
        let t = n as f64 * h;

        let mut e = Vec::with_capacity(joints);
        let mut etilde = Vec::with_capacity(joints);
        let mut qd_positions = Vec::with_capacity(joints);
        for i in 0..joints {
            let reference = reference_eval(&config.references[i], t)?;
            qd_positions.push(reference.position);
            let e_i = reference.position - q[i];
            e.push(e_i);

            let m = &config.measurements[i];
            let omega = m.omega.eval(e_i, t);
            if omega.abs() > m.c1 * BOUND_SLACK {
                return Err(Error::AssumptionViolated {
                    assumption: "measurement magnitude bound c1",
                    quantity: "omega",
                    t,
                    value: omega.abs(),
                    bound: m.c1,
                });
            }
            let integral = omega_integrals[i].push(omega);
            if integral.abs() > m.c2 * BOUND_SLACK {
                return Err(Error::AssumptionViolated {
                    assumption: "measurement integral bound c2",
                    quantity: "Int omega",
                    t,
                    value: integral.abs(),
                    bound: m.c2,
                });
            }
            etilde.push(e_i - integral);
        }

        // law u_i = -b_i (etilde' + rho_i etilde); the derivative term is a
        // backward difference, taken as zero at the first sample
        let mut u_law = Vec::with_capacity(joints);
        for i in 0..joints {
            let derivative = match &previous_etilde {
                Some(prev) => (etilde[i] - prev[i]) / h,
                None => 0.0,
            };
            u_law.push(-config.gains.b[i] * (derivative + config.gains.rho[i] * etilde[i]));
        }
        // dissipative actuation orientation by default (see type docs)
        let torque: Vec<f64> = if config.negate_u {
            u_law.clone()
        } else {
            u_law.iter().map(|u| -u).collect()
        };

        for i in 0..joints {
            if !torque[i].is_finite() {
                return Err(Error::NonFinite {
                    what: "joint torque",
                });
            }
            traces[i].t.push(t);
            traces[i].x.push(q[i]);
            traces[i].x_d.push(qd_positions[i]);
            traces[i].x_e.push(e[i]);
            traces[i].xe_tilde.push(etilde[i]);
            traces[i].u.push(torque[i]);
        }

        if n < n_steps {
            for (i, &q_i) in q.iter().enumerate() {
                let d = config.plant.disturbance_at(i, q_i, t);
                if d.abs() > config.plant.d_bar()[i] * BOUND_SLACK {
                    return Err(Error::AssumptionViolated {
                        assumption: "disturbance bound d_bar",
                        quantity: "d(q, t)",
                        t,
                        value: d.abs(),
                        bound: config.plant.d_bar()[i],
                    });
                }
            }
            let (q_next, qdot_next) =
                robot_step_rk4(&config.plant, &q, &qdot, &torque, t, h).map_err(|err| {
                    match err {
                        Error::PlantBlowUp { .. } => Error::BlowUp {
                            step: n + 1,
                            t: t + h,
                        },
                        other => other,
                    }
                })?;
            if q_next.iter().any(|v| v.abs() > STATE_GUARD) {
                return Err(Error::BlowUp {
                    step: n + 1,
                    t: t + h,
                });
            }
            q = q_next;
            qdot = qdot_next;
        }
        previous_etilde = Some(etilde);
    }

    let mut reports = Vec::with_capacity(joints);
    for (i, trace) in traces.iter_mut().enumerate() {
        let m = &config.measurements[i];
        let radius = config.gains.ball_radius(i, m.c1, m.c2);
        trace.bound_radius = Some(radius);
        let entry = entry_time(trace, radius);
        trace.entry_time = entry;

        let edot_bound = 2.0
            * config.gains.rho[i]
            * (m.c2 + m.c1 / config.gains.rho[i] + config.gains.epsilon);
        let (mut max_edot_inside, mut max_error_after_entry) = (0.0_f64, 0.0_f64);
        if let Some(t_in) = entry {
            let start = (t_in / h).round() as usize;
            for k in start..trace.x_e.len() {
                max_error_after_entry = max_error_after_entry.max(trace.x_e[k].abs());
                if k > start {
                    let edot = (trace.x_e[k] - trace.x_e[k - 1]) / h;
                    max_edot_inside = max_edot_inside.max(edot.abs());
                }
            }
        }
        reports.push(PssJointReport {
            radius,
            entry_time: entry,
            max_error_after_entry,
            edot_bound,
            max_edot_inside,
            edot_ok: entry.is_some() && max_edot_inside <= EDOT_SLACK * edot_bound,
        });
    }

    Ok((traces, PssReport { joints: reports }))
}
