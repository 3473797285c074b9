//! Plant and environment models: the uncertain first-order plant, a
//! decoupled multi-joint robot, reference trajectories with position and
//! velocity bounds, and the bounded measurement-error channel. Disturbance
//! and measurement functions come from a small named catalog so every run is
//! reproducible from its configuration alone.

use crate::error::{Error, Result};

/// Named function catalog for disturbances and measurement errors.
///
/// Product forms take the current state (or error) as first argument;
/// time forms depend on `t` alone and have a bounded running integral,
/// which product forms generally do not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogFn {
    Zero,
    Constant(f64),
    /// `amp * sin(state * t)`
    SinProduct(f64),
    /// `amp * cos(state * t)`
    CosProduct(f64),
    /// `amp * sin(freq * t)`
    SinTime { amp: f64, freq: f64 },
    /// `amp * cos(freq * t)`
    CosTime { amp: f64, freq: f64 },
}

impl CatalogFn {
    pub fn eval(&self, state: f64, t: f64) -> f64 {
        match *self {
            CatalogFn::Zero => 0.0,
            CatalogFn::Constant(c) => c,
            CatalogFn::SinProduct(a) => a * (state * t).sin(),
            CatalogFn::CosProduct(a) => a * (state * t).cos(),
            CatalogFn::SinTime { amp, freq } => amp * (freq * t).sin(),
            CatalogFn::CosTime { amp, freq } => amp * (freq * t).cos(),
        }
    }

    /// A bound on |f| valid for every state and time.
    pub fn amplitude_bound(&self) -> f64 {
        match *self {
            CatalogFn::Zero => 0.0,
            CatalogFn::Constant(c) => c.abs(),
            CatalogFn::SinProduct(a) | CatalogFn::CosProduct(a) => a.abs(),
            CatalogFn::SinTime { amp, .. } | CatalogFn::CosTime { amp, .. } => amp.abs(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CatalogFn::Zero => "zero",
            CatalogFn::Constant(_) => "constant",
            CatalogFn::SinProduct(_) => "sin-product",
            CatalogFn::CosProduct(_) => "cos-product",
            CatalogFn::SinTime { .. } => "sin-time",
            CatalogFn::CosTime { .. } => "cos-time",
        }
    }
}

/// Uncertainty intervals for the first-order plant and its disturbance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantBounds {
    pub a_lo: f64,
    pub a_hi: f64,
    pub b_lo: f64,
    pub b_hi: f64,
    pub d_bar: f64,
}

impl PlantBounds {
    pub fn new(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64, d_bar: f64) -> Result<Self> {
        let positive = [a_lo, a_hi, b_lo, b_hi];
        if positive.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidConfig(
                "plant parameter bounds must be positive".into(),
            ));
        }
        if !d_bar.is_finite() || d_bar < 0.0 {
            return Err(Error::InvalidConfig(
                "disturbance bound must be non-negative".into(),
            ));
        }
        if a_lo > a_hi || b_lo > b_hi {
            return Err(Error::InvalidConfig(
                "lower parameter bounds must not exceed upper bounds".into(),
            ));
        }
        Ok(Self {
            a_lo,
            a_hi,
            b_lo,
            b_hi,
            d_bar,
        })
    }
}

/// First-order uncertain plant `dx/dt = -a_p x + b_p u + d(x, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderPlant {
    a_p: f64,
    b_p: f64,
    disturbance: CatalogFn,
    bounds: PlantBounds,
}

impl FirstOrderPlant {
    pub fn new(a_p: f64, b_p: f64, disturbance: CatalogFn, bounds: PlantBounds) -> Result<Self> {
        if !a_p.is_finite() || !b_p.is_finite() {
            return Err(Error::InvalidConfig("plant parameters must be finite".into()));
        }
        if a_p.abs() < bounds.a_lo || a_p.abs() > bounds.a_hi {
            return Err(Error::InvalidConfig(format!(
                "|a_p| = {} outside the admissible interval [{}, {}]",
                a_p.abs(),
                bounds.a_lo,
                bounds.a_hi
            )));
        }
        if b_p.abs() < bounds.b_lo || b_p.abs() > bounds.b_hi {
            return Err(Error::InvalidConfig(format!(
                "|b_p| = {} outside the admissible interval [{}, {}]",
                b_p.abs(),
                bounds.b_lo,
                bounds.b_hi
            )));
        }
        Ok(Self {
            a_p,
            b_p,
            disturbance,
            bounds,
        })
    }

    pub fn a_p(&self) -> f64 {
        self.a_p
    }

    pub fn b_p(&self) -> f64 {
        self.b_p
    }

    pub fn bounds(&self) -> &PlantBounds {
        &self.bounds
    }

    pub fn disturbance(&self) -> &CatalogFn {
        &self.disturbance
    }

    pub fn disturbance_at(&self, x: f64, t: f64) -> f64 {
        self.disturbance.eval(x, t)
    }

    /// `dx/dt` at (x, t) with the input held at `u`.
    pub fn derivative(&self, x: f64, u: f64, t: f64) -> f64 {
        -self.a_p * x + self.b_p * u + self.disturbance.eval(x, t)
    }
}

/// One classical fourth-order step of the plant with the input held
/// constant over the step.
pub fn plant_step_rk4(plant: &FirstOrderPlant, x: f64, u: f64, t: f64, h: f64) -> Result<f64> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidConfig("step must be positive".into()));
    }
    if !u.is_finite() {
        return Err(Error::NonFinite {
            what: "control input",
        });
    }
    let k1 = plant.derivative(x, u, t);
    let k2 = plant.derivative(x + 0.5 * h * k1, u, t + 0.5 * h);
    let k3 = plant.derivative(x + 0.5 * h * k2, u, t + 0.5 * h);
    let k4 = plant.derivative(x + h * k3, u, t + h);
    let next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if !next.is_finite() {
        return Err(Error::PlantBlowUp { t });
    }
    Ok(next)
}

/// Reference trajectory shapes with analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceShape {
    Constant(f64),
    /// `amp * cos(freq * t)`
    Cosine { amp: f64, freq: f64 },
    /// `amp * sin(freq * t)`
    Sine { amp: f64, freq: f64 },
}

impl ReferenceShape {
    fn position(&self, t: f64) -> f64 {
        match *self {
            ReferenceShape::Constant(c) => c,
            ReferenceShape::Cosine { amp, freq } => amp * (freq * t).cos(),
            ReferenceShape::Sine { amp, freq } => amp * (freq * t).sin(),
        }
    }

    fn velocity(&self, t: f64) -> f64 {
        match *self {
            ReferenceShape::Constant(_) => 0.0,
            ReferenceShape::Cosine { amp, freq } => -amp * freq * (freq * t).sin(),
            ReferenceShape::Sine { amp, freq } => amp * freq * (freq * t).cos(),
        }
    }
}

/// A reference with its declared position bound `b1` and velocity bound `b2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSpec {
    pub shape: ReferenceShape,
    pub b1: f64,
    pub b2: f64,
}

impl ReferenceSpec {
    pub fn new(shape: ReferenceShape, b1: f64, b2: f64) -> Result<Self> {
        if !b1.is_finite() || b1 <= 0.0 {
            return Err(Error::InvalidConfig("position bound b1 must be positive".into()));
        }
        if !b2.is_finite() || b2 < 0.0 {
            return Err(Error::InvalidConfig(
                "velocity bound b2 must be non-negative".into(),
            ));
        }
        Ok(Self { shape, b1, b2 })
    }
}

/// Reference position and velocity at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefSample {
    pub position: f64,
    pub velocity: f64,
}

// slack for velocity-bound checks on boundary-tight references
const VELOCITY_BOUND_SLACK: f64 = 1.0 + 1e-6;

/// Evaluates the reference and asserts its declared bounds.
pub fn reference_eval(spec: &ReferenceSpec, t: f64) -> Result<RefSample> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "reference evaluated at invalid time t = {t}"
        )));
    }
    let position = spec.shape.position(t);
    let velocity = spec.shape.velocity(t);
    if position.abs() > spec.b1 {
        return Err(Error::AssumptionViolated {
            assumption: "reference position bound b1",
            quantity: "x_d",
            t,
            value: position.abs(),
            bound: spec.b1,
        });
    }
    if velocity.abs() > spec.b2 * VELOCITY_BOUND_SLACK {
        return Err(Error::AssumptionViolated {
            assumption: "reference velocity bound b2",
            quantity: "dx_d/dt",
            t,
            value: velocity.abs(),
            bound: spec.b2,
        });
    }
    Ok(RefSample { position, velocity })
}

/// Self-support input bound `(b2 + a_hi |x| + d_bar) / b_lo`: the control
/// magnitude a bounded plant motion can require, with `|dx/dt|` bounded by
/// the reference velocity bound and `|x|` by `x_abs_bound`.
pub fn estimate_u_max(
    bounds: &PlantBounds,
    reference: &ReferenceSpec,
    x_abs_bound: f64,
) -> Result<f64> {
    if bounds.b_lo <= 0.0 {
        return Err(Error::InvalidConfig(
            "input-gain lower bound must be positive".into(),
        ));
    }
    if !x_abs_bound.is_finite() || x_abs_bound < 0.0 {
        return Err(Error::InvalidConfig(
            "state magnitude bound must be non-negative".into(),
        ));
    }
    Ok((reference.b2 + bounds.a_hi * x_abs_bound + bounds.d_bar) / bounds.b_lo)
}

/// Bounded measurement-error channel: the measured error estimate is
/// `xe_tilde = x_e - I^alpha omega` with `|omega| <= c1` and
/// `|I^alpha omega| <= c2` asserted along every simulated trajectory.
/// `alpha = 1` gives the plain running integral used by the integer-order
/// experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementModel {
    pub omega: CatalogFn,
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
}

impl MeasurementModel {
    pub fn new(omega: CatalogFn, c1: f64, c2: f64, alpha: f64) -> Result<Self> {
        if !c1.is_finite() || c1 < 0.0 || !c2.is_finite() || c2 < 0.0 {
            return Err(Error::InvalidConfig(
                "measurement bounds c1, c2 must be non-negative".into(),
            ));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
            return Err(Error::InvalidOrder {
                alpha,
                reason: "measurement channel order must lie in (0, 1]",
            });
        }
        Ok(Self {
            omega,
            c1,
            c2,
            alpha,
        })
    }
}

/// Decoupled n-joint robot `m_i qddot_i + d_i(q_i, t) = u_i` with constant
/// diagonal inertia.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotPlant {
    inertia: Vec<f64>,
    disturbance: Vec<CatalogFn>,
    d_bar: Vec<f64>,
}

impl RobotPlant {
    pub fn new(inertia: Vec<f64>, disturbance: Vec<CatalogFn>, d_bar: Vec<f64>) -> Result<Self> {
        if inertia.is_empty() {
            return Err(Error::InvalidConfig("robot needs at least one joint".into()));
        }
        if inertia.iter().any(|&m| !m.is_finite() || m <= 0.0) {
            return Err(Error::InvalidConfig(
                "inertia entries must be positive (positive definite diagonal)".into(),
            ));
        }
        if disturbance.len() != inertia.len() || d_bar.len() != inertia.len() {
            return Err(Error::InvalidConfig(
                "per-joint disturbance and bound lists must match the joint count".into(),
            ));
        }
        if d_bar.iter().any(|&d| !d.is_finite() || d < 0.0) {
            return Err(Error::InvalidConfig(
                "per-joint disturbance bounds must be non-negative".into(),
            ));
        }
        Ok(Self {
            inertia,
            disturbance,
            d_bar,
        })
    }

    pub fn joints(&self) -> usize {
        self.inertia.len()
    }

    pub fn inertia(&self) -> &[f64] {
        &self.inertia
    }

    pub fn d_bar(&self) -> &[f64] {
        &self.d_bar
    }

    pub fn disturbance_at(&self, joint: usize, q: f64, t: f64) -> f64 {
        self.disturbance[joint].eval(q, t)
    }
}

/// One RK4 step of the decoupled robot with the torque held constant.
/// Returns the next `(q, qdot)`.
pub fn robot_step_rk4(
    plant: &RobotPlant,
    q: &[f64],
    qdot: &[f64],
    torque: &[f64],
    t: f64,
    h: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = plant.joints();
    if q.len() != n || qdot.len() != n || torque.len() != n {
        return Err(Error::InvalidConfig(
            "state and torque dimensions must match the joint count".into(),
        ));
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidConfig("step must be positive".into()));
    }
    if torque.iter().any(|u| !u.is_finite()) {
        return Err(Error::NonFinite {
            what: "joint torque",
        });
    }

    let accel = |qs: &[f64], tt: f64, out: &mut Vec<f64>| {
        out.clear();
        for i in 0..n {
            out.push((torque[i] - plant.disturbance[i].eval(qs[i], tt)) / plant.inertia[i]);
        }
    };

    let mut k1v = Vec::with_capacity(n);
    let mut k2v = Vec::with_capacity(n);
    let mut k3v = Vec::with_capacity(n);
    let mut k4v = Vec::with_capacity(n);
    let mut stage = vec![0.0; n];

    accel(q, t, &mut k1v);
    let k1x = qdot;

    for i in 0..n {
        stage[i] = q[i] + 0.5 * h * k1x[i];
    }
    accel(&stage, t + 0.5 * h, &mut k2v);
    let k2x: Vec<f64> = (0..n).map(|i| qdot[i] + 0.5 * h * k1v[i]).collect();

    for i in 0..n {
        stage[i] = q[i] + 0.5 * h * k2x[i];
    }
    accel(&stage, t + 0.5 * h, &mut k3v);
    let k3x: Vec<f64> = (0..n).map(|i| qdot[i] + 0.5 * h * k2v[i]).collect();

    for i in 0..n {
        stage[i] = q[i] + h * k3x[i];
    }
    accel(&stage, t + h, &mut k4v);
    let k4x: Vec<f64> = (0..n).map(|i| qdot[i] + h * k3v[i]).collect();

    let mut q_next = Vec::with_capacity(n);
    let mut qdot_next = Vec::with_capacity(n);
    for i in 0..n {
        let qn = q[i] + h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
        let vn = qdot[i] + h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        if !qn.is_finite() || !vn.is_finite() {
            return Err(Error::PlantBlowUp { t });
        }
        q_next.push(qn);
        qdot_next.push(vn);
    }
    Ok((q_next, qdot_next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn default_bounds() -> PlantBounds {
        PlantBounds::new(0.5, 1.5, 1.0, 2.0, 0.5).unwrap()
    }

    fn default_plant() -> FirstOrderPlant {
        FirstOrderPlant::new(
            1.0,
            1.5,
            CatalogFn::SinProduct(0.5),
            default_bounds(),
        )
        .unwrap()
    }

    #[test]
    fn bounds_validation() {
        assert!(PlantBounds::new(0.0, 1.0, 1.0, 2.0, 0.5).is_err());
        assert!(PlantBounds::new(1.5, 1.0, 1.0, 2.0, 0.5).is_err());
        assert!(PlantBounds::new(0.5, 1.5, 1.0, 2.0, -0.1).is_err());
        assert!(PlantBounds::new(0.5, 1.5, 1.0, 2.0, 0.0).is_ok());
    }

    #[test]
    fn plant_parameters_must_respect_bounds() {
        let bounds = default_bounds();
        assert!(FirstOrderPlant::new(2.0, 1.5, CatalogFn::Zero, bounds).is_err());
        assert!(FirstOrderPlant::new(1.0, 2.5, CatalogFn::Zero, bounds).is_err());
        assert!(FirstOrderPlant::new(1.0, 1.5, CatalogFn::Zero, bounds).is_ok());
    }

    #[test]
    fn rk4_step_matches_linear_decay() {
        let plant =
            FirstOrderPlant::new(1.0, 1.0, CatalogFn::Zero, default_bounds()).unwrap();
        let next = plant_step_rk4(&plant, 1.0, 0.0, 0.0, 0.01).unwrap();
        assert!((next - (-0.01_f64).exp()).abs() <= 1e-9);
    }

    #[test]
    fn rk4_step_holds_an_equilibrium() {
        // u chosen so dx/dt = 0 at the current state, with a constant
        // disturbance so the cancellation is exact along the whole step
        let plant = FirstOrderPlant::new(
            1.0,
            1.5,
            CatalogFn::Constant(0.4),
            default_bounds(),
        )
        .unwrap();
        let x = 0.8;
        let u = (plant.a_p() * x - 0.4) / plant.b_p();
        let next = plant_step_rk4(&plant, x, u, 0.0, 0.01).unwrap();
        assert_relative_eq!(next, x, max_relative = 1e-12);
    }

    #[test]
    fn rk4_step_against_fine_euler_reference() {
        let plant = default_plant();
        let (x0, u, t0, h) = (0.0, 1.0, 0.0, 0.01);
        let next = plant_step_rk4(&plant, x0, u, t0, h).unwrap();
        // brute-force oracle: 10^4 explicit-Euler substeps across the span
        let mut x = x0;
        let fine = 1e-6;
        let n = (h / fine).round() as usize;
        for k in 0..n {
            let t = t0 + k as f64 * fine;
            x += fine * plant.derivative(x, u, t);
        }
        assert!((next - 0.0150).abs() < 1e-4, "{next}");
        assert!((next - x).abs() < 1e-6, "rk4 {next} vs euler {x}");
    }

    #[test]
    fn rk4_is_fourth_order_on_the_disturbance_free_plant() {
        let plant =
            FirstOrderPlant::new(1.0, 1.0, CatalogFn::Zero, default_bounds()).unwrap();
        // global error over [0,1] at two resolutions
        let run = |h: f64| {
            let n = (1.0 / h).round() as usize;
            let mut x = 1.0;
            for k in 0..n {
                x = plant_step_rk4(&plant, x, 0.0, k as f64 * h, h).unwrap();
            }
            (x - (-1.0_f64).exp()).abs()
        };
        let (e1, e2) = (run(0.02), run(0.01));
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 40.0, "ratio {ratio}");
    }

    #[test]
    fn reference_eval_checks_bounds() {
        let spec = ReferenceSpec::new(
            ReferenceShape::Cosine { amp: 0.5, freq: 0.4 },
            3.0,
            0.5,
        )
        .unwrap();
        let s = reference_eval(&spec, 0.0).unwrap();
        assert_eq!(s.position, 0.5);
        assert_eq!(s.velocity, 0.0);
        assert!(reference_eval(&spec, -1.0).is_err());

        // a reference violating its own declared position bound
        let bad = ReferenceSpec::new(ReferenceShape::Constant(2.0), 1.0, 0.5).unwrap();
        assert!(matches!(
            reference_eval(&bad, 0.0),
            Err(Error::AssumptionViolated { .. })
        ));

        let constant = ReferenceSpec::new(ReferenceShape::Constant(1.0), 2.0, 0.0).unwrap();
        assert_eq!(reference_eval(&constant, 5.0).unwrap().velocity, 0.0);
    }

    #[test]
    fn u_max_examples() {
        // published-study numbers: (0.5 + 1.5*3 + 0.5) / 1 = 5.5
        let bounds = default_bounds();
        let reference = ReferenceSpec::new(
            ReferenceShape::Cosine { amp: 0.5, freq: 0.4 },
            3.0,
            0.5,
        )
        .unwrap();
        assert_relative_eq!(
            estimate_u_max(&bounds, &reference, 3.0).unwrap(),
            5.5,
            max_relative = 1e-14
        );

        // all-zero numerator
        let b0 = PlantBounds::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let r0 = ReferenceSpec::new(ReferenceShape::Constant(0.5), 1.0, 0.0).unwrap();
        assert_eq!(estimate_u_max(&b0, &r0, 0.0).unwrap(), 0.0);

        // direct arithmetic
        let b = PlantBounds::new(1.0, 1.0, 2.0, 2.0, 1.0).unwrap();
        let r = ReferenceSpec::new(ReferenceShape::Constant(0.5), 1.0, 1.0).unwrap();
        assert_relative_eq!(estimate_u_max(&b, &r, 1.0).unwrap(), 1.5);
    }

    #[test]
    fn robot_validation_and_free_motion() {
        assert!(RobotPlant::new(vec![], vec![], vec![]).is_err());
        assert!(RobotPlant::new(vec![1.0, -1.0], vec![CatalogFn::Zero; 2], vec![0.0; 2]).is_err());
        let robot =
            RobotPlant::new(vec![1.0, 2.0], vec![CatalogFn::Zero; 2], vec![0.0; 2]).unwrap();
        // no torque, no disturbance: uniform motion
        let (q, qd) = robot_step_rk4(
            &robot,
            &[0.0, 1.0],
            &[1.0, -0.5],
            &[0.0, 0.0],
            0.0,
            0.1,
        )
        .unwrap();
        assert_relative_eq!(q[0], 0.1, max_relative = 1e-12);
        assert_relative_eq!(q[1], 0.95, max_relative = 1e-12);
        assert_eq!(qd, vec![1.0, -0.5]);
    }

    #[test]
    fn catalog_amplitude_bounds() {
        assert_eq!(CatalogFn::Zero.amplitude_bound(), 0.0);
        assert_eq!(CatalogFn::Constant(-2.0).amplitude_bound(), 2.0);
        assert_eq!(CatalogFn::CosProduct(-0.045).amplitude_bound(), 0.045);
        let f = CatalogFn::CosTime { amp: 0.04, freq: 0.1 };
        for k in 0..100 {
            let t = k as f64 * 0.37;
            assert!(f.eval(0.0, t).abs() <= f.amplitude_bound() + 1e-15);
        }
    }
}
