//! Bundled experiment configurations used by the `reproduce` command, the
//! examples, and the acceptance suite.

use crate::controllers::{AdaptationLaw, FogpssConfig, PssGains};
use crate::plants::{
    estimate_u_max, CatalogFn, FirstOrderPlant, MeasurementModel, PlantBounds, ReferenceSpec,
    ReferenceShape, RobotPlant,
};
use crate::simkit::{LambdaTrackerSpec, PssExperimentConfig, ScalarController, SimConfig};

/// Default step for the bundled closed-loop runs.
///
/// The sampled loop with the study gains is unstable for steps above
/// roughly 0.007 s (the fractional derivative feedback contributes
/// `h^(-alpha)` gain per sample), so the bundled runs use 2 ms, which has
/// about a 3x stability margin and keeps the full-memory run within its
/// time budget.
pub const TRACKING_STEP: f64 = 0.002;

/// Horizon of the bundled tracking run.
pub const TRACKING_HORIZON: f64 = 60.0;

/// The bundled first-order tracking study: uncertain plant
/// `dx/dt = -x + 1.5 u + 0.5 sin(x t)` with parameter intervals
/// `[0.5, 1.5] x [1.0, 2.0]`, reference `0.5 cos(0.4 t)` (bounds 3.0, 0.5),
/// measurement error `-0.045 cos(x_e t)` with `c1 = 0.1`, `c2 = 1.5` through
/// a 0.3-order channel, and the fractional tracking law with `delta = 10`,
/// `beta_bar = 12`, `alpha = 0.3`, `epsilon0 = 0.3`. The input bound
/// `u_max = 5.5` follows from the self-support estimate.
pub fn tracking_experiment() -> SimConfig {
    let bounds = PlantBounds::new(0.5, 1.5, 1.0, 2.0, 0.5).expect("valid bundled bounds");
    let plant = FirstOrderPlant::new(1.0, 1.5, CatalogFn::SinProduct(0.5), bounds)
        .expect("valid bundled plant");
    let reference = ReferenceSpec::new(ReferenceShape::Cosine { amp: 0.5, freq: 0.4 }, 3.0, 0.5)
        .expect("valid bundled reference");
    let u_max = estimate_u_max(&bounds, &reference, 3.0).expect("valid bundled u_max");
    let controller = FogpssConfig::new(10.0, 12.0, 0.3, 0.3, u_max).expect("valid bundled gains");
    let measurement = MeasurementModel::new(CatalogFn::CosProduct(-0.045), 0.1, 1.5, 0.3)
        .expect("valid bundled measurement");
    SimConfig {
        step: TRACKING_STEP,
        horizon: TRACKING_HORIZON,
        plant,
        reference,
        measurement,
        controller: ScalarController::Fogpss(controller),
        x0: -1.5,
        seed: 0,
        negate_u: false,
    }
}

/// The bundled two-joint decoupled-robot experiment: inertias (1.0, 1.2),
/// per-joint disturbances `0.1 sin(q t)`, references `0.5 cos(0.5 t)` and
/// `0.3 cos(0.8 t)`, time-cosine measurement errors with honestly bounded
/// running integrals (`c1 = 0.05`, `c2 = 0.5`), gains `rho = 5`,
/// `epsilon = 0.2`, `b = 7` (selection rule lower bound is about 0.33), and
/// initial joint errors outside the terminal ball.
pub fn pss_experiment() -> PssExperimentConfig {
    let plant = RobotPlant::new(
        vec![1.0, 1.2],
        vec![CatalogFn::SinProduct(0.1), CatalogFn::SinProduct(0.1)],
        vec![0.1, 0.1],
    )
    .expect("valid bundled robot");
    let references = vec![
        ReferenceSpec::new(ReferenceShape::Cosine { amp: 0.5, freq: 0.5 }, 1.0, 0.25)
            .expect("valid bundled reference"),
        ReferenceSpec::new(ReferenceShape::Cosine { amp: 0.3, freq: 0.8 }, 1.0, 0.24)
            .expect("valid bundled reference"),
    ];
    // running integrals: 0.4 sin(0.1 t) and 0.2 sin(0.25 t), both within c2
    let measurements = vec![
        MeasurementModel::new(CatalogFn::CosTime { amp: 0.04, freq: 0.1 }, 0.05, 0.5, 1.0)
            .expect("valid bundled measurement"),
        MeasurementModel::new(CatalogFn::CosTime { amp: 0.05, freq: 0.25 }, 0.05, 0.5, 1.0)
            .expect("valid bundled measurement"),
    ];
    // self-support estimate per joint: m max|qddot_d| + d_bar
    let u_max = vec![1.0 * 0.5 * 0.25 + 0.1, 1.2 * 0.3 * 0.64 + 0.1];
    let gains = PssGains::new(vec![7.0, 7.0], vec![5.0, 5.0], 0.2, u_max)
        .expect("valid bundled gains");
    PssExperimentConfig {
        step: 0.002,
        horizon: 40.0,
        plant,
        references,
        measurements,
        gains,
        q0: vec![-0.5, 1.1],
        qdot0: vec![0.0, 0.0],
        negate_u: false,
    }
}

/// The bundled adaptive-tracker run on the noise-free first-order plant:
/// ball radius 0.1, order 0.7, gain grown from zero.
pub fn lambda_experiment() -> SimConfig {
    let bounds = PlantBounds::new(0.5, 1.5, 1.0, 2.0, 0.0).expect("valid bundled bounds");
    let plant =
        FirstOrderPlant::new(1.0, 1.5, CatalogFn::Zero, bounds).expect("valid bundled plant");
    let reference = ReferenceSpec::new(ReferenceShape::Cosine { amp: 0.5, freq: 0.4 }, 3.0, 0.5)
        .expect("valid bundled reference");
    let measurement = MeasurementModel::new(CatalogFn::Zero, 0.0, 0.0, 1.0)
        .expect("valid bundled measurement");
    SimConfig {
        step: 0.002,
        horizon: 30.0,
        plant,
        reference,
        measurement,
        controller: ScalarController::Lambda(LambdaTrackerSpec {
            k0: 0.0,
            lambda: 0.1,
            alpha: 0.7,
            law: AdaptationLaw::ExcessTimesNorm,
        }),
        x0: 2.0,
        seed: 0,
        negate_u: false,
    }
}
