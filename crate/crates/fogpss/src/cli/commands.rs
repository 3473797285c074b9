//! Implementations behind the command-line subcommands. The binary stays a
//! thin argument parser over these.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::cli::config::load_config;
use crate::cli::csv::trace_to_csv;
use crate::cli::svg::{line_plot, LinePlot};
use crate::controllers::fogpss_min_gain;
use crate::error::{Error, Result};
use crate::fde::{abm_solve, estimate_convergence_order, FdeProblem};
use crate::fostab::{check_linear_fo_stability, LinearFoSystem, StabilityVerdict};
use crate::fraccalc::{mittag_leffler, MITTAG_LEFFLER_REGIME};
use crate::presets;
use crate::simkit::{entry_time, pss_robot_experiment, simulate, ScalarController, SimConfig, SimTrace};

/// Environment variable overriding the configured seed.
pub const SEED_ENV_VAR: &str = "FOGPSS_SEED";

/// Optional command-line overrides for `simulate`.
#[derive(Debug, Clone, Default)]
pub struct SimulateOverrides {
    pub step: Option<f64>,
    pub horizon: Option<f64>,
    pub negate_u: bool,
}

fn apply_env_seed(config: &mut SimConfig) -> Result<()> {
    if let Ok(value) = std::env::var(SEED_ENV_VAR) {
        config.seed = value.parse().map_err(|_| {
            Error::InvalidConfig(format!("{SEED_ENV_VAR} must be a non-negative integer"))
        })?;
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn emit_trace_plots(trace: &SimTrace, dir: &Path, prefix: &str) -> Result<()> {
    let guides: Vec<f64> = trace
        .bound_radius
        .map(|r| vec![r, -r])
        .unwrap_or_default();
    write_file(
        dir,
        &format!("{prefix}x_e.svg"),
        &line_plot(&LinePlot {
            title: "tracking error",
            x_label: "t [s]",
            y_label: "x_e",
            xs: &trace.t,
            ys: &trace.x_e,
            guides: &guides,
        }),
    )?;
    write_file(
        dir,
        &format!("{prefix}xe_tilde.svg"),
        &line_plot(&LinePlot {
            title: "measured error estimate",
            x_label: "t [s]",
            y_label: "xe_tilde",
            xs: &trace.t,
            ys: &trace.xe_tilde,
            guides: &[],
        }),
    )?;
    write_file(
        dir,
        &format!("{prefix}u.svg"),
        &line_plot(&LinePlot {
            title: "control input",
            x_label: "t [s]",
            y_label: "u",
            xs: &trace.t,
            ys: &trace.u,
            guides: &[],
        }),
    )?;
    Ok(())
}

fn tracking_summary(config: &SimConfig, trace: &SimTrace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "samples: {}", trace.len());
    let _ = writeln!(out, "config hash: {}", trace.config_hash);
    if let ScalarController::Fogpss(cfg) = &config.controller {
        let min_gain = fogpss_min_gain(cfg.u_max, cfg.delta, cfg.epsilon0)
            .expect("validated at construction");
        let radius = trace.bound_radius.expect("set for this controller");
        let _ = writeln!(out, "terminal ball radius: {radius:.6}");
        let _ = writeln!(
            out,
            "gain condition: beta_bar = {} > u_max/(delta*epsilon0) = {min_gain:.6}",
            cfg.beta_bar
        );
        match trace.entry_time {
            Some(t) => {
                let _ = writeln!(out, "entry time into the ball: {t:.4} s");
            }
            None => {
                let _ = writeln!(out, "entry time into the ball: never");
            }
        }
        match entry_time(trace, cfg.epsilon0) {
            Some(t) => {
                let _ = writeln!(out, "entry time into |x_e| <= epsilon0 = {}: {t:.4} s", cfg.epsilon0);
            }
            None => {
                let _ = writeln!(out, "entry time into |x_e| <= epsilon0 = {}: never", cfg.epsilon0);
            }
        }
        // descent margin from the gain condition; the published study quotes
        // 0.04 for this quantity, which does not follow from its definition
        let beta_hat = (cfg.beta_bar * cfg.delta * cfg.epsilon0 - cfg.u_max) / cfg.beta_bar;
        let _ = writeln!(
            out,
            "descent margin beta_hat = (beta_bar*delta*epsilon0 - u_max)/beta_bar = {beta_hat:.4} \
             (reference value quoted as 0.04; not derivable from the definition)"
        );
    }
    let max_xe = trace.x_e.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let max_u = trace.u.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let _ = writeln!(out, "max |x_e|: {max_xe:.6}");
    let _ = writeln!(out, "max |u|: {max_u:.6}");
    let _ = writeln!(out, "bound assertions: all held (violations abort the run)");
    out
}

/// Runs a configured experiment and writes the trace CSV, the three line
/// plots, and a text summary into `out_dir`. Prints the summary.
pub fn cmd_simulate(
    config_path: &Path,
    out_dir: &Path,
    overrides: &SimulateOverrides,
) -> Result<()> {
    let mut config = load_config(config_path)?;
    if let Some(step) = overrides.step {
        config.step = step;
    }
    if let Some(horizon) = overrides.horizon {
        config.horizon = horizon;
    }
    if overrides.negate_u {
        config.negate_u = true;
    }
    apply_env_seed(&mut config)?;
    config.steps()?;

    let trace = simulate(&config)?;
    write_file(out_dir, "trace.csv", &trace_to_csv(&trace))?;
    emit_trace_plots(&trace, out_dir, "")?;
    let summary = tracking_summary(&config, &trace);
    write_file(out_dir, "summary.txt", &summary)?;
    print!("{summary}");
    println!("artifacts written to {}", out_dir.display());
    Ok(())
}

/// Solves `D^alpha x = lambda x` and writes `t,x[,reference]` CSV; prints the
/// max error against the series reference when the argument stays inside the
/// series region.
pub fn cmd_solve_fde(
    alpha: f64,
    lambda: f64,
    x0: f64,
    horizon: f64,
    steps: usize,
    out_dir: Option<&Path>,
) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidOrder {
            alpha,
            reason: "this command accepts orders in (0, 1]",
        });
    }
    if steps > 1_000_000 {
        return Err(Error::InvalidProblem("step count above 10^6".into()));
    }
    let problem = FdeProblem::new(alpha, vec![vec![x0]], horizon, steps, move |_t, x| {
        vec![lambda * x[0]]
    })?;
    let solution = abm_solve(&problem)?;

    let reference_available = (lambda * horizon.powf(alpha)).abs() <= MITTAG_LEFFLER_REGIME;
    let mut csv = String::new();
    csv.push_str(if reference_available {
        "t,x,reference\n"
    } else {
        "t,x\n"
    });
    let mut max_err = 0.0_f64;
    for (n, state) in solution.states().iter().enumerate() {
        let t = solution.time(n);
        if reference_available {
            let reference = x0 * mittag_leffler(alpha, lambda * t.powf(alpha))?;
            max_err = max_err.max((state[0] - reference).abs());
            let _ = writeln!(csv, "{t:.11e},{:.11e},{reference:.11e}", state[0]);
        } else {
            let _ = writeln!(csv, "{t:.11e},{:.11e}", state[0]);
        }
    }
    if let Some(dir) = out_dir {
        write_file(dir, "fde.csv", &csv)?;
        println!("trajectory written to {}", dir.join("fde.csv").display());
    } else {
        print!("{csv}");
    }
    println!(
        "final state x({horizon}) = {:.9}",
        solution.final_state()[0]
    );
    if reference_available {
        println!("max error against the series reference: {max_err:.3e}");
    } else {
        println!("series reference unavailable: |lambda| T^alpha outside the series region");
    }
    Ok(())
}

/// Parses a matrix literal like `[[0,1],[-1,0]]`.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix("[[")
        .and_then(|s| s.strip_suffix("]]"))
        .ok_or_else(|| {
            Error::InvalidConfig(format!("matrix literal must look like [[a,b],[c,d]], got `{text}`"))
        })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for row_text in inner.split("],[") {
        let mut row = Vec::new();
        for field in row_text.split(',') {
            row.push(field.parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("bad matrix entry `{field}`"))
            })?);
        }
        rows.push(row);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidConfig(format!(
            "matrix must be square, got rows of lengths {:?}",
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Checks the eigenvalue-argument stability condition and prints the
/// verdict. Returns the verdict for exit-code mapping.
pub fn cmd_check_stability(matrix_text: &str, alpha: f64) -> Result<StabilityVerdict> {
    let matrix = parse_matrix(matrix_text)?;
    let system = LinearFoSystem::new(matrix, alpha)?;
    let verdict = check_linear_fo_stability(&system)?;
    println!(
        "verdict: {}",
        if verdict.stable { "stable" } else { "unstable" }
    );
    println!("margin: {:.6} rad (min |arg(eig)| - alpha*pi/2)", verdict.margin);
    for (i, arg) in verdict.eigen_args.iter().enumerate() {
        println!("|arg(lambda_{i})| = {arg:.6} rad");
    }
    Ok(verdict)
}

/// Named reproduction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReproduceTarget {
    /// Tracking-error trajectory: terminal ball bound and entry times.
    Fig5,
    /// Measured-error trajectory: epsilon0 bound after the transient.
    Fig6,
    /// Control-input trajectory.
    Fig7,
    /// Two-joint integer-order experiment.
    Pss,
    /// Solver convergence-order study.
    Order,
}

impl ReproduceTarget {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "fig5" => Ok(Self::Fig5),
            "fig6" => Ok(Self::Fig6),
            "fig7" => Ok(Self::Fig7),
            "pss" => Ok(Self::Pss),
            "order" => Ok(Self::Order),
            other => Err(Error::InvalidConfig(format!(
                "unknown reproduction target `{other}`; known: fig5, fig6, fig7, pss, order"
            ))),
        }
    }
}

fn verdict_line(name: &str, pass: bool, detail: &str) -> bool {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn reproduce_tracking(target: ReproduceTarget, out_dir: Option<&Path>) -> Result<bool> {
    let mut config = presets::tracking_experiment();
    apply_env_seed(&mut config)?;
    let cfg = match &config.controller {
        ScalarController::Fogpss(c) => *c,
        _ => unreachable!("bundled tracking config uses the fractional law"),
    };
    let started = std::time::Instant::now();
    let trace = simulate(&config)?;
    let elapsed = started.elapsed().as_secs_f64();
    if let Some(dir) = out_dir {
        write_file(dir, "trace.csv", &trace_to_csv(&trace))?;
        emit_trace_plots(&trace, dir, "")?;
        write_file(dir, "summary.txt", &tracking_summary(&config, &trace))?;
    }

    let radius = trace.bound_radius.expect("tracking trace carries a radius");
    let mut all = true;
    match target {
        ReproduceTarget::Fig5 => {
            let from = (5.0 / config.step).round() as usize;
            let max_tail = trace.x_e[from..]
                .iter()
                .fold(0.0_f64, |a, &v| a.max(v.abs()));
            all &= verdict_line(
                "terminal bound |x_e| <= 1.81 on [5, 60] s",
                max_tail <= radius,
                &format!("max |x_e| = {max_tail:.4}, radius = {radius:.4}"),
            );
            all &= verdict_line(
                "runtime <= 10 s",
                elapsed <= 10.0,
                &format!("{elapsed:.2} s"),
            );
            let entry = entry_time(&trace, cfg.epsilon0);
            all &= verdict_line(
                "entry time into |x_e| <= 0.3 exists",
                entry.is_some(),
                &format!("{entry:?}"),
            );
            if let Some(t) = entry {
                all &= verdict_line(
                    "entry time inside the reference window [5, 50] s",
                    (5.0..=50.0).contains(&t),
                    &format!(
                        "measured {t:.3} s; the published run reports about 30 s — exact \
                         agreement is not expected (plant and reference are unspecified \
                         there), and the bundled loop's bandwidth beta_bar*delta*b_p = 180 \
                         rad/s makes sub-second entry unavoidable"
                    ),
                );
            }
        }
        ReproduceTarget::Fig6 => {
            let from = (25.0 / config.step).round() as usize;
            let max_tail = trace.xe_tilde[from..]
                .iter()
                .fold(0.0_f64, |a, &v| a.max(v.abs()));
            all &= verdict_line(
                "measured error |xe_tilde| <= epsilon0 = 0.3 for t >= 25 s",
                max_tail <= cfg.epsilon0,
                &format!("max tail |xe_tilde| = {max_tail:.4}"),
            );
        }
        ReproduceTarget::Fig7 => {
            let finite = trace.u.iter().all(|u| u.is_finite());
            all &= verdict_line(
                "control input trace produced with all bound assertions held",
                finite,
                &format!(
                    "max |u| = {:.2}",
                    trace.u.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
                ),
            );
        }
        _ => unreachable!(),
    }
    Ok(all)
}

fn reproduce_pss(out_dir: Option<&Path>) -> Result<bool> {
    let config = presets::pss_experiment();
    let (traces, report) = pss_robot_experiment(&config)?;
    if let Some(dir) = out_dir {
        for (i, trace) in traces.iter().enumerate() {
            write_file(dir, &format!("joint{i}_trace.csv"), &trace_to_csv(trace))?;
            emit_trace_plots(trace, dir, &format!("joint{i}_"))?;
        }
    }
    let mut all = true;
    for (i, joint) in report.joints.iter().enumerate() {
        all &= verdict_line(
            &format!("joint {i}: error enters its terminal ball and stays"),
            joint.entry_time.is_some(),
            &format!(
                "radius {:.3}, entry {:?}, max |e| after entry {:.4}",
                joint.radius, joint.entry_time, joint.max_error_after_entry
            ),
        );
        all &= verdict_line(
            &format!("joint {i}: inside-ball derivative bound with 10% slack"),
            joint.edot_ok,
            &format!(
                "max |de/dt| inside = {:.3}, bound = {:.3}",
                joint.max_edot_inside, joint.edot_bound
            ),
        );
    }

    // noise-free collapse: with c1 = c2 = 0 the ball radius is exactly epsilon
    let mut noise_free = config.clone();
    for m in &mut noise_free.measurements {
        m.omega = crate::plants::CatalogFn::Zero;
        m.c1 = 0.0;
        m.c2 = 0.0;
    }
    noise_free.q0 = vec![0.45, 0.25];
    let (_t, nf_report) = pss_robot_experiment(&noise_free)?;
    for (i, joint) in nf_report.joints.iter().enumerate() {
        all &= verdict_line(
            &format!("joint {i}: noise-free ball radius collapses to epsilon"),
            joint.radius == config.gains.epsilon && joint.entry_time.is_some(),
            &format!("radius {:.3}", joint.radius),
        );
    }
    Ok(all)
}

fn reproduce_order(out_dir: Option<&Path>) -> Result<bool> {
    let ns = [250usize, 500, 1000, 2000];
    let mut all = true;
    let mut csv = String::from("alpha,expected,measured\n");
    for &alpha in &[0.3, 0.5, 0.8] {
        let problem = FdeProblem::new(alpha, vec![vec![1.0]], 1.0, 1000, |_t, x| vec![-x[0]])?;
        let reference = move |t: f64| -> Vec<f64> {
            vec![mittag_leffler(alpha, -(t.powf(alpha))).expect("inside the series region")]
        };
        let estimate = estimate_convergence_order(&problem, &reference, &ns)?;
        let expected = (1.0 + alpha).min(2.0);
        let _ = writeln!(csv, "{alpha},{expected},{:.4}", estimate.order);
        all &= verdict_line(
            &format!("order at alpha = {alpha} within 0.3 of min(2, 1+alpha)"),
            (estimate.order - expected).abs() <= 0.3,
            &format!("measured {:.3}, expected {expected}", estimate.order),
        );
    }

    // accuracy pins
    let p = FdeProblem::new(0.5, vec![vec![1.0]], 1.0, 2000, |_t, x| vec![-x[0]])?;
    let solution = abm_solve(&p)?;
    let mut worst = 0.0_f64;
    for (n, state) in solution.states().iter().enumerate() {
        let reference = mittag_leffler(0.5, -solution.time(n).sqrt())?;
        worst = worst.max((state[0] - reference).abs());
    }
    all &= verdict_line(
        "half-order accuracy <= 1e-3 at N = 2000",
        worst <= 1e-3,
        &format!("max error {worst:.2e}"),
    );

    let p1 = FdeProblem::new(1.0, vec![vec![1.0]], 1.0, 1000, |_t, x| vec![-x[0]])?;
    let s1 = abm_solve(&p1)?;
    let mut worst1 = 0.0_f64;
    for (n, state) in s1.states().iter().enumerate() {
        worst1 = worst1.max((state[0] - (-s1.time(n)).exp()).abs());
    }
    all &= verdict_line(
        "integer-order accuracy <= 2e-4 at N = 1000",
        worst1 <= 2e-4,
        &format!("max error {worst1:.2e}"),
    );

    if let Some(dir) = out_dir {
        write_file(dir, "orders.csv", &csv)?;
    }
    Ok(all)
}

/// Runs one named reproduction and prints a criterion-by-criterion verdict.
/// Returns whether every criterion passed.
pub fn cmd_reproduce(target: ReproduceTarget, out_dir: Option<&Path>) -> Result<bool> {
    match target {
        ReproduceTarget::Fig5 | ReproduceTarget::Fig6 | ReproduceTarget::Fig7 => {
            reproduce_tracking(target, out_dir)
        }
        ReproduceTarget::Pss => reproduce_pss(out_dir),
        ReproduceTarget::Order => reproduce_order(out_dir),
    }
}
