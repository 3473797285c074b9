//! Two-joint decoupled-robot tracking under the integer-order law
//! `u_i = -b_i (d(e~_i)/dt + rho_i e~_i)` with gains from the selection rule
//! `b_i > u_i_max / (rho_i epsilon)`. Reports per-joint ball entry and the
//! inside-ball derivative bound.
//!
//! ```bash
//! cargo run --release --example pss_robot
//! ```

use fogpss::presets;
use fogpss::simkit::pss_robot_experiment;

fn main() -> fogpss::Result<()> {
    let config = presets::pss_experiment();
    println!(
        "joints: {}  gains: b = {:?}, rho = {:?}, epsilon = {}",
        config.plant.joints(),
        config.gains.b,
        config.gains.rho,
        config.gains.epsilon
    );
    for (i, u_max) in config.gains.u_max.iter().enumerate() {
        println!(
            "joint {i}: self-support input bound {u_max:.4} -> minimum gain {:.4}",
            u_max / (config.gains.rho[i] * config.gains.epsilon)
        );
    }

    let (traces, report) = pss_robot_experiment(&config)?;
    for (i, joint) in report.joints.iter().enumerate() {
        println!("joint {i}:");
        println!("  initial error {:+.3}", traces[i].x_e[0]);
        println!("  terminal ball radius {:.3}", joint.radius);
        println!("  entry time {:?} s", joint.entry_time);
        println!(
            "  max |e| after entry {:.4}, max |de/dt| inside {:.3} (bound {:.3})",
            joint.max_error_after_entry, joint.max_edot_inside, joint.edot_bound
        );
    }
    Ok(())
}
