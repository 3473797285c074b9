//! Eigenvalue-argument stability test for `D^alpha x = A x`: the system is
//! stable when every eigenvalue argument exceeds `alpha * pi / 2` strictly.
//! A system can be unstable classically yet stable at fractional order.
//!
//! ```bash
//! cargo run --release --example check_stability
//! ```

use fogpss::fostab::{check_linear_fo_stability, LinearFoSystem};
use nalgebra::DMatrix;

fn main() -> fogpss::Result<()> {
    let cases: Vec<(&str, DMatrix<f64>, f64)> = vec![
        ("scalar decay", DMatrix::from_row_slice(1, 1, &[-1.0]), 0.5),
        ("scalar growth", DMatrix::from_row_slice(1, 1, &[1.0]), 0.5),
        (
            "pure rotation, half order",
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            0.5,
        ),
        (
            "pure rotation, integer order (boundary)",
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            1.0,
        ),
        (
            "lightly damped spiral",
            DMatrix::from_row_slice(2, 2, &[-0.1, 2.0, -2.0, -0.1]),
            0.6,
        ),
    ];
    for (name, matrix, alpha) in cases {
        let system = LinearFoSystem::new(matrix, alpha)?;
        let verdict = check_linear_fo_stability(&system)?;
        println!(
            "{name:<40} alpha = {alpha}: {} (margin {:+.4} rad, args {:?})",
            if verdict.stable { "stable  " } else { "unstable" },
            verdict.margin,
            verdict
                .eigen_args
                .iter()
                .map(|a| (a * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>()
        );
    }
    Ok(())
}
