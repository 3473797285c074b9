//! Solve the linear test problem `D^alpha x = -x`, `x(0) = 1` with the
//! fractional Adams predictor-corrector and compare against the
//! Mittag-Leffler solution `E_alpha(-t^alpha)`.
//!
//! ```bash
//! cargo run --release --example solve_fde
//! ```

use fogpss::fde::{abm_solve, FdeProblem};
use fogpss::fraccalc::mittag_leffler;

fn main() -> fogpss::Result<()> {
    for alpha in [0.3, 0.5, 0.8, 1.0] {
        let problem = FdeProblem::new(alpha, vec![vec![1.0]], 1.0, 2000, |_t, x| vec![-x[0]])?;
        let solution = abm_solve(&problem)?;
        let mut worst = 0.0_f64;
        for (n, state) in solution.states().iter().enumerate() {
            let reference = mittag_leffler(alpha, -solution.time(n).powf(alpha))?;
            worst = worst.max((state[0] - reference).abs());
        }
        println!(
            "alpha = {alpha}: x(1) = {:.8}, reference = {:.8}, max grid error = {:.2e}",
            solution.final_state()[0],
            mittag_leffler(alpha, -1.0)?,
            worst
        );
    }
    Ok(())
}
