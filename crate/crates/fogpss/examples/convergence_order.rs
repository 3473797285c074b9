//! Measure the solver's convergence order on `D^alpha x = -x` against the
//! Mittag-Leffler reference and compare with `min(2, 1 + alpha)`.
//!
//! ```bash
//! cargo run --release --example convergence_order
//! ```

use fogpss::fde::{estimate_convergence_order, FdeProblem};
use fogpss::fraccalc::mittag_leffler;

fn main() -> fogpss::Result<()> {
    let ns = [250usize, 500, 1000, 2000];
    println!("{:>6} {:>10} {:>10}", "alpha", "measured", "expected");
    for alpha in [0.3, 0.5, 0.8, 1.0] {
        let problem = FdeProblem::new(alpha, vec![vec![1.0]], 1.0, 1000, |_t, x| vec![-x[0]])?;
        let reference = move |t: f64| -> Vec<f64> {
            vec![mittag_leffler(alpha, -t.powf(alpha)).expect("series region")]
        };
        let estimate = estimate_convergence_order(&problem, &reference, &ns)?;
        println!(
            "{alpha:>6} {:>10.3} {:>10.3}",
            estimate.order,
            (1.0 + alpha).min(2.0)
        );
        for (n, e) in &estimate.errors {
            println!("        N = {n:<5} max error = {e:.3e}");
        }
    }
    Ok(())
}
