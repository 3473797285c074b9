//! Tour of the operator kernel: gamma function, fractional integral, Caputo
//! derivative, and the Mittag-Leffler series — each checked against a closed
//! form.
//!
//! ```bash
//! cargo run --release --example fractional_operators
//! ```

use fogpss::fraccalc::{caputo_derivative, gamma, mittag_leffler, rl_integral};
use fogpss::{FracOrder, SampledSignal};

fn main() -> fogpss::Result<()> {
    println!("== gamma function ==");
    for s in [0.5, 1.0, 5.0, 10.5] {
        println!("gamma({s}) = {:.12}", gamma(s)?);
    }
    println!("recurrence at s = 3.7: gamma(4.7) = {:.12}, 3.7*gamma(3.7) = {:.12}",
        gamma(4.7)?, 3.7 * gamma(3.7)?);

    let alpha = 0.5;
    let h = 1e-3;
    let ramp = SampledSignal::from_fn(0.0, h, 1001, |t| t)?;

    println!("\n== fractional integral of f(t) = t at order {alpha} ==");
    let integral = rl_integral(&ramp, FracOrder::new(alpha)?)?;
    let at_one = integral.values()[1000];
    let exact = 1.0 / gamma(2.0 + alpha)?;
    println!("I^{alpha} t |_(t=1) = {at_one:.7} (closed form {exact:.7}, first-order quadrature)");

    println!("\n== Caputo derivative of f(t) = t at order {alpha} ==");
    let derivative = caputo_derivative(&ramp, FracOrder::unit(alpha)?)?;
    let at_one = derivative.values()[1000];
    let exact = 1.0 / gamma(2.0 - alpha)?;
    println!("D^{alpha} t |_(t=1) = {at_one:.12} (closed form {exact:.12}; exact on linear signals)");

    let constant = SampledSignal::from_fn(0.0, h, 1001, |_| 2.5)?;
    let dc = caputo_derivative(&constant, FracOrder::unit(alpha)?)?;
    println!(
        "D^{alpha} of a constant: max |value| = {:.1e} (identically zero)",
        dc.values().iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
    );

    println!("\n== Mittag-Leffler series ==");
    println!("E_1(-1)      = {:.12} (exp(-1) = {:.12})", mittag_leffler(1.0, -1.0)?, (-1.0_f64).exp());
    println!("E_0.5(-1)    = {:.12}", mittag_leffler(0.5, -1.0)?);
    println!("E_0.3(0)     = {:.12}", mittag_leffler(0.3, 0.0)?);
    Ok(())
}
