//! Three independent evaluations of ∫₀^{π−θ} sin t sin(t+θ) dt.

use std::f64::consts::PI;

use relu_distortion::estimators::{cross_term_mc_2d, quadrature_cross_integral};
use relu_distortion::geometry::cross_integral_closed_form;

fn main() -> relu_distortion::Result<()> {
    println!("{:>6} {:>16} {:>16} {:>16} {:>8}", "deg", "closed", "simpson", "monte carlo", "z");
    for k in 0..=6 {
        let theta = k as f64 * PI / 6.0;
        let closed = cross_integral_closed_form(theta);
        let quad = quadrature_cross_integral(theta)?;
        let mc = cross_term_mc_2d(theta, 100_000, k)?;
        println!(
            "{:>6.0} {:>16.12} {:>16.12} {:>16.12} {:>8.2}",
            theta.to_degrees(),
            closed,
            quad,
            mc.mean * PI,
            mc.z_score(closed / PI)
        );
    }
    Ok(())
}
