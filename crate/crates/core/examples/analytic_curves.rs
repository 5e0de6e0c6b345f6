//! Tabulates ψ(θ), the expected output cosine and the unit shrinkage ratio.
//!
//! cargo run --example analytic_curves -- [grid points]

use relu_distortion::geometry;

fn main() -> relu_distortion::Result<()> {
    let points: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(13);
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "deg", "psi", "cos_out", "ratio", "angle_out");
    for theta in geometry::angle_grid(points) {
        println!(
            "{:>8.2} {:>10.6} {:>10.6} {:>10.6} {:>10.4}",
            theta.to_degrees(),
            geometry::psi_of_angle(theta)?,
            geometry::expected_output_cos(theta)?,
            geometry::unit_shrinkage_ratio(theta)?,
            geometry::angle_map(theta)?.to_degrees(),
        );
    }
    Ok(())
}
