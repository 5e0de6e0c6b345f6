//! Output cosine across stacked layers against the iterated angle map.

use relu_distortion::experiments::depth_sweep;

fn main() -> relu_distortion::Result<()> {
    for deg in [45.0f64, 90.0, 180.0] {
        println!("θ = {deg}°");
        for r in depth_sweep(64, deg.to_radians(), &[1024; 6], 20, 0)? {
            println!(
                "  depth {}  empirical {:.4}  predicted {:.4}",
                r.depth, r.empirical.mean, r.predicted_cos
            );
        }
    }
    Ok(())
}
