//! Empirical output cosine of one layer against cos θ + ψ(θ).

use relu_distortion::experiments::angle_sweep;
use relu_distortion::geometry::angle_grid;

fn main() -> relu_distortion::Result<()> {
    let recs = angle_sweep(64, &angle_grid(19), 2048, 100, 0)?;
    for r in &recs {
        println!(
            "θ = {:>6.1}°  empirical {:.5} ± {:.1e}  predicted {:.5}",
            r.theta.to_degrees(),
            r.empirical.mean,
            r.empirical.stderr,
            r.predicted_cos
        );
    }
    let sup = recs
        .iter()
        .map(|r| (r.empirical.mean - r.predicted_cos).abs())
        .fold(0.0, f64::max);
    println!("largest deviation {sup:.5}");
    Ok(())
}
