//! z-score test of the two formulas at several angles.
//!
//! cargo run --release --example refute_orthogonal -- [m] [trials]

use relu_distortion::estimators::{refutation_test, Thresholds};
use relu_distortion::experiments::planar_pair;
use relu_distortion::Error;

fn main() -> relu_distortion::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let m = args.next().flatten().unwrap_or(1024);
    let trials = args.next().flatten().unwrap_or(400);
    for deg in [10.0f64, 30.0, 60.0, 90.0, 135.0, 180.0] {
        let (x, y) = planar_pair(64, deg.to_radians())?;
        match refutation_test(&x, &y, m, trials, 0, Thresholds::default()) {
            Ok(v) => println!(
                "θ = {deg:>5}°  mean {:.5} ± {:.1e}  z_corrected {:>6.2}  z_original {:>8.1}  {}",
                v.estimate.mean,
                v.estimate.stderr,
                v.z_corrected,
                v.z_original,
                v.verdict.name()
            ),
            Err(e @ Error::HypothesesTooClose { .. }) => println!("θ = {deg:>5}°  {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
