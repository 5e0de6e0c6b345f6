//! Gaussian mean width of a few small point sets.

use relu_distortion::estimators::mean_width_estimate;

fn basis(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

fn main() -> relu_distortion::Result<()> {
    let pair = vec![basis(2, 0), basis(2, 1)];
    let est = mean_width_estimate(&pair, 100_000, 0)?;
    println!("{{e1, e2}}: {:.5} ± {:.1e} (2/√π = {:.5})", est.mean, est.stderr, 2.0 / std::f64::consts::PI.sqrt());

    for n in [4, 16, 64] {
        let simplex: Vec<Vec<f64>> = (0..n).map(|k| basis(n, k)).collect();
        let est = mean_width_estimate(&simplex, 20_000, 1)?;
        println!("{n} basis vectors: {:.4} ± {:.1e}", est.mean, est.stderr);
    }
    Ok(())
}
