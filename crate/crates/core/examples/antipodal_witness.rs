//! For y = −x exactly one of ρ(mᵢᵀx), ρ(−mᵢᵀx) is nonzero in every row, so
//! each realization of the squared output distance equals ‖Mx‖².

use relu_distortion::geometry::{self, Claim, PairGeometry};
use relu_distortion::layer::GaussianLayer;
use relu_distortion::rng::Stream;

fn main() -> relu_distortion::Result<()> {
    let (n, m) = (64, 1024);
    let x = Stream::new(42, 0).normal_vec(n);
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let scale = geometry::norm(&x).powi(2);

    let mut total = 0.0;
    for seed in 0..20 {
        let layer = GaussianLayer::sample(n, m, seed)?;
        let d = layer.sq_dist_realization(&x, &neg)?;
        let mx: f64 = layer.linear(&x)?.iter().map(|v| v * v).sum();
        println!("seed {seed:>2}: ‖ρ(Mx)−ρ(−Mx)‖² = {d:.12}  ‖Mx‖² = {mx:.12}");
        total += d / scale;
    }
    let g = PairGeometry::unit(std::f64::consts::PI)?;
    println!("average over draws / ‖x‖²: {:.4}", total / 20.0);
    println!("corrected formula:        {}", geometry::expected_sq_dist(&g, Claim::Corrected).value);
    println!("original claim:           {}", geometry::expected_sq_dist(&g, Claim::OriginalClaim).value);
    Ok(())
}
