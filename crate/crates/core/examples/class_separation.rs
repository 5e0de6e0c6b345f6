//! Two tight classes far apart: which pairs does a random layer shrink more?

use relu_distortion::experiments::{separation_experiment, ClassConfig};

fn main() -> relu_distortion::Result<()> {
    let config = ClassConfig {
        ambient_dim: 64,
        classes: 2,
        points_per_class: 20,
        intra_angle_max: 15f64.to_radians(),
        inter_angle_min: 60f64.to_radians(),
        master_seed: 0,
    };
    for layers in [1, 2, 4] {
        let rep = separation_experiment(&config, 1024, layers, 20, 0)?;
        println!(
            "layers {layers}: intra ratio {:.4} ({} pairs), inter ratio {:.4} ({} pairs)",
            rep.intra.mean_ratio.unwrap_or(f64::NAN),
            rep.intra.pairs,
            rep.inter.mean_ratio.unwrap_or(f64::NAN),
            rep.inter.pairs,
        );
        println!(
            "          closest inter-class distance {:.4} -> {:.4}",
            rep.inter.min_pre.unwrap_or(f64::NAN),
            rep.inter.min_post.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
