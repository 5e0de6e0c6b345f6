//! Writes a seeded layer to binary and CSV, reads both back and checks the
//! forward pass is unchanged.

use relu_distortion::layer::{GaussianLayer, ImplicitLayer};

fn main() -> relu_distortion::Result<()> {
    let dir = std::env::temp_dir().join("relu-distortion-fixture");
    std::fs::create_dir_all(&dir)?;
    let layer = GaussianLayer::sample(8, 16, 7)?;

    let bin_path = dir.join("layer.bin");
    layer.write_binary(std::fs::File::create(&bin_path)?)?;
    let from_bin = GaussianLayer::read_binary(std::fs::File::open(&bin_path)?)?;

    let csv_path = dir.join("layer.csv");
    std::fs::write(&csv_path, layer.to_csv())?;
    let from_csv = GaussianLayer::from_csv(&std::fs::read_to_string(&csv_path)?)?;

    let x: Vec<f64> = (0..8).map(|i| (i as f64 - 3.5) / 4.0).collect();
    let out = layer.relu_forward(&x)?;
    assert_eq!(out, from_bin.relu_forward(&x)?);
    assert_eq!(out, from_csv.relu_forward(&x)?);
    assert_eq!(out, ImplicitLayer::new(8, 16, 7)?.relu_forward(&x)?);
    println!("wrote {} and {}", bin_path.display(), csv_path.display());
    println!("ρ(Mx) = {out:.4?}");
    Ok(())
}
