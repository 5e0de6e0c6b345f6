//! RMS deviation of single-layer squared distances from their mean, by width.

use std::f64::consts::FRAC_PI_2;

use relu_distortion::experiments::{concentration_slope, concentration_sweep};

fn main() -> relu_distortion::Result<()> {
    let widths: Vec<usize> = (6..=13).map(|k| 1 << k).collect();
    let recs = concentration_sweep(64, &widths, FRAC_PI_2, 200, 0)?;
    for r in &recs {
        let d = r.deviation.expect("concentration records carry deviations");
        println!("m = {:>5}  rms {:.5}  max {:.5}", r.m, d.rms, d.max);
    }
    if let Some(s) = concentration_slope(&recs) {
        println!("log-log slope {s:.4} (m^-1/2 gives -0.5)");
    }
    Ok(())
}
