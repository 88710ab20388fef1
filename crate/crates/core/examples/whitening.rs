//! Whitening flattens a 1/f spectrum while keeping mean and std-dev.
//!
//! cargo run --example whitening

use spectool::spectral::{image_density, SpectralOptions};
use spectool::synthetic::power_law_field;
use spectool::whitening::{whiten, MomentPair};
use spectool::ImageBuffer;

fn band_ratio(img: &ImageBuffer) -> spectool::Result<f64> {
    let d = image_density(img, SpectralOptions::default(), false)?;
    let tail = &d.bands()[1..];
    let max = tail.iter().copied().fold(0.0, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max / min)
}

fn main() -> spectool::Result<()> {
    let img = power_law_field(224, 224, 1.0, 3)?;
    let (out, record) = whiten(&img)?;
    let after = MomentPair::of(&out);
    println!("band max/min before: {:.1}", band_ratio(&img)?);
    println!("band max/min after:  {:.6}", band_ratio(&out)?);
    println!(
        "mean {:.6} -> {:.6}, std {:.6} -> {:.6}",
        record.original.mean,
        after.mean,
        record.original.std_dev(),
        after.std_dev()
    );
    println!("guarded bins: {}", record.epsilon_bins);
    Ok(())
}
