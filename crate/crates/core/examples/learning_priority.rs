//! Priority trace of synthetic gradients whose energy moves to higher bands
//! epoch by epoch, and its alignment with a low-pass shortcut.
//!
//! cargo run --example learning_priority

use spectool::priority::{alignment_score, average_gradient_density, priority_trace, GradientSet};
use spectool::shortcuts::{lowpass_corrupt, shortcut_density};
use spectool::spectral::SpectralOptions;
use spectool::synthetic::{band_limited_noise, power_law_field};

fn main() -> spectool::Result<()> {
    let mut items = Vec::new();
    for epoch in 0..6u32 {
        let lo = 1 + 4 * epoch as usize;
        for s in 0..3u64 {
            let g = band_limited_noise(64, 64, lo, lo + 3, epoch as u64 * 10 + s)?;
            items.push((epoch, format!("s{s}"), g));
        }
    }
    let set = GradientSet::from_images(items)?;
    let trace = priority_trace(&set, SpectralOptions::default())?;
    println!("strongest band per epoch: {:?}", trace.row_argmax());

    let clean: Vec<_> = (0..3)
        .map(|s| power_law_field(64, 64, 1.0, s))
        .collect::<spectool::Result<_>>()?;
    let dirty: Vec<_> = clean
        .iter()
        .map(|c| lowpass_corrupt(c, 0.3))
        .collect::<spectool::Result<_>>()?;
    let shortcut = shortcut_density(&clean, &dirty)?;
    for &epoch in trace.epochs() {
        let d = average_gradient_density(&set, epoch, SpectralOptions::default())?;
        println!("epoch {epoch}: alignment with LPF 0.3 shortcut {:.3}", alignment_score(&shortcut, &d)?);
    }
    Ok(())
}
