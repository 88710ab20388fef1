//! Shortcut density of the ideal low-pass filter at three sizes on
//! 224-pixel 1/f images.
//!
//! cargo run --release --example lowpass_shortcut

use spectool::shortcuts::{lowpass_corrupt, lowpass_cutoff, shortcut_density};
use spectool::synthetic::power_law_field;

fn main() -> spectool::Result<()> {
    let clean: Vec<_> = (0..4)
        .map(|s| power_law_field(224, 224, 1.0, 40 + s))
        .collect::<spectool::Result<_>>()?;
    for size in [0.3, 0.4, 0.5] {
        let dirty: Vec<_> = clean
            .iter()
            .map(|c| lowpass_corrupt(c, size))
            .collect::<spectool::Result<_>>()?;
        let d = shortcut_density(&clean, &dirty)?;
        println!(
            "size {size}: cutoff radius {:.1}, density peak at band {}",
            lowpass_cutoff(224, size),
            d.argmax()
        );
    }
    Ok(())
}
