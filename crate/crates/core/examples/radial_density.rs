//! Radial density of a synthetic 1/f field, plain and windowed.
//!
//! cargo run --example radial_density

use spectool::spectral::{image_density, DensityMode, SpectralOptions};
use spectool::synthetic::power_law_field;

fn main() -> spectool::Result<()> {
    let img = power_law_field(128, 128, 1.0, 7)?;
    let plain = image_density(&img, SpectralOptions::default(), true)?;
    let windowed = image_density(
        &img,
        SpectralOptions {
            window: true,
            mode: DensityMode::Amplitude,
        },
        true,
    )?;
    println!("band  plain     windowed");
    for b in (0..plain.len()).step_by(8) {
        println!("{b:>4}  {:.5}  {:.5}", plain.bands()[b], windowed.bands()[b]);
    }
    // with DC excluded the amplitude falls off as 1/band
    println!("band 4 / band 32 = {:.2}", plain.bands()[4] / plain.bands()[32]);
    Ok(())
}
