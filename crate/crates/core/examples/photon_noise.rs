//! Photon noise on a flat 0.5 image: sample moments against Poisson theory.
//!
//! cargo run --example photon_noise

use spectool::shortcuts::photon_noise_corrupt;
use spectool::ImageBuffer;

fn main() -> spectool::Result<()> {
    let img = ImageBuffer::filled(256, 256, 0.5)?;
    for k in [10.0, 100.0, 1000.0] {
        let out = photon_noise_corrupt(&img, k, 1)?;
        let (mean, var) = out.mean_variance();
        println!(
            "k = {k:>6}: mean {mean:.5}, variance {var:.6} (expected {:.6})",
            0.5 / k
        );
    }
    let a = photon_noise_corrupt(&img, 100.0, 9)?;
    let b = photon_noise_corrupt(&img, 100.0, 9)?;
    println!("same seed, same output: {}", a == b);
    Ok(())
}
