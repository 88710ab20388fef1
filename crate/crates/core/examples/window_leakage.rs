//! Energy leaking out of bands 9-12 for a 10.5-cycle sinusoid, with and
//! without the Hann window.
//!
//! cargo run --example window_leakage

use spectool::spectral::{band_index, forward_spectrum, hann_window_2d};
use spectool::synthetic::sinusoid;
use spectool::ImageBuffer;

fn leakage(img: &ImageBuffer, window: bool) -> spectool::Result<f64> {
    let s = forward_spectrum(img, window)?;
    let (mut inside, mut total) = (0.0, 0.0);
    for row in 0..s.height() {
        for col in 0..s.width() {
            let (dv, du) = s.offset(row, col);
            let band = band_index(dv, du);
            if band == 0 {
                continue;
            }
            let e = s.bin(row, col).norm_sqr();
            total += e;
            if (9..=12).contains(&band) {
                inside += e;
            }
        }
    }
    Ok(1.0 - inside / total)
}

fn main() -> spectool::Result<()> {
    let mask = hann_window_2d(5, 4)?;
    println!("hann (5 wide, 4 high), row 1: {:?}", &mask.weights()[5..10]);

    let img = sinusoid(64, 64, 10.5, 0.0, 0.0)?;
    println!("outside bands 9-12, no window:   {:.4}", leakage(&img, false)?);
    println!("outside bands 9-12, hann window: {:.4}", leakage(&img, true)?);
    Ok(())
}
