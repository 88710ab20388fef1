//! Deterministic synthetic rasters used by the examples, the test suites and
//! anyone who needs natural-statistics stand-ins without real data.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::shortcuts::rng::CounterRng;
use crate::spectral::{band_index, forward_spectrum, inverse_image};

const TAG_SYNTHETIC: u64 = 0x5359_4E54_4800_0004;

/// Uniform noise on `[0, 1)`.
pub fn white_noise(width: usize, height: usize, seed: u64) -> Result<ImageBuffer> {
    let mut rng = CounterRng::new(seed, TAG_SYNTHETIC, 0);
    ImageBuffer::from_fn(width, height, |_, _| rng.next_f64())
}

/// Standard normal noise.
pub fn gaussian_noise(width: usize, height: usize, seed: u64) -> Result<ImageBuffer> {
    let mut rng = CounterRng::new(seed, TAG_SYNTHETIC, 1);
    ImageBuffer::from_fn(width, height, |_, _| rng.standard_normal())
}

/// `cos(2π (cycles_x * col / W + cycles_y * row / H) + phase)`
pub fn sinusoid(
    width: usize,
    height: usize,
    cycles_x: f64,
    cycles_y: f64,
    phase: f64,
) -> Result<ImageBuffer> {
    ImageBuffer::from_fn(width, height, |r, c| {
        (2.0 * PI * (cycles_x * c as f64 / width as f64 + cycles_y * r as f64 / height as f64)
            + phase)
            .cos()
    })
}

/// Random-phase field whose amplitude is exactly `radius^-exponent` at every
/// non-DC bin, rescaled into `[0, 1]`. `exponent = 1` gives the 1/f
/// spectrum typical of natural images.
pub fn power_law_field(width: usize, height: usize, exponent: f64, seed: u64) -> Result<ImageBuffer> {
    if width < 2 || height < 2 {
        return Err(Error::InvalidDimension(format!(
            "power-law field needs at least 2x2, got {width}x{height}"
        )));
    }
    let mut spectrum = forward_spectrum(&gaussian_noise(width, height, seed)?, false)?;
    let radii: Vec<f64> = (0..height)
        .flat_map(|r| (0..width).map(move |c| (r, c)))
        .map(|(r, c)| spectrum.radius(r, c))
        .collect();
    for (bin, radius) in spectrum.bins_mut().iter_mut().zip(radii) {
        let amp = bin.norm();
        if radius == 0.0 || amp == 0.0 {
            *bin *= 0.0;
        } else {
            *bin *= radius.powf(-exponent) / amp;
        }
    }
    rescale_unit(&inverse_image(&spectrum)?)
}

/// Zero-mean random-phase field with unit amplitude on bands `lo..=hi` and
/// nothing elsewhere.
pub fn band_limited_noise(
    width: usize,
    height: usize,
    lo: usize,
    hi: usize,
    seed: u64,
) -> Result<ImageBuffer> {
    let mut spectrum = forward_spectrum(&gaussian_noise(width, height, seed)?, false)?;
    let bands: Vec<usize> = (0..height)
        .flat_map(|r| (0..width).map(move |c| (r, c)))
        .map(|(r, c)| {
            let (dv, du) = spectrum.offset(r, c);
            band_index(dv, du)
        })
        .collect();
    for (bin, band) in spectrum.bins_mut().iter_mut().zip(bands) {
        let amp = bin.norm();
        if band == 0 || band < lo || band > hi || amp == 0.0 {
            *bin *= 0.0;
        } else {
            *bin /= amp;
        }
    }
    inverse_image(&spectrum)
}

/// Affine map of the value range onto `[0, 1]`; constant images map to 0.
pub fn rescale_unit(image: &ImageBuffer) -> Result<ImageBuffer> {
    let min = image.values().iter().copied().fold(f64::INFINITY, f64::min);
    let max = image.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span == 0.0 {
        return image.map(|_| 0.0);
    }
    image.map(|v| ((v - min) / span).clamp(0.0, 1.0))
}
