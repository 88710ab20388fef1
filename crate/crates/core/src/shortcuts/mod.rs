//! Frequency shortcuts: an ideal circular low-pass blur and Poisson photon
//! noise, deterministic corruption planning over a manifest, and the
//! spectral signature a shortcut leaves behind.

mod plan;
pub mod rng;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::spectral::{
    forward_spectrum, inverse_image, radial_density_with, RadialDensity, SpectralOptions,
    SpectrumMap,
};

pub use plan::{plan_corruption, CorruptionPlan, PlanEntry};
use rng::CounterRng;

/// Photon budget at intensity 1.0 when none is given.
pub const DEFAULT_PHOTON_SCALE: f64 = 255.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shortcut {
    /// Keep only bins within `size * W / 2` of DC.
    Lowpass { size: f64 },
    /// `y = Poisson(k * x) / k`.
    Photon { photon_scale: f64 },
}

impl Shortcut {
    pub fn name(&self) -> &'static str {
        match self {
            Shortcut::Lowpass { .. } => "lowpass",
            Shortcut::Photon { .. } => "photon",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Shortcut::Lowpass { size } => check_size(size),
            Shortcut::Photon { photon_scale } => check_photon_scale(photon_scale),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    #[serde(flatten)]
    pub shortcut: Shortcut,
    /// Share of the target class's samples in a split that get corrupted.
    pub fraction: f64,
    pub target_label: String,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn validate(&self) -> Result<()> {
        self.shortcut.validate()?;
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::InvalidParameter(format!(
                "fraction must lie in [0, 1], got {}",
                self.fraction
            )));
        }
        if self.target_label.is_empty() {
            return Err(Error::InvalidParameter("target label is empty".into()));
        }
        Ok(())
    }

    /// Applies the shortcut to one sample. Photon noise draws from a stream
    /// keyed by `spec.seed` and the sample's path.
    pub fn corrupt(&self, image: &ImageBuffer, sample_path: &str) -> Result<ImageBuffer> {
        match self.shortcut {
            Shortcut::Lowpass { size } => lowpass_corrupt(image, size),
            Shortcut::Photon { photon_scale } => {
                let seed = rng::stream_key(
                    self.seed,
                    rng::TAG_SAMPLE_SEED,
                    rng::fnv1a64(sample_path.as_bytes()),
                );
                photon_noise_corrupt(image, photon_scale, seed)
            }
        }
    }
}

fn check_size(size: f64) -> Result<()> {
    if size > 0.0 && size <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "low-pass size must lie in (0, 1], got {size}"
        )))
    }
}

fn check_photon_scale(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "photon scale must be positive and finite, got {k}"
        )))
    }
}

/// Radius, in centered-bin units, beyond which the low-pass filter zeroes bins.
pub fn lowpass_cutoff(width: usize, size: f64) -> f64 {
    size * width as f64 / 2.0
}

/// Ideal circular low-pass filter of diameter `size * W`.
///
/// `size = 1.0` removes nothing, so the corner bins outside the inscribed
/// circle survive and the call is an identity up to round-off. Output is
/// not clamped.
pub fn lowpass_corrupt(image: &ImageBuffer, size: f64) -> Result<ImageBuffer> {
    check_size(size)?;
    let mut spectrum = forward_spectrum(image, false)?;
    if size < 1.0 {
        zero_outside(&mut spectrum, lowpass_cutoff(image.width(), size));
    }
    inverse_image(&spectrum)
}

fn zero_outside(spectrum: &mut SpectrumMap, cutoff: f64) {
    let (width, height) = spectrum.dims();
    let radii: Vec<f64> = (0..height)
        .flat_map(|r| (0..width).map(move |c| (r, c)))
        .map(|(r, c)| spectrum.radius(r, c))
        .collect();
    for (bin, radius) in spectrum.bins_mut().iter_mut().zip(radii) {
        if radius > cutoff {
            *bin = Complex64::new(0.0, 0.0);
        }
    }
}

/// Shot noise: each pixel becomes `Poisson(k * x) / k`, drawn from the
/// stream `(seed, TAG_PHOTON, pixel index)`.
pub fn photon_noise_corrupt(image: &ImageBuffer, k: f64, seed: u64) -> Result<ImageBuffer> {
    check_photon_scale(k)?;
    if let Some(i) = image.values().iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidInput(format!(
            "photon noise needs non-negative intensities; pixel {i} is {}",
            image.values()[i]
        )));
    }
    let values: Vec<f64> = image
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &x)| CounterRng::new(seed, rng::TAG_PHOTON, i as u64).poisson(k * x) as f64 / k)
        .collect();
    ImageBuffer::new(image.width(), image.height(), values)
}

pub fn shortcut_density(clean: &[ImageBuffer], corrupted: &[ImageBuffer]) -> Result<RadialDensity> {
    shortcut_density_with(clean, corrupted, SpectralOptions::default())
}

/// Normalized radial density of `|A_clean - A_corrupted|`, averaged over
/// aligned pairs. All-zero differences stay all-zero.
pub fn shortcut_density_with(
    clean: &[ImageBuffer],
    corrupted: &[ImageBuffer],
    options: SpectralOptions,
) -> Result<RadialDensity> {
    if clean.len() != corrupted.len() {
        return Err(Error::Shape(format!(
            "{} clean images but {} corrupted",
            clean.len(),
            corrupted.len()
        )));
    }
    if clean.is_empty() {
        return Err(Error::Validation("no image pairs given".into()));
    }
    for (c, k) in clean.iter().zip(corrupted) {
        c.check_same_dims(k)?;
        clean[0].check_same_dims(c)?;
    }
    let per_pair: Vec<RadialDensity> = clean
        .par_iter()
        .zip(corrupted.par_iter())
        .map(|(c, k)| {
            let a = forward_spectrum(c, options.window)?;
            let b = forward_spectrum(k, options.window)?;
            let diff = a
                .bins()
                .iter()
                .zip(b.bins())
                .map(|(x, y)| Complex64::new((x.norm() - y.norm()).abs(), 0.0))
                .collect();
            let diff = SpectrumMap::from_bins(c.width(), c.height(), diff, options.window)?;
            Ok(radial_density_with(&diff, options.mode, false))
        })
        .collect::<Result<_>>()?;
    Ok(RadialDensity::mean(&per_pair)?.normalized())
}
