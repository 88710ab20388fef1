//! Spectrum whitening: divide every bin by its amplitude so only phase
//! survives, then map the result back onto the input's spatial mean and
//! variance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::spectral::{forward_spectrum, inverse_image};

/// Bins with amplitude below this are divided by it instead of by their own amplitude.
pub const AMPLITUDE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

impl MomentPair {
    pub fn of(image: &ImageBuffer) -> Self {
        let (mean, variance) = image.mean_variance();
        Self { mean, variance }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhiteningRecord {
    /// Spatial moments of the input.
    pub original: MomentPair,
    /// Spatial moments of the phase-only image, before restoration.
    pub post_normalization: MomentPair,
    /// Bins whose amplitude fell below [`AMPLITUDE_GUARD`].
    pub epsilon_bins: usize,
}

/// Phase-only image: inverse transform of `F / max(|F|, AMPLITUDE_GUARD)`.
/// Returns the image and the number of guarded bins.
pub fn flatten_amplitude(image: &ImageBuffer) -> Result<(ImageBuffer, usize)> {
    let mut spectrum = forward_spectrum(image, false)?;
    let mut guarded = 0;
    for bin in spectrum.bins_mut() {
        let amp = bin.norm();
        if amp < AMPLITUDE_GUARD {
            guarded += 1;
        }
        *bin /= amp.max(AMPLITUDE_GUARD);
    }
    Ok((inverse_image(&spectrum)?, guarded))
}

/// Whitens `image` and restores its spatial mean and standard deviation:
/// `out = (y - μ_n) / σ_n * σ_o + μ_o` where `y` is the phase-only image.
pub fn whiten(image: &ImageBuffer) -> Result<(ImageBuffer, WhiteningRecord)> {
    if image.width() < 2 || image.height() < 2 {
        return Err(Error::InvalidDimension(format!(
            "whitening needs at least 2x2, got {}x{}",
            image.width(),
            image.height()
        )));
    }
    if image.is_constant() {
        return Err(Error::DegenerateVariance("input image is constant".into()));
    }
    let original = MomentPair::of(image);
    if original.variance <= 0.0 {
        return Err(Error::DegenerateVariance("input variance is zero".into()));
    }

    let (flat, epsilon_bins) = flatten_amplitude(image)?;
    let post = MomentPair::of(&flat);
    if post.variance <= 0.0 || !post.variance.is_finite() {
        return Err(Error::DegenerateVariance(
            "phase-only image has zero variance".into(),
        ));
    }

    let gain = original.std_dev() / post.std_dev();
    let out = flat.map(|y| (y - post.mean) * gain + original.mean)?;
    Ok((
        out,
        WhiteningRecord {
            original,
            post_normalization: post,
            epsilon_bins,
        },
    ))
}
