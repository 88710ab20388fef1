use serde::{Deserialize, Serialize};

use super::{forward_spectrum, SpectralOptions, SpectrumMap};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;

/// What each bin contributes to its band.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMode {
    /// `|F(u, v)|`
    #[default]
    Amplitude,
    /// `|F(u, v)|²`
    Power,
}

/// Provenance carried alongside the band values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMeta {
    pub width: usize,
    pub height: usize,
    pub normalized: bool,
    pub windowed: bool,
    pub mode: DensityMode,
}

/// Per-band mean amplitude, band 0 (DC) through the cutoff `floor(min(W, H) / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity {
    bands: Vec<f64>,
    meta: DensityMeta,
}

/// `floor(min(width, height) / 2) + 1`
pub fn band_count(width: usize, height: usize) -> usize {
    width.min(height) / 2 + 1
}

/// Nearest-integer radius of a centered offset.
pub fn band_index(dv: isize, du: isize) -> usize {
    (((du * du + dv * dv) as f64).sqrt() + 0.5).floor() as usize
}

pub fn radial_density(spectrum: &SpectrumMap, normalize: bool) -> RadialDensity {
    radial_density_with(spectrum, DensityMode::Amplitude, normalize)
}

/// Buckets every bin by [`band_index`] and averages each bucket, visiting bins
/// in row-major order. Bins beyond the cutoff (the corners) are dropped.
pub fn radial_density_with(
    spectrum: &SpectrumMap,
    mode: DensityMode,
    normalize: bool,
) -> RadialDensity {
    let (width, height) = spectrum.dims();
    let nbands = band_count(width, height);
    let mut sums = vec![0.0f64; nbands];
    let mut counts = vec![0usize; nbands];
    for row in 0..height {
        for col in 0..width {
            let (dv, du) = spectrum.offset(row, col);
            let band = band_index(dv, du);
            if band >= nbands {
                continue;
            }
            let bin = spectrum.bin(row, col);
            sums[band] += match mode {
                DensityMode::Amplitude => bin.norm(),
                DensityMode::Power => bin.norm_sqr(),
            };
            counts[band] += 1;
        }
    }
    let bands = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &n)| if n == 0 { 0.0 } else { s / n as f64 })
        .collect();
    let density = RadialDensity {
        bands,
        meta: DensityMeta {
            width,
            height,
            normalized: false,
            windowed: spectrum.windowed(),
            mode,
        },
    };
    if normalize {
        density.normalized()
    } else {
        density
    }
}

/// Transform an image and reduce it to its radial density in one step.
pub fn image_density(
    image: &ImageBuffer,
    options: SpectralOptions,
    normalize: bool,
) -> Result<RadialDensity> {
    let spectrum = forward_spectrum(image, options.window)?;
    Ok(radial_density_with(&spectrum, options.mode, normalize))
}

impl RadialDensity {
    pub fn from_bands(bands: Vec<f64>, meta: DensityMeta) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::Validation("density has no bands".into()));
        }
        if let Some(i) = bands.iter().position(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidInput(format!(
                "band {i} is {}; bands must be finite and non-negative",
                bands[i]
            )));
        }
        Ok(Self { bands, meta })
    }

    pub fn bands(&self) -> &[f64] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn meta(&self) -> &DensityMeta {
        &self.meta
    }

    pub fn max(&self) -> f64 {
        self.bands.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the largest band; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &b) in self.bands.iter().enumerate() {
            if b > self.bands[best] {
                best = i;
            }
        }
        best
    }

    pub fn is_all_zero(&self) -> bool {
        self.bands.iter().all(|&b| b == 0.0)
    }

    /// Divides by the largest band. An all-zero density is returned unchanged
    /// but still flagged as normalized.
    pub fn normalized(mut self) -> Self {
        let max = self.max();
        if max > 0.0 {
            for b in &mut self.bands {
                *b /= max;
            }
        }
        self.meta.normalized = true;
        self
    }

    /// Band-wise arithmetic mean, accumulated in slice order.
    pub fn mean(densities: &[RadialDensity]) -> Result<RadialDensity> {
        let first = densities
            .first()
            .ok_or_else(|| Error::Validation("cannot average zero densities".into()))?;
        let mut sums = vec![0.0f64; first.len()];
        for d in densities {
            if d.len() != first.len() {
                return Err(Error::Shape(format!(
                    "band counts differ: {} vs {}",
                    first.len(),
                    d.len()
                )));
            }
            for (s, b) in sums.iter_mut().zip(&d.bands) {
                *s += b;
            }
        }
        let n = densities.len() as f64;
        Ok(RadialDensity {
            bands: sums.into_iter().map(|s| s / n).collect(),
            meta: DensityMeta {
                normalized: false,
                ..first.meta
            },
        })
    }
}
