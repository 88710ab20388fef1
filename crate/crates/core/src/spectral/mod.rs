//! Windowed 2D Fourier analysis and azimuthally averaged radial densities.
//!
//! Conventions shared by every module in the crate:
//!
//! * the forward transform is the plain DFT sum, the inverse carries `1 / (W * H)`;
//! * spectra are stored DC-centered: after shifting, DC sits at `(H / 2, W / 2)`
//!   (integer division), so a bin at `(row, col)` has centered offset
//!   `(row - H / 2, col - W / 2)`;
//! * a full complex transform is used for every input, real or not.

mod density;
mod window;

pub use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

pub use density::{
    band_count, band_index, image_density, radial_density, radial_density_with, DensityMeta,
    DensityMode, RadialDensity,
};
pub use window::{hann_1d, hann_window_2d, WindowMask};

/// Relative tolerance for discarding the imaginary part of an inverse transform.
pub const IMAG_RESIDUE_TOLERANCE: f64 = 1e-6;

/// Analysis switches shared by the density-producing operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// Multiply by a 2D Hann window before transforming.
    pub window: bool,
    pub mode: DensityMode,
}

/// DC-centered complex spectrum of a 2D raster.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMap {
    width: usize,
    height: usize,
    bins: Vec<Complex64>,
    windowed: bool,
}

impl SpectrumMap {
    /// Wraps already-centered bins.
    pub fn from_bins(
        width: usize,
        height: usize,
        bins: Vec<Complex64>,
        windowed: bool,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimension(format!(
                "spectrum must be at least 1x1, got {width}x{height}"
            )));
        }
        if bins.len() != width * height {
            return Err(Error::Shape(format!(
                "{width}x{height} spectrum needs {} bins, got {}",
                width * height,
                bins.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bins,
            windowed,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn windowed(&self) -> bool {
        self.windowed
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [Complex64] {
        &mut self.bins
    }

    pub fn bin(&self, row: usize, col: usize) -> Complex64 {
        self.bins[row * self.width + col]
    }

    /// Index of the DC bin as `(row, col)`.
    pub fn center(&self) -> (usize, usize) {
        (self.height / 2, self.width / 2)
    }

    /// Centered frequency offset `(dv, du)` of the bin at `(row, col)`.
    pub fn offset(&self, row: usize, col: usize) -> (isize, isize) {
        (
            row as isize - (self.height / 2) as isize,
            col as isize - (self.width / 2) as isize,
        )
    }

    /// Euclidean distance of a bin from DC, in bin units.
    pub fn radius(&self, row: usize, col: usize) -> f64 {
        let (dv, du) = self.offset(row, col);
        ((du * du + dv * dv) as f64).sqrt()
    }

    pub fn amplitude(&self, row: usize, col: usize) -> f64 {
        self.bin(row, col).norm()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.norm()).collect()
    }

    pub fn total_energy(&self) -> f64 {
        self.bins.iter().map(|b| b.norm_sqr()).sum()
    }
}

/// Unnormalized forward DFT, DC-centered. With `apply_window` the image is
/// tapered by [`hann_window_2d`] first.
///
/// The input is real, so the output is projected onto exact conjugate
/// symmetry, `F(k) = (F(k) + conj(F(-k))) / 2`, which removes round-off
/// asymmetry between partner bins.
pub fn forward_spectrum(image: &ImageBuffer, apply_window: bool) -> Result<SpectrumMap> {
    let (width, height) = image.dims();
    let mut data: Vec<Complex64> = if apply_window {
        let mask = hann_window_2d(width, height)?;
        mask.apply(image)?
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect()
    } else {
        image
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect()
    };
    fft2_in_place(&mut data, width, height, FftDirection::Forward);
    let data = hermitian_part(&data, width, height);
    let bins = center(&data, width, height);
    SpectrumMap::from_bins(width, height, bins, apply_window)
}

/// Inverse DFT of a centered spectrum, scaled by `1 / (W * H)`.
///
/// The imaginary part is dropped only when its largest magnitude is below
/// [`IMAG_RESIDUE_TOLERANCE`] times the largest real magnitude.
pub fn inverse_image(spectrum: &SpectrumMap) -> Result<ImageBuffer> {
    if let Some(i) = spectrum
        .bins
        .iter()
        .position(|b| !(b.re.is_finite() && b.im.is_finite()))
    {
        return Err(Error::InvalidInput(format!("non-finite spectrum bin {i}")));
    }
    let (width, height) = spectrum.dims();
    let mut data = uncenter(&spectrum.bins, width, height);
    fft2_in_place(&mut data, width, height, FftDirection::Inverse);
    let scale = 1.0 / (width * height) as f64;

    let mut max_re = 0.0f64;
    let mut max_im = 0.0f64;
    let values: Vec<f64> = data
        .iter()
        .map(|z| {
            let re = z.re * scale;
            max_re = max_re.max(re.abs());
            max_im = max_im.max((z.im * scale).abs());
            re
        })
        .collect();
    if max_im > IMAG_RESIDUE_TOLERANCE * max_re {
        return Err(Error::NonRealResult {
            residue: max_im,
            real: max_re,
        });
    }
    ImageBuffer::new(width, height, values)
}

/// 2D transform: all rows, then all columns through a transposed scratch buffer.
fn fft2_in_place(data: &mut [Complex64], width: usize, height: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(width, direction);
    row_fft.process(data);

    let col_fft = planner.plan_fft(height, direction);
    let mut transposed = vec![Complex64::new(0.0, 0.0); width * height];
    for row in 0..height {
        for col in 0..width {
            transposed[col * height + row] = data[row * width + col];
        }
    }
    col_fft.process(&mut transposed);
    for col in 0..width {
        for row in 0..height {
            data[row * width + col] = transposed[col * height + row];
        }
    }
}

fn hermitian_part(data: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(data.len());
    for row in 0..height {
        let pr = (height - row) % height;
        for col in 0..width {
            let pc = (width - col) % width;
            out.push((data[row * width + col] + data[pr * width + pc].conj()) * 0.5);
        }
    }
    out
}

/// fftshift: the unshifted index `k` lands at `(k + n / 2) % n`.
fn center(data: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for row in 0..height {
        let r = (row + height / 2) % height;
        for col in 0..width {
            let c = (col + width / 2) % width;
            out[r * width + c] = data[row * width + col];
        }
    }
    out
}

fn uncenter(bins: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); bins.len()];
    for row in 0..height {
        let r = (row + height / 2) % height;
        for col in 0..width {
            let c = (col + width / 2) % width;
            out[row * width + col] = bins[r * width + c];
        }
    }
    out
}
