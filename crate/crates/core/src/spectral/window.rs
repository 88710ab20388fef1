use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

/// Separable 2D Hann taper, `w(row, col) = h_H(row) * h_W(col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowMask {
    width: usize,
    height: usize,
    weights: Vec<f64>,
}

impl WindowMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.width + col]
    }

    /// Elementwise product with an image of the same dimensions.
    pub fn apply(&self, image: &ImageBuffer) -> Result<ImageBuffer> {
        if image.dims() != (self.width, self.height) {
            return Err(Error::Shape(format!(
                "window is {}x{}, image is {}x{}",
                self.width,
                self.height,
                image.width(),
                image.height()
            )));
        }
        ImageBuffer::new(
            self.width,
            self.height,
            image
                .values()
                .iter()
                .zip(&self.weights)
                .map(|(v, w)| v * w)
                .collect(),
        )
    }
}

/// Symmetric Hann window of length `n`: `0.5 * (1 - cos(2πk / (n - 1)))`.
///
/// Evaluated on the mirrored index so both halves are bitwise equal and both
/// endpoints are exactly zero.
pub fn hann_1d(n: usize) -> Vec<f64> {
    let denom = (n - 1) as f64;
    (0..n)
        .map(|k| {
            let k = k.min(n - 1 - k) as f64;
            0.5 * (1.0 - (2.0 * PI * k / denom).cos())
        })
        .collect()
}

pub fn hann_window_2d(width: usize, height: usize) -> Result<WindowMask> {
    if width < 2 || height < 2 {
        return Err(Error::InvalidDimension(format!(
            "Hann window needs both dimensions >= 2, got {width}x{height}"
        )));
    }
    let h_rows = hann_1d(height);
    let h_cols = hann_1d(width);
    let weights = h_rows
        .iter()
        .flat_map(|hr| h_cols.iter().map(move |hc| hr * hc))
        .collect();
    Ok(WindowMask {
        width,
        height,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three() {
        let w = hann_window_2d(3, 3).unwrap();
        assert_eq!(w.weight(1, 1), 1.0);
        for (r, c) in [(0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1), (2, 2)] {
            assert_eq!(w.weight(r, c), 0.0, "({r},{c})");
        }
    }

    #[test]
    fn two_by_two_is_all_zero() {
        let w = hann_window_2d(2, 2).unwrap();
        assert!(w.weights().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn five_by_four() {
        // h_5(2) = 1, h_4(1) = 0.5 * (1 - cos(2π/3)) = 0.75
        let w = hann_window_2d(5, 4).unwrap();
        assert!((w.weight(1, 2) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn invalid_dims() {
        assert!(matches!(
            hann_window_2d(1, 8),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn weights_in_unit_interval_with_zero_border() {
        let w = hann_window_2d(7, 6).unwrap();
        assert!(w.weights().iter().all(|&x| (0.0..=1.0).contains(&x)));
        for c in 0..7 {
            assert_eq!(w.weight(0, c), 0.0);
            assert_eq!(w.weight(5, c), 0.0);
        }
        for r in 0..6 {
            assert_eq!(w.weight(r, 0), 0.0);
            assert_eq!(w.weight(r, 6), 0.0);
        }
    }
}
