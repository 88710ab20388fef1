//! Class-wise average amplitude spectra and the accumulative difference of
//! class-wise average spectrum (ADCS) map.
//!
//! For a target class `t` and every other class `j`,
//! `ADCS_t(u, v) = Σ_j sign(E_t(u, v) - E_j(u, v))` with `sign(0) = 0`, where
//! `E_c` is the mean amplitude spectrum over the images of class `c`. Values
//! are integers in `[1 - |C|, |C| - 1]`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::io;
use crate::spectral::forward_spectrum;

/// Class sizes differing by more than this factor trigger a warning.
const IMBALANCE_WARN_RATIO: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpectrum {
    label: String,
    width: usize,
    height: usize,
    /// DC-centered, row-major `E_c(u, v)`.
    mean_amplitude: Vec<f64>,
    sample_count: usize,
    windowed: bool,
}

impl ClassSpectrum {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn mean_amplitude(&self) -> &[f64] {
        &self.mean_amplitude
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn windowed(&self) -> bool {
        self.windowed
    }
}

pub fn class_mean_spectrum(images: &[ImageBuffer], label: &str) -> Result<ClassSpectrum> {
    class_mean_spectrum_with(images, label, false)
}

/// Mean of the per-image amplitude spectra.
///
/// Each bin's amplitudes are summed in ascending order of value, so the
/// result does not depend on the order of `images`.
pub fn class_mean_spectrum_with(
    images: &[ImageBuffer],
    label: &str,
    window: bool,
) -> Result<ClassSpectrum> {
    let first = images
        .first()
        .ok_or_else(|| Error::EmptyClass(label.to_string()))?;
    for img in images {
        first.check_same_dims(img)?;
    }
    let (width, height) = first.dims();
    let spectra: Vec<Vec<f64>> = images
        .par_iter()
        .map(|img| forward_spectrum(img, window).map(|s| s.amplitudes()))
        .collect::<Result<_>>()?;

    let n = spectra.len();
    let mut scratch = vec![0.0f64; n];
    let mean_amplitude = (0..width * height)
        .map(|bin| {
            for (slot, s) in scratch.iter_mut().zip(&spectra) {
                *slot = s[bin];
            }
            scratch.sort_unstable_by(f64::total_cmp);
            scratch.iter().sum::<f64>() / n as f64
        })
        .collect();

    Ok(ClassSpectrum {
        label: label.to_string(),
        width,
        height,
        mean_amplitude,
        sample_count: n,
        windowed: window,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdcsMap {
    target_label: String,
    width: usize,
    height: usize,
    values: Vec<i32>,
    class_count: usize,
    windowed: bool,
    sample_counts: BTreeMap<String, usize>,
}

impl AdcsMap {
    pub fn target_label(&self) -> &str {
        &self.target_label
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> i32 {
        self.values[row * self.width + col]
    }

    /// `|C|`, the target plus every compared class.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn sample_counts(&self) -> &BTreeMap<String, usize> {
        &self.sample_counts
    }

    /// `(1 - |C|, |C| - 1)`
    pub fn bounds(&self) -> (i32, i32) {
        let c = self.class_count as i32;
        (1 - c, c - 1)
    }

    /// `(height, width)` float64 container of the integer values.
    pub fn to_npy(&self) -> Result<Vec<u8>> {
        let values: Vec<f64> = self.values.iter().map(|&v| v as f64).collect();
        io::write_f64_array(&[self.height, self.width], &values)
    }

    pub fn sidecar(&self) -> AdcsSidecar {
        AdcsSidecar {
            target_label: self.target_label.clone(),
            class_count: self.class_count,
            window_flag: self.windowed,
            sample_counts: self.sample_counts.clone(),
        }
    }
}

/// JSON metadata written next to an exported map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdcsSidecar {
    pub target_label: String,
    pub class_count: usize,
    pub window_flag: bool,
    pub sample_counts: BTreeMap<String, usize>,
}

pub fn adcs_map(target: &ClassSpectrum, others: &[ClassSpectrum]) -> Result<AdcsMap> {
    if others.is_empty() {
        return Err(Error::DegenerateClassSet(format!(
            "class `{}` has nothing to be compared against",
            target.label
        )));
    }
    let mut sample_counts = BTreeMap::new();
    sample_counts.insert(target.label.clone(), target.sample_count);
    for other in others {
        if other.label == target.label {
            return Err(Error::DegenerateClassSet(format!(
                "target class `{}` also appears among the compared classes",
                target.label
            )));
        }
        if other.dims() != target.dims() {
            return Err(Error::Shape(format!(
                "class `{}` is {}x{}, class `{}` is {}x{}",
                target.label, target.width, target.height, other.label, other.width, other.height
            )));
        }
        if sample_counts
            .insert(other.label.clone(), other.sample_count)
            .is_some()
        {
            return Err(Error::DegenerateClassSet(format!(
                "class `{}` listed twice",
                other.label
            )));
        }
    }
    if target.windowed != others[0].windowed || others.iter().any(|o| o.windowed != target.windowed)
    {
        return Err(Error::Validation(
            "cannot compare windowed and unwindowed class spectra".into(),
        ));
    }

    let min = sample_counts.values().copied().min().unwrap_or(1);
    let max = sample_counts.values().copied().max().unwrap_or(1);
    if max > IMBALANCE_WARN_RATIO * min {
        log::warn!("class sizes are unbalanced ({min} vs {max} samples); ADCS compares class means");
    }

    let values = target
        .mean_amplitude
        .iter()
        .enumerate()
        .map(|(bin, &e_t)| {
            others
                .iter()
                .map(|o| sign(e_t - o.mean_amplitude[bin]))
                .sum()
        })
        .collect();

    Ok(AdcsMap {
        target_label: target.label.clone(),
        width: target.width,
        height: target.height,
        values,
        class_count: others.len() + 1,
        windowed: target.windowed,
        sample_counts,
    })
}

/// One-vs-rest maps for every class, in input order.
pub fn adcs_all(classes: &[ClassSpectrum]) -> Result<Vec<AdcsMap>> {
    (0..classes.len())
        .map(|i| {
            let others: Vec<ClassSpectrum> = classes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, c)| c.clone())
                .collect();
            adcs_map(&classes[i], &others)
        })
        .collect()
}

fn sign(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(seed: u64, w: usize, h: usize) -> ImageBuffer {
        let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        ImageBuffer::from_fn(w, h, |_, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .unwrap()
    }

    #[test]
    fn single_image_mean_is_its_amplitude() {
        let x = img(1, 4, 4);
        let e = class_mean_spectrum(&[x.clone()], "a").unwrap();
        assert_eq!(e.mean_amplitude(), &forward_spectrum(&x, false).unwrap().amplitudes()[..]);
        let twice = class_mean_spectrum(&[x.clone(), x], "a").unwrap();
        assert_eq!(twice.mean_amplitude(), e.mean_amplitude());
        assert_eq!(twice.sample_count(), 2);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            class_mean_spectrum(&[], "empty"),
            Err(Error::EmptyClass(_))
        ));
        assert!(matches!(
            class_mean_spectrum(&[img(1, 4, 4), img(2, 4, 5)], "a"),
            Err(Error::Shape(_))
        ));
        let a = class_mean_spectrum(&[img(1, 4, 4)], "a").unwrap();
        let b = class_mean_spectrum(&[img(2, 6, 4)], "b").unwrap();
        assert!(matches!(adcs_map(&a, &[]), Err(Error::DegenerateClassSet(_))));
        assert!(matches!(adcs_map(&a, &[b]), Err(Error::Shape(_))));
        assert!(matches!(
            adcs_map(&a, &[a.clone()]),
            Err(Error::DegenerateClassSet(_))
        ));
    }

    #[test]
    fn dominant_class_is_plus_one() {
        let base = img(3, 4, 4);
        let bright = base.map(|v| 2.0 * v + 0.1).unwrap();
        let hi = class_mean_spectrum(&[bright], "hi").unwrap();
        let lo = class_mean_spectrum(&[base], "lo").unwrap();
        let m_hi = adcs_map(&hi, std::slice::from_ref(&lo)).unwrap();
        let m_lo = adcs_map(&lo, std::slice::from_ref(&hi)).unwrap();
        // The scaled copy dominates every bin where the base amplitude is nonzero.
        for (bin, &a) in lo.mean_amplitude().iter().enumerate() {
            if a > 1e-9 {
                assert_eq!(m_hi.values()[bin], 1);
                assert_eq!(m_lo.values()[bin], -1);
            }
        }
        assert_eq!(m_hi.bounds(), (-1, 1));
    }

    #[test]
    fn identical_classes_give_zero() {
        let x = img(4, 5, 5);
        let a = class_mean_spectrum(&[x.clone()], "a").unwrap();
        let b = class_mean_spectrum(&[x], "b").unwrap();
        assert!(adcs_map(&a, &[b]).unwrap().values().iter().all(|&v| v == 0));
    }

    #[test]
    fn sidecar_fields() {
        let a = class_mean_spectrum(&[img(5, 4, 4), img(6, 4, 4)], "a").unwrap();
        let b = class_mean_spectrum(&[img(7, 4, 4)], "b").unwrap();
        let m = adcs_map(&a, &[b]).unwrap();
        let side = m.sidecar();
        assert_eq!(side.class_count, 2);
        assert_eq!(side.sample_counts["a"], 2);
        assert_eq!(side.sample_counts["b"], 1);
        assert!(!side.window_flag);
        let bytes = m.to_npy().unwrap();
        let back = io::read_array(&bytes).unwrap();
        for (x, &v) in back.values().iter().zip(m.values()) {
            assert_eq!(*x, v as f64);
        }
    }
}
