//! Learning-priority analysis over externally produced input-gradient maps.
//!
//! A model's learning priority at an epoch is the mean radial density of the
//! loss gradients back-propagated to its inputs. Stacking epochs gives a
//! [`PriorityTrace`]; [`alignment_score`] compares such a density with a
//! shortcut's density.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, FormatError, Result};
use crate::image::ImageBuffer;
use crate::io::read_image_file;
use crate::spectral::{band_count, image_density, DensityMode, RadialDensity, SpectralOptions};

pub const INDEX_HEADER: [&str; 3] = ["epoch", "sample_id", "path"];

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSample {
    pub epoch: u32,
    pub sample_id: String,
    pub path: PathBuf,
    pub gradient: ImageBuffer,
}

/// Gradient maps indexed by epoch, all of one size. Samples are kept ordered
/// by `(epoch, sample_id)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    root: PathBuf,
    samples: Vec<GradientSample>,
    width: usize,
    height: usize,
}

impl GradientSet {
    /// Builds a set from in-memory maps; the sample id doubles as the path.
    pub fn from_images(items: Vec<(u32, String, ImageBuffer)>) -> Result<Self> {
        let samples = items
            .into_iter()
            .map(|(epoch, sample_id, gradient)| GradientSample {
                epoch,
                path: PathBuf::from(&sample_id),
                sample_id,
                gradient,
            })
            .collect();
        Self::from_samples(PathBuf::new(), samples)
    }

    /// Loads an `epoch,sample_id,path` index; paths resolve against the index's directory.
    pub fn load(index_path: &Path) -> Result<Self> {
        let text = fs::read_to_string(index_path).map_err(|e| Error::io(index_path, e))?;
        let root = index_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        let samples = parse_index(&text)
            .map_err(|e| e.in_file(index_path))?
            .into_iter()
            .map(|(epoch, sample_id, rel)| {
                let path = root.join(&rel);
                let gradient = read_image_file(&path)?;
                Ok(GradientSample {
                    epoch,
                    sample_id,
                    path,
                    gradient,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(root, samples)
    }

    fn from_samples(root: PathBuf, mut samples: Vec<GradientSample>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::Validation("gradient set has no samples".into()))?;
        let (width, height) = first.gradient.dims();
        for s in &samples {
            if s.gradient.dims() != (width, height) {
                return Err(Error::Shape(format!(
                    "gradient `{}` at epoch {} is {}x{}, expected {width}x{height}",
                    s.sample_id,
                    s.epoch,
                    s.gradient.width(),
                    s.gradient.height()
                )));
            }
        }
        samples.sort_by(|a, b| (a.epoch, &a.sample_id).cmp(&(b.epoch, &b.sample_id)));
        if let Some(w) = samples
            .windows(2)
            .find(|w| (w[0].epoch, &w[0].sample_id) == (w[1].epoch, &w[1].sample_id))
        {
            return Err(Error::Validation(format!(
                "sample `{}` listed twice for epoch {}",
                w[0].sample_id, w[0].epoch
            )));
        }
        Ok(Self {
            root,
            samples,
            width,
            height,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn epochs(&self) -> Vec<u32> {
        self.samples
            .iter()
            .map(|s| s.epoch)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Samples of one epoch in ascending sample-id order.
    pub fn samples(&self, epoch: u32) -> impl Iterator<Item = &GradientSample> {
        self.samples.iter().filter(move |s| s.epoch == epoch)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn parse_index(text: &str) -> Result<Vec<(u32, String, String)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let line_err = |line: u64, message: String| Error::Format(FormatError::Line { line, message });
    let mut out = Vec::new();
    let mut header_seen = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            line_err(e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !header_seen {
            if record.iter().collect::<Vec<_>>() != INDEX_HEADER {
                return Err(line_err(line, "expected header `epoch,sample_id,path`".into()));
            }
            header_seen = true;
            continue;
        }
        if record.len() != 3 {
            return Err(line_err(line, format!("expected 3 fields, found {}", record.len())));
        }
        let epoch = record[0]
            .parse()
            .map_err(|_| line_err(line, format!("bad epoch `{}`", &record[0])))?;
        out.push((epoch, record[1].to_string(), record[2].to_string()));
    }
    if !header_seen {
        return Err(line_err(1, "missing header `epoch,sample_id,path`".into()));
    }
    Ok(out)
}

/// Mean unnormalized radial density of one epoch's gradients, accumulated
/// in ascending sample-id order.
pub fn average_gradient_density(
    set: &GradientSet,
    epoch: u32,
    options: SpectralOptions,
) -> Result<RadialDensity> {
    let samples: Vec<&GradientSample> = set.samples(epoch).collect();
    if samples.is_empty() {
        return Err(Error::NotFound(format!("epoch {epoch} is not in the gradient set")));
    }
    let densities: Vec<RadialDensity> = samples
        .par_iter()
        .map(|s| image_density(&s.gradient, options, false))
        .collect::<Result<_>>()?;
    RadialDensity::mean(&densities)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub width: usize,
    pub height: usize,
    pub windowed: bool,
    pub mode: DensityMode,
    /// `"global"`: one max over the whole matrix.
    pub normalization: &'static str,
}

/// Epoch-by-band matrix of averaged gradient densities scaled into `[0, 1]`
/// by the global maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityTrace {
    epochs: Vec<u32>,
    rows: Vec<Vec<f64>>,
    meta: TraceMeta,
}

impl PriorityTrace {
    /// Builds a trace from raw rows and normalizes it.
    pub fn from_rows(epochs: Vec<u32>, rows: Vec<Vec<f64>>, meta: TraceMeta) -> Result<Self> {
        if epochs.is_empty() || epochs.len() != rows.len() {
            return Err(Error::Validation(format!(
                "{} epochs for {} rows",
                epochs.len(),
                rows.len()
            )));
        }
        let bands = rows[0].len();
        if bands == 0 || rows.iter().any(|r| r.len() != bands) {
            return Err(Error::Shape("trace rows must share a nonzero band count".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "trace entries must be finite and non-negative".into(),
            ));
        }
        let max = rows.iter().flatten().copied().fold(0.0, f64::max);
        let rows = if max > 0.0 {
            rows.into_iter()
                .map(|r| r.into_iter().map(|v| v / max).collect())
                .collect()
        } else {
            rows
        };
        Ok(Self { epochs, rows, meta })
    }

    pub fn epochs(&self) -> &[u32] {
        &self.epochs
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn band_count(&self) -> usize {
        self.rows[0].len()
    }

    pub fn meta(&self) -> &TraceMeta {
        &self.meta
    }

    /// Strongest band of each row; lowest index wins ties.
    pub fn row_argmax(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| {
                let mut best = 0;
                for (i, &v) in r.iter().enumerate() {
                    if v > r[best] {
                        best = i;
                    }
                }
                best
            })
            .collect()
    }

    /// Header row `epoch,0,1,...`, then one row per epoch.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch");
        for b in 0..self.band_count() {
            out.push_str(&format!(",{b}"));
        }
        out.push('\n');
        for (e, row) in self.epochs.iter().zip(&self.rows) {
            out.push_str(&e.to_string());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn priority_trace(set: &GradientSet, options: SpectralOptions) -> Result<PriorityTrace> {
    let epochs = set.epochs();
    let rows = epochs
        .iter()
        .map(|&e| average_gradient_density(set, e, options).map(|d| d.bands().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let (width, height) = set.dims();
    debug_assert!(rows.iter().all(|r| r.len() == band_count(width, height)));
    PriorityTrace::from_rows(
        epochs,
        rows,
        TraceMeta {
            width,
            height,
            windowed: options.window,
            mode: options.mode,
            normalization: "global",
        },
    )
}

/// Cosine similarity of two densities after dropping band 0 and scaling each
/// to a unit maximum. Lies in `[0, 1]` for non-negative densities.
pub fn alignment_score(a: &RadialDensity, b: &RadialDensity) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "band counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let unit = |d: &RadialDensity, name: &str| -> Result<Vec<f64>> {
        let tail = &d.bands()[1.min(d.len())..];
        let max = tail.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return Err(Error::DegenerateInput(format!(
                "density `{name}` is zero outside DC"
            )));
        }
        Ok(tail.iter().map(|v| v / max).collect())
    };
    let ua = unit(a, "a")?;
    let ub = unit(b, "b")?;
    let dot: f64 = ua.iter().zip(&ub).map(|(x, y)| x * y).sum();
    let na = ua.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = ub.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}
