//! On-disk formats: sample manifests, the `.npy` array container and
//! grayscale rasters, all converging on [`ImageBuffer`].

pub mod density_csv;
pub mod manifest;
pub mod npy;
pub mod raster;

use std::fs;
use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::image::ImageBuffer;

pub use density_csv::{density_to_csv, parse_density_csv};
pub use manifest::{parse_manifest, DatasetManifest, SampleEntry, Split};
pub use npy::{ArrayHeader, Dtype};
pub use raster::BitDepth;

/// Decodes an array container, PGM or PNG payload, detected by magic bytes.
///
/// Integer samples are rescaled to `[0, 1]` by the dtype maximum; float
/// payloads keep their native scale. Three-channel arrays are reduced to
/// luma, with the channel axis taken from the last extent when it is 3,
/// otherwise the first.
pub fn read_array(bytes: &[u8]) -> Result<ImageBuffer> {
    if bytes.starts_with(npy::MAGIC) {
        let (header, values) = npy::decode(bytes)?;
        return array_to_image(&header, values);
    }
    if bytes.starts_with(b"P5") {
        return raster::decode_pgm(bytes);
    }
    if bytes.starts_with(raster::PNG_SIGNATURE) {
        return raster::decode_png(bytes);
    }
    Err(FormatError::BadMagic.into())
}

fn array_to_image(header: &ArrayHeader, mut values: Vec<f64>) -> Result<ImageBuffer> {
    if let Some(max) = header.dtype.integer_max() {
        for v in &mut values {
            *v /= max;
        }
    }
    match header.shape[..] {
        [n] => ImageBuffer::new(n, 1, values),
        [h, w] => ImageBuffer::new(w, h, values),
        [h, w, 3] => {
            let gray = values
                .chunks_exact(3)
                .map(|c| raster::luma(c[0], c[1], c[2]))
                .collect();
            ImageBuffer::new(w, h, gray)
        }
        [h, w, 1] => ImageBuffer::new(w, h, values),
        [3, h, w] => {
            let plane = h * w;
            let gray = (0..plane)
                .map(|i| raster::luma(values[i], values[plane + i], values[2 * plane + i]))
                .collect();
            ImageBuffer::new(w, h, gray)
        }
        [1, h, w] => ImageBuffer::new(w, h, values),
        _ => Err(FormatError::UnsupportedRaster(format!(
            "3D array of shape {:?} has no channel axis of extent 1 or 3",
            header.shape
        ))
        .into()),
    }
}

/// Encodes an image as a `(height, width)` array container.
///
/// Integer dtypes require values in `[0, 1]` and quantize round-half-up;
/// callers that want clamping apply [`ImageBuffer::clamped_unit`] first.
pub fn write_array(image: &ImageBuffer, dtype: Dtype) -> Result<Vec<u8>> {
    let header = ArrayHeader {
        dtype,
        shape: vec![image.height(), image.width()],
        row_major: true,
    };
    let values: Vec<f64> = match dtype.integer_max() {
        Some(max) => image
            .values()
            .iter()
            .map(|&v| raster::quantize_unit(v, max))
            .collect::<Result<_>>()?,
        None => {
            if dtype == Dtype::F32 {
                if let Some(v) = image
                    .values()
                    .iter()
                    .find(|v| !(**v as f32).is_finite())
                {
                    return Err(Error::InvalidInput(format!("{v} overflows float32")));
                }
            }
            image.values().to_vec()
        }
    };
    Ok(npy::encode(&header, &values))
}

/// Raw float64 container of arbitrary shape. Used for exports that are not images.
pub fn write_f64_array(shape: &[usize], values: &[f64]) -> Result<Vec<u8>> {
    let header = ArrayHeader {
        dtype: Dtype::F64,
        shape: shape.to_vec(),
        row_major: true,
    };
    if header.element_count() != values.len() || shape.is_empty() || shape.len() > 3 {
        return Err(Error::Shape(format!(
            "shape {shape:?} does not describe {} values",
            values.len()
        )));
    }
    Ok(npy::encode(&header, values))
}

pub fn read_image_file(path: &Path) -> Result<ImageBuffer> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_array(&bytes).map_err(|e| e.in_file(path))
}

/// Output encoding chosen from a file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Npy,
    Pgm,
    Png,
}

impl FileFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "npy" => Some(FileFormat::Npy),
            "pgm" => Some(FileFormat::Pgm),
            "png" => Some(FileFormat::Png),
            _ => None,
        }
    }
}

/// Writes an image in the format implied by `path`. `.npy` keeps float64
/// precision; raster formats clamp to `[0, 1]` and store 8-bit samples.
pub fn write_image_file(path: &Path, image: &ImageBuffer) -> Result<()> {
    let bytes = match FileFormat::from_path(path) {
        Some(FileFormat::Npy) => write_array(image, Dtype::F64)?,
        Some(FileFormat::Pgm) => raster::encode_pgm(&image.clamped_unit(), BitDepth::Eight)?,
        Some(FileFormat::Png) => raster::encode_png(&image.clamped_unit(), BitDepth::Eight)?,
        None => {
            return Err(Error::Validation(format!(
                "{}: unknown output extension (expected .npy, .pgm or .png)",
                path.display()
            )))
        }
    };
    write_bytes(path, &bytes)
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
