//! Grayscale raster codecs: binary PGM (P5) and PNG.

use std::io::Cursor;

use crate::error::{Error, FormatError, Result};
use crate::image::ImageBuffer;

pub const PNG_SIGNATURE: &[u8; 8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    fn max(self) -> f64 {
        match self {
            BitDepth::Eight => 255.0,
            BitDepth::Sixteen => 65535.0,
        }
    }
}

/// BT.709 luma. Exactly-gray pixels pass through untouched.
pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    if r == g && g == b {
        r
    } else {
        0.2126 * r + 0.7152 * g + 0.0722 * b
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<ImageBuffer> {
    let bad = |m: &str| Error::from(FormatError::UnsupportedRaster(format!("PGM: {m}")));
    if !bytes.starts_with(b"P5") {
        return Err(FormatError::BadMagic.into());
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("malformed header"))?;
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("missing separator after maxval"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    let depth = match maxval {
        255 => BitDepth::Eight,
        65535 => BitDepth::Sixteen,
        other => return Err(bad(&format!("maxval {other} (only 255 and 65535)"))),
    };
    let sample = if depth == BitDepth::Eight { 1 } else { 2 };
    let expected = width * height * sample;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(FormatError::Truncated {
            expected,
            found: payload.len(),
        }
        .into());
    }
    if payload.len() > expected {
        return Err(FormatError::TrailingBytes {
            extra: payload.len() - expected,
        }
        .into());
    }
    let values = match depth {
        BitDepth::Eight => payload.iter().map(|&v| v as f64 / depth.max()).collect(),
        BitDepth::Sixteen => payload
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / depth.max())
            .collect(),
    };
    ImageBuffer::new(width, height, values)
}

pub fn encode_pgm(image: &ImageBuffer, depth: BitDepth) -> Result<Vec<u8>> {
    let samples = quantize(image, depth)?;
    let mut out = format!(
        "P5\n{} {}\n{}\n",
        image.width(),
        image.height(),
        depth.max() as u32
    )
    .into_bytes();
    for q in samples {
        match depth {
            BitDepth::Eight => out.push(q as u8),
            BitDepth::Sixteen => out.extend_from_slice(&q.to_be_bytes()),
        }
    }
    Ok(out)
}

pub fn decode_png(bytes: &[u8]) -> Result<ImageBuffer> {
    let png_err = |e: png::DecodingError| FormatError::UnsupportedRaster(format!("PNG: {e}"));
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(png_err)?;
    let (color, depth) = reader.output_color_type();
    let mut buf = vec![
        0u8;
        reader
            .output_buffer_size()
            .ok_or_else(|| FormatError::UnsupportedRaster("PNG: image too large".into()))?
    ];
    let frame = reader.next_frame(&mut buf).map_err(png_err)?;
    let data = &buf[..frame.buffer_size()];
    let (width, height) = (frame.width as usize, frame.height as usize);

    let values: Vec<f64> = match (color, depth) {
        (png::ColorType::Grayscale, png::BitDepth::Eight) => {
            data.iter().map(|&v| v as f64 / 255.0).collect()
        }
        (png::ColorType::Grayscale, png::BitDepth::Sixteen) => data
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / 65535.0)
            .collect(),
        (png::ColorType::Rgb, png::BitDepth::Eight) => data
            .chunks_exact(3)
            .map(|c| {
                luma(
                    c[0] as f64 / 255.0,
                    c[1] as f64 / 255.0,
                    c[2] as f64 / 255.0,
                )
            })
            .collect(),
        (c, d) => {
            return Err(FormatError::UnsupportedRaster(format!(
                "PNG color type {c:?} at depth {d:?} (8/16-bit gray or 8-bit RGB only)"
            ))
            .into())
        }
    };
    ImageBuffer::new(width, height, values)
}

pub fn encode_png(image: &ImageBuffer, depth: BitDepth) -> Result<Vec<u8>> {
    let samples = quantize(image, depth)?;
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, image.width() as u32, image.height() as u32);
        encoder.set_color(png::ColorType::Grayscale);
        let data: Vec<u8> = match depth {
            BitDepth::Eight => {
                encoder.set_depth(png::BitDepth::Eight);
                samples.iter().map(|&q| q as u8).collect()
            }
            BitDepth::Sixteen => {
                encoder.set_depth(png::BitDepth::Sixteen);
                samples.iter().flat_map(|q| q.to_be_bytes()).collect()
            }
        };
        let enc_err =
            |e: png::EncodingError| Error::InvalidInput(format!("PNG encoding failed: {e}"));
        let mut writer = encoder.write_header().map_err(enc_err)?;
        writer.write_image_data(&data).map_err(enc_err)?;
    }
    Ok(out)
}

/// Round-half-up quantization of `[0, 1]` values onto `0..=max`.
pub(crate) fn quantize_unit(value: f64, max: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidInput(format!(
            "value {value} outside [0, 1] cannot be stored as an integer sample"
        )));
    }
    Ok((value * max + 0.5).floor())
}

fn quantize(image: &ImageBuffer, depth: BitDepth) -> Result<Vec<u16>> {
    image
        .values()
        .iter()
        .map(|&v| quantize_unit(v, depth.max()).map(|q| q as u16))
        .collect()
}
