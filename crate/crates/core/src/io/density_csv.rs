//! Two-column `band,value` tables for radial densities.

use crate::error::{Error, FormatError, Result};
use crate::spectral::RadialDensity;

pub const DENSITY_HEADER: [&str; 2] = ["band", "value"];

/// Shortest round-trip formatting, so a parsed table reproduces the bands bitwise.
pub fn density_to_csv(density: &RadialDensity) -> String {
    let mut out = String::from("band,value\n");
    for (i, v) in density.bands().iter().enumerate() {
        out.push_str(&format!("{i},{v:?}\n"));
    }
    out
}

/// Reads a table written by [`density_to_csv`]. Bands must be listed in
/// order starting at 0.
pub fn parse_density_csv(text: &str) -> Result<Vec<f64>> {
    let line_err = |line: u64, message: String| Error::Format(FormatError::Line { line, message });
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| line_err(1, e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != DENSITY_HEADER {
        return Err(line_err(
            1,
            format!("expected header `band,value`, found `{}`", header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut bands = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            line_err(e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let band: usize = record[0]
            .parse()
            .map_err(|_| line_err(line, format!("bad band index `{}`", &record[0])))?;
        if band != bands.len() {
            return Err(line_err(
                line,
                format!("expected band {}, found {band}", bands.len()),
            ));
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| line_err(line, format!("bad value `{}`", &record[1])))?;
        bands.push(value);
    }
    if bands.is_empty() {
        return Err(line_err(1, "table has no bands".into()));
    }
    Ok(bands)
}
