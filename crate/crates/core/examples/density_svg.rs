//! SVG plots of a density, two overlaid densities and a priority trace.
//!
//! cargo run --example density_svg -- [output dir]

use std::fs;
use std::path::PathBuf;

use spectool::priority::{priority_trace, GradientSet};
use spectool::spectral::{image_density, SpectralOptions};
use spectool::svg::{render_density_svg, PlotData};
use spectool::synthetic::{power_law_field, sinusoid, white_noise};

fn main() -> spectool::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("spectool-svg"));
    fs::create_dir_all(&dir).expect("output dir");

    let natural = image_density(&power_law_field(64, 64, 1.0, 1)?, SpectralOptions::default(), true)?;
    let noise = image_density(&white_noise(64, 64, 1)?, SpectralOptions::default(), true)?;
    let plots = [
        ("density.svg", render_density_svg(PlotData::Density(&natural))?),
        (
            "overlay.svg",
            render_density_svg(PlotData::Overlay(&[("1/f", &natural), ("white", &noise)]))?,
        ),
    ];

    let items = (1..=12u32)
        .map(|e| Ok((e, "g".to_string(), sinusoid(32, 32, e as f64, 0.0, 0.0)?)))
        .collect::<spectool::Result<Vec<_>>>()?;
    let trace = priority_trace(&GradientSet::from_images(items)?, SpectralOptions::default())?;
    let trace_svg = render_density_svg(PlotData::Trace(&trace))?;

    for (name, svg) in plots.iter().chain([&("trace.svg", trace_svg)]) {
        let path = dir.join(name);
        fs::write(&path, svg).expect("write svg");
        println!("wrote {} ({} bytes)", path.display(), svg.len());
    }
    Ok(())
}
