use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Component, Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{CommandName, RunConfig, ShortcutKind};
use crate::adcs::{adcs_map, class_mean_spectrum_with, ClassSpectrum};
use crate::error::{Error, FormatError, Result};
use crate::image::ImageBuffer;
use crate::io::{
    density_to_csv, parse_density_csv, parse_manifest, read_image_file, write_bytes,
    write_image_file, DatasetManifest, Split,
};
use crate::priority::{alignment_score, priority_trace, GradientSet, TraceMeta};
use crate::shortcuts::{
    plan_corruption, shortcut_density_with, CorruptionSpec, Shortcut, DEFAULT_PHOTON_SCALE,
};
use crate::spectral::{image_density, DensityMeta, DensityMode, RadialDensity};
use crate::svg::{render_density_svg, PlotData};
use crate::whitening::{whiten as whiten_image, WhiteningRecord};

#[derive(Serialize)]
struct DensitySidecar<'a> {
    meta: DensityMeta,
    samples: usize,
    sources: &'a [String],
}

#[derive(Serialize)]
struct TraceSidecar<'a> {
    meta: TraceMeta,
    epochs: &'a [u32],
    band_count: usize,
    samples: usize,
}

#[derive(Serialize)]
struct WhitenSidecar<'a> {
    source: &'a str,
    /// Spatial moments use the population variance.
    std_dev: &'static str,
    record: WhiteningRecord,
}

#[derive(Serialize)]
struct CompareReport<'a> {
    score: f64,
    bands: usize,
    a: &'a str,
    b: &'a str,
}

pub(super) fn psd(cfg: &RunConfig) -> Result<()> {
    let sources = gather_images(cfg)?;
    let options = cfg.spectral_options();
    let images = load_all(&sources)?;
    check_uniform(&images, &sources)?;
    let densities = images
        .par_iter()
        .map(|img| image_density(img, options, false))
        .collect::<Result<Vec<_>>>()?;
    let mut density = RadialDensity::mean(&densities)?;
    if cfg.normalize {
        density = density.normalized();
    }
    let table = density_to_csv(&density);

    let Some(out) = &cfg.out else {
        if cfg.svg {
            return Err(Error::Validation("--svg needs --out".into()));
        }
        print!("{table}");
        return Ok(());
    };
    let names: Vec<String> = sources.iter().map(|s| s.display().to_string()).collect();
    write_text(out, &table)?;
    write_json(
        &derived(out, ".json")?,
        &DensitySidecar {
            meta: *density.meta(),
            samples: images.len(),
            sources: &names,
        },
    )?;
    if cfg.svg {
        write_text(&derived(out, ".svg")?, &render_density_svg(PlotData::Density(&density))?)?;
    }
    write_config(&derived(out, ".run.json")?, cfg)
}

pub(super) fn adcs(cfg: &RunConfig) -> Result<()> {
    let manifest_path = require(&cfg.manifest, "--manifest")?;
    let target = require(&cfg.label, "--label")?;
    let out = require(&cfg.out, "--out")?;
    reject_svg(cfg)?;
    let (manifest, root) = load_manifest(manifest_path)?;

    let mut by_label: BTreeMap<&str, Vec<PathBuf>> = BTreeMap::new();
    for e in manifest.select(None, cfg.split) {
        by_label.entry(e.label.as_str()).or_default().push(root.join(&e.path));
    }
    if !by_label.contains_key(target.as_str()) {
        return Err(Error::EmptyClass(target.clone()));
    }
    let mut target_spectrum = None;
    let mut others: Vec<ClassSpectrum> = Vec::new();
    for label in manifest.labels() {
        let Some(paths) = by_label.get(label) else {
            continue;
        };
        let images = load_all(paths)?;
        let spectrum = class_mean_spectrum_with(&images, label, cfg.window)?;
        if label == target {
            target_spectrum = Some(spectrum);
        } else {
            others.push(spectrum);
        }
    }
    let target_spectrum = target_spectrum.expect("target class present");
    let map = adcs_map(&target_spectrum, &others)?;
    write_bytes(out, &map.to_npy()?)?;
    write_json(&derived(out, ".json")?, &map.sidecar())?;
    write_config(&derived(out, ".run.json")?, cfg)
}

pub(super) fn whiten(cfg: &RunConfig) -> Result<()> {
    reject_svg(cfg)?;
    let (sources, relative) = if let Some(m) = &cfg.manifest {
        if !cfg.inputs.is_empty() {
            return Err(Error::Validation("give --input or --manifest, not both".into()));
        }
        let (manifest, root) = load_manifest(m)?;
        let picked: Vec<_> = manifest.select(cfg.label.as_deref(), cfg.split).collect();
        if picked.is_empty() {
            return Err(Error::Validation("manifest selection is empty".into()));
        }
        let rel: Vec<PathBuf> = picked
            .iter()
            .map(|e| mirrored(&e.path))
            .collect::<Result<_>>()?;
        (picked.iter().map(|e| root.join(&e.path)).collect::<Vec<_>>(), rel)
    } else {
        let sources = gather_images(cfg)?;
        let rel = sources
            .iter()
            .map(|p| PathBuf::from(p.file_name().unwrap_or_default()))
            .collect();
        (sources, rel)
    };

    let mut seen = HashSet::new();
    let mut jobs = Vec::new();
    for (src, rel) in sources.iter().zip(&relative) {
        let base = match &cfg.out {
            Some(dir) => dir.join(rel),
            None => src.clone(),
        };
        let stem = base
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Validation(format!("{}: no file name", src.display())))?;
        let dst = base.with_file_name(format!("{stem}.whitened.npy"));
        let record = base.with_file_name(format!("{stem}.whitened.json"));
        if !seen.insert(dst.clone()) {
            return Err(Error::Validation(format!(
                "two inputs would both write {}",
                dst.display()
            )));
        }
        jobs.push((src, dst, record));
    }

    let results = jobs
        .par_iter()
        .map(|(src, _, _)| {
            let image = read_image_file(src)?;
            whiten_image(&image).map_err(|e| e.in_file(src.as_path()))
        })
        .collect::<Result<Vec<_>>>()?;
    for ((src, dst, record_path), (image, record)) in jobs.iter().zip(results) {
        write_image_file(dst, &image)?;
        write_json(
            record_path,
            &WhitenSidecar {
                source: &src.display().to_string(),
                std_dev: "population",
                record,
            },
        )?;
    }

    let config_dir = match (&cfg.out, &cfg.manifest) {
        (Some(dir), _) => dir.clone(),
        (None, Some(m)) => parent_dir(m),
        (None, None) => parent_dir(&sources[0]),
    };
    write_config(&config_dir.join("whiten.run.json"), cfg)
}

pub(super) fn corrupt(cfg: &RunConfig) -> Result<()> {
    let manifest_path = require(&cfg.manifest, "--manifest")?;
    let spec = resolve_spec(cfg)?;
    let split = cfg.split.unwrap_or(Split::Train);
    let (manifest, root) = load_manifest(manifest_path)?;
    let out = cfg.out.clone().unwrap_or_else(|| root.join("corrupted"));
    let plan = plan_corruption(&manifest, &spec, split)?;

    let marked: Vec<_> = plan.marked().collect();
    let targets = marked
        .iter()
        .map(|e| mirrored(&e.path).map(|rel| (e, out.join(rel))))
        .collect::<Result<Vec<_>>>()?;
    let pairs = targets
        .par_iter()
        .map(|(e, _)| {
            let src = root.join(&e.path);
            let clean = read_image_file(&src)?;
            let dirty = spec.corrupt(&clean, &e.path).map_err(|err| err.in_file(&src))?;
            Ok((clean, dirty))
        })
        .collect::<Result<Vec<_>>>()?;
    for ((_, dst), (_, dirty)) in targets.iter().zip(&pairs) {
        write_image_file(dst, dirty)?;
    }

    write_text(&out.join("plan.csv"), &plan.to_csv())?;
    write_json(&out.join("spec.json"), &spec)?;
    if !pairs.is_empty() {
        let (clean, dirty): (Vec<ImageBuffer>, Vec<ImageBuffer>) = pairs.into_iter().unzip();
        let density = shortcut_density_with(&clean, &dirty, cfg.spectral_options())?;
        write_text(&out.join("shortcut_density.csv"), &density_to_csv(&density))?;
        if cfg.svg {
            write_text(
                &out.join("shortcut_density.svg"),
                &render_density_svg(PlotData::Density(&density))?,
            )?;
        }
    }
    log::info!(
        "marked {} of {} `{}` samples in {split}",
        plan.marked_count(),
        manifest.select(Some(&spec.target_label), Some(split)).count(),
        spec.target_label
    );

    let mut effective = cfg.clone();
    effective.spec = None;
    effective.split = Some(split);
    effective.out = Some(out.clone());
    effective.label = Some(spec.target_label.clone());
    effective.fraction = Some(spec.fraction);
    effective.seed = Some(spec.seed);
    match spec.shortcut {
        Shortcut::Lowpass { size } => {
            effective.kind = Some(ShortcutKind::Lowpass);
            effective.size = Some(size);
            effective.photon_scale = None;
        }
        Shortcut::Photon { photon_scale } => {
            effective.kind = Some(ShortcutKind::Photon);
            effective.size = None;
            effective.photon_scale = Some(photon_scale);
        }
    }
    write_config(&out.join("run_config.json"), &effective)
}

pub(super) fn priority(cfg: &RunConfig) -> Result<()> {
    let index = match cfg.inputs.as_slice() {
        [one] => one,
        _ => {
            return Err(Error::Validation(
                "priority takes exactly one --input index CSV".into(),
            ))
        }
    };
    let set = GradientSet::load(index)?;
    let trace = priority_trace(&set, cfg.spectral_options())?;
    let table = trace.to_csv();
    let Some(out) = &cfg.out else {
        if cfg.svg {
            return Err(Error::Validation("--svg needs --out".into()));
        }
        print!("{table}");
        return Ok(());
    };
    write_text(out, &table)?;
    write_json(
        &derived(out, ".json")?,
        &TraceSidecar {
            meta: *trace.meta(),
            epochs: trace.epochs(),
            band_count: trace.band_count(),
            samples: set.len(),
        },
    )?;
    if cfg.svg {
        write_text(&derived(out, ".svg")?, &render_density_svg(PlotData::Trace(&trace))?)?;
    }
    write_config(&derived(out, ".run.json")?, cfg)
}

pub(super) fn compare(cfg: &RunConfig) -> Result<()> {
    let [pa, pb] = cfg.inputs.as_slice() else {
        return Err(Error::Validation(
            "compare takes exactly two --input density tables".into(),
        ));
    };
    let a = load_density(pa)?;
    let b = load_density(pb)?;
    let score = alignment_score(&a, &b)?;
    println!("{score:?}");

    let Some(out) = &cfg.out else {
        if cfg.svg {
            return Err(Error::Validation("--svg needs --out".into()));
        }
        return Ok(());
    };
    let (na, nb) = (pa.display().to_string(), pb.display().to_string());
    write_json(
        out,
        &CompareReport {
            score,
            bands: a.len(),
            a: &na,
            b: &nb,
        },
    )?;
    if cfg.svg {
        let la = label_of(pa);
        let lb = label_of(pb);
        let series = [(la.as_str(), &a), (lb.as_str(), &b)];
        write_text(&derived(out, ".svg")?, &render_density_svg(PlotData::Overlay(&series))?)?;
    }
    write_config(&derived(out, ".run.json")?, cfg)
}

fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| Error::Validation(format!("missing required {flag}")))
}

fn reject_svg(cfg: &RunConfig) -> Result<()> {
    if cfg.svg {
        let name = serde_json::to_string(&cfg.subcommand).unwrap_or_default();
        return Err(Error::Validation(format!("--svg is not available for {name}")));
    }
    Ok(())
}

fn resolve_spec(cfg: &RunConfig) -> Result<CorruptionSpec> {
    let spec = if let Some(path) = &cfg.spec {
        let inline = cfg.kind.is_some()
            || cfg.size.is_some()
            || cfg.photon_scale.is_some()
            || cfg.fraction.is_some()
            || cfg.label.is_some()
            || cfg.seed.is_some();
        if inline {
            return Err(Error::Validation(
                "--spec replaces --kind/--size/--photon-scale/--fraction/--label/--seed".into(),
            ));
        }
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str::<CorruptionSpec>(&text)
            .map_err(|e| Error::Format(FormatError::Json(e.to_string())).in_file(path))?
    } else {
        let kind = require(&cfg.kind, "--kind")?;
        let shortcut = match kind {
            ShortcutKind::Lowpass => {
                if cfg.photon_scale.is_some() {
                    return Err(Error::Validation("--photon-scale applies to photon noise".into()));
                }
                Shortcut::Lowpass {
                    size: *require(&cfg.size, "--size")?,
                }
            }
            ShortcutKind::Photon => {
                if cfg.size.is_some() {
                    return Err(Error::Validation("--size applies to the low-pass shortcut".into()));
                }
                Shortcut::Photon {
                    photon_scale: cfg.photon_scale.unwrap_or(DEFAULT_PHOTON_SCALE),
                }
            }
        };
        CorruptionSpec {
            shortcut,
            fraction: *require(&cfg.fraction, "--fraction")?,
            target_label: require(&cfg.label, "--label")?.clone(),
            seed: cfg.seed.unwrap_or(0),
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn load_manifest(path: &Path) -> Result<(DatasetManifest, PathBuf)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest = parse_manifest(&text).map_err(|e| e.in_file(path))?;
    Ok((manifest, parent_dir(path)))
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// `--input` paths, or the manifest entries matching `--label` / `--split`.
fn gather_images(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    match (&cfg.manifest, cfg.inputs.is_empty()) {
        (Some(_), false) => Err(Error::Validation(
            "give --input or --manifest, not both".into(),
        )),
        (None, true) => Err(Error::Validation("missing --input or --manifest".into())),
        (None, false) => Ok(cfg.inputs.clone()),
        (Some(m), true) => {
            let (manifest, root) = load_manifest(m)?;
            let picked: Vec<PathBuf> = manifest
                .select(cfg.label.as_deref(), cfg.split)
                .map(|e| root.join(&e.path))
                .collect();
            if picked.is_empty() {
                return Err(Error::Validation("manifest selection is empty".into()));
            }
            Ok(picked)
        }
    }
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<ImageBuffer>> {
    paths.par_iter().map(|p| read_image_file(p)).collect()
}

fn check_uniform(images: &[ImageBuffer], paths: &[PathBuf]) -> Result<()> {
    let dims = images[0].dims();
    for (img, p) in images.iter().zip(paths) {
        if img.dims() != dims {
            return Err(Error::Shape(format!(
                "{} is {}x{}, expected {}x{}",
                p.display(),
                img.width(),
                img.height(),
                dims.0,
                dims.1
            )));
        }
    }
    Ok(())
}

/// A manifest path that can be re-rooted under an output directory.
fn mirrored(path: &str) -> Result<PathBuf> {
    let p = Path::new(path);
    if p.components().all(|c| matches!(c, Component::Normal(_) | Component::CurDir)) {
        Ok(p.to_path_buf())
    } else {
        Err(Error::Validation(format!(
            "sample path `{path}` must be relative and stay inside the manifest directory"
        )))
    }
}

fn load_density(path: &Path) -> Result<RadialDensity> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bands = parse_density_csv(&text).map_err(|e| e.in_file(path))?;
    let side = 2 * (bands.len() - 1).max(1);
    let meta = DensityMeta {
        width: side,
        height: side,
        normalized: false,
        windowed: false,
        mode: DensityMode::Amplitude,
    };
    RadialDensity::from_bands(bands, meta).map_err(|e| e.in_file(path))
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Sibling of `out` sharing its stem: `d.csv` + `.svg` -> `d.svg`.
fn derived(out: &Path, suffix: &str) -> Result<PathBuf> {
    let stem = out
        .file_stem()
        .ok_or_else(|| Error::Validation(format!("{}: no file name", out.display())))?;
    let path = out.with_file_name(format!("{}{suffix}", stem.to_string_lossy()));
    if path == out {
        return Err(Error::Validation(format!(
            "{}: output name collides with its {suffix} companion",
            out.display()
        )));
    }
    Ok(path)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_bytes(path, text.as_bytes())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    write_text(path, &text)
}

fn write_config(path: &Path, cfg: &RunConfig) -> Result<()> {
    debug_assert!(cfg.subcommand != CommandName::Corrupt || cfg.spec.is_none());
    write_text(path, &cfg.to_json())
}
