//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! `[PASS]` / `[FAIL]` line per criterion.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use spectool::adcs::{adcs_all, adcs_map, class_mean_spectrum, ClassSpectrum};
use spectool::io::{parse_density_csv, write_image_file, DatasetManifest, SampleEntry, Split};
use spectool::priority::{alignment_score, average_gradient_density, priority_trace, GradientSet};
use spectool::shortcuts::rng::CounterRng;
use spectool::shortcuts::{
    lowpass_corrupt, lowpass_cutoff, photon_noise_corrupt, plan_corruption, shortcut_density,
    CorruptionSpec, Shortcut,
};
use spectool::spectral::{
    forward_spectrum, inverse_image, radial_density, Complex64, SpectralOptions, SpectrumMap,
};
use spectool::synthetic::{band_limited_noise, gaussian_noise, power_law_field, sinusoid};
use spectool::whitening::{flatten_amplitude, whiten, MomentPair};
use spectool::ImageBuffer;

type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "spectral correctness suite", limit: Duration::from_secs(5), run: spectral_suite },
        Criterion { id: 2, name: "radial-binning oracle", limit: Duration::from_secs(5), run: binning_oracle },
        Criterion { id: 3, name: "ADCS suite", limit: Duration::from_secs(5), run: adcs_suite },
        Criterion { id: 4, name: "whitening suite", limit: Duration::from_secs(10), run: whitening_suite },
        Criterion { id: 5, name: "low-pass shortcut density peaks", limit: Duration::from_secs(30), run: lowpass_peaks },
        Criterion { id: 6, name: "photon-noise statistics", limit: Duration::from_secs(5), run: photon_stats },
        Criterion { id: 7, name: "corruption-plan protocol", limit: Duration::from_secs(2), run: plan_protocol },
        Criterion { id: 8, name: "priority-trace band ridge", limit: Duration::from_secs(5), run: trace_ridge },
        Criterion { id: 9, name: "alignment ordering", limit: Duration::from_secs(5), run: alignment_ordering },
        Criterion { id: 10, name: "CLI golden run", limit: Duration::from_secs(10), run: cli_golden },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if elapsed <= c.limit {
                Ok(())
            } else {
                Err(format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), c.limit.as_secs()))
            }
        });
        match outcome {
            Ok(()) => println!("[PASS] {} {} ({:.2} s)", c.id, c.name, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} {} ({:.2} s): {why}", c.id, c.name, elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn spectral_suite() -> Check {
    let mut rng = CounterRng::new(1, 0xACC, 1);
    for case in 0..200u64 {
        let w = 1 + rng.below(32);
        let h = 1 + rng.below(32);
        let x = random_image(w, h, 10_000 + case);
        let y = random_image(w, h, 20_000 + case);
        let fx = forward_spectrum(&x, false).map_err(|e| e.to_string())?;

        let lhs = fx.total_energy();
        let rhs = (w * h) as f64 * x.values().iter().map(|v| v * v).sum::<f64>();
        ensure!((lhs - rhs).abs() <= 1e-9 * rhs, "Parseval off on {w}x{h}: {lhs} vs {rhs}");

        let back = inverse_image(&fx).map_err(|e| e.to_string())?;
        let err = max_abs_diff(x.values(), back.values());
        ensure!(err < 1e-9, "round trip off by {err} on {w}x{h}");

        let max = fx.amplitudes().into_iter().fold(0.0, f64::max);
        for row in 0..h {
            for col in 0..w {
                let (dv, du) = fx.offset(row, col);
                let (pr, pc) = ((h / 2) as isize - dv, (w / 2) as isize - du);
                if pr < 0 || pc < 0 || pr >= h as isize || pc >= w as isize {
                    continue;
                }
                let d = (fx.amplitude(row, col) - fx.amplitude(pr as usize, pc as usize)).abs();
                ensure!(d <= 1e-12 * max, "amplitude asymmetry {d} at ({dv},{du}) on {w}x{h}");
            }
        }

        let (a, b) = (2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0);
        let combo = ImageBuffer::new(
            w,
            h,
            x.values().iter().zip(y.values()).map(|(p, q)| a * p + b * q).collect(),
        )
        .map_err(|e| e.to_string())?;
        let fc = forward_spectrum(&combo, false).map_err(|e| e.to_string())?;
        let fy = forward_spectrum(&y, false).map_err(|e| e.to_string())?;
        for ((c, p), q) in fc.bins().iter().zip(fx.bins()).zip(fy.bins()) {
            let e = (*c - (*p * a + *q * b)).norm();
            ensure!(e < 1e-9, "linearity off by {e} on {w}x{h}");
        }

        for (bin, o) in fx.bins().iter().zip(dft_oracle(&x)) {
            let e = (bin.re - o.0).abs().max((bin.im - o.1).abs());
            ensure!(e < 1e-9, "transform differs from direct DFT by {e} on {w}x{h}");
        }
    }
    Ok(())
}

fn binning_oracle() -> Check {
    let mut rng = CounterRng::new(2, 0xACC, 2);
    for _ in 0..500 {
        let w = 4 + rng.below(13);
        let h = 4 + rng.below(13);
        let bins: Vec<Complex64> = (0..w * h)
            .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()))
            .collect();
        let s = SpectrumMap::from_bins(w, h, bins, false).map_err(|e| e.to_string())?;
        let expected = bucket_oracle(&s.amplitudes(), w, h);
        let got = radial_density(&s, false);
        ensure!(got.bands() == expected.as_slice(), "{w}x{h}: {:?} vs {expected:?}", got.bands());
    }
    Ok(())
}

fn class_spectra(classes: usize, w: usize, rng: &mut CounterRng, seed: u64) -> Vec<ClassSpectrum> {
    (0..classes)
        .map(|c| {
            let n = 1 + rng.below(4);
            let imgs: Vec<ImageBuffer> =
                (0..n).map(|i| random_image(w, w, seed + (c * 10 + i) as u64)).collect();
            class_mean_spectrum(&imgs, &format!("class{c}")).unwrap()
        })
        .collect()
}

fn adcs_suite() -> Check {
    let mut rng = CounterRng::new(3, 0xACC, 3);
    for set in 0..40u64 {
        let w = 4 + rng.below(9);
        let maps = adcs_all(&class_spectra(5, w, &mut rng, set * 1000)).map_err(|e| e.to_string())?;
        for m in &maps {
            ensure!(m.values().iter().all(|&v| (-4..=4).contains(&v)), "5-class value out of [-4, 4]");
        }
    }
    for set in 0..40u64 {
        let w = 2 + rng.below(11);
        let maps = adcs_all(&class_spectra(2, w, &mut rng, 500_000 + set * 1000)).map_err(|e| e.to_string())?;
        ensure!(
            maps[0].values().iter().zip(maps[1].values()).all(|(a, b)| a + b == 0),
            "two-class maps not antisymmetric"
        );
    }
    for trial in 0..10u64 {
        let imgs: Vec<Vec<ImageBuffer>> = (0..3)
            .map(|c| (0..3).map(|i| random_image(8, 8, 900_000 + trial * 100 + c * 10 + i)).collect())
            .collect();
        // class means from the direct DFT
        let means: Vec<Vec<f64>> = imgs
            .iter()
            .map(|set| {
                let mut acc = vec![0.0; 64];
                for img in set {
                    for (a, b) in acc.iter_mut().zip(dft_oracle(img)) {
                        *a += magnitude(b);
                    }
                }
                acc.into_iter().map(|v| v / set.len() as f64).collect()
            })
            .collect();
        let spectra: Vec<ClassSpectrum> = imgs
            .iter()
            .enumerate()
            .map(|(i, set)| class_mean_spectrum(set, &format!("c{i}")).unwrap())
            .collect();
        for (s, m) in spectra.iter().zip(&means) {
            let e = max_abs_diff(s.mean_amplitude(), m);
            ensure!(e < 1e-9, "class mean differs from direct DFT by {e}");
        }
        for t in 0..3 {
            let others: Vec<ClassSpectrum> =
                (0..3).filter(|&j| j != t).map(|j| spectra[j].clone()).collect();
            let map = adcs_map(&spectra[t], &others).map_err(|e| e.to_string())?;
            let refs: Vec<&[f64]> = (0..3).filter(|&j| j != t).map(|j| means[j].as_slice()).collect();
            let expected = adcs_oracle(&means[t], &refs);
            ensure!(map.values() == expected.as_slice(), "3-class map differs from triple loop");
        }
    }
    Ok(())
}

/// max/min of bands 1..B-1 of an image's density.
fn band_ratio(img: &ImageBuffer) -> f64 {
    let d = radial_density(&forward_spectrum(img, false).unwrap(), false);
    let tail = &d.bands()[1..];
    let max = tail.iter().copied().fold(0.0, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

fn whitening_suite() -> Check {
    let mut rng = CounterRng::new(4, 0xACC, 4);
    for case in 0..40u64 {
        let w = 2 + rng.below(31);
        let h = 2 + rng.below(31);
        let x = random_image(w, h, 40_000 + case);
        let (flat, _) = flatten_amplitude(&x).map_err(|e| e.to_string())?;
        let s = forward_spectrum(&flat, false).map_err(|e| e.to_string())?;
        let c = s.center();
        let amps: Vec<f64> = (0..h)
            .flat_map(|r| (0..w).map(move |col| (r, col)))
            .filter(|&rc| rc != c)
            .map(|(r, col)| s.amplitude(r, col))
            .collect();
        let mean = amps.iter().sum::<f64>() / amps.len() as f64;
        let sd = (amps.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / amps.len() as f64).sqrt();
        ensure!(sd / mean < 1e-6, "phase-only amplitude CV {} on {w}x{h}", sd / mean);

        let (out, _) = whiten(&x).map_err(|e| e.to_string())?;
        let (a, b) = (MomentPair::of(&x), MomentPair::of(&out));
        ensure!((a.mean - b.mean).abs() <= 1e-9 * a.mean.abs(), "mean not restored on {w}x{h}");
        ensure!(
            (a.std_dev() - b.std_dev()).abs() <= 1e-9 * a.std_dev(),
            "std-dev not restored on {w}x{h}"
        );
        let (again, _) = whiten(&out).map_err(|e| e.to_string())?;
        let e = max_abs_diff(out.values(), again.values());
        ensure!(e < 1e-6, "whitening not idempotent: {e}");
    }
    for seed in 0..3 {
        let field = power_law_field(224, 224, 1.0, seed).map_err(|e| e.to_string())?;
        let before = band_ratio(&field);
        let (out, _) = whiten(&field).map_err(|e| e.to_string())?;
        let after = band_ratio(&out);
        ensure!(before > 50.0, "1/f field band ratio only {before}");
        ensure!(after < 1.5, "whitened band ratio still {after}");
    }
    Ok(())
}

fn lowpass_peaks() -> Check {
    let clean: Vec<ImageBuffer> = (0..4)
        .map(|s| power_law_field(224, 224, 1.0, 50 + s).unwrap())
        .collect();
    for (size, floor) in [(0.3, 33), (0.4, 44), (0.5, 56)] {
        let dirty: Vec<ImageBuffer> = clean
            .iter()
            .map(|c| lowpass_corrupt(c, size))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let d = shortcut_density(&clean, &dirty).map_err(|e| e.to_string())?;
        let peak = d.argmax();
        ensure!(
            peak > floor && peak as f64 > lowpass_cutoff(224, size) && (34..=70).contains(&peak),
            "size {size}: peak band {peak}"
        );
    }
    Ok(())
}

fn photon_stats() -> Check {
    let img = ImageBuffer::filled(256, 256, 0.5).map_err(|e| e.to_string())?;
    let out = photon_noise_corrupt(&img, 100.0, 2024).map_err(|e| e.to_string())?;
    let n = out.len() as f64;
    let mean = out.values().iter().sum::<f64>() / n;
    let var = out.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    ensure!((mean - 0.5).abs() <= 0.01, "mean {mean}");
    ensure!((var - 0.005).abs() <= 0.2 * 0.005, "variance {var}");
    let again = photon_noise_corrupt(&img, 100.0, 2024).map_err(|e| e.to_string())?;
    ensure!(
        again.values().iter().zip(out.values()).all(|(a, b)| a.to_bits() == b.to_bits()),
        "repeat differs"
    );
    Ok(())
}

fn plan_protocol() -> Check {
    let mut entries = Vec::new();
    let mut add = |label: &str, split: Split, n: usize| {
        for i in 0..n {
            entries.push(SampleEntry {
                path: format!("{}/{label}_{i:02}.png", split.as_str()),
                label: label.into(),
                split,
            });
        }
    };
    add("pos", Split::Train, 20);
    add("neg", Split::Train, 10);
    add("pos", Split::TestOod, 5);
    add("neg", Split::TestOod, 5);
    let manifest = DatasetManifest::new(entries).map_err(|e| e.to_string())?;
    ensure!(manifest.len() == 40, "manifest has {} samples", manifest.len());

    let spec = |fraction: f64, label: &str| CorruptionSpec {
        shortcut: Shortcut::Lowpass { size: 0.4 },
        fraction,
        target_label: label.into(),
        seed: 17,
    };
    for (p, want) in [(0.0, 0), (0.25, 5), (0.5, 10), (1.0, 20)] {
        let plan = plan_corruption(&manifest, &spec(p, "pos"), Split::Train).map_err(|e| e.to_string())?;
        ensure!(plan.marked_count() == want, "p = {p}: {} marked", plan.marked_count());
        ensure!(
            plan.marked().all(|e| e.label == "pos" && e.path.starts_with("train/")),
            "p = {p}: non-target sample marked"
        );
        let again = plan_corruption(&manifest, &spec(p, "pos"), Split::Train).map_err(|e| e.to_string())?;
        ensure!(again.to_csv() == plan.to_csv(), "p = {p}: re-run differs");
    }
    let ood = plan_corruption(&manifest, &spec(1.0, "neg"), Split::TestOod).map_err(|e| e.to_string())?;
    ensure!(ood.marked_count() == 5, "OOD marked {}", ood.marked_count());
    ensure!(ood.entries.iter().all(|e| e.corrupted == (e.label == "neg")), "OOD plan marks positives");
    Ok(())
}

fn trace_ridge() -> Check {
    let mut rng = CounterRng::new(8, 0xACC, 8);
    let planted: Vec<usize> = (0..10).map(|e| 2 + e).collect();
    let mut items = Vec::new();
    for (epoch, &band) in planted.iter().enumerate() {
        for s in 0..4 {
            let amp = 0.5 + 1.5 * rng.next_f64();
            let phase = 6.28 * rng.next_f64();
            let (cx, cy) = if s % 2 == 0 { (band as f64, 0.0) } else { (0.0, band as f64) };
            let wave = sinusoid(32, 32, cx, cy, phase).map_err(|e| e.to_string())?;
            let noise = gaussian_noise(32, 32, (epoch * 10 + s) as u64).map_err(|e| e.to_string())?;
            let g = ImageBuffer::new(
                32,
                32,
                wave.values().iter().zip(noise.values()).map(|(w, n)| amp * w + 0.05 * n).collect(),
            )
            .map_err(|e| e.to_string())?;
            items.push((epoch as u32, format!("s{s}"), g));
        }
    }
    let set = GradientSet::from_images(items).map_err(|e| e.to_string())?;
    let trace = priority_trace(&set, SpectralOptions::default()).map_err(|e| e.to_string())?;
    ensure!(trace.row_argmax() == planted, "row argmax {:?}", trace.row_argmax());
    let values: Vec<f64> = trace.rows().iter().flatten().copied().collect();
    ensure!(values.iter().all(|v| (0.0..=1.0).contains(v)), "values leave [0, 1]");
    ensure!(values.iter().copied().fold(0.0, f64::max) == 1.0, "global max is not 1");
    Ok(())
}

fn alignment_ordering() -> Check {
    let clean: Vec<ImageBuffer> = (0..4).map(|s| power_law_field(64, 64, 1.0, 70 + s).unwrap()).collect();
    let dirty: Vec<ImageBuffer> = clean.iter().map(|c| lowpass_corrupt(c, 0.3).unwrap()).collect();
    let shortcut = shortcut_density(&clean, &dirty).map_err(|e| e.to_string())?;
    let cut = lowpass_cutoff(64, 0.3);
    let fixture = |lo: usize, hi: usize, seed: u64| -> Result<f64, String> {
        let items = (0..4)
            .map(|i| Ok((0, format!("g{i}"), band_limited_noise(64, 64, lo, hi, seed * 10 + i)?)))
            .collect::<spectool::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        let set = GradientSet::from_images(items).map_err(|e| e.to_string())?;
        let d = average_gradient_density(&set, 0, SpectralOptions::default()).map_err(|e| e.to_string())?;
        alignment_score(&shortcut, &d).map_err(|e| e.to_string())
    };
    let inside = (cut.ceil() as usize + 1, 32);
    let outside = (1, cut.floor() as usize - 1);
    for seed in 0..5 {
        let a = fixture(inside.0, inside.1, seed)?;
        let b = fixture(outside.0, outside.1, 100 + seed)?;
        ensure!(a > b, "seed {seed}: inside {a} not above outside {b}");
    }
    Ok(())
}

fn spectool_in(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spectool"))
        .args(args)
        .current_dir(dir)
        .env_remove("SPECTOOL_THREADS")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn golden_run(root: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut manifest = String::from("path,label,split\n");
    for i in 0..8u64 {
        for (label, offset) in [("pos", 0), ("neg", 50)] {
            let rel = format!("data/{label}/{i}.npy");
            let img = power_law_field(32, 32, 1.0, 300 + i + offset).map_err(|e| e.to_string())?;
            write_image_file(&root.join(&rel), &img).map_err(|e| e.to_string())?;
            manifest.push_str(&format!("{rel},{label},train\n"));
        }
    }
    fs::write(root.join("m.csv"), manifest).map_err(|e| e.to_string())?;

    let expect = |args: &[&str], code: i32| -> Result<String, String> {
        let (got, stdout) = spectool_in(root, args);
        ensure!(got == code, "`{}` exited {got}, expected {code}", args.join(" "));
        Ok(stdout)
    };
    expect(
        &[
            "corrupt", "--manifest", "m.csv", "--kind", "lowpass", "--size", "0.3", "--fraction",
            "0.5", "--label", "pos", "--split", "train", "--seed", "11", "--out", "corr", "--svg",
        ],
        0,
    )?;
    let plan = fs::read_to_string(root.join("corr/plan.csv")).map_err(|e| e.to_string())?;
    let marked: Vec<String> = plan
        .lines()
        .skip(1)
        .filter_map(|l| l.strip_suffix(",1"))
        .map(|p| format!("corr/{p}"))
        .collect();
    ensure!(marked.len() == 4, "{} samples corrupted", marked.len());

    expect(
        &["psd", "--manifest", "m.csv", "--label", "pos", "--split", "train", "--normalize", "--out", "clean.csv", "--svg"],
        0,
    )?;
    let mut args = vec!["psd"];
    for m in &marked {
        args.extend(["--input", m.as_str()]);
    }
    args.extend(["--normalize", "--out", "dirty.csv", "--svg"]);
    expect(&args, 0)?;
    let score = expect(
        &["compare", "--input", "corr/shortcut_density.csv", "--input", "dirty.csv", "--out", "cmp.json", "--svg"],
        0,
    )?;
    let score: f64 = score.trim().parse().map_err(|_| format!("compare printed `{score}`"))?;
    ensure!((0.0..=1.0).contains(&score), "score {score}");
    let bands = parse_density_csv(&fs::read_to_string(root.join("dirty.csv")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure!(bands.len() == 17, "{} bands", bands.len());

    expect(&["compare", "--input", "dirty.csv"], 1)?;
    expect(&["psd", "--input", "missing.npy"], 2)?;
    expect(&["psd", "--input", "m.csv"], 2)?;
    expect(&["transform"], 1)?;
    expect(&[], 1)?;

    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).map_err(|e| e.to_string())? {
            let p = e.map_err(|e| e.to_string())?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                files.push((rel, fs::read(&p).map_err(|e| e.to_string())?));
            }
        }
    }
    files.sort();
    Ok(files)
}

fn cli_golden() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = golden_run(a.path())?;
    let second = golden_run(b.path())?;
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    for required in [
        "corr/plan.csv",
        "corr/spec.json",
        "corr/run_config.json",
        "corr/shortcut_density.csv",
        "corr/shortcut_density.svg",
        "clean.csv",
        "clean.svg",
        "dirty.svg",
        "cmp.json",
        "cmp.svg",
        "cmp.run.json",
    ] {
        ensure!(names.contains(&required), "missing output {required}");
    }
    ensure!(first.len() == second.len(), "file sets differ");
    for ((na, da), (nb, db)) in first.iter().zip(&second) {
        ensure!(na == nb && da == db, "{na} differs between runs");
    }
    Ok(())
}
