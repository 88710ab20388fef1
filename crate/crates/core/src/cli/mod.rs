//! `spectool` command-line front end.
//!
//! Exit status: 0 on success, 1 for usage and validation errors, 2 for I/O
//! and parse errors. Diagnostics go to stderr; data goes to files or stdout.
//!
//! Every run writes its effective configuration as JSON next to its outputs
//! (`<out stem>.run.json`, or `run_config.json` inside a `corrupt` output
//! directory). `spectool --config <file>` replays such a record.

mod commands;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, FormatError, Result};
use crate::io::Split;
use crate::spectral::{DensityMode, SpectralOptions};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SPECTOOL_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "spectool",
    version,
    about = "Frequency-domain analysis of image datasets: radial densities, class spectra, whitening, shortcut corruption and learning-priority traces"
)]
struct Cli {
    /// Replay a saved run config instead of giving a subcommand.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<CommandArgs>,
}

#[derive(Subcommand, Debug)]
enum CommandArgs {
    /// Radial density of one image, the mean over several, or over manifest entries
    Psd(Flags),
    /// One-vs-rest ADCS map of a class from a manifest
    Adcs(Flags),
    /// Flatten the amplitude spectrum of each input, keeping its mean and std-dev
    Whiten(Flags),
    /// Plan and apply a shortcut corruption to a manifest split
    Corrupt(Flags),
    /// Per-epoch learning-priority trace of input-gradient maps
    Priority(Flags),
    /// Alignment score between two density tables
    Compare(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Input file; repeat for several
    #[arg(long, value_name = "PATH")]
    input: Vec<PathBuf>,
    /// Sample manifest (`path,label,split`)
    #[arg(long, value_name = "PATH")]
    manifest: Option<PathBuf>,
    /// Output file, or directory for whiten/corrupt
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Shortcut type
    #[arg(long, value_enum)]
    kind: Option<ShortcutKind>,
    /// Low-pass cutoff as a fraction of the half width
    #[arg(long)]
    size: Option<f64>,
    /// Photon budget at intensity 1.0
    #[arg(long)]
    photon_scale: Option<f64>,
    /// Share of the class to corrupt
    #[arg(long)]
    fraction: Option<f64>,
    /// Class label (target for adcs/corrupt, filter elsewhere)
    #[arg(long)]
    label: Option<String>,
    /// Manifest split
    #[arg(long)]
    split: Option<Split>,
    #[arg(long)]
    seed: Option<u64>,
    /// Corruption spec as JSON, in place of --kind/--size/--photon-scale/--fraction/--label/--seed
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Apply a 2D Hann window before transforming
    #[arg(long)]
    window: bool,
    /// Scale the density to a unit maximum
    #[arg(long)]
    normalize: bool,
    /// Average squared amplitudes instead of amplitudes
    #[arg(long)]
    power: bool,
    /// Also write an SVG plot next to the output
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ShortcutKind {
    Lowpass,
    Photon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Psd,
    Adcs,
    Whiten,
    Corrupt,
    Priority,
    Compare,
}

/// Full effective configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: CommandName,
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub manifest: Option<PathBuf>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub kind: Option<ShortcutKind>,
    #[serde(default)]
    pub size: Option<f64>,
    #[serde(default)]
    pub photon_scale: Option<f64>,
    #[serde(default)]
    pub fraction: Option<f64>,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub split: Option<Split>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Only ever set on the command line; resolved into the fields above.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<PathBuf>,
    #[serde(default)]
    pub window: bool,
    #[serde(default)]
    pub normalize: bool,
    #[serde(default)]
    pub power: bool,
    #[serde(default)]
    pub svg: bool,
}

impl RunConfig {
    pub fn new(subcommand: CommandName) -> Self {
        Self {
            subcommand,
            inputs: Vec::new(),
            manifest: None,
            out: None,
            kind: None,
            size: None,
            photon_scale: None,
            fraction: None,
            label: None,
            split: None,
            seed: None,
            spec: None,
            window: false,
            normalize: false,
            power: false,
            svg: false,
        }
    }

    fn from_flags(subcommand: CommandName, f: Flags) -> Self {
        Self {
            subcommand,
            inputs: f.input,
            manifest: f.manifest,
            out: f.out,
            kind: f.kind,
            size: f.size,
            photon_scale: f.photon_scale,
            fraction: f.fraction,
            label: f.label,
            split: f.split,
            seed: f.seed,
            spec: f.spec,
            window: f.window,
            normalize: f.normalize,
            power: f.power,
            svg: f.svg,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Format(FormatError::Json(e.to_string())).in_file(path))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn spectral_options(&self) -> SpectralOptions {
        SpectralOptions {
            window: self.window,
            mode: if self.power {
                DensityMode::Power
            } else {
                DensityMode::Amplitude
            },
        }
    }
}

/// Runs one command line (without the program name) and returns the exit status.
pub fn dispatch<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let argv = std::iter::once(OsString::from("spectool")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    let config = match (cli.config, cli.command) {
        (None, None) => {
            eprintln!("{}", Cli::command().render_help());
            return 1;
        }
        (Some(_), Some(_)) => Err(Error::Validation(
            "--config replays a saved run and cannot be combined with a subcommand".into(),
        )),
        (Some(path), None) => RunConfig::load(&path),
        (None, Some(cmd)) => Ok(match cmd {
            CommandArgs::Psd(f) => RunConfig::from_flags(CommandName::Psd, f),
            CommandArgs::Adcs(f) => RunConfig::from_flags(CommandName::Adcs, f),
            CommandArgs::Whiten(f) => RunConfig::from_flags(CommandName::Whiten, f),
            CommandArgs::Corrupt(f) => RunConfig::from_flags(CommandName::Corrupt, f),
            CommandArgs::Priority(f) => RunConfig::from_flags(CommandName::Priority, f),
            CommandArgs::Compare(f) => RunConfig::from_flags(CommandName::Compare, f),
        }),
    };
    match configure_threads().and(config).and_then(|c| run(&c)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("spectool: error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_io_or_parse() {
        2
    } else {
        1
    }
}

/// Executes a configuration, writing its outputs and its run record.
pub fn run(config: &RunConfig) -> Result<()> {
    match config.subcommand {
        CommandName::Psd => commands::psd(config),
        CommandName::Adcs => commands::adcs(config),
        CommandName::Whiten => commands::whiten(config),
        CommandName::Corrupt => commands::corrupt(config),
        CommandName::Priority => commands::priority(config),
        CommandName::Compare => commands::compare(config),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))
        })?;
    // A pool may already exist when dispatch runs more than once in a process.
    if rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .is_err()
    {
        log::debug!("global thread pool already initialized");
    }
    Ok(())
}
