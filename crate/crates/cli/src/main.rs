//! `pixent`: design pixel bases, simulate coincidence data, and certify
//! high-dimensional entanglement from count files.

mod commands;
mod config;
mod failure;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "pixent", version, about = "Pixel-basis entanglement simulation and certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pack and optimize a pixel layout; writes layout.json and layout.svg.
    Design(DesignArgs),
    /// Simulate coincidence counts; writes count CSVs and manifest.json.
    Simulate(SimulateArgs),
    /// Certify fidelity, Schmidt number and EoF from a manifest.
    Certify(CertifyArgs),
    /// Propagate a Gaussian beam through a lens system.
    Beam(BeamArgs),
    /// Print a saved certification report.
    Report(ReportArgs),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct DesignArgs {
    #[command(flatten)]
    common: Common,
    /// Dimension, overriding the configuration.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated measured bases, e.g. `wf:0,wf:1` or `standard,wf:0`.
    #[arg(long)]
    bases: Option<String>,
    /// Total pair number per setting, overriding the configuration.
    #[arg(long)]
    pairs: Option<u64>,
    /// White-noise weight, overriding the configuration.
    #[arg(long)]
    noise: Option<f64>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Manifest listing the count files.
    manifest: PathBuf,
    /// Output directory; defaults to the manifest's directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = pixent::stats::DEFAULT_RESAMPLES)]
    resamples: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict to these bases, e.g. `wf:0,wf:1`.
    #[arg(long)]
    bases: Option<String>,
}

#[derive(Args)]
struct BeamArgs {
    /// Preset name: pump, slm or ift. Without a preset or config all
    /// presets are shown.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, short)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// report.json or a directory containing it.
    path: PathBuf,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design(a) => commands::design(a.common.config.as_deref(), &a.common.out, a.d),
        Command::Simulate(a) => commands::simulate(
            a.common.config.as_deref(),
            &a.common.out,
            commands::SimulateOverrides {
                d: a.d,
                seed: a.seed,
                bases: a.bases,
                pairs: a.pairs,
                noise: a.noise,
            },
        ),
        Command::Certify(a) => commands::certify(&a.manifest, a.out.as_deref(), a.resamples, a.seed, a.bases.as_deref()),
        Command::Beam(a) => commands::beam(a.preset.as_deref(), a.config.as_deref()),
        Command::Report(a) => commands::report(&a.path, a.json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
