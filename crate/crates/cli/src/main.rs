mod args;
mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use commands::{interfere, modes, noise, scaling, tomo};
use error::CliResult;
use output::{emit, Artifact, Format};

/// Simulator for trapped-ion phononic networks.
///
/// Each subcommand regenerates the data behind one figure or table:
///
///   modes            chain modes and ion assignment (Fig. 1c-e)
///   bs-scan          single beam-splitter population exchange (Fig. 2)
///   phase-scan       phase scan of the four-mode interferometer (Fig. 3b, 3c)
///   tomography       state reconstruction from interferometer data (Fig. 3d, 4b)
///   hom              two-phonon interference dip (Fig. 4a)
///   optimize-config  tomography configuration search (Table IV)
///   heating-fit      heating rate from blue-sideband traces (Fig. B1)
///   noise-sim        beam-splitter error budget (Fig. C3)
///   scaling          mode spacing and beam-splitter duration vs chain length (Fig. F)
///
/// Results go to <out>/<command>.csv (or .json) with a <command>.meta.json sidecar
/// holding the resolved configuration. Exit status: 2 for malformed input,
/// 3 for physics or validation errors, 4 for file errors.
#[derive(Parser, Debug)]
#[command(name = "phononet", version, verbatim_doc_comment)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Repetitions per setting; 0 uses exact probabilities
    #[arg(long, global = true, default_value_t = 0)]
    shots: u64,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    #[serde(skip)]
    out: PathBuf,
    /// Output format of the result files
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transverse modes, Lamb-Dicke parameters and ion assignment; optional spectrum fit (Fig. 1c-e)
    Modes(modes::ModesArgs),
    /// Populations of one beam splitter against pulse duration (Fig. 2)
    BsScan(interfere::BsScanArgs),
    /// Two-phonon coincidence probability against mixing angle (Fig. 4a)
    Hom(interfere::HomArgs),
    /// Output populations while scanning one beam-splitter phase (Fig. 3b, 3c)
    PhaseScan(interfere::PhaseScanArgs),
    /// Reconstruct an input state from simulated or recorded outputs (Fig. 3d, 4b)
    Tomography(tomo::TomographyArgs),
    /// Maximize det(L^dag L) over interferometer angles and phases (Table IV)
    OptimizeConfig(tomo::OptimizeArgs),
    /// Added beam-splitter error against heating rate or coherence time (Fig. C3)
    NoiseSim(noise::NoiseSimArgs),
    /// Mode spacing, beam-splitter duration and connectivity against chain length (Fig. F)
    Scaling(scaling::ScalingArgs),
    /// Heating rate from blue-sideband traces after variable waits (Fig. B1)
    HeatingFit(noise::HeatingFitArgs),
}

fn dispatch(cli: &Cli) -> CliResult<(Artifact, serde_json::Value)> {
    let c = &cli.common;
    let (art, args) = match &cli.command {
        Command::Modes(a) => (modes::run(a)?, json!(a)),
        Command::BsScan(a) => (interfere::bs_scan(a)?, json!(a)),
        Command::Hom(a) => (interfere::hom(a)?, json!(a)),
        Command::PhaseScan(a) => (interfere::phase_scan(a, c.shots, c.seed)?, json!(a)),
        Command::Tomography(a) => (tomo::tomography(a, c.shots, c.seed)?, json!(a)),
        Command::OptimizeConfig(a) => (tomo::optimize(a, c.seed)?, json!(a)),
        Command::NoiseSim(a) => (noise::noise_sim(a)?, json!(a)),
        Command::Scaling(a) => (scaling::scaling(a)?, json!(a)),
        Command::HeatingFit(a) => (noise::heating_fit(a, c.shots, c.seed)?, json!(a)),
    };
    Ok((art, json!({ "common": c, "args": args })))
}

fn run(cli: &Cli) -> CliResult<()> {
    let (art, config) = dispatch(cli)?;
    let files = emit(&art, &cli.common.out, cli.common.format, config)?;
    for f in files {
        println!("wrote {}", f.display());
    }
    println!("{}", serde_json::to_string(&art.summary).expect("summary serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
