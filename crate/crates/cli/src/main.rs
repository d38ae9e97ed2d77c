//! `nade`: entropy bounds, verification, coding and estimation for
//! non-autonomous interval maps.
//!
//! Every run prints a JSON report embedding its manifest. With `--output-dir`
//! the report, the manifest and (for `estimate`) `growth.csv` are also written there.
//!
//! Exit codes: 0 success, 2 a hypothesis failed, 3 bad input, 4 no numerical convergence.

mod commands;
mod error;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use commands::Run;
use error::CliError;
use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(
    name = "nade",
    version,
    about = "Entropy of non-autonomous interval maps via subshifts of finite type"
)]
struct Cli {
    /// Directory for report.json, manifest.json and growth.csv.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
enum Command {
    /// Lower bound log rho(A), certified when a system and cover are given.
    BoundLower(commands::BoundLowerArgs),
    /// Upper bound log rho(A) under exact covering and uniform expansion.
    BoundUpper(commands::SystemCoverMatrixArgs),
    /// Check the covering relations, deriving the matrix if none is given.
    Verify(commands::VerifyArgs),
    /// Estimate entropy from growth of separated sets.
    Estimate(commands::EstimateArgs),
    /// Enclose the point coded by a symbol sequence.
    Code(commands::CodeArgs),
    /// Symbols of the sets an orbit visits.
    Itinerary(commands::ItineraryArgs),
    /// List or count the allowable words of a given length.
    EnumerateWords(commands::EnumerateWordsArgs),
    /// Spectral radius, nu and optionally a Gelfand estimate.
    SpectralRadius(commands::SpectralRadiusArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::BoundLower(_) => "bound-lower",
            Command::BoundUpper(_) => "bound-upper",
            Command::Verify(_) => "verify",
            Command::Estimate(_) => "estimate",
            Command::Code(_) => "code",
            Command::Itinerary(_) => "itinerary",
            Command::EnumerateWords(_) => "enumerate-words",
            Command::SpectralRadius(_) => "spectral-radius",
        }
    }

    fn run(&self, m: &mut RunManifest) -> Result<Run, CliError> {
        match self {
            Command::BoundLower(a) => commands::bound_lower(m, a),
            Command::BoundUpper(a) => commands::bound_upper(m, a),
            Command::Verify(a) => commands::verify(m, a),
            Command::Estimate(a) => commands::estimate(m, a),
            Command::Code(a) => commands::code(m, a),
            Command::Itinerary(a) => commands::itinerary(m, a),
            Command::EnumerateWords(a) => commands::enumerate_words(m, a),
            Command::SpectralRadius(a) => commands::spectral_radius(m, a),
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let config = serde_json::to_value(&cli.command).expect("arguments are plain data");
    let mut manifest = RunManifest::new(cli.command.name(), config, cli.seed);
    let run = cli.command.run(&mut manifest)?;
    let digest = manifest.digest();
    let report = output::to_json(&json!({
        "command": manifest.command,
        "manifest_sha256": digest,
        "manifest": manifest,
        "status": if run.refusal.is_some() { "refused" } else { "ok" },
        "result": run.result,
    }));
    if let Some(dir) = &cli.output_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Output {
            path: dir.display().to_string(),
            source,
        })?;
        output::write_file(dir, "manifest.json", output::to_json(&manifest).as_bytes())?;
        output::write_file(dir, "report.json", report.as_bytes())?;
        if let Some(curves) = &run.growth_csv {
            output::write_file(
                dir,
                "growth.csv",
                commands::growth_csv(curves, &digest).as_bytes(),
            )?;
        }
    }
    print!("{report}");
    match run.refusal {
        Some(message) => {
            eprintln!("nade: {message}");
            Ok(2)
        }
        None => Ok(0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("nade: {e}");
            eprint!(
                "{}",
                output::to_json(&json!({"error": e.kind(), "message": e.to_string()}))
            );
            ExitCode::from(e.exit_code())
        }
    }
}
