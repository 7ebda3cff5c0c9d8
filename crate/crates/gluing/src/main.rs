use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use gluing::run::COMMANDS;
use gluing::spec::parse_kind;
use gluing::{parse_spec, run, ParseOptions, RunArgs};
use gluing_core::DEFAULT_BUDGET;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Human,
    Json,
}

/// Validate, glue and compare finite gluing data described in a spec file.
#[derive(Parser, Debug)]
#[command(name = "gluing", version, after_help = commands_help())]
struct Cli {
    /// Command to run.
    command: String,
    /// Spec file (TOML).
    file: std::path::PathBuf,
    /// Declaration to act on; optional when the document has only one
    /// candidate. For render-dot also `index:i,j,k`.
    target: Option<String>,
    /// Node budget for brute-force searches.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Fill in missing triple maps from the projection condition.
    #[arg(long)]
    derive_triples: bool,
    /// Override the covering kind.
    #[arg(long, value_parser = ["gluing", "open"])]
    kind: Option<String>,
    /// Seed for randomized batches.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

fn commands_help() -> String {
    format!("Commands: {}\nExit codes: 0 all checks pass, 1 a check failed, 2 bad input, 3 search budget exceeded.", COMMANDS.join(", "))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.file.display());
            return ExitCode::from(2);
        }
    };
    let doc = match parse_spec(&text, ParseOptions { derive_triples: cli.derive_triples }) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.file.display());
            return ExitCode::from(2);
        }
    };
    let args = RunArgs { target: cli.target.clone(), budget: cli.budget, kind: cli.kind.as_deref().and_then(parse_kind), seed: cli.seed };
    match run(&doc, &cli.command, &args) {
        Ok(rep) => {
            let text = match (cli.format, &rep.output) {
                (Format::Human, Some(out)) if rep.passed => out.clone(),
                (Format::Human, _) => rep.render_human(),
                (Format::Json, _) => rep.render_json() + "\n",
            };
            // A closed pipe downstream is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(if rep.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
