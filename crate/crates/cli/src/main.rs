//! Command-line verifier for the exact jet-bundle constructions: canonical
//! unbranched objects, local branch models, pairing/connection pairs from
//! files, and full round trips from a polynomial developing map.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed, 2 input or
//! usage error.

mod report;
mod sigma;
mod suites;

use std::fs;
use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand};
use so3oper_core::{build_pair, build_sl2_model, read_pair, write_pair};

use report::Mutator;

#[derive(Parser)]
#[command(
    name = "so3oper",
    version,
    about = "Exact symbolic checks for jet-bundle connections with branch points"
)]
struct Cli {
    /// Emit the report as JSON (stable key order, no timestamps).
    #[arg(long, global = true)]
    json: bool,

    /// Series expansion order used by power-series checks.
    #[arg(long, global = true, default_value_t = 8)]
    order: i64,

    /// Corrupt the input of the named check to demonstrate that the check
    /// detects it (the suite must then fail).
    #[arg(long, global = true, value_name = "CHECK-ID")]
    mutate: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the canonical unbranched objects: jet frame, third-order
    /// operator, companion connection, pairing, equivariance, and the
    /// operator characterization.
    Canon,
    /// Verify the local model at a totally ramified point of branching
    /// order N: pole discipline, residue eigendata, twisted fundamental
    /// forms, and the modification transfer law.
    Branch {
        /// Branching order (a positive integer).
        n: i64,
    },
    /// Verify a pairing/connection pair read from a file.
    PairCheck {
        /// Path to a pair file.
        path: PathBuf,
    },
    /// Build the model for a polynomial developing map and verify the full
    /// construction end to end.
    Roundtrip {
        /// Developing map, e.g. "z^2", "z^3/3+z", or "0; 0; 1" (coefficient
        /// list, constant term first).
        #[arg(long)]
        sigma: String,

        /// Also write the induced pair to this path in the canonical file
        /// format.
        #[arg(long, value_name = "PATH")]
        emit_pair: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => exit(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    if cli.order < 2 {
        return Err("series order must be at least 2".into());
    }
    let mut mutator = Mutator::new(cli.mutate.as_deref());

    let report = match &cli.command {
        Command::Canon => suites::canon::run(cli.order, &mut mutator),
        Command::Branch { n } => {
            if *n < 1 {
                return Err("branching order must be a positive integer".into());
            }
            suites::branch::run(*n, cli.order, &mut mutator)
        }
        Command::PairCheck { path } => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let doc = read_pair(&text).map_err(|e| e.to_string())?;
            suites::pair::run(&doc.pair, cli.order, &mut mutator)
        }
        Command::Roundtrip { sigma, emit_pair } => {
            let sigma = sigma::parse_sigma(sigma)?;
            let oper = build_sl2_model(&sigma).map_err(|e| e.to_string())?;
            if let Some(path) = emit_pair {
                let pair = build_pair(&oper).map_err(|e| e.to_string())?;
                fs::write(path, write_pair(&pair, Some(&oper.sigma)))
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            suites::roundtrip::run(&oper, cli.order, &mut mutator)
        }
    };

    if !mutator.consumed() {
        return Err(format!(
            "unknown check id for --mutate: {}",
            mutator.target().unwrap_or_default()
        ));
    }

    print!("{}", if cli.json { report.render_json() } else { report.render_text() });
    Ok(if report.pass { 0 } else { 1 })
}
