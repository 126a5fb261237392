// negated comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use commands::{Outcome, Run};
use config::RunConfig;
use output::{record, to_line, Emitter};

const TOOL: &str = "quasivar";
const THREADS_ENV: &str = "QUASIVAR_THREADS";

#[derive(Parser)]
#[command(name = TOOL, version, about = "Quasilinear elliptic systems: exponent checks, eigenpairs and mountain-pass solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (flat `key = value` file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; overrides `seeds` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for field dumps; overrides `out` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Nodes per grid axis; overrides `n` from the config.
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    /// Solver tolerance; overrides `tol` from the config.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Print only the final record.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Exact hypothesis checks; exit 0 iff every inequality holds.
    Check,
    /// Auxiliary exponents.
    Derive,
    /// Model constants and sampled structural bounds.
    Constants,
    /// Finite-difference check of the energy differential.
    Gradcheck,
    /// First eigenpairs of the p-Laplacians.
    Eigen,
    /// Mountain-pass geometry certificate.
    Certify,
    /// Mountain-pass critical point.
    Solve,
    /// Multi-start search for distinct critical points.
    Multi,
    /// Resolved configuration.
    Dump,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Derive => "derive",
            Command::Constants => "constants",
            Command::Gradcheck => "gradcheck",
            Command::Eigen => "eigen",
            Command::Certify => "certify",
            Command::Solve => "solve",
            Command::Multi => "multi",
            Command::Dump => "dump",
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    let line = to_line(&record(
        "error",
        &json!({ "kind": "parse", "message": msg }),
    ))
    .unwrap_or_default();
    println!("{line}");
    eprintln!("{TOOL}: {msg}");
    ExitCode::from(2)
}

fn threads_from_env() -> Result<usize, String> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got `{s}`")),
        Err(_) => Ok(0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = &cli.config else {
        return usage_error("--config PATH is required");
    };
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => return usage_error(&format!("cannot read {}: {e}", path.display())),
    };
    let text = match std::str::from_utf8(&bytes) {
        Ok(t) => t,
        Err(_) => return usage_error("config is not valid UTF-8"),
    };
    let mut cfg = match RunConfig::parse(text) {
        Ok(c) => c,
        Err(e) => return usage_error(&e.to_string()),
    };
    if let Some(n) = cli.grid_n {
        cfg.n = n;
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if cfg.n < 3 || !(cfg.tol > 0.0) {
        return usage_error("--grid-n must be >= 3 and --tol > 0");
    }
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let seed = cli.seed.unwrap_or(cfg.seeds);
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));
    let run = Run {
        cfg,
        seed,
        out_dir,
        threads,
    };

    let stdout = io::stdout();
    let sink: Box<dyn Write> = Box::new(stdout.lock());
    let mut em = Emitter::new(sink, cli.quiet);
    let header = record(
        "header",
        &json!({
            "tool": TOOL,
            "version": env!("CARGO_PKG_VERSION"),
            "command": cli.command.name(),
            "config_hash": hex::encode(Sha256::digest(&bytes)),
            "seed": seed,
            "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }),
    );
    if em.emit(header).is_err() {
        return ExitCode::from(1);
    }
    let outcome: Outcome = match cli.command {
        Command::Check => commands::check(&run, &mut em),
        Command::Derive => commands::derive(&run, &mut em),
        Command::Constants => commands::constants(&run, &mut em),
        Command::Gradcheck => commands::gradcheck(&run, &mut em),
        Command::Eigen => commands::eigen(&run, &mut em),
        Command::Certify => commands::certify(&run, &mut em),
        Command::Solve => commands::solve(&run, &mut em),
        Command::Multi => commands::multi(&run, &mut em),
        Command::Dump => commands::dump(&run, &mut em),
    };
    let code = match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = em.emit(record(
                "error",
                &json!({ "kind": "runtime", "message": e.to_string() }),
            ));
            1
        }
    };
    if em.finish().is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
