//! `g2cone <command> --config <path> [--seed N] [--out <path>]`
//!
//! Exit codes: 0 pass, 1 verification failure, 2 configuration error,
//! 3 hypothesis violation. With `--out`, metadata (resolved configuration,
//! seed, diagnostics) goes to `<out>.meta.json`; otherwise to stderr.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

pub use commands::{run, Outcome};
pub use config::{Command, ConfigError, DataSource, FnSpec, Format, ProfileSpec, ScenarioConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    VerificationFailure = 1,
    ConfigError = 2,
    HypothesisViolation = 3,
}

#[derive(Debug, Parser)]
#[command(name = "g2cone", version, about = "Flow of G2-structures on the cone over S3xS3")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file of `key = value` lines
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed` from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; metadata goes to `<out>.meta.json`
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Sidecar path for metadata: `<out>.meta.json`.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::ConfigError as i32 } else { 0 };
        }
    };
    let mut cfg = match ScenarioConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitStatus::ConfigError as i32;
        }
    };
    if let Some(mode) = cfg.mode {
        if mode != args.command {
            eprintln!("config error: mode = {} does not match command {}", mode.name(), args.command.name());
            return ExitStatus::ConfigError as i32;
        }
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.out.is_some() {
        cfg.out = args.out;
    }

    let outcome = run(args.command, &cfg);
    for m in &outcome.messages {
        eprintln!("{m}");
    }
    let meta = serde_json::to_string_pretty(&outcome.meta).expect("json") + "\n";
    let written = match &cfg.out {
        Some(path) => write_file(path, &outcome.body).and_then(|_| write_file(&meta_path(path), &meta)),
        None => {
            let mut stdout = std::io::stdout().lock();
            eprint!("{meta}");
            stdout
                .write_all(outcome.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| e.to_string())
        }
    };
    if let Err(e) = written {
        eprintln!("output error: {e}");
        return ExitStatus::ConfigError as i32;
    }
    outcome.status as i32
}
