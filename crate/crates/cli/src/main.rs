//! `moikit`: command-line front end of moikit-core.
//!
//! Exit codes: 0 success, 1 a check failed, 2 a precondition failed
//! (e.g. a non-Hermitian input), 3 unreadable or malformed input.

mod commands;
mod config;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] moikit_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_)
            | CliError::Io { .. }
            | CliError::Core(moikit_core::Error::Parse(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MOIKIT_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(pass) => ExitCode::from(if pass { 0 } else { 1 }),
        Err(e) => {
            eprintln!("moikit: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let config = RunConfig::resolve(cli.command, cli.flags)?;
    if let Some(threads) = config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let out = config.out.clone();
    let doc = commands::run(config)?;
    let json = doc.to_json();
    match &out {
        Some(path) => {
            fs::write(path, &json).map_err(|e| CliError::io(path, e))?;
            if let Some(result) = &doc.result {
                let matrix_path = matrix_path(path);
                let text = serde_json::to_string_pretty(result)
                    .expect("matrix serialization cannot fail")
                    + "\n";
                fs::write(&matrix_path, text).map_err(|e| CliError::io(&matrix_path, e))?;
            }
        }
        None => print!("{json}"),
    }
    let failed = doc
        .reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .chain(doc.suite.iter().flat_map(|s| s.checks()))
        .filter(|c| !c.pass)
        .count();
    eprintln!(
        "moikit {}: {} ({} checks, {} failed)",
        doc.command,
        if doc.pass { "PASS" } else { "FAIL" },
        doc.check_count(),
        failed
    );
    Ok(doc.pass)
}

/// `report.json` -> `report.matrix.json`
fn matrix_path(report: &Path) -> PathBuf {
    let stem = report
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    report.with_file_name(format!("{stem}.matrix.json"))
}
