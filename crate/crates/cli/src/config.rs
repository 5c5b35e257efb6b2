//! Command-line flags and JSON run configurations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use moikit_core::frechet::DerivativeStrategy;
use moikit_core::suite::DEFAULT_SEED;
use moikit_core::Tolerances;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "moikit",
    version,
    about = "Divided differences, multiple operator integrals and Fréchet derivatives of Hermitian matrix functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// f(A) by the functional calculus
    Eval,
    /// D^k f(A)[B_1..B_k]
    Derivative,
    /// Taylor remainder R_k(b) by three strategies
    Remainder,
    /// Run the seeded verification suite
    Verify,
    /// Time the core kernels on seeded inputs
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Derivative => "derivative",
            Command::Remainder => "remainder",
            Command::Verify => "verify",
            Command::Bench => "bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyArg {
    Moi,
    Fd,
    Power,
}

impl From<StrategyArg> for DerivativeStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Moi => DerivativeStrategy::Moi,
            StrategyArg::Fd => DerivativeStrategy::FiniteDifference,
            StrategyArg::Power => DerivativeStrategy::PowerClosedForm,
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct Flags {
    /// JSON run configuration; flags given on the command line override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Function spec JSON
    #[arg(long, global = true)]
    pub function: Option<PathBuf>,
    /// Matrix JSON; repeat for A, B_1, ..., B_k (derivative) or a, b (remainder)
    #[arg(long = "matrix", global = true)]
    pub matrices: Vec<PathBuf>,
    /// Derivative or remainder order k
    #[arg(long, global = true)]
    pub order: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub strategy: Option<StrategyArg>,
    /// Cross-check the result against the finite-difference oracle
    #[arg(long, global = true)]
    pub check: bool,
    /// Matrix JSON the result must match (relative `derivative_fd` tolerance)
    #[arg(long, global = true)]
    pub reference: Option<PathBuf>,
    /// Override a tolerance, e.g. `perturbation=1e-10`
    #[arg(long = "tolerance", value_name = "NAME=VALUE", global = true)]
    pub tolerances: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report path; the result matrix goes next to it as `<stem>.matrix.json`
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Ordered reductions (always on; accepted for compatibility)
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Only run suite families whose name contains this string
    #[arg(long, global = true)]
    pub filter: Option<String>,
    /// Schatten exponent of the remainder bound check
    #[arg(long = "schatten-p", global = true)]
    pub schatten_p: Option<f64>,
    /// Gauss-Legendre points of the integral remainder
    #[arg(long, global = true)]
    pub steps: Option<usize>,
}

/// On-disk configuration; relative paths resolve against the file's directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub function: Option<PathBuf>,
    #[serde(default)]
    pub matrices: Vec<PathBuf>,
    pub order: Option<usize>,
    pub strategy: Option<StrategyArg>,
    #[serde(default)]
    pub check: bool,
    pub reference: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub deterministic: Option<bool>,
    pub filter: Option<String>,
    pub schatten_p: Option<f64>,
    pub steps: Option<usize>,
}

/// Fully resolved configuration, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub function: Option<PathBuf>,
    pub matrices: Vec<PathBuf>,
    pub order: Option<usize>,
    pub strategy: StrategyArg,
    pub check: bool,
    pub reference: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub deterministic: bool,
    pub filter: Option<String>,
    pub schatten_p: f64,
    pub steps: usize,
}

impl RunConfig {
    pub fn resolve(command: Command, flags: Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let mut file: ConfigFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
                let base = path.parent().unwrap_or(Path::new("."));
                file.rebase(base);
                if let Some(c) = file.command {
                    if c != command {
                        return Err(CliError::Parse(format!(
                            "config is for `{}` but `{}` was requested",
                            c.name(),
                            command.name()
                        )));
                    }
                }
                file
            }
            None => ConfigFile::default(),
        };

        let mut tolerances = Tolerances::default();
        let overrides = file.tolerances.into_iter().chain(
            flags
                .tolerances
                .iter()
                .map(|kv| parse_tolerance(kv))
                .collect::<Result<Vec<_>, _>>()?,
        );
        for (name, value) in overrides {
            tolerances
                .set(&name, value)
                .map_err(|e| CliError::Parse(e.to_string()))?;
        }

        let config = RunConfig {
            command,
            function: flags.function.or(file.function),
            matrices: if flags.matrices.is_empty() {
                file.matrices
            } else {
                flags.matrices
            },
            order: flags.order.or(file.order),
            strategy: flags.strategy.or(file.strategy).unwrap_or(StrategyArg::Moi),
            check: flags.check || file.check,
            reference: flags.reference.or(file.reference),
            tolerances: tolerances.iter().map(|(k, v)| (k.to_string(), v)).collect(),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: flags.out.or(file.out),
            threads: flags.threads.or(file.threads),
            deterministic: true,
            filter: flags.filter.or(file.filter),
            schatten_p: flags.schatten_p.or(file.schatten_p).unwrap_or(1.0),
            steps: flags.steps.or(file.steps).unwrap_or(32),
        };
        if file.deterministic == Some(false) && !flags.deterministic {
            log::warn!("non-deterministic reduction is not implemented; running deterministically");
        }
        config.check_paths()?;
        Ok(config)
    }

    fn check_paths(&self) -> Result<(), CliError> {
        for path in self
            .function
            .iter()
            .chain(&self.matrices)
            .chain(&self.reference)
        {
            if !path.exists() {
                return Err(CliError::Parse(format!("{}: no such file", path.display())));
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        for (k, v) in &self.tolerances {
            t.set(k, *v).expect("tolerances were validated on load");
        }
        t
    }
}

impl ConfigFile {
    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.function.iter_mut().for_each(fix);
        self.matrices.iter_mut().for_each(fix);
        self.reference.iter_mut().for_each(fix);
        self.out.iter_mut().for_each(fix);
    }
}

fn parse_tolerance(kv: &str) -> Result<(String, f64), CliError> {
    let (name, value) = kv
        .split_once('=')
        .ok_or_else(|| CliError::Parse(format!("tolerance `{kv}` is not NAME=VALUE")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("tolerance `{kv}` has a non-numeric value")))?;
    Ok((name.trim().to_string(), value))
}
