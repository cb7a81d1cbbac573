//! Command-line harness: argument parsing, dispatch to verification suites
//! and graph exports, and the JSON report.

pub mod suites;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

/// Largest polygon for graph commands without `--unsafe`.
pub const MAX_N: usize = 12;
/// Largest even dimension for matrix identity commands without `--unsafe`.
pub const MAX_R: usize = 4;

#[derive(Debug, Parser)]
#[command(
    name = "superpluecker",
    version,
    about = "Exact checks of super Plücker, Berezinian and super cluster identities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Enumerate the exchange graph of decorated triangulations.
    ExchangeGraph,
    /// Count triangulations of the n-gon.
    Triangulations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Berezinian,
    WrongMatrix,
    Pluecker,
    ClusterWalk,
    Ptolemy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Case {
    #[value(name = "2|0")]
    #[serde(rename = "2|0")]
    TwoZero,
    #[value(name = "r|1")]
    #[serde(rename = "r|1")]
    ROne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Dot,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Polygon size or even ambient dimension
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Even dimension of the matrix format or the plane
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Odd dimension of the matrix format
    #[arg(long, global = true)]
    pub s: Option<usize>,
    /// Odd ambient dimension; only 1 is supported
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, global = true, env = "SUPERPLUECKER_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Generator count for matrix and r|1 plane samples; odd entries are then drawn
    /// from this shared pool.
    #[arg(long, global = true)]
    pub generators: Option<usize>,
    /// Report file (verify) or export file (exchange-graph).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long = "case", global = true, value_enum)]
    pub case: Option<Case>,
    /// Mutation steps per cluster walk.
    #[arg(long, global = true, default_value_t = 1000)]
    pub steps: usize,
    /// Lift the dimension caps.
    #[arg(long = "unsafe", global = true)]
    pub allow_unsafe: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Verify(Suite),
    ExchangeGraph,
    Triangulations,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub task: Task,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub s: Option<usize>,
    pub m: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub generators: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub case: Option<Case>,
    pub steps: usize,
    pub allow_unsafe: bool,
}

impl RunConfig {
    pub fn new(task: Task) -> Self {
        RunConfig {
            task,
            n: None,
            r: None,
            s: None,
            m: None,
            trials: 100,
            seed: 0,
            generators: None,
            out: None,
            format: Format::Json,
            case: None,
            steps: 1000,
            allow_unsafe: false,
        }
    }

    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let o = &cli.options;
        let task = match cli.command {
            Command::Verify { suite } => Task::Verify(suite),
            Command::ExchangeGraph => Task::ExchangeGraph,
            Command::Triangulations => Task::Triangulations,
        };
        let config = RunConfig {
            task,
            n: o.n,
            r: o.r,
            s: o.s,
            m: o.m,
            trials: o.trials as usize,
            seed: o.seed,
            generators: o.generators,
            out: o.out.clone(),
            format: o.format,
            case: o.case,
            steps: o.steps,
            allow_unsafe: o.allow_unsafe,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.trials == 0 {
            return usage("--trials must be at least 1".into());
        }
        if matches!(self.task, Task::ExchangeGraph | Task::Triangulations) && self.n.is_none() {
            return usage("--n is required".into());
        }
        if let Some(n) = self.n {
            if n < 4 {
                return usage(format!("--n {n} is below 4"));
            }
            if n > MAX_N && !self.allow_unsafe {
                return usage(format!(
                    "--n {n} exceeds {MAX_N}; pass --unsafe to override"
                ));
            }
        }
        if let Some(r) = self.r {
            if r == 0 && self.task != Task::Verify(Suite::Berezinian) {
                return usage("--r must be at least 1".into());
            }
            if r > MAX_R && !self.allow_unsafe {
                return usage(format!(
                    "--r {r} exceeds {MAX_R}; pass --unsafe to override"
                ));
            }
        }
        if let Some(s) = self.s {
            if s > MAX_R && !self.allow_unsafe {
                return usage(format!(
                    "--s {s} exceeds {MAX_R}; pass --unsafe to override"
                ));
            }
        }
        if self.m.is_some_and(|m| m != 1) {
            return usage("only odd ambient dimension --m 1 is supported".into());
        }
        if self.task == Task::Verify(Suite::Berezinian)
            && self.r.unwrap_or(1) + self.s.unwrap_or(1) == 0
        {
            return usage("the 0|0 format is empty".into());
        }
        if let Some(g) = self.generators {
            if !(3..=superpluecker::grassmann::MAX_GENERATORS).contains(&g) {
                return usage(format!(
                    "--generators must be in 3..={}",
                    superpluecker::grassmann::MAX_GENERATORS
                ));
            }
        }
        if self.task == Task::Verify(Suite::Pluecker) && self.case.is_none() {
            return usage("verify pluecker needs --case 2|0 or --case r|1".into());
        }
        if let (Task::Verify(Suite::Pluecker), Some(Case::ROne), Some(r), Some(n)) =
            (&self.task, self.case, self.r, self.n)
        {
            if r >= n {
                return usage(format!("need r < n, got r={r}, n={n}"));
            }
        }
        Ok(())
    }

    /// `verify pluecker --case r|1`, `exchange-graph`, ...
    pub fn command_echo(&self) -> String {
        match &self.task {
            Task::Verify(suite) => {
                let name = suite
                    .to_possible_value()
                    .expect("no skipped variants")
                    .get_name()
                    .to_string();
                match self.case {
                    Some(c) if *suite == Suite::Pluecker => {
                        format!(
                            "verify {name} --case {}",
                            c.to_possible_value().unwrap().get_name()
                        )
                    }
                    _ => format!("verify {name}"),
                }
            }
            Task::ExchangeGraph => "exchange-graph".into(),
            Task::Triangulations => "triangulations".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub check_id: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub seed: u64,
    pub trials: usize,
    pub failures: Vec<Failure>,
    /// Suite-specific summary (counts, per-trial records).
    pub details: serde_json::Value,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its timing, for reproducibility comparisons.
    pub fn fingerprint(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value
            .as_object_mut()
            .expect("report is an object")
            .remove("elapsed_ms");
        serde_json::to_string(&value).expect("value serializes")
    }
}

/// Runs the configured task. Side-effect files are written for
/// `exchange-graph --out` and `verify --out`.
pub fn run(config: &RunConfig) -> Result<VerificationReport, CliError> {
    config.validate()?;
    let start = Instant::now();
    let outcome = match &config.task {
        Task::Verify(suite) => suites::verify(*suite, config),
        Task::ExchangeGraph => suites::exchange_graph(config)?,
        Task::Triangulations => suites::triangulations(config)?,
    };
    let report = VerificationReport {
        command: config.command_echo(),
        seed: config.seed,
        trials: outcome.trials,
        failures: outcome.failures,
        details: outcome.details,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    if let (Task::Verify(_), Some(path)) = (&config.task, &config.out) {
        std::fs::write(path, report.to_json())?;
    }
    Ok(report)
}

/// Builds the config from parsed arguments and runs it.
pub fn execute(cli: &Cli) -> Result<VerificationReport, CliError> {
    run(&RunConfig::from_cli(cli)?)
}
