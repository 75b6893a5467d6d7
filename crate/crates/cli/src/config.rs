use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jsrlab_core::norms::NormSpec;
use jsrlab_core::semigroup::{DEFAULT_MAX_DEPTH, DEFAULT_NODE_BUDGET};

use crate::error::{CliError, Result};
use crate::input::parse_norm;

/// Largest accepted `--depth`.
pub const MAX_DEPTH: usize = 64;
/// Largest accepted `--budget`.
pub const MAX_BUDGET: usize = 1_000_000_000;
/// Largest accepted `--threads`.
pub const MAX_THREADS: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "jsrlab", version, about = "Joint spectral radius bounds and inequality checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Certified JSR bounds for a matrix set (from a file, or seeded random).
    Bounds {
        /// Matrix-set JSON file; omit to draw a random set with --seed.
        input: Option<PathBuf>,
    },
    /// Run seeded ensembles against the inequalities and identities.
    Verify {
        #[arg(value_enum)]
        check: Check,
    },
    /// Built-in examples.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
    },
    /// Bound gaps by depth, aggregated over seeded random sets.
    Sweep,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    PowerIneq,
    WeakerLemma,
    TraceIdentity,
    Procesi,
    TheoremA,
    TheoremB,
    OtherIneq,
    All,
}

impl Check {
    pub const EACH: [Check; 7] = [
        Check::PowerIneq,
        Check::WeakerLemma,
        Check::TraceIdentity,
        Check::Procesi,
        Check::TheoremA,
        Check::TheoremB,
        Check::OtherIneq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::PowerIneq => "power-ineq",
            Check::WeakerLemma => "weaker-lemma",
            Check::TraceIdentity => "trace-identity",
            Check::Procesi => "procesi",
            Check::TheoremA => "theorem-a",
            Check::TheoremB => "theorem-b",
            Check::OtherIneq => "other-ineq",
            Check::All => "all",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleName {
    Gripenberg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DEPTH)]
    pub depth: usize,
    /// Node budget of the product-tree search.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Required by every randomized run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// euclidean | sup | entry-sup | ellipsoidal:<file>
    #[arg(long, global = true)]
    pub norm: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, global = true, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, global = true, default_value_t = 1000)]
    pub trials: usize,
    /// Tuple length for trace-word checks.
    #[arg(long, global = true, default_value_t = 2)]
    pub tuple_len: usize,
    /// Matrices per random set.
    #[arg(long, global = true, default_value_t = 2)]
    pub set_size: usize,
}

/// Validated settings for one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub depth: usize,
    pub budget: usize,
    pub tol: f64,
    pub seed: Option<u64>,
    /// `None` means the command's default.
    pub norm: Option<NormSpec>,
    pub norm_arg: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: usize,
    pub dim: usize,
    pub trials: usize,
    pub tuple_len: usize,
    pub set_size: usize,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let c = cli.common;
        if c.depth == 0 || c.depth > MAX_DEPTH {
            return Err(CliError::usage(format!("--depth must be in 1..={MAX_DEPTH}")));
        }
        if c.budget == 0 || c.budget > MAX_BUDGET {
            return Err(CliError::usage(format!("--budget must be in 1..={MAX_BUDGET}")));
        }
        if !(c.tol.is_finite() && c.tol >= 0.0) {
            return Err(CliError::usage("--tol must be a finite non-negative number"));
        }
        if c.threads == 0 || c.threads > MAX_THREADS {
            return Err(CliError::usage(format!("--threads must be in 1..={MAX_THREADS}")));
        }
        for (name, v) in [("--dim", c.dim), ("--trials", c.trials), ("--tuple-len", c.tuple_len), ("--set-size", c.set_size)] {
            if v == 0 {
                return Err(CliError::usage(format!("{name} must be positive")));
            }
        }
        let norm = c.norm.as_deref().map(parse_norm).transpose()?;
        let randomized = match &cli.command {
            Command::Bounds { input } => input.is_none(),
            Command::Verify { .. } | Command::Sweep => true,
            Command::Example { .. } => false,
        };
        if randomized && c.seed.is_none() {
            return Err(CliError::usage("--seed is required for randomized runs"));
        }
        Ok(Self {
            command: cli.command,
            depth: c.depth,
            budget: c.budget,
            tol: c.tol,
            seed: c.seed,
            norm,
            norm_arg: c.norm,
            out: c.out,
            format: c.format,
            threads: c.threads,
            dim: c.dim,
            trials: c.trials,
            tuple_len: c.tuple_len,
            set_size: c.set_size,
        })
    }

    /// Whether work may be spread over a thread pool.
    pub fn parallel(&self) -> bool {
        self.threads > 1 && jsrlab_core::exec::parallel_available()
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| CliError::usage("--seed is required for randomized runs"))
    }
}
