//! `kakeya-lab`: reproducible experiments over the `kakeya` crate.
//!
//! Exit status is 0 on success, 1 when a verified failure was found
//! (an uncovered difference, a failing check) and 2 on invalid input.

mod commands;
mod report;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kakeya::checks::Level;
use kakeya::constructions::DEFAULT_ENUM_CAP;
use kakeya::error::Error;
use kakeya::numbers::Int;
use kakeya::oracle::DEFAULT_WINDOW_CAP;
use serde::Serialize;

use report::Format;

#[derive(Debug, Parser, Serialize)]
#[command(name = "kakeya-lab", version, about = "Progression covers, Kakeya sets and entropy experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Progression length.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Number of differences (or interval length for covers).
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub big_n: Option<Int>,
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Dimension or digit count.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Number of odd primes, or the typical-set multiplier.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long = "Q", global = true)]
    #[serde(rename = "Q")]
    pub q: Option<Int>,
    #[arg(long = "M", global = true)]
    #[serde(rename = "M")]
    pub big_m: Option<Int>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Integer window `{0..W}` searched by the integer oracles.
    #[arg(long = "cap-window", global = true, default_value_t = DEFAULT_WINDOW_CAP)]
    pub cap_window: Int,
    /// Largest set any construction may enumerate.
    #[arg(long = "cap-enum", global = true, default_value_t = DEFAULT_ENUM_CAP)]
    pub cap_enum: u128,
    /// Resampling budget for randomized stages.
    #[arg(long, global = true, default_value_t = 64)]
    pub retries: usize,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Add wall-clock time to the report (makes it nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,
}

impl Common {
    pub fn k(&self, default: usize) -> usize {
        self.k.unwrap_or(default)
    }

    pub fn big_n(&self, default: Int) -> Int {
        self.big_n.unwrap_or(default)
    }

    pub fn p(&self, default: u32) -> u32 {
        self.p.unwrap_or(default)
    }

    pub fn n(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    pub fn m(&self, default: usize) -> usize {
        self.m.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Build and verify an explicit construction.
    Construct {
        #[arg(long, value_enum, default_value = "upper")]
        kind: ConstructKind,
    },
    /// Exact minimum by exhaustive search.
    Oracle {
        #[arg(long, value_parser = ["F", "F'", "f", "G"])]
        quantity: String,
        /// Node budget for the search.
        #[arg(long = "max-nodes", default_value_t = 200_000_000)]
        max_nodes: u64,
        /// Largest prime tried for `G`.
        #[arg(long = "pool-max", default_value_t = 30)]
        pool_max: u64,
    },
    /// Entropy reports.
    Entropy {
        /// The sharpness law at `--p`.
        #[arg(long)]
        mt: bool,
        #[arg(long = "katz-tao")]
        katz_tao: bool,
        /// Typical-set sizes of the sharpness law at these lengths.
        #[arg(long, value_delimiter = ',')]
        typical: Vec<usize>,
    },
    /// Greedy translate covers and full-direction extension.
    Cover {
        #[arg(long, value_enum, default_value = "int")]
        kind: CoverKind,
        /// Elements of `S` for `--kind int`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        set: Vec<Int>,
        /// Size of a random `S` for `--kind fp`.
        #[arg(long)]
        size: Option<usize>,
    },
    /// Randomized compression stages.
    Compress {
        #[arg(long, value_enum, default_value = "distinct")]
        kind: CompressKind,
        /// Number of random lines for `--kind linear`.
        #[arg(long, default_value_t = 20)]
        lines: usize,
    },
    /// Interval coverage by multiples of primes.
    Es {
        #[arg(long, value_enum, default_value = "min")]
        kind: EsKind,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        /// Pattern multipliers for `--kind pattern`.
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long = "x-max", default_value_t = 1 << 16)]
        x_max: u64,
        #[arg(long = "pool-max", default_value_t = 30)]
        pool_max: u64,
    },
    /// Joint law to Besicovitch set, stage by stage.
    Pipeline {
        #[arg(long, value_enum, default_value = "mt")]
        preset: Preset,
        /// Distinct arrangements drawn when the pair set is too large.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Largest pair set enumerated exactly.
        #[arg(long = "exact-cap", default_value_t = 1_000_000)]
        exact_cap: u128,
    },
    /// Run the acceptance suite.
    CheckAll {
        #[arg(long, default_value = "desk")]
        level: Level,
    },
    /// One CSV row per parameter point.
    Table {
        #[arg(long, value_parser = ["F", "f", "exponent"])]
        quantity: String,
        /// Progression lengths for the F table.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        ks: Vec<usize>,
        /// Primes for the f table.
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        ps: Vec<u32>,
        /// Prime counts for the exponent table.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        ms: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructKind {
    Qr,
    Digits,
    Upper,
    Mt,
    Unwrap,
    Wrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverKind {
    Int,
    Fp,
    Extend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CompressKind {
    Distinct,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EsKind {
    Min,
    Sandwich,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Mt,
    Uniform,
    Point,
}

impl Command {
    fn default_format(&self) -> Format {
        match self {
            Command::Oracle { .. } | Command::Es { .. } | Command::Table { .. } => Format::Csv,
            Command::CheckAll { .. } => Format::Plain,
            _ => Format::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let output = match commands::run(&cli.command, &cli.common) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_verified_failure() { 1 } else { 2 });
        }
    };
    let wall_ms = cli.common.timing.then(|| start.elapsed().as_millis());
    let format = cli.common.format.unwrap_or_else(|| cli.command.default_format());
    let config = serde_json::to_value(&cli).expect("config serializes");
    let text = report::render(&output, format, &config, wall_ms);
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if output.failed { 1 } else { 0 })
}

/// Invalid configuration detected by a subcommand.
pub fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
