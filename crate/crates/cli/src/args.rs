use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "redeilab", version, about = "Range-sum-p polynomials, character sums and directions over F_p")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct Global {
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = all cores, 1 = sequential)
    #[arg(long, global = true, env = "REDEILAB_THREADS")]
    pub threads: Option<usize>,
    /// Refuse searches with more candidates than this
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// `report` never exits 1 on a failed check
    #[arg(long, global = true, value_enum, default_value_t = Mode::Assert)]
    pub mode: Mode,
    /// Record `ms` as null so reruns are byte-identical
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Assert,
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyArg {
    Naive,
    Rootsets,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Search for degree-(p-1)/2 polynomials with range sum p, up to affine maps
    Classify {
        #[arg(long)]
        p: u64,
        /// Defaults to rootsets, or naive when a lower-degree scan or a
        /// range-sum multiple is requested
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        /// Also look for solutions of every lower degree
        #[arg(long)]
        scan_lower_degrees: bool,
        /// Target range sum k*p instead of p
        #[arg(long, default_value_t = 1)]
        range_sum_multiple: u64,
    },
    /// Legendre sums over shifted subsets
    Charsum {
        #[command(subcommand)]
        op: CharsumOp,
    },
    /// Direction sets and projection polynomials of point sets
    Directions {
        #[command(subcommand)]
        op: DirectionsOp,
    },
    /// Fourier spectrum of a point set's indicator function
    Fourier {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, conflicts_with = "ls")]
        points: Option<PathBuf>,
        /// Use the two-half-axes set
        #[arg(long)]
        ls: bool,
    },
    /// Inspect one polynomial, e.g. "p=7; coeffs=[1,0,0,1]"
    Poly {
        poly: String,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum CharsumOp {
    /// Joint square status counts of a and a + gamma
    Paley {
        #[arg(long)]
        p: u64,
    },
    /// Sign pattern counts of chi(y + r_i)
    Weil {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
    },
    /// Cells cut out by the translates Q + r_i
    Cells {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
    },
    /// min |(Q + r_i) ∩ Q| against the level-set bound
    Minint {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
        #[arg(long, default_value_t = 5)]
        r_hat: usize,
    },
    /// Count the shifts with a large sum
    Scan {
        #[arg(long)]
        p: u64,
        /// qr, random:N (N random subsets) or file:PATH
        #[arg(long, default_value = "qr")]
        subset: String,
        #[arg(long, default_value = "p/7")]
        threshold: String,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum DirectionsOp {
    /// Per-slope report for a point file or a random p-set
    Analyze {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// The two-half-axes set end to end
    Ls {
        #[arg(long)]
        p: u64,
    },
    /// Slope classes of the two-half-axes set
    Census {
        #[arg(long)]
        p: u64,
    },
    /// Degree bound |D| >= d + 2 on a point file or random non-collinear p-sets
    Check {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        random: usize,
    },
}
