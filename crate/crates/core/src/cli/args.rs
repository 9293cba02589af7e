use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ils", version, about = "Indefinite least squares: solve, condition numbers, backward error")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Kv,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RhsMode {
    Structured,
    Gaussian,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random test problem bundle.
    Gen {
        #[arg(long, default_value_t = 16)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        p: usize,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long = "eps-sol", default_value_t = 1e-3)]
        eps_sol: f64,
        #[arg(long, env = "ILS_SEED")]
        seed: u64,
        #[arg(long, value_enum, default_value_t = RhsMode::Structured)]
        rhs: RhsMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the problem in DIR and write DIR/x.vec.
    Solve { dir: PathBuf },
    /// Condition numbers of L^T x for the problem in DIR.
    Cond {
        dir: PathBuf,
        /// Selector matrix file (n x k).
        #[arg(long = "L", conflicts_with = "li")]
        l: Option<PathBuf>,
        /// Comma-separated 1-based component indices.
        #[arg(long = "Li", value_delimiter = ',')]
        li: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Kv)]
        format: ReportFormat,
    },
    /// Linearization estimate of the backward error of y.
    Backerr {
        dir: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
    },
    /// Condition numbers against observed errors over the delta/eps grid.
    Table1 {
        #[arg(long, env = "ILS_SEED")]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Backward error estimates over the level/delta grid.
    TableMu {
        #[arg(long, env = "ILS_SEED")]
        seed: u64,
        #[arg(long, value_enum, default_value_t = RhsMode::Structured)]
        rhs: RhsMode,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}
