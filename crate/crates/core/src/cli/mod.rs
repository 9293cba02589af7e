//! Command-line front end. `run` returns the process exit code:
//! 0 success, 2 mathematical failure, 3 I/O or file format, 4 bad flags.

pub mod args;
pub mod tables;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;

use crate::backerr::mu_bar;
use crate::cond::{CondCore, ConditionReport};
use crate::error::{IlsError, Result};
use crate::ils::{read_bundle, solve, write_bundle, Selector};
use crate::matcore::io::{format_vec, read_mat, read_vec, write_vec};
use crate::matcore::vec_2;
use crate::testgen::{gen_problem, gen_problem_gaussian, GenSpec};

use args::{Cli, Command, ReportFormat, RhsMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

pub fn exit_code(err: &IlsError) -> i32 {
    match err {
        IlsError::Io(_) | IlsError::Parse(_) => EXIT_IO,
        IlsError::Invalid(_) => EXIT_USAGE,
        _ => EXIT_MATH,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Gen { m, n, p, delta, eps_sol, seed, rhs, out: dir } => {
            if p > m {
                return Err(IlsError::Invalid(format!("p = {p} exceeds m = {m}")));
            }
            let spec = GenSpec { m, n, p, delta, eps_sol, seed };
            let prob = match rhs {
                RhsMode::Structured => gen_problem(&spec)?,
                RhsMode::Gaussian => gen_problem_gaussian(&spec)?,
            };
            write_bundle(&dir, &prob, None)?;
            writeln!(out, "wrote {}x{} problem (p={}, q={}) to {}", m, n, p, m - p, dir.display())?;
        }
        Command::Solve { dir } => {
            let bundle = read_bundle(&dir)?;
            let prob = &bundle.problem;
            let sol = solve(prob)?;
            write_vec(&dir.join("x.vec"), &sol.x)?;
            write!(out, "x\n{}", format_vec(&sol.x))?;
            writeln!(out, "residual_norm={:.16e}", vec_2(&sol.r))?;
            writeln!(out, "normal_residual={:.16e}", sol.normal_residual_norm(prob))?;
        }
        Command::Cond { dir, l, li, format } => {
            let bundle = read_bundle(&dir)?;
            let n = bundle.problem.n();
            let sel = select(n, l.as_deref(), li.as_deref(), bundle.selector)?;
            let sol = solve(&bundle.problem)?;
            let core = CondCore::new(&bundle.problem, &sol)?;
            let rep = ConditionReport::compute(&core, &sel)?;
            match format {
                ReportFormat::Kv => write!(out, "{}", rep.to_key_value())?,
                ReportFormat::Csv => writeln!(out, "{}\n{}", ConditionReport::csv_header(), rep.to_csv_row())?,
            }
        }
        Command::Backerr { dir, y, theta } => {
            if !(theta > 0.0 && theta.is_finite()) {
                return Err(IlsError::Invalid(format!("theta must be positive, got {theta}")));
            }
            let bundle = read_bundle(&dir)?;
            let y = read_vec(&y)?;
            let rep = mu_bar(&bundle.problem, &y, theta)?;
            writeln!(out, "mu_bar={:.5e}", rep.mu_bar)?;
            writeln!(out, "gamma={:.5e}", rep.gamma)?;
            writeln!(out, "theta={:.5e}", rep.theta)?;
            writeln!(out, "eta1={:.5e}", rep.eta1)?;
            writeln!(out, "jdag_norm={:.5e}", rep.jdag_norm)?;
            writeln!(out, "hypothesis_ok={}", rep.hypothesis_ok)?;
            match rep.mu_interval() {
                Some((lo, hi)) => writeln!(out, "mu_interval=[{lo:.5e}, {hi:.5e}]")?,
                None => writeln!(out, "mu_interval=NA")?,
            }
        }
        Command::Table1 { seed, format } => {
            let rows = tables::table1(seed)?;
            write!(out, "{}", tables::render_table1(&rows, format))?;
        }
        Command::TableMu { seed, rhs, format } => {
            let rows = tables::table_mu(seed, rhs)?;
            write!(out, "{}", tables::render_table_mu(&rows, format))?;
        }
    }
    Ok(())
}

/// Selector precedence: `--L`, then `--Li`, then the bundle's `L.mat`, then `I`.
fn select(n: usize, l: Option<&Path>, li: Option<&[usize]>, from_bundle: Option<Selector>) -> Result<Selector> {
    if let Some(path) = l {
        return Selector::new(read_mat(path)?);
    }
    if let Some(idx) = li {
        if idx.iter().any(|&i| i == 0 || i > n) {
            return Err(IlsError::Invalid(format!("--Li indices must lie in 1..={n}")));
        }
        let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        return Selector::unit_columns(n, &zero_based);
    }
    Ok(from_bundle.unwrap_or_else(|| Selector::identity(n)))
}
