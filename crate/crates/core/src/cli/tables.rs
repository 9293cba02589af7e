//! The two experiment tables, as data and as CSV/markdown text.

use super::args::{Format, RhsMode};
use crate::backerr::{gamma, mu_bar, mu_one, DEFAULT_THETA};
use crate::cond::{alpha_1, alpha_2, kappa_c, kappa_inf_rel, CondCore};
use crate::error::{IlsError, Result};
use crate::ils::{solve, Selector};
use crate::testgen::{error_metrics, gen_perturbation, gen_problem, gen_problem_gaussian, normal_cond, GenSpec, PerturbSpec};

pub const TABLE1_LEVEL: f64 = 1e-10;
pub const TABLE1_EPS: [f64; 2] = [1e-3, 1e-6];
pub const TABLE1_DELTA: [f64; 2] = [1e-3, 1e-6];
pub const MU_LEVELS: [f64; 2] = [1e-7, 1e-14];
pub const MU_DELTAS: [f64; 3] = [1e-1, 1e-4, 1e-8];
pub const MU_EPS_SOL: f64 = 1e-3;
/// Perturbation draws tried before a backward-error row gives up.
pub const MAX_DRAWS: u64 = 16;
/// Seed offset between successive perturbation draws of one row.
pub const DRAW_STRIDE: u64 = 1_000_003;

/// Selectors of the first table: `I`, `[e_1 e_2]`, `e_n`.
pub fn table1_selectors(n: usize) -> Result<Vec<(&'static str, Selector)>> {
    Ok(vec![
        ("I", Selector::identity(n)),
        ("L1", Selector::unit_columns(n, &[0, 1])?),
        ("L2", Selector::unit_columns(n, &[n - 1])?),
    ])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Row {
    pub eps_sol: f64,
    pub delta: f64,
    pub selector: &'static str,
    pub cond: f64,
    pub r2: f64,
    pub alpha_1: Option<f64>,
    pub alpha_2: Option<f64>,
    pub rinf: f64,
    pub kappa_inf_rel: f64,
    pub rc: f64,
    pub kappa_c: f64,
}

/// One cell of the first table at the default sizes: generate, perturb at
/// `1e-10`, solve both, and compare errors with condition numbers.
pub fn table1_cell(seed: u64, eps_sol: f64, delta: f64) -> Result<Vec<Table1Row>> {
    let spec = GenSpec { delta, eps_sol, seed, ..GenSpec::default() };
    let prob = gen_problem(&spec)?;
    let sol = solve(&prob)?;
    let (da, db) = gen_perturbation(&prob, &PerturbSpec { level: TABLE1_LEVEL, seed })?;
    let x_tilde = solve(&prob.perturbed(&da, &db)?)?.x;
    let core = CondCore::new(&prob, &sol)?;
    let cond = normal_cond(&prob);
    let mut rows = Vec::with_capacity(3);
    for (label, sel) in table1_selectors(spec.n)? {
        let metrics = error_metrics(&sol.x, &x_tilde, &sel)?;
        rows.push(Table1Row {
            eps_sol,
            delta,
            selector: label,
            cond,
            r2: metrics.r2,
            alpha_1: if sel.is_identity() { Some(alpha_1(&core)?) } else { None },
            alpha_2: match alpha_2(&core, &sel) {
                Err(IlsError::ZeroResidual) => None,
                other => Some(other?),
            },
            rinf: metrics.rinf,
            kappa_inf_rel: kappa_inf_rel(&core, &sel)?,
            rc: metrics.rc,
            kappa_c: kappa_c(&core, &sel)?,
        });
    }
    Ok(rows)
}

pub fn table1(seed: u64) -> Result<Vec<Table1Row>> {
    let mut rows = Vec::with_capacity(12);
    for eps in TABLE1_EPS {
        for delta in TABLE1_DELTA {
            rows.extend(table1_cell(seed, eps, delta)?);
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuRow {
    pub level: f64,
    pub delta: f64,
    pub gamma: f64,
    pub mu_one: f64,
    pub mu_bar: f64,
    pub hypothesis_ok: bool,
    /// Perturbations drawn until `A + dA` kept `A^T Sigma A` definite.
    pub draws: u64,
}

/// One row of the backward-error table. `y` solves the perturbed problem;
/// `gamma` is its normal-equation residual there, while `mu_bar` is the
/// backward error estimate of `y` for the unperturbed data, which the known
/// perturbation bounds from above (`mu <= mu_one`).
///
/// At large levels and small `delta` a componentwise perturbation can make
/// the perturbed normal matrix indefinite; the perturbation is then redrawn
/// (seed `seed + DRAW_STRIDE * i`) and the number of draws reported.
pub fn mu_row(seed: u64, rhs: RhsMode, level: f64, delta: f64) -> Result<MuRow> {
    let spec = GenSpec { delta, eps_sol: MU_EPS_SOL, seed, ..GenSpec::default() };
    let prob = match rhs {
        RhsMode::Structured => gen_problem(&spec)?,
        RhsMode::Gaussian => gen_problem_gaussian(&spec)?,
    };
    let mut draws = 0;
    let (da, db, pert, y) = loop {
        let pseed = seed.wrapping_add(DRAW_STRIDE.wrapping_mul(draws));
        draws += 1;
        let (da, db) = gen_perturbation(&prob, &PerturbSpec { level, seed: pseed })?;
        let pert = prob.perturbed(&da, &db)?;
        match solve(&pert) {
            Ok(sol) => break (da, db, pert, sol.x),
            Err(IlsError::NotPositiveDefinite { .. }) if draws < MAX_DRAWS => continue,
            Err(e) => return Err(e),
        }
    };
    let rep = mu_bar(&prob, &y, DEFAULT_THETA)?;
    Ok(MuRow {
        level,
        delta,
        gamma: gamma(&pert, &y)?,
        mu_one: mu_one(&da, &db, DEFAULT_THETA),
        mu_bar: rep.mu_bar,
        hypothesis_ok: rep.hypothesis_ok,
        draws,
    })
}

pub fn table_mu(seed: u64, rhs: RhsMode) -> Result<Vec<MuRow>> {
    let mut rows = Vec::with_capacity(6);
    for level in MU_LEVELS {
        for delta in MU_DELTAS {
            rows.push(mu_row(seed, rhs, level, delta)?);
        }
    }
    Ok(rows)
}

/// Six significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.5e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), num)
}

fn render(header: &[&str], rows: &[Vec<String>], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for r in rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        Format::Md => {
            out.push_str(&format!("| {} |\n", header.join(" | ")));
            out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
            for r in rows {
                out.push_str(&format!("| {} |\n", r.join(" | ")));
            }
        }
    }
    out
}

pub const TABLE1_HEADER: [&str; 11] =
    ["eps", "delta", "L", "cond", "r2_rel", "alpha_1", "alpha_2", "rinf_rel", "kappa_inf_rel", "rc_rel", "kappa_c_rel"];

pub fn render_table1(rows: &[Table1Row], format: Format) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.eps_sol),
                num(r.delta),
                r.selector.to_string(),
                num(r.cond),
                num(r.r2),
                opt(r.alpha_1),
                opt(r.alpha_2),
                num(r.rinf),
                num(r.kappa_inf_rel),
                num(r.rc),
                num(r.kappa_c),
            ]
        })
        .collect();
    render(&TABLE1_HEADER, &cells, format)
}

pub const MU_HEADER: [&str; 7] = ["level", "delta", "gamma", "mu_1", "mu_bar", "hypothesis_ok", "draws"];

pub fn render_table_mu(rows: &[MuRow], format: Format) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.level),
                num(r.delta),
                num(r.gamma),
                num(r.mu_one),
                num(r.mu_bar),
                r.hypothesis_ok.to_string(),
                r.draws.to_string(),
            ]
        })
        .collect();
    render(&MU_HEADER, &cells, format)
}
