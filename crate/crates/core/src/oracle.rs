//! Brute-force verifiers: dense Kronecker-form condition numbers, finite
//! difference Jacobians, sampled error ratios, and feasible backward-error
//! bounds. Slow on purpose; they share as little code with `cond` and
//! `backerr` as possible.

use rand_distr::{Distribution, StandardNormal};

use crate::cond::{CondCore, Kind, DENSE_LIMIT};
use crate::error::{IlsError, Result};
use crate::ils::{solve, IlsProblem, Selector};
use crate::matcore::{inf_norm, kron, min_norm_solve, vec, vec_2, vec_inf, Lu, Mat};
use crate::testgen::{gen_perturbation, rng_for, PerturbSpec};

/// Stream used for normwise sampling directions.
pub const STREAM_NORMWISE: u64 = 11;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub fd_step: f64,
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { fd_step: 1e-6, sample_count: 2000, seed: 0 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1e-9..=1e-3).contains(&self.fd_step) {
            return Err(IlsError::Invalid(format!("fd_step {} outside [1e-9, 1e-3]", self.fd_step)));
        }
        if self.sample_count == 0 {
            return Err(IlsError::Invalid("sample_count must be positive".into()));
        }
        Ok(())
    }
}

/// Dense `L^T [V D_A, W D_b]`, with `M^{-1}` from an LU factorization of the
/// explicitly formed `A^T Sigma A`.
pub fn dense_condition_matrix(core: &CondCore, sel: &Selector) -> Result<Mat> {
    let prob = core.problem();
    let (m, n) = prob.a().shape();
    if m * n > DENSE_LIMIT {
        return Err(IlsError::SizeExceeded { size: m * n, limit: DENSE_LIMIT });
    }
    if sel.n() != n {
        return Err(IlsError::dims("dense_condition", "selector rows differ from n"));
    }
    let m_inv = Lu::new(&prob.normal_matrix())?.inverse();
    let sa = prob.sigma_a();
    let w = m_inv.matmul(&sa.transpose())?;
    let sigma_r = prob.sigma(core.r());
    let v = kron(&m_inv, &Mat::new(1, m, sigma_r)?).sub(&kron(&Mat::new(1, n, core.x().to_vec())?, &w))?;
    let va = vec(prob.a());
    let b = prob.b();
    let vda = Mat::from_fn(n, m * n, |i, c| v[(i, c)] * va[c]);
    let wdb = Mat::from_fn(n, m, |i, c| w[(i, c)] * b[c]);
    sel.l().tr_matmul(&Mat::hstack(&[&vda, &wdb])?)
}

/// `||L^T [V D_A, W D_b]||_inf` (absolute mixed number) or the
/// `D^{-1}_{L^T x}`-scaled version (componentwise).
pub fn dense_condition(core: &CondCore, sel: &Selector, measure: Kind) -> Result<f64> {
    let c = dense_condition_matrix(core, sel)?;
    match measure {
        Kind::Inf => Ok(inf_norm(&c)),
        Kind::C => {
            let ltx = sel.apply_t(core.x())?;
            if let Some(i) = ltx.iter().position(|&v| v == 0.0) {
                return Err(IlsError::ZeroComponent(i));
            }
            let scaled = Mat::from_fn(c.rows(), c.cols(), |i, j| c[(i, j)] / ltx[i].abs());
            Ok(inf_norm(&scaled))
        }
    }
}

fn g_at(a: Mat, b: Vec<f64>, like: &IlsProblem, sel: &Selector) -> Result<Vec<f64>> {
    let prob = IlsProblem::new(a, b, like.p(), like.q())?;
    sel.apply_t(&solve(&prob)?.x)
}

fn central_column(
    problem: &IlsProblem,
    sel: &Selector,
    h: f64,
    probe: impl Fn(f64) -> (Mat, Vec<f64>),
) -> Result<Vec<f64>> {
    let (ap, bp) = probe(h);
    let (am, bm) = probe(-h);
    let gp = g_at(ap, bp, problem, sel)?;
    let gm = g_at(am, bm, problem, sel)?;
    Ok(gp.iter().zip(&gm).map(|(p, q)| (p - q) / (2.0 * h)).collect())
}

/// Central-difference Jacobian of `g(A, b) = L^T x` in the `[vec(A); b]`
/// basis, `k x (mn + m)`. A probe that loses definiteness is retried once
/// with the step divided by ten.
pub fn fd_jacobian(problem: &IlsProblem, sel: &Selector, fd_step: f64) -> Result<Mat> {
    let (m, n) = problem.a().shape();
    if sel.n() != n {
        return Err(IlsError::dims("fd_jacobian", "selector rows differ from n"));
    }
    let k = sel.k();
    let mut jac = Mat::zeros(k, m * n + m);
    for c in 0..m * n + m {
        let probe = |t: f64| {
            let mut a = problem.a().clone();
            let mut b = problem.b().to_vec();
            if c < m * n {
                let (i, j) = (c % m, c / m);
                a = Mat::from_fn(m, n, |r, s| a[(r, s)] + if (r, s) == (i, j) { t } else { 0.0 });
            } else {
                b[c - m * n] += t;
            }
            (a, b)
        };
        let col = match central_column(problem, sel, fd_step, probe) {
            Err(IlsError::NotPositiveDefinite { .. }) => central_column(problem, sel, fd_step / 10.0, probe)?,
            other => other?,
        };
        for (row, v) in col.iter().enumerate() {
            jac.row_mut(row)[c] = *v;
        }
    }
    Ok(jac)
}

/// Forward-error measure used by the sampling oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMeasure {
    /// `||d(L^T x)||_inf / (eps ||L^T x||_inf)` under componentwise data
    /// perturbations; compare with the relative mixed number.
    MixedInf,
    /// `max_i |d(L^T x)_i| / (eps |L^T x|_i)`; compare with `kappa_c`.
    Componentwise,
    /// `||d(L^T x)||_2 / (eps ||L^T x||_2)` under normwise perturbations
    /// `||[dA/||A||_F, db/||b||_2]||_F = eps`; compare with `alpha_2`.
    Normwise,
    /// `||d(L^T x)||_2 / eps` under componentwise perturbations; compare
    /// with the absolute 2-norm mixed number (bounded by `sqrt(k) kappa_inf`).
    Mixed2,
}

fn sample_seed(seed: u64, s: usize) -> u64 {
    seed ^ (s as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn normwise_perturbation(problem: &IlsProblem, level: f64, seed: u64) -> (Mat, Vec<f64>) {
    let mut rng = rng_for(seed, STREAM_NORMWISE);
    let (m, n) = problem.a().shape();
    let e = Mat::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng));
    let f: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = vec_2(e.as_slice()).hypot(vec_2(&f));
    let sa = level * crate::matcore::frobenius(problem.a()) / norm;
    let sb = level * vec_2(problem.b()) / norm;
    (e.scale(sa), f.iter().map(|v| v * sb).collect())
}

/// Ratio of forward error to perturbation level for each sample.
pub fn sampled_ratios(
    problem: &IlsProblem,
    sel: &Selector,
    pspec: &PerturbSpec,
    measure: SampleMeasure,
    sample_count: usize,
) -> Result<Vec<f64>> {
    let g0 = sel.apply_t(&solve(problem)?.x)?;
    let eps = pspec.level;
    let mut out = Vec::with_capacity(sample_count);
    for s in 0..sample_count {
        let seed = sample_seed(pspec.seed, s);
        let (da, db) = match measure {
            SampleMeasure::Normwise => normwise_perturbation(problem, eps, seed),
            _ => gen_perturbation(problem, &PerturbSpec { level: eps, seed })?,
        };
        let g = sel.apply_t(&solve(&problem.perturbed(&da, &db)?)?.x)?;
        let d = crate::matcore::vecops::sub(&g, &g0);
        let ratio = match measure {
            SampleMeasure::MixedInf => vec_inf(&d) / (eps * vec_inf(&g0)),
            SampleMeasure::Componentwise => {
                d.iter().zip(&g0).map(|(di, gi)| di.abs() / gi.abs()).fold(0.0, f64::max) / eps
            }
            SampleMeasure::Normwise => vec_2(&d) / (eps * vec_2(&g0)),
            SampleMeasure::Mixed2 => vec_2(&d) / eps,
        };
        out.push(ratio);
    }
    Ok(out)
}

/// Largest sampled ratio: an empirical lower bound (to first order) on the
/// matching condition number.
pub fn sampled_condition_ratio(
    problem: &IlsProblem,
    sel: &Selector,
    pspec: &PerturbSpec,
    measure: SampleMeasure,
    sample_count: usize,
) -> Result<f64> {
    Ok(sampled_ratios(problem, sel, pspec, measure, sample_count)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// `theta * ||db||_2` for the minimum-norm `db` with
/// `A^T Sigma db = -A^T Sigma r_y`, i.e. the cost of the feasible point
/// `(dA, db) = (0, db)`. An upper bound on the true backward error.
pub fn feasible_mu_ub(problem: &IlsProblem, y: &[f64], theta: f64) -> Result<f64> {
    let ats = problem.sigma_a().transpose();
    let rhs: Vec<f64> = problem.normal_residual(y)?.iter().map(|v| -v).collect();
    if rhs.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let db = min_norm_solve(&ats, &rhs)?;
    Ok(theta * vec_2(&db))
}
