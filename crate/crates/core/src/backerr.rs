//! Normwise backward error of an approximate ILS solution `y`.
//!
//! The exact backward error
//! `mu = min ||[dA, theta db]||_F` over perturbations for which `y` solves
//! the perturbed normal equations has no closed form. What is computed here
//! is its linearization estimate `mu_bar = ||J^+ A^T Sigma r_y||_2`, where
//! `J = [I_n (x) r_y^T Sigma - A^T Sigma (y^T (x) I_m), theta^{-1} A^T Sigma]`
//! is the first-order part of the perturbed normal equations. When
//! `4 eta1 ||J^+|| mu_bar < 1` the true value is bracketed by
//! `[2/(1+sqrt 2) mu_bar, 2 mu_bar]`.

use crate::error::{IlsError, Result};
use crate::ils::IlsProblem;
use crate::matcore::{
    frobenius, min_norm_solve, singular_values, tri_solve, vec_2, HouseholderQr, Mat, Side, Trans,
    Uplo,
};

/// Weight used when none is given.
pub const DEFAULT_THETA: f64 = 1.0;

/// Lower sandwich factor `2 / (1 + sqrt 2)`.
pub const LOWER_FACTOR: f64 = 2.0 / (1.0 + std::f64::consts::SQRT_2);

#[derive(Clone, Debug, PartialEq)]
pub struct BackwardErrorReport {
    pub mu_bar: f64,
    /// `||[dA, theta db]||_F` of a known perturbation, when one was supplied.
    pub mu_one: Option<f64>,
    /// `||A^T Sigma (b - A y)||_2` for the problem `mu_bar` refers to.
    pub gamma: f64,
    pub theta: f64,
    pub eta1: f64,
    pub hypothesis_ok: bool,
    /// Spectral norm of `J^+`, used in the hypothesis.
    pub jdag_norm: f64,
    /// Frobenius norm of `J^+`, reported alongside since the norm in the
    /// hypothesis could also be read this way.
    pub jdag_norm_fro: f64,
}

impl BackwardErrorReport {
    /// Certified interval for the exact backward error, if the smallness
    /// hypothesis holds.
    pub fn mu_interval(&self) -> Option<(f64, f64)> {
        self.hypothesis_ok
            .then_some((LOWER_FACTOR * self.mu_bar, 2.0 * self.mu_bar))
    }

    /// `4 eta1 ||J^+||_F mu_bar < 1`.
    pub fn hypothesis_ok_fro(&self) -> bool {
        4.0 * self.eta1 * self.jdag_norm_fro * self.mu_bar < 1.0
    }
}

/// Matrix-free `J_ILS` for a fixed `(problem, y, theta)`. Vectors in the
/// data space are laid out as `[vec(dA); theta db]`.
pub struct JilsOperator<'a> {
    problem: &'a IlsProblem,
    y: Vec<f64>,
    sigma_r: Vec<f64>,
    sigma_a: Mat,
    theta: f64,
}

impl<'a> JilsOperator<'a> {
    pub fn new(problem: &'a IlsProblem, y: &[f64], theta: f64) -> Result<Self> {
        if y.len() != problem.n() {
            return Err(IlsError::dims("J_ILS", format!("y has length {}, n = {}", y.len(), problem.n())));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(IlsError::Invalid(format!("theta must be positive, got {theta}")));
        }
        let r = problem.residual(y)?;
        Ok(Self {
            problem,
            y: y.to_vec(),
            sigma_r: problem.sigma(&r),
            sigma_a: problem.sigma_a(),
            theta,
        })
    }

    pub fn rows(&self) -> usize {
        self.problem.n()
    }

    pub fn cols(&self) -> usize {
        let m = self.problem.m();
        m * self.problem.n() + m
    }

    /// `J z = dA^T Sigma r_y - A^T Sigma dA y + theta^{-1} A^T Sigma t`
    /// for `z = [vec(dA); t]`. Cost `O(mn)`.
    pub fn matvec(&self, z: &[f64]) -> Vec<f64> {
        let (m, n) = (self.problem.m(), self.problem.n());
        assert_eq!(z.len(), self.cols());
        let mut out = vec![0.0; n];
        // dA y, column by column of dA
        let mut da_y = vec![0.0; m];
        for j in 0..n {
            let col = &z[j * m..(j + 1) * m];
            out[j] += col.iter().zip(&self.sigma_r).map(|(d, s)| d * s).sum::<f64>();
            for (acc, d) in da_y.iter_mut().zip(col) {
                *acc += d * self.y[j];
            }
        }
        let t = &z[m * n..];
        let w: Vec<f64> = t
            .iter()
            .zip(&da_y)
            .map(|(ti, dyi)| ti / self.theta - dyi)
            .collect();
        // A^T Sigma w
        let atsw = self.sigma_a.tr_matvec(&w).expect("shapes");
        for (o, v) in out.iter_mut().zip(atsw) {
            *o += v;
        }
        out
    }

    /// `J^T u = [vec(Sigma r_y u^T - Sigma A u y^T); theta^{-1} Sigma A u]`.
    pub fn rmatvec(&self, u: &[f64]) -> Vec<f64> {
        let (m, n) = (self.problem.m(), self.problem.n());
        assert_eq!(u.len(), n);
        let sau = self.sigma_a.matvec(u).expect("shapes");
        let mut out = Vec::with_capacity(self.cols());
        for j in 0..n {
            for i in 0..m {
                out.push(self.sigma_r[i] * u[j] - sau[i] * self.y[j]);
            }
        }
        out.extend(sau.iter().map(|v| v / self.theta));
        out
    }

    /// Dense `n x (mn + m)` matrix. Column block `j` of the first part is
    /// `e_j (Sigma r_y)^T - y_j A^T Sigma`.
    pub fn dense(&self) -> Mat {
        let (m, n) = (self.problem.m(), self.problem.n());
        let mut jm = Mat::zeros(n, self.cols());
        for j in 0..n {
            for i in 0..m {
                let c = j * m + i;
                for row in 0..n {
                    jm[(row, c)] = -self.y[j] * self.sigma_a[(i, row)];
                }
                jm[(j, c)] += self.sigma_r[i];
            }
        }
        for i in 0..m {
            for row in 0..n {
                jm[(row, m * n + i)] = self.sigma_a[(i, row)] / self.theta;
            }
        }
        jm
    }
}

/// Dense `J_ILS`.
pub fn build_jils(problem: &IlsProblem, y: &[f64], theta: f64) -> Result<Mat> {
    Ok(JilsOperator::new(problem, y, theta)?.dense())
}

/// `||(A+dA)^T Sigma ((b+db) - (A+dA) y)||_2` for an already perturbed problem.
pub fn gamma(problem: &IlsProblem, y: &[f64]) -> Result<f64> {
    Ok(vec_2(&problem.normal_residual(y)?))
}

/// `||[dA, theta db]||_F`.
pub fn mu_one(da: &Mat, db: &[f64], theta: f64) -> f64 {
    let fa = frobenius(da);
    let fb = theta * vec_2(db);
    fa.hypot(fb)
}

/// Linearization estimate of the backward error of `y` for `problem`.
pub fn mu_bar(problem: &IlsProblem, y: &[f64], theta: f64) -> Result<BackwardErrorReport> {
    let op = JilsOperator::new(problem, y, theta)?;
    let g = problem.normal_residual(y)?;
    let gamma = vec_2(&g);
    let jd = op.dense();

    let mu_bar = if g.iter().all(|&v| v == 0.0) {
        0.0
    } else {
        vec_2(&min_norm_solve(&jd, &g)?)
    };

    // J^T = Q R, so J and R^T share singular values and ||J^+||_F = ||R^{-1}||_F.
    let qr = HouseholderQr::new(&jd.transpose())?;
    qr.check_rank()?;
    let rt = qr.r();
    let smin = singular_values(&rt).last().copied().unwrap_or(0.0);
    let jdag_norm = 1.0 / smin;
    let rinv = tri_solve(&rt, &Mat::identity(rt.rows()), Side::Left, Uplo::Upper, Trans::No)?;
    let jdag_norm_fro = frobenius(&rinv);

    let eta1 = (theta.powi(-2) + vec_2(y).powi(2)).sqrt();
    let hypothesis_ok = 4.0 * eta1 * jdag_norm * mu_bar < 1.0;
    Ok(BackwardErrorReport {
        mu_bar,
        mu_one: None,
        gamma,
        theta,
        eta1,
        hypothesis_ok,
        jdag_norm,
        jdag_norm_fro,
    })
}

/// [`mu_bar`] plus `mu_one` for the perturbation `(dA, db)` that is known to
/// have produced `y`.
pub fn backward_error_with_known(
    problem: &IlsProblem,
    y: &[f64],
    theta: f64,
    da: &Mat,
    db: &[f64],
) -> Result<BackwardErrorReport> {
    let mut rep = mu_bar(problem, y, theta)?;
    rep.mu_one = Some(mu_one(da, db, theta));
    Ok(rep)
}
