//! Mixed and componentwise condition numbers of `L^T x` for the ILS problem,
//! their cheap upper bounds and power-method estimates, and two normwise
//! comparison numbers.
//!
//! With `M = A^T Sigma A`, `W = M^{-1} A^T Sigma` and
//! `V = M^{-1} (x) (Sigma r)^T - x^T (x) W`, the condition operator is
//! `L^T [V D_A, W D_b]` where `D_A = diag(vec(A))`, `D_b = diag(b)`.

pub mod frechet;
pub mod normwise;
pub mod power;

pub use frechet::{frechet_adjoint, frechet_apply, frechet_dense};
pub use normwise::{alpha_1, alpha_2};
pub use power::{power_estimate, DEFAULT_MAX_ITERS};

use crate::error::{IlsError, Result};
use crate::ils::{IlsFactorization, IlsProblem, IlsSolution, Selector};
use crate::matcore::{inf_norm, kron, vec_inf, Mat};

/// Largest `m * n` for which the explicit `n x mn` matrix `V` is built.
pub const DENSE_LIMIT: usize = 4096;

/// Output measure: infinity norm of `L^T x` or componentwise relative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Inf,
    C,
}

/// Quantities shared by every condition number of one solved problem.
#[derive(Clone, Debug)]
pub struct CondCore {
    problem: IlsProblem,
    factorization: IlsFactorization,
    x: Vec<f64>,
    r: Vec<f64>,
    sigma_r: Vec<f64>,
    sigma_a: Mat,
    w: Mat,
}

impl CondCore {
    pub fn new(problem: &IlsProblem, solution: &IlsSolution) -> Result<Self> {
        let n = problem.n();
        if solution.x.len() != n || solution.r.len() != problem.m() {
            return Err(IlsError::dims("CondCore::new", "solution does not belong to problem"));
        }
        let sigma_a = problem.sigma_a();
        let w = solution.factorization.m_inv_mat(&sigma_a.transpose())?;
        Ok(CondCore {
            problem: problem.clone(),
            factorization: solution.factorization.clone(),
            x: solution.x.clone(),
            r: solution.r.clone(),
            sigma_r: problem.sigma(&solution.r),
            sigma_a,
            w,
        })
    }

    pub fn problem(&self) -> &IlsProblem {
        &self.problem
    }

    pub fn factorization(&self) -> &IlsFactorization {
        &self.factorization
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn sigma_r(&self) -> &[f64] {
        &self.sigma_r
    }

    /// `Sigma A`.
    pub fn sigma_a(&self) -> &Mat {
        &self.sigma_a
    }

    /// `W = M^{-1} A^T Sigma`, `n x m`.
    pub fn w(&self) -> &Mat {
        &self.w
    }

    pub(crate) fn check_selector(&self, sel: &Selector) -> Result<()> {
        if sel.n() != self.problem.n() {
            return Err(IlsError::dims(
                "selector",
                format!("L has {} rows, n = {}", sel.n(), self.problem.n()),
            ));
        }
        Ok(())
    }

    /// `L^T M^{-1}`, `k x n`, one `M^{-1}` application per column of `L`.
    pub fn lt_m_inv(&self, sel: &Selector) -> Result<Mat> {
        self.check_selector(sel)?;
        Ok(self.factorization.m_inv_mat(sel.l())?.transpose())
    }

    /// Dense `M^{-1}` (verification only).
    pub fn m_inv_dense(&self) -> Result<Mat> {
        self.factorization.m_inv_mat(&Mat::identity(self.problem.n()))
    }

    /// Explicit `V = M^{-1} (x) (Sigma r)^T - x^T (x) W`, `n x mn`.
    pub fn v_explicit(&self) -> Result<Mat> {
        let (m, n) = self.problem.a().shape();
        if m * n > DENSE_LIMIT {
            return Err(IlsError::SizeExceeded { size: m * n, limit: DENSE_LIMIT });
        }
        let first = kron(&self.m_inv_dense()?, &Mat::new(1, m, self.sigma_r.clone())?);
        let second = kron(&Mat::new(1, n, self.x.clone())?, &self.w);
        first.sub(&second)
    }

    /// `L^T x` together with the infinity-norm guard.
    fn selected_nonzero(&self, sel: &Selector) -> Result<Vec<f64>> {
        let ltx = sel.apply_t(&self.x)?;
        if vec_inf(&ltx) == 0.0 {
            return Err(IlsError::ZeroSelection);
        }
        Ok(ltx)
    }

    /// `L^T x` with every component nonzero.
    fn selected_components(&self, sel: &Selector) -> Result<Vec<f64>> {
        let ltx = sel.apply_t(&self.x)?;
        if let Some(i) = ltx.iter().position(|&v| v == 0.0) {
            return Err(IlsError::ZeroComponent(i));
        }
        Ok(ltx)
    }

    /// Row sums `t1 = sum_j |L^T V_j| |A(:,j)|` and `t2 = |L^T W| |b|`,
    /// accumulated block by block with `L^T V_j = c_j (Sigma r)^T - x_j L^T W`.
    fn row_terms(&self, sel: &Selector) -> Result<(Vec<f64>, Vec<f64>)> {
        let ltm = self.lt_m_inv(sel)?;
        let ltw = sel.l().tr_matmul(&self.w)?;
        let a = self.problem.a();
        let (m, n) = a.shape();
        let k = sel.k();
        let mut t1 = vec![0.0; k];
        for j in 0..n {
            let xj = self.x[j];
            for (row, t) in t1.iter_mut().enumerate() {
                let cj = ltm[(row, j)];
                let lw = ltw.row(row);
                let mut acc = 0.0;
                for i in 0..m {
                    acc += (cj * self.sigma_r[i] - xj * lw[i]).abs() * a[(i, j)].abs();
                }
                *t += acc;
            }
        }
        let b = self.problem.b();
        let t2 = (0..k)
            .map(|row| ltw.row(row).iter().zip(b).map(|(w, bi)| w.abs() * bi.abs()).sum())
            .collect();
        Ok((t1, t2))
    }
}

fn max_of(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, f64::max)
}

/// Mixed condition number `kappa_inf`, evaluated block by block.
pub fn kappa_inf(core: &CondCore, sel: &Selector) -> Result<f64> {
    let (t1, t2) = core.row_terms(sel)?;
    Ok(max_of(t1.iter().zip(&t2).map(|(a, b)| a + b)))
}

/// `kappa_inf` through the explicit `V` (requires `mn <= DENSE_LIMIT`).
pub fn kappa_inf_alt(core: &CondCore, sel: &Selector) -> Result<f64> {
    core.check_selector(sel)?;
    let ltv = sel.l().tr_matmul(&core.v_explicit()?)?.abs();
    let ltw = sel.l().tr_matmul(core.w())?.abs();
    let vec_a: Vec<f64> = crate::matcore::vec(core.problem().a()).iter().map(|v| v.abs()).collect();
    let b_abs: Vec<f64> = core.problem().b().iter().map(|v| v.abs()).collect();
    let p1 = ltv.matvec(&vec_a)?;
    let p2 = ltw.matvec(&b_abs)?;
    Ok(max_of(p1.iter().zip(&p2).map(|(a, b)| a + b)))
}

/// `kappa_inf / ||L^T x||_inf`.
pub fn kappa_inf_rel(core: &CondCore, sel: &Selector) -> Result<f64> {
    let ltx = core.selected_nonzero(sel)?;
    Ok(kappa_inf(core, sel)? / vec_inf(&ltx))
}

/// Componentwise condition number `kappa_c`.
pub fn kappa_c(core: &CondCore, sel: &Selector) -> Result<f64> {
    let ltx = core.selected_components(sel)?;
    let (t1, t2) = core.row_terms(sel)?;
    Ok(max_of((0..ltx.len()).map(|i| (t1[i] + t2[i]) / ltx[i].abs())))
}

/// `sqrt(k) * kappa_inf`, an upper bound on the 2-norm mixed condition
/// number (not that number itself).
pub fn kappa_2_bound(core: &CondCore, sel: &Selector) -> Result<f64> {
    Ok((sel.k() as f64).sqrt() * kappa_inf(core, sel)?)
}

/// Row scaling applied to the output side: none, or `D^{-1}_{L^T x}`.
fn output_scaling(core: &CondCore, sel: &Selector, kind: Kind) -> Result<(Vec<f64>, f64)> {
    match kind {
        Kind::Inf => {
            let ltx = core.selected_nonzero(sel)?;
            Ok((vec![1.0; sel.k()], vec_inf(&ltx)))
        }
        Kind::C => {
            let ltx = core.selected_components(sel)?;
            Ok((ltx.iter().map(|v| 1.0 / v.abs()).collect(), 1.0))
        }
    }
}

/// Upper bound `kappa^u` with both infinity norms evaluated exactly.
///
/// The `k x mn` block `L^T M^{-1} [e_1 (Sigma r)^T - x_1 A^T Sigma, ...] D_A`
/// is formed column by column through the triangular factors.
pub fn kappa_upper(core: &CondCore, sel: &Selector, kind: Kind) -> Result<f64> {
    core.check_selector(sel)?;
    let (scale, denom) = output_scaling(core, sel, kind)?;
    let a = core.problem().a();
    let (m, n) = a.shape();
    let sa = core.sigma_a();
    let y = Mat::from_fn(n, m * n, |row, col| {
        let (j, i) = (col / m, col % m);
        let e = if row == j { core.sigma_r()[i] } else { 0.0 };
        (e - core.x()[j] * sa[(i, row)]) * a[(i, j)]
    });
    let c1 = sel.l().tr_matmul(&core.factorization().m_inv_mat(&y)?)?;
    let b = core.problem().b();
    let ltw = sel.l().tr_matmul(core.w())?;
    let c2 = Mat::from_fn(sel.k(), m, |row, i| ltw[(row, i)] * b[i]);
    let s = Mat::diag(&scale);
    let n1 = inf_norm(&s.matmul(&c1)?);
    let n2 = inf_norm(&s.matmul(&c2)?);
    Ok((n1 + n2) / denom)
}

/// Structured operator for the `k x mn` block `S L^T V D_A` of the upper
/// bound, where `S` is the output scaling. Nothing of size `mn` is stored.
pub struct UpperBlockOp<'a> {
    core: &'a CondCore,
    sel: &'a Selector,
    scale: Vec<f64>,
}

impl<'a> UpperBlockOp<'a> {
    pub fn new(core: &'a CondCore, sel: &'a Selector, kind: Kind) -> Result<Self> {
        core.check_selector(sel)?;
        let (scale, _) = output_scaling(core, sel, kind)?;
        Ok(UpperBlockOp { core, sel, scale })
    }

    /// `z in R^{mn} -> S L^T M^{-1} (Z^T Sigma r - A^T Sigma Z x)` with
    /// `Z = A .* unvec(z)`.
    pub fn matvec(&self, z: &[f64]) -> Result<Vec<f64>> {
        let a = self.core.problem().a();
        let (m, n) = a.shape();
        if z.len() != m * n {
            return Err(IlsError::dims("UpperBlockOp::matvec", format!("len {} vs mn = {}", z.len(), m * n)));
        }
        let sr = self.core.sigma_r();
        let x = self.core.x();
        let mut s = vec![0.0; n];
        let mut zx = vec![0.0; m];
        for j in 0..n {
            for i in 0..m {
                let zij = z[j * m + i] * a[(i, j)];
                s[j] += zij * sr[i];
                zx[i] += zij * x[j];
            }
        }
        let t = self.core.sigma_a().tr_matvec(&zx)?;
        crate::matcore::vecops::axpy(-1.0, &t, &mut s);
        self.core.factorization().apply_m_inv(&mut s)?;
        let mut out = self.sel.apply_t(&s)?;
        out.iter_mut().zip(&self.scale).for_each(|(o, c)| *o *= c);
        Ok(out)
    }

    /// `u in R^k -> vec((Sigma r w^T - Sigma A w x^T) .* A)` with
    /// `w = M^{-1} L S u`.
    pub fn rmatvec(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.sel.k() {
            return Err(IlsError::dims("UpperBlockOp::rmatvec", "u length differs from k"));
        }
        let su: Vec<f64> = u.iter().zip(&self.scale).map(|(a, b)| a * b).collect();
        let mut w = self.sel.l().matvec(&su)?;
        self.core.factorization().apply_m_inv(&mut w)?;
        let saw = self.core.sigma_a().matvec(&w)?;
        let a = self.core.problem().a();
        let (m, n) = a.shape();
        let sr = self.core.sigma_r();
        let x = self.core.x();
        let mut out = vec![0.0; m * n];
        for j in 0..n {
            for i in 0..m {
                out[j * m + i] = (sr[i] * w[j] - saw[i] * x[j]) * a[(i, j)];
            }
        }
        Ok(out)
    }
}

/// Power-method estimate of `kappa_upper`, using only triangular solves
/// with the stored factors. Never exceeds the exact value.
pub fn kappa_upper_estimated(core: &CondCore, sel: &Selector, kind: Kind) -> Result<f64> {
    kappa_upper_estimated_iters(core, sel, kind, DEFAULT_MAX_ITERS)
}

pub fn kappa_upper_estimated_iters(core: &CondCore, sel: &Selector, kind: Kind, max_iters: usize) -> Result<f64> {
    let (scale, denom) = output_scaling(core, sel, kind)?;
    let op = UpperBlockOp::new(core, sel, kind)?;
    let k = sel.k();
    // infinity norm of C as the 1-norm of C^T: matvec is C^T, rmatvec is C
    let e1 = power_estimate(
        |u| op.rmatvec(u).expect("shape checked"),
        |z| op.matvec(z).expect("shape checked"),
        k,
        max_iters,
    );
    let b = core.problem().b().to_vec();
    let c2_t = |u: &[f64]| -> Vec<f64> {
        let su: Vec<f64> = u.iter().zip(&scale).map(|(a, s)| a * s).collect();
        let mut w = sel.l().matvec(&su).expect("shape checked");
        core.factorization().apply_m_inv(&mut w).expect("nonsingular factors");
        let saw = core.sigma_a().matvec(&w).expect("shape checked");
        saw.iter().zip(&b).map(|(v, bi)| v * bi).collect()
    };
    let c2 = |z: &[f64]| -> Vec<f64> {
        let bz: Vec<f64> = z.iter().zip(&b).map(|(v, bi)| v * bi).collect();
        let mut s = core.sigma_a().tr_matvec(&bz).expect("shape checked");
        core.factorization().apply_m_inv(&mut s).expect("nonsingular factors");
        let out = sel.apply_t(&s).expect("shape checked");
        out.iter().zip(&scale).map(|(v, c)| v * c).collect()
    };
    let e2 = power_estimate(c2_t, c2, k, max_iters);
    Ok((e1 + e2) / denom)
}

/// Everything `cond` reports for one `(problem, L)` pair. Entries that are
/// undefined for the given data (zero components, zero residual, `L != I`)
/// are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub kappa_inf: f64,
    pub kappa_inf_rel: f64,
    pub kappa_c: Option<f64>,
    pub kappa_2_bound: f64,
    pub kappa_inf_u: f64,
    pub kappa_c_u: Option<f64>,
    pub kappa_inf_u_est: f64,
    pub kappa_c_u_est: Option<f64>,
    pub alpha_1: Option<f64>,
    pub alpha_2: Option<f64>,
}

fn optional(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(IlsError::ZeroComponent(_)) | Err(IlsError::ZeroResidual) | Err(IlsError::ZeroSelection) => Ok(None),
        Err(e) => Err(e),
    }
}

impl ConditionReport {
    pub fn compute(core: &CondCore, sel: &Selector) -> Result<Self> {
        let alpha_1 = if sel.is_identity() { optional(alpha_1(core))? } else { None };
        Ok(ConditionReport {
            kappa_inf: kappa_inf(core, sel)?,
            kappa_inf_rel: kappa_inf_rel(core, sel)?,
            kappa_c: optional(kappa_c(core, sel))?,
            kappa_2_bound: kappa_2_bound(core, sel)?,
            kappa_inf_u: kappa_upper(core, sel, Kind::Inf)?,
            kappa_c_u: optional(kappa_upper(core, sel, Kind::C))?,
            kappa_inf_u_est: kappa_upper_estimated(core, sel, Kind::Inf)?,
            kappa_c_u_est: optional(kappa_upper_estimated(core, sel, Kind::C))?,
            alpha_1,
            alpha_2: optional(alpha_2(core, sel))?,
        })
    }

    pub const KEYS: [&'static str; 10] = [
        "kappa_inf",
        "kappa_inf_rel",
        "kappa_c",
        "kappa_2_bound",
        "kappa_inf_u",
        "kappa_c_u",
        "kappa_inf_u_est",
        "kappa_c_u_est",
        "alpha_1",
        "alpha_2",
    ];

    pub fn values(&self) -> [Option<f64>; 10] {
        [
            Some(self.kappa_inf),
            Some(self.kappa_inf_rel),
            self.kappa_c,
            Some(self.kappa_2_bound),
            Some(self.kappa_inf_u),
            self.kappa_c_u,
            Some(self.kappa_inf_u_est),
            self.kappa_c_u_est,
            self.alpha_1,
            self.alpha_2,
        ]
    }

    fn fmt_value(v: Option<f64>) -> String {
        v.map_or_else(|| "NA".to_string(), |v| format!("{v:.5e}"))
    }

    /// One `key=value` line per entry.
    pub fn to_key_value(&self) -> String {
        Self::KEYS
            .iter()
            .zip(self.values())
            .map(|(k, v)| format!("{k}={}\n", Self::fmt_value(v)))
            .collect()
    }

    pub fn csv_header() -> String {
        Self::KEYS.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        self.values().into_iter().map(Self::fmt_value).collect::<Vec<_>>().join(",")
    }
}
