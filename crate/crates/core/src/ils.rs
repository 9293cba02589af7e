//! The indefinite least squares problem
//! `min_x (b - Ax)^T Sigma (b - Ax)`, `Sigma = diag(I_p, -I_q)`,
//! solved by the QR-Cholesky method.

use std::path::Path;

use log::warn;

use crate::error::{IlsError, Result};
use crate::matcore::{
    cholesky, frobenius, io, qr_thin, tri_solve_vec, vec_2, vecops, Mat, Trans, Uplo,
};

/// Relative tolerance of the normal-equation residual check.
pub const NORMAL_EQ_TOL: f64 = 1e-10;

/// Cholesky pivots below this fraction of the largest one trigger a warning.
pub const NEAR_SEMIDEFINITE_RATIO: f64 = 1e-12;

/// Multiplies by the signature matrix: keeps the first `p` entries and
/// negates the remaining `q`.
pub fn sigma_apply(v: &[f64], p: usize, q: usize) -> Result<Vec<f64>> {
    if v.len() != p + q {
        return Err(IlsError::dims("sigma_apply", format!("length {} for p+q = {}", v.len(), p + q)));
    }
    let mut out = v.to_vec();
    out[p..].iter_mut().for_each(|x| *x = -*x);
    Ok(out)
}

/// Negates the last `m - p` rows of `a` in place.
fn sigma_rows(a: &mut Mat, p: usize) {
    for i in p..a.rows() {
        a.row_mut(i).iter_mut().for_each(|x| *x = -*x);
    }
}

#[derive(Clone, Debug)]
pub struct IlsProblem {
    a: Mat,
    b: Vec<f64>,
    p: usize,
    q: usize,
}

impl IlsProblem {
    pub fn new(a: Mat, b: Vec<f64>, p: usize, q: usize) -> Result<Self> {
        let (m, n) = a.shape();
        if b.len() != m {
            return Err(IlsError::dims("IlsProblem", format!("b has length {}, A has {m} rows", b.len())));
        }
        if p + q != m {
            return Err(IlsError::dims("IlsProblem", format!("p + q = {} but m = {m}", p + q)));
        }
        if n == 0 || m < n {
            return Err(IlsError::Invalid(format!("need m >= n >= 1, got {m}x{n}")));
        }
        if p < n {
            return Err(IlsError::Invalid(format!("p = {p} < n = {n}; A^T Sigma A cannot be definite")));
        }
        if !vecops::all_finite(&b) {
            return Err(IlsError::NonFinite(b.iter().position(|v| !v.is_finite()).unwrap()));
        }
        Ok(Self { a, b, p, q })
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn sigma(&self, v: &[f64]) -> Vec<f64> {
        sigma_apply(v, self.p, self.q).expect("length m")
    }

    /// `Sigma A`.
    pub fn sigma_a(&self) -> Mat {
        let mut sa = self.a.clone();
        sigma_rows(&mut sa, self.p);
        sa
    }

    /// `A^T Sigma A`, formed explicitly.
    pub fn normal_matrix(&self) -> Mat {
        self.a.tr_matmul(&self.sigma_a()).expect("shapes")
    }

    /// `b - A y`.
    pub fn residual(&self, y: &[f64]) -> Result<Vec<f64>> {
        Ok(vecops::sub(&self.b, &self.a.matvec(y)?))
    }

    /// `A^T Sigma (b - A y)`; zero exactly at the ILS solution.
    pub fn normal_residual(&self, y: &[f64]) -> Result<Vec<f64>> {
        let r = self.residual(y)?;
        self.a.tr_matvec(&self.sigma(&r))
    }

    /// `(A + dA, b + db)` with the same signature.
    pub fn perturbed(&self, da: &Mat, db: &[f64]) -> Result<IlsProblem> {
        if db.len() != self.m() {
            return Err(IlsError::dims("perturbed", "db length"));
        }
        IlsProblem::new(self.a.add(da)?, vecops::add(&self.b, db), self.p, self.q)
    }

    pub fn with_rhs(&self, b: Vec<f64>) -> Result<IlsProblem> {
        IlsProblem::new(self.a.clone(), b, self.p, self.q)
    }
}

/// Factors of the QR-Cholesky method: `A = [Q1; Q2] R` and
/// `Q1^T Q1 - Q2^T Q2 = U^T U`, so that `A^T Sigma A = R^T U^T U R`.
#[derive(Clone, Debug)]
pub struct IlsFactorization {
    pub q1: Mat,
    pub q2: Mat,
    pub r: Mat,
    pub u: Mat,
}

impl IlsFactorization {
    pub fn n(&self) -> usize {
        self.r.rows()
    }

    /// `v <- M^{-1} v` with `M = A^T Sigma A`, by four triangular solves
    /// (`R^T`, `U^T`, `U`, `R`).
    pub fn apply_m_inv(&self, v: &mut [f64]) -> Result<()> {
        tri_solve_vec(&self.r, Uplo::Upper, Trans::Yes, v)?;
        tri_solve_vec(&self.u, Uplo::Upper, Trans::Yes, v)?;
        tri_solve_vec(&self.u, Uplo::Upper, Trans::No, v)?;
        tri_solve_vec(&self.r, Uplo::Upper, Trans::No, v)
    }

    /// `M^{-1} B` column by column.
    pub fn m_inv_mat(&self, b: &Mat) -> Result<Mat> {
        if b.rows() != self.n() {
            return Err(IlsError::dims("m_inv_mat", format!("{:?} rows vs n = {}", b.shape(), self.n())));
        }
        let mut out = Mat::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let mut c = b.col(j);
            self.apply_m_inv(&mut c)?;
            out.set_col(j, &c);
        }
        Ok(out)
    }

    /// Stacked `Q = [Q1; Q2]`.
    pub fn q(&self) -> Mat {
        self.q1.vstack(&self.q2).expect("same column count")
    }
}

/// Factors the problem and certifies that `A^T Sigma A` is positive definite.
pub fn check_definite(problem: &IlsProblem) -> Result<IlsFactorization> {
    let (q, r) = qr_thin(problem.a())?;
    let q1 = q.row_block(0, problem.p());
    let q2 = q.row_block(problem.p(), problem.m());
    let s = q1.tr_matmul(&q1)?.sub(&q2.tr_matmul(&q2)?)?;
    // symmetrize; the two Gram products are symmetric only up to rounding
    let s = Mat::from_fn(s.rows(), s.cols(), |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let u = cholesky(&s)?;
    let pivots: Vec<f64> = (0..u.rows()).map(|i| u[(i, i)] * u[(i, i)]).collect();
    let pmax = pivots.iter().cloned().fold(0.0, f64::max);
    let pmin = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if pmin < NEAR_SEMIDEFINITE_RATIO * pmax {
        warn!(
            "A^T Sigma A is nearly semidefinite (pivot ratio {:e}); condition numbers will be very large",
            pmin / pmax
        );
    }
    Ok(IlsFactorization { q1, q2, r, u })
}

/// The rows of `L^T` pick out linear functionals of the solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Selector {
    l: Mat,
}

impl Selector {
    pub fn new(l: Mat) -> Result<Self> {
        let (n, k) = l.shape();
        if k == 0 || k > n {
            return Err(IlsError::Invalid(format!("selector must be n x k with 1 <= k <= n, got {n}x{k}")));
        }
        if let Some(j) = (0..k).find(|&j| (0..n).all(|i| l[(i, j)] == 0.0)) {
            return Err(IlsError::Invalid(format!("selector column {j} is zero")));
        }
        Ok(Self { l })
    }

    pub fn identity(n: usize) -> Self {
        Self { l: Mat::identity(n) }
    }

    /// Columns `e_i` for the given zero-based indices.
    pub fn unit_columns(n: usize, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
            return Err(IlsError::Invalid(format!("index {bad} out of range for n = {n}")));
        }
        let mut l = Mat::zeros(n, idx.len());
        for (j, &i) in idx.iter().enumerate() {
            l[(i, j)] = 1.0;
        }
        Self::new(l)
    }

    pub fn l(&self) -> &Mat {
        &self.l
    }

    pub fn n(&self) -> usize {
        self.l.rows()
    }

    pub fn k(&self) -> usize {
        self.l.cols()
    }

    /// `L^T v`.
    pub fn apply_t(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.l.tr_matvec(v)
    }

    pub fn is_identity(&self) -> bool {
        self.l.is_square() && self.l == Mat::identity(self.n())
    }
}

#[derive(Clone, Debug)]
pub struct IlsSolution {
    pub x: Vec<f64>,
    /// `b - A x`.
    pub r: Vec<f64>,
    pub factorization: IlsFactorization,
}

/// QR-Cholesky solve: `U^T w = Q^T Sigma b`, `U t = w`, `R x = t`.
pub fn solve(problem: &IlsProblem) -> Result<IlsSolution> {
    let f = check_definite(problem)?;
    let sb = problem.sigma(problem.b());
    let mut x = f.q().tr_matvec(&sb)?;
    tri_solve_vec(&f.u, Uplo::Upper, Trans::Yes, &mut x)?;
    tri_solve_vec(&f.u, Uplo::Upper, Trans::No, &mut x)?;
    tri_solve_vec(&f.r, Uplo::Upper, Trans::No, &mut x)?;
    let r = problem.residual(&x)?;
    Ok(IlsSolution { x, r, factorization: f })
}

impl IlsSolution {
    /// `||A^T Sigma (b - A x)||_2`.
    pub fn normal_residual_norm(&self, problem: &IlsProblem) -> f64 {
        vec_2(&problem.a().tr_matvec(&problem.sigma(&self.r)).expect("shapes"))
    }

    /// Scaled normal-equation check:
    /// `||A^T Sigma r|| <= tol ||A||_F^2 (||x|| + ||b|| / ||A||_F)`.
    pub fn satisfies_normal_equations(&self, problem: &IlsProblem) -> bool {
        let af = frobenius(problem.a());
        let bound = NORMAL_EQ_TOL * af * af * (vec_2(&self.x) + vec_2(problem.b()) / af);
        self.normal_residual_norm(problem) <= bound
    }
}

/// `g(A, b) = L^T x`.
pub fn eval_g(solution: &IlsSolution, selector: &Selector) -> Result<Vec<f64>> {
    if selector.n() != solution.x.len() {
        return Err(IlsError::dims("eval_g", format!("selector has {} rows, x has {}", selector.n(), solution.x.len())));
    }
    selector.apply_t(&solution.x)
}

/// A problem directory: `A.mat`, `b.vec`, `meta` (`p=`, `q=` lines) and an
/// optional `L.mat`.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub problem: IlsProblem,
    pub selector: Option<Selector>,
}

fn parse_meta(text: &str) -> Result<(usize, usize)> {
    let mut p = None;
    let mut q = None;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| IlsError::Parse(format!("meta line {line:?} is not key=value")))?;
        let val: usize = val
            .trim()
            .parse()
            .map_err(|e| IlsError::Parse(format!("meta {key}: {e}")))?;
        match key.trim() {
            "p" => p = Some(val),
            "q" => q = Some(val),
            _ => {}
        }
    }
    match (p, q) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(IlsError::Parse("meta must define p and q".into())),
    }
}

pub fn read_bundle(dir: &Path) -> Result<Bundle> {
    let a = io::read_mat(&dir.join("A.mat"))?;
    let b = io::read_vec(&dir.join("b.vec"))?;
    let (p, q) = parse_meta(&std::fs::read_to_string(dir.join("meta"))?)?;
    let problem = IlsProblem::new(a, b, p, q)?;
    let lpath = dir.join("L.mat");
    let selector = if lpath.exists() {
        let l = io::read_mat(&lpath)?;
        if l.rows() != problem.n() {
            return Err(IlsError::dims("read_bundle", format!("L has {} rows, n = {}", l.rows(), problem.n())));
        }
        Some(Selector::new(l)?)
    } else {
        None
    };
    Ok(Bundle { problem, selector })
}

pub fn write_bundle(dir: &Path, problem: &IlsProblem, selector: Option<&Selector>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    io::write_mat(&dir.join("A.mat"), problem.a())?;
    io::write_vec(&dir.join("b.vec"), problem.b())?;
    std::fs::write(dir.join("meta"), format!("p={}\nq={}\n", problem.p(), problem.q()))?;
    if let Some(s) = selector {
        io::write_mat(&dir.join("L.mat"), s.l())?;
    }
    Ok(())
}
