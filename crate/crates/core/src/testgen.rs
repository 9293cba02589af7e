//! Seeded random test problems with graded conditioning, componentwise
//! perturbations, and forward-error metrics.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` with a fixed
//! stream per purpose (see the `STREAM_*` constants), so the matrix, the
//! right-hand side, and the perturbation of one seed are independent draws
//! and each can be regenerated on its own.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{IlsError, Result};
use crate::ils::{check_definite, IlsProblem, Selector};
use crate::matcore::{qr_thin, singular_values, vec_2, vec_inf, HouseholderQr, Mat};

pub const STREAM_MATRIX: u64 = 1;
pub const STREAM_RHS: u64 = 2;
pub const STREAM_PERTURB: u64 = 3;
pub const STREAM_GAUSSIAN_RHS: u64 = 4;

/// Weight of the null-space component in the structured right-hand side.
pub const NULL_WEIGHT: f64 = 1e-5;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub delta: f64,
    pub eps_sol: f64,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec { m: 16, n: 8, p: 10, delta: 1e-3, eps_sol: 1e-3, seed: 0 }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p < self.n || self.p > self.m {
            return Err(IlsError::Invalid(format!(
                "need 1 <= n <= p <= m, got m={} n={} p={}",
                self.m, self.n, self.p
            )));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(IlsError::Invalid(format!("delta must lie in (0, 1], got {}", self.delta)));
        }
        if !(self.eps_sol > 0.0 && self.eps_sol.is_finite()) {
            return Err(IlsError::Invalid(format!("eps_sol must be positive, got {}", self.eps_sol)));
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.m - self.p
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbSpec {
    pub level: f64,
    pub seed: u64,
}

impl Default for PerturbSpec {
    fn default() -> Self {
        PerturbSpec { level: 1e-10, seed: 0 }
    }
}

/// Factors of a generated matrix `A = [S1 D V; S2 D V / 2]`.
#[derive(Clone, Debug)]
pub struct GenParts {
    pub s1: Mat,
    pub s2: Mat,
    pub d: Vec<f64>,
    pub v: Mat,
    pub a: Mat,
}

/// `d_i = delta^{-(n-i)/(n-1)}`, `i = 1..n`: geometric from `1/delta` to 1.
pub fn grading(n: usize, delta: f64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (1..=n)
        .map(|i| delta.powf(-((n - i) as f64) / ((n - 1) as f64)))
        .collect()
}

fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> Mat {
    Mat::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `rows x cols` with orthonormal columns (rows >= cols) or rows.
fn random_orthonormal(rows: usize, cols: usize, rng: &mut impl Rng) -> Result<Mat> {
    if rows == 0 {
        return Ok(Mat::zeros(0, cols));
    }
    if rows >= cols {
        Ok(qr_thin(&gaussian(rows, cols, rng))?.0)
    } else {
        Ok(qr_thin(&gaussian(cols, rows, rng))?.0.transpose())
    }
}

pub fn gen_parts(spec: &GenSpec) -> Result<GenParts> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed, STREAM_MATRIX);
    let n = spec.n;
    let s1 = random_orthonormal(spec.p, n, &mut rng)?;
    let s2 = random_orthonormal(spec.q(), n, &mut rng)?;
    let v = random_orthonormal(n, n, &mut rng)?;
    let d = grading(n, spec.delta);
    let dv = Mat::from_fn(n, n, |i, j| d[i] * v[(i, j)]);
    let top = s1.matmul(&dv)?;
    let bottom = s2.matmul(&dv)?.scale(0.5);
    let a = top.vstack(&bottom)?;
    Ok(GenParts { s1, s2, d, v, a })
}

pub fn gen_matrix(spec: &GenSpec) -> Result<Mat> {
    Ok(gen_parts(spec)?.a)
}

/// Unit vector in the null space of `A^T`, from a Gaussian draw projected
/// with the full Householder `Q` of `A`.
pub fn null_vector(a: &Mat, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if m <= n {
        return Err(IlsError::DegenerateNullspace);
    }
    let qr = HouseholderQr::new(a)?;
    for _ in 0..8 {
        let mut g: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        qr.apply_qt(&mut g);
        g[..n].iter_mut().for_each(|t| *t = 0.0);
        qr.apply_q(&mut g);
        let norm = vec_2(&g);
        if norm > 0.0 {
            g.iter_mut().for_each(|t| *t /= norm);
            return Ok(g);
        }
    }
    Err(IlsError::DegenerateNullspace)
}

/// Solution profile `v`: `v_1 = v_2 = eps`, `v_n = 1/eps`, zero elsewhere.
pub fn solution_profile(n: usize, eps_sol: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v.iter_mut().take(2).for_each(|t| *t = eps_sol);
    v[n - 1] = 1.0 / eps_sol;
    v
}

/// `b = A v + 1e-5 b2` with `A^T b2 = 0`, `||b2||_2 = 1`.
pub fn gen_rhs(a: &Mat, eps_sol: f64, seed: u64) -> Result<Vec<f64>> {
    let mut rng = rng_for(seed, STREAM_RHS);
    let b2 = null_vector(a, &mut rng)?;
    let mut b = a.matvec(&solution_profile(a.cols(), eps_sol))?;
    crate::matcore::vecops::axpy(NULL_WEIGHT, &b2, &mut b);
    Ok(b)
}

/// Standard-normal right-hand side.
pub fn gaussian_rhs(m: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, STREAM_GAUSSIAN_RHS);
    (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Generated matrix with the structured right-hand side.
pub fn gen_problem(spec: &GenSpec) -> Result<IlsProblem> {
    let a = gen_matrix(spec)?;
    let b = gen_rhs(&a, spec.eps_sol, spec.seed)?;
    let prob = IlsProblem::new(a, b, spec.p, spec.q())?;
    check_definite(&prob)?;
    Ok(prob)
}

/// Generated matrix with a standard-normal right-hand side.
pub fn gen_problem_gaussian(spec: &GenSpec) -> Result<IlsProblem> {
    let a = gen_matrix(spec)?;
    let b = gaussian_rhs(spec.m, spec.seed);
    let prob = IlsProblem::new(a, b, spec.p, spec.q())?;
    check_definite(&prob)?;
    Ok(prob)
}

/// `dA = level * dA1 .* A`, `db = level * db1 .* b`, entries of `dA1`, `db1`
/// uniform on `(-1, 1)`.
pub fn gen_perturbation(problem: &IlsProblem, pspec: &PerturbSpec) -> Result<(Mat, Vec<f64>)> {
    if !(pspec.level >= 0.0 && pspec.level.is_finite()) {
        return Err(IlsError::Invalid(format!("perturbation level must be >= 0, got {}", pspec.level)));
    }
    let mut rng = rng_for(pspec.seed, STREAM_PERTURB);
    let unif = Uniform::new(-1.0, 1.0).expect("valid range");
    let a = problem.a();
    let da = Mat::from_fn(a.rows(), a.cols(), |i, j| pspec.level * unif.sample(&mut rng) * a[(i, j)]);
    let db = problem.b().iter().map(|bi| pspec.level * unif.sample(&mut rng) * bi).collect();
    Ok((da, db))
}

/// 2-norm condition number of `A^T Sigma A`.
pub fn normal_cond(problem: &IlsProblem) -> f64 {
    let s = singular_values(&problem.normal_matrix());
    s[0] / s[s.len() - 1]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorMetrics {
    pub r2: f64,
    pub rinf: f64,
    pub rc: f64,
}

/// Normwise, mixed, and componentwise relative errors of `L^T x_tilde`.
pub fn error_metrics(x: &[f64], x_tilde: &[f64], sel: &Selector) -> Result<ErrorMetrics> {
    if x.len() != x_tilde.len() {
        return Err(IlsError::dims("error_metrics", "x and x_tilde differ in length"));
    }
    let lx = sel.apply_t(x)?;
    let lxt = sel.apply_t(x_tilde)?;
    let diff = crate::matcore::vecops::sub(&lxt, &lx);
    if vec_inf(&lx) == 0.0 {
        return Err(IlsError::ZeroSelection);
    }
    if let Some(i) = lx.iter().position(|&v| v == 0.0) {
        return Err(IlsError::ZeroComponent(i));
    }
    let rc = diff.iter().zip(&lx).map(|(d, v)| d.abs() / v.abs()).fold(0.0, f64::max);
    Ok(ErrorMetrics {
        r2: vec_2(&diff) / vec_2(&lx),
        rinf: vec_inf(&diff) / vec_inf(&lx),
        rc,
    })
}
