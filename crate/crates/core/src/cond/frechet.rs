//! Fréchet derivative of `g(A, b) = L^T (A^T Sigma A)^{-1} A^T Sigma b` and
//! its adjoint with respect to the trace inner product on `R^{m x n} x R^m`.

use super::CondCore;
use crate::error::{IlsError, Result};
use crate::ils::Selector;
use crate::matcore::{vecops, Mat};

/// `J(B, c) = L^T M^{-1} (B^T Sigma r - A^T Sigma B x + A^T Sigma c)`.
pub fn frechet_apply(core: &CondCore, sel: &Selector, b: &Mat, c: &[f64]) -> Result<Vec<f64>> {
    let a = core.problem().a();
    if b.shape() != a.shape() || c.len() != a.rows() {
        return Err(IlsError::dims("frechet_apply", "direction shape differs from (A, b)"));
    }
    core.check_selector(sel)?;
    let sigma_r = core.sigma_r();
    let mut s = b.tr_matvec(sigma_r)?;
    let bx = b.matvec(core.x())?;
    let rhs = vecops::sub(c, &bx);
    let atsw = core.sigma_a().tr_matvec(&rhs)?;
    vecops::axpy(1.0, &atsw, &mut s);
    core.factorization().apply_m_inv(&mut s)?;
    sel.apply_t(&s)
}

/// `J^*(u) = (Sigma r w^T - Sigma A w x^T, Sigma A w)` with `w = M^{-1} L u`.
pub fn frechet_adjoint(core: &CondCore, sel: &Selector, u: &[f64]) -> Result<(Mat, Vec<f64>)> {
    core.check_selector(sel)?;
    if u.len() != sel.k() {
        return Err(IlsError::dims("frechet_adjoint", format!("u has length {}, k = {}", u.len(), sel.k())));
    }
    let mut w = sel.l().matvec(u)?;
    core.factorization().apply_m_inv(&mut w)?;
    let saw = core.sigma_a().matvec(&w)?;
    let sigma_r = core.sigma_r();
    let x = core.x();
    let (m, n) = core.problem().a().shape();
    let da = Mat::from_fn(m, n, |i, j| sigma_r[i] * w[j] - saw[i] * x[j]);
    Ok((da, saw))
}

/// Dense `k x (mn + m)` matrix of `J` in the `[vec(B); c]` basis:
/// `[L^T V, L^T W]`.
pub fn frechet_dense(core: &CondCore, sel: &Selector) -> Result<Mat> {
    core.check_selector(sel)?;
    let ltv = sel.l().tr_matmul(&core.v_explicit()?)?;
    let ltw = sel.l().tr_matmul(core.w())?;
    Mat::hstack(&[&ltv, &ltw])
}
