//! Normwise comparison condition numbers.

use super::CondCore;
use crate::error::{IlsError, Result};
use crate::ils::Selector;
use crate::matcore::{frobenius, kron, spectral, vec_2, vec_perm_apply, Mat};

/// Residual below this fraction of `||b||_2` counts as zero for `alpha_2`.
pub const ZERO_RESIDUAL_RATIO: f64 = 1e-14;

/// The `n x mn` derivative of `x` with respect to `vec(A)` up to sign:
/// `x^T (x) M^{-1} A^T Sigma - (r^T Sigma (x) M^{-1}) Pi`, where
/// `Pi vec(B) = vec(B^T)`.
pub fn normwise_middle(core: &CondCore) -> Result<Mat> {
    let (m, n) = core.problem().a().shape();
    let k1 = kron(&Mat::new(1, n, core.x().to_vec())?, core.w());
    let k2 = kron(&Mat::new(1, m, core.sigma_r().to_vec())?, &core.m_inv_dense()?);
    let mut out = k1;
    for row in 0..n {
        // row of K2 Pi = Pi^T applied to the row of K2
        let permuted = vec_perm_apply(k2.row(row), n, m)?;
        out.row_mut(row).iter_mut().zip(&permuted).for_each(|(o, p)| *o -= p);
    }
    Ok(out)
}

/// Relative normwise condition number of the whole solution:
/// `(||M^{-1} A^T||_2 ||b||_2 + ||middle||_2 ||A||_F) / ||x||_2`.
pub fn alpha_1(core: &CondCore) -> Result<f64> {
    let xn = vec_2(core.x());
    if xn == 0.0 {
        return Err(IlsError::ZeroSelection);
    }
    let a = core.problem().a();
    let m_inv_at = core.factorization().m_inv_mat(&a.transpose())?;
    let t1 = spectral(&m_inv_at) * vec_2(core.problem().b());
    let t2 = spectral(&normwise_middle(core)?) * frobenius(a);
    Ok((t1 + t2) / xn)
}

/// Normwise condition number of `L^T x`:
/// `||L^T M^{-1} [B1, B2, B3]||_2 / ||L^T x||_2` with
/// `B1 = ||A||_F ||r|| (I - A^T r x^T / ||r||^2)`, `B2 = -||b|| A^T`,
/// `B3 = ||A||_F ||x|| A^T (I - r r^T / ||r||^2)`.
pub fn alpha_2(core: &CondCore, sel: &Selector) -> Result<f64> {
    core.check_selector(sel)?;
    let prob = core.problem();
    let (a, b, r, x) = (prob.a(), prob.b(), core.r(), core.x());
    let (m, n) = a.shape();
    let rn = vec_2(r);
    let bn = vec_2(b);
    if rn <= ZERO_RESIDUAL_RATIO * bn || rn == 0.0 {
        return Err(IlsError::ZeroResidual);
    }
    let ltx = sel.apply_t(x)?;
    let ltxn = vec_2(&ltx);
    if ltxn == 0.0 {
        return Err(IlsError::ZeroSelection);
    }
    let af = frobenius(a);
    let xn = vec_2(x);
    let rn2 = rn * rn;
    let atr = a.tr_matvec(r)?;
    let b1 = Mat::from_fn(n, n, |i, j| af * rn * (if i == j { 1.0 } else { 0.0 } - atr[i] * x[j] / rn2));
    let b2 = a.transpose().scale(-bn);
    let at = a.transpose();
    let b3 = Mat::from_fn(n, m, |i, j| af * xn * (at[(i, j)] - atr[i] * r[j] / rn2));
    let blocks = Mat::hstack(&[&b1, &b2, &b3])?;
    let g = sel.l().tr_matmul(&core.factorization().m_inv_mat(&blocks)?)?;
    Ok(spectral(&g) / ltxn)
}
