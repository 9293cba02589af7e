use super::mat::Mat;
use crate::error::{IlsError, Result};

/// Relative asymmetry accepted on input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Upper Cholesky factor `U` with `S = U^T U`, `U_ii > 0`.
///
/// Only the upper triangle of `S` is read after the symmetry check.
pub fn cholesky(s: &Mat) -> Result<Mat> {
    if !s.is_square() {
        return Err(IlsError::dims("cholesky", format!("{:?} is not square", s.shape())));
    }
    let n = s.rows();
    let scale = s.max_abs();
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale {
        return Err(IlsError::NotSymmetric(asym / scale));
    }

    let mut u = Mat::zeros(n, n);
    for i in 0..n {
        let mut d = s[(i, i)];
        for k in 0..i {
            d -= u[(k, i)] * u[(k, i)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(IlsError::NotPositiveDefinite { index: i, value: d });
        }
        let uii = d.sqrt();
        u[(i, i)] = uii;
        for j in i + 1..n {
            let mut v = s[(i, j)];
            for k in 0..i {
                v -= u[(k, i)] * u[(k, j)];
            }
            u[(i, j)] = v / uii;
        }
    }
    Ok(u)
}
