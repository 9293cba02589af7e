//! `vec`/Kronecker helpers. `vec` always stacks columns.

use super::mat::Mat;
use crate::error::{IlsError, Result};

/// Column-stacking `vec(A)`.
pub fn vec(a: &Mat) -> Vec<f64> {
    let (m, n) = a.shape();
    let mut out = Vec::with_capacity(m * n);
    for j in 0..n {
        for i in 0..m {
            out.push(a[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec`]: reshape a length `m*n` vector column-wise into `m x n`.
pub fn unvec(z: &[f64], m: usize, n: usize) -> Result<Mat> {
    if z.len() != m * n {
        return Err(IlsError::dims("unvec", format!("length {} into {m}x{n}", z.len())));
    }
    Ok(Mat::from_fn(m, n, |i, j| z[j * m + i]))
}

/// Dense Kronecker product `B (x) C`.
pub fn kron(b: &Mat, c: &Mat) -> Mat {
    let (p, q) = b.shape();
    let (r, s) = c.shape();
    Mat::from_fn(p * r, q * s, |i, j| b[(i / r, j / s)] * c[(i % r, j % s)])
}

/// `(B (x) C) z` computed as `vec(C Z B^T)`, `Z = unvec(z, cols(C), cols(B))`.
pub fn kron_apply(b: &Mat, c: &Mat, z: &[f64]) -> Result<Vec<f64>> {
    if z.len() != b.cols() * c.cols() {
        return Err(IlsError::dims(
            "kron_apply",
            format!("length {} for ({:?} (x) {:?})", z.len(), b.shape(), c.shape()),
        ));
    }
    let zm = unvec(z, c.cols(), b.cols())?;
    let czbt = c.matmul(&zm)?.matmul(&b.transpose())?;
    Ok(vec(&czbt))
}

/// Applies the vec-permutation `Pi` with `Pi vec(B) = vec(B^T)` for `B` of
/// shape `m x n`. Applying it again with `(n, m)` restores the input.
pub fn vec_perm_apply(z: &[f64], m: usize, n: usize) -> Result<Vec<f64>> {
    if z.len() != m * n {
        return Err(IlsError::dims("vec_perm_apply", format!("length {} for {m}x{n}", z.len())));
    }
    let mut out = vec![0.0; m * n];
    // B[i,j] = z[j*m + i]; B^T[j,i] sits at out[i*n + j]
    for j in 0..n {
        for i in 0..m {
            out[i * n + j] = z[j * m + i];
        }
    }
    Ok(out)
}

/// Dense `mn x mn` vec-permutation matrix.
pub fn vec_perm_matrix(m: usize, n: usize) -> Mat {
    let mut p = Mat::zeros(m * n, m * n);
    for j in 0..n {
        for i in 0..m {
            p[(i * n + j, j * m + i)] = 1.0;
        }
    }
    p
}
