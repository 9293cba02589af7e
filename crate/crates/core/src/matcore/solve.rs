use super::mat::Mat;
use super::qr::HouseholderQr;
use super::triangular::{tri_solve_vec, Trans, Uplo};
use crate::error::{IlsError, Result};

/// Minimum 2-norm solution of `J z = v` for `J` (`r x c`, `r <= c`) of full
/// row rank, via thin QR of `J^T = Q R`: `z = Q R^{-T} v`.
pub fn min_norm_solve(j: &Mat, v: &[f64]) -> Result<Vec<f64>> {
    let (r, c) = j.shape();
    if r > c {
        return Err(IlsError::dims("min_norm_solve", format!("{r}x{c} has more rows than columns")));
    }
    if v.len() != r {
        return Err(IlsError::dims("min_norm_solve", format!("rhs length {} for {r} rows", v.len())));
    }
    let qr = HouseholderQr::new(&j.transpose())?;
    qr.check_rank()?;
    let mut w = v.to_vec();
    tri_solve_vec(&qr.r(), Uplo::Upper, Trans::Yes, &mut w)?;
    let mut z = vec![0.0; c];
    z[..r].copy_from_slice(&w);
    qr.apply_q(&mut z);
    Ok(z)
}

/// LU with partial pivoting. Used where a route independent of the
/// QR/Cholesky path is wanted.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Mat,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(IlsError::dims("lu", format!("{:?} is not square", a.shape())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                return Err(IlsError::SingularTriangular(k));
            }
            if piv != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                perm.swap(k, piv);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let ukj = lu[(k, j)];
                    lu[(i, j)] -= f * ukj;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[(i, j)] * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Mat {
        let n = self.lu.rows();
        let mut inv = Mat::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            inv.set_col(j, &self.solve(&e));
        }
        inv
    }
}
