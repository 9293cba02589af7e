//! Householder QR.
//!
//! Reflectors are kept in compact form so that callers needing the full
//! orthogonal factor (null-space projections, for instance) can apply `Q` or
//! `Q^T` to vectors without forming the `m x m` matrix.

use super::mat::Mat;
use crate::error::{IlsError, Result};

/// Relative drop tolerance on `|R_ii|` for declaring rank deficiency.
pub const RANK_DROP_TOL: f64 = 9.094947017729282e-13; // 2^-40

#[derive(Clone, Debug)]
pub struct HouseholderQr {
    /// R in the upper triangle, reflector tails below the diagonal.
    packed: Mat,
    tau: Vec<f64>,
}

impl HouseholderQr {
    /// Factors an `m x n` matrix with `m >= n`. No rank check is made here.
    pub fn new(a: &Mat) -> Result<Self> {
        let (m, n) = a.shape();
        if m < n {
            return Err(IlsError::dims("qr", format!("need rows >= cols, got {m}x{n}")));
        }
        let mut qr = a.clone();
        let mut tau = vec![0.0; n];
        for k in 0..n {
            let alpha = qr[(k, k)];
            let tail_norm = (k + 1..m).map(|i| qr[(i, k)]).fold(0.0_f64, f64::hypot);
            if tail_norm == 0.0 {
                // already upper triangular in this column: H = I
                continue;
            }
            let beta = -alpha.signum() * alpha.hypot(tail_norm);
            let t = (beta - alpha) / beta;
            let inv = 1.0 / (alpha - beta);
            for i in k + 1..m {
                qr[(i, k)] *= inv;
            }
            qr[(k, k)] = beta;
            tau[k] = t;
            // apply H = I - t v v^T (v_k = 1) to trailing columns
            for j in k + 1..n {
                let mut s = qr[(k, j)];
                for i in k + 1..m {
                    s += qr[(i, k)] * qr[(i, j)];
                }
                s *= t;
                qr[(k, j)] -= s;
                for i in k + 1..m {
                    let vik = qr[(i, k)];
                    qr[(i, j)] -= s * vik;
                }
            }
        }
        Ok(Self { packed: qr, tau })
    }

    pub fn rows(&self) -> usize {
        self.packed.rows()
    }

    pub fn cols(&self) -> usize {
        self.packed.cols()
    }

    pub fn r(&self) -> Mat {
        let n = self.cols();
        Mat::from_fn(n, n, |i, j| if j >= i { self.packed[(i, j)] } else { 0.0 })
    }

    fn reflect(&self, k: usize, x: &mut [f64]) {
        let t = self.tau[k];
        if t == 0.0 {
            return;
        }
        let m = self.rows();
        let mut s = x[k];
        for i in k + 1..m {
            s += self.packed[(i, k)] * x[i];
        }
        s *= t;
        x[k] -= s;
        for i in k + 1..m {
            x[i] -= s * self.packed[(i, k)];
        }
    }

    /// `x <- Q^T x` with the full `m x m` orthogonal factor.
    pub fn apply_qt(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows());
        for k in 0..self.cols() {
            self.reflect(k, x);
        }
    }

    /// `x <- Q x` with the full `m x m` orthogonal factor.
    pub fn apply_q(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows());
        for k in (0..self.cols()).rev() {
            self.reflect(k, x);
        }
    }

    /// First `n` columns of `Q`.
    pub fn thin_q(&self) -> Mat {
        let (m, n) = self.packed.shape();
        let mut q = Mat::zeros(m, n);
        let mut e = vec![0.0; m];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            self.apply_q(&mut e);
            q.set_col(j, &e);
        }
        q
    }

    /// Fails with `RankDeficient` when some `|R_jj| <= 2^-40 * max |R_ii|`.
    pub fn check_rank(&self) -> Result<()> {
        let n = self.cols();
        let dmax = (0..n).fold(0.0_f64, |m, i| m.max(self.packed[(i, i)].abs()));
        for j in 0..n {
            let d = self.packed[(j, j)].abs();
            if d <= RANK_DROP_TOL * dmax || d == 0.0 {
                return Err(IlsError::RankDeficient { index: j, value: d });
            }
        }
        Ok(())
    }
}

/// Thin QR: `A = Q R` with `Q` (`m x n`) orthonormal columns and `R` upper triangular.
pub fn qr_thin(a: &Mat) -> Result<(Mat, Mat)> {
    let f = HouseholderQr::new(a)?;
    f.check_rank()?;
    Ok((f.thin_q(), f.r()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::norms::frobenius;

    fn orth_defect(q: &Mat) -> f64 {
        let qtq = q.tr_matmul(q).unwrap();
        frobenius(&qtq.sub(&Mat::identity(q.cols())).unwrap())
    }

    #[test]
    fn identity_factors_trivially() {
        let (q, r) = qr_thin(&Mat::identity(3)).unwrap();
        for i in 0..3 {
            assert!((q[(i, i)].abs() - 1.0).abs() < 1e-15);
            assert!((r[(i, i)].abs() - 1.0).abs() < 1e-15);
        }
        assert!(orth_defect(&q) < 1e-15);
    }

    #[test]
    fn single_column_three_four_five() {
        let (q, r) = qr_thin(&Mat::from_rows(&[&[3.0], &[4.0]])).unwrap();
        assert!((r[(0, 0)].abs() - 5.0).abs() < 1e-15);
        let s = r[(0, 0)].signum();
        assert!((q[(0, 0)] * s - 0.6).abs() < 1e-15);
        assert!((q[(1, 0)] * s - 0.8).abs() < 1e-15);
    }

    #[test]
    fn p1_reconstructs() {
        let a = Mat::from_rows(&[&[2.0, 0.0], &[0.0, 2.0], &[1.0, 1.0]]);
        let (q, r) = qr_thin(&a).unwrap();
        assert!(orth_defect(&q) < 1e-14);
        assert!(frobenius(&a.sub(&q.matmul(&r).unwrap()).unwrap()) < 1e-14);
        assert_eq!(r[(1, 0)], 0.0);
    }

    #[test]
    fn rank_deficiency_detected() {
        let a = Mat::from_rows(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]);
        assert!(matches!(qr_thin(&a), Err(IlsError::RankDeficient { index: 1, .. })));
        assert!(qr_thin(&Mat::zeros(3, 2)).is_err());
    }

    #[test]
    fn full_q_is_orthogonal_complement() {
        let a = Mat::from_rows(&[&[1.0, 2.0], &[0.5, -1.0], &[3.0, 1.0], &[-2.0, 0.0]]);
        let f = HouseholderQr::new(&a).unwrap();
        // last column of the full Q is orthogonal to range(A)
        let mut e = vec![0.0, 0.0, 0.0, 1.0];
        f.apply_q(&mut e);
        let at_e = a.tr_matvec(&e).unwrap();
        assert!(at_e.iter().all(|v| v.abs() < 1e-14));
        let mut back = e.clone();
        f.apply_qt(&mut back);
        assert!((back[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wide_input_rejected() {
        assert!(HouseholderQr::new(&Mat::zeros(2, 3)).is_err());
    }
}
