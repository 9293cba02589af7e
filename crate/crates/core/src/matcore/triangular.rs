//! Triangular solves against an already computed factor.

use super::mat::Mat;
use crate::error::{IlsError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uplo {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Solve `op(T) X = B`.
    Left,
    /// Solve `X op(T) = B`.
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trans {
    No,
    Yes,
}

fn check_diag(t: &Mat) -> Result<()> {
    if !t.is_square() {
        return Err(IlsError::dims("tri_solve", format!("{:?} is not square", t.shape())));
    }
    match (0..t.rows()).find(|&i| t[(i, i)] == 0.0) {
        Some(i) => Err(IlsError::SingularTriangular(i)),
        None => Ok(()),
    }
}

/// In-place `op(T) x = b` for a single right-hand side. Only the triangle
/// named by `uplo` is read.
pub fn tri_solve_vec(t: &Mat, uplo: Uplo, trans: Trans, x: &mut [f64]) -> Result<()> {
    check_diag(t)?;
    let n = t.rows();
    if x.len() != n {
        return Err(IlsError::dims("tri_solve", format!("rhs length {} for order {n}", x.len())));
    }
    // Upper^T behaves like a lower solve and vice versa.
    let forward = matches!((uplo, trans), (Uplo::Lower, Trans::No) | (Uplo::Upper, Trans::Yes));
    let at = |i: usize, j: usize| match trans {
        Trans::No => t[(i, j)],
        Trans::Yes => t[(j, i)],
    };
    if forward {
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= at(i, j) * x[j];
            }
            x[i] = s / at(i, i);
        }
    } else {
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= at(i, j) * x[j];
            }
            x[i] = s / at(i, i);
        }
    }
    Ok(())
}

/// Multi right-hand-side triangular solve.
pub fn tri_solve(t: &Mat, b: &Mat, side: Side, uplo: Uplo, trans: Trans) -> Result<Mat> {
    match side {
        Side::Left => {
            if b.rows() != t.rows() {
                return Err(IlsError::dims(
                    "tri_solve",
                    format!("T is {:?}, B is {:?}", t.shape(), b.shape()),
                ));
            }
            let mut x = Mat::zeros(b.rows(), b.cols());
            for j in 0..b.cols() {
                let mut col = b.col(j);
                tri_solve_vec(t, uplo, trans, &mut col)?;
                x.set_col(j, &col);
            }
            Ok(x)
        }
        Side::Right => {
            // X op(T) = B  <=>  op(T)^T X^T = B^T
            let flipped = match trans {
                Trans::No => Trans::Yes,
                Trans::Yes => Trans::No,
            };
            Ok(tri_solve(t, &b.transpose(), Side::Left, uplo, flipped)?.transpose())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let b = Mat::from_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        let x = tri_solve(&Mat::identity(3), &b, Side::Left, Uplo::Upper, Trans::No).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn back_substitution_by_hand() {
        let t = Mat::from_rows(&[&[2.0, 1.0], &[0.0, 4.0]]);
        let mut x = vec![4.0, 8.0];
        tri_solve_vec(&t, Uplo::Upper, Trans::No, &mut x).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn transposed_upper_is_forward_substitution() {
        // U^T = [[2,0],[1,4]]
        let u = Mat::from_rows(&[&[2.0, 1.0], &[0.0, 4.0]]);
        let mut x = vec![2.0, 5.0];
        tri_solve_vec(&u, Uplo::Upper, Trans::Yes, &mut x).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);

        let l = u.transpose();
        let mut y = vec![2.0, 5.0];
        tri_solve_vec(&l, Uplo::Lower, Trans::No, &mut y).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn right_side_solve() {
        let u = Mat::from_rows(&[&[2.0, 1.0], &[0.0, 4.0]]);
        let b = Mat::from_rows(&[&[2.0, 5.0]]);
        // x U = b -> x = [1, 1]
        let x = tri_solve(&u, &b, Side::Right, Uplo::Upper, Trans::No).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn zero_diagonal_rejected() {
        let t = Mat::from_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let mut x = vec![1.0, 1.0];
        assert!(matches!(
            tri_solve_vec(&t, Uplo::Upper, Trans::No, &mut x),
            Err(IlsError::SingularTriangular(1))
        ));
    }
}
