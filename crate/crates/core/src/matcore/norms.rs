//! Matrix and vector norms.
//!
//! The spectral norm comes from singular values computed by one-sided
//! (Hestenes) Jacobi, which delivers small singular values to high relative
//! accuracy as well; `spectral_power` is an independent route kept for
//! cross-checking.

use super::mat::Mat;

pub fn frobenius(a: &Mat) -> f64 {
    vec_2(a.as_slice())
}

/// Maximum absolute row sum.
pub fn inf_norm(a: &Mat) -> f64 {
    (0..a.rows()).fold(0.0, |m, i| m.max(vec_1(a.row(i))))
}

/// Maximum absolute column sum.
pub fn one_norm(a: &Mat) -> f64 {
    let mut sums = vec![0.0; a.cols()];
    for i in 0..a.rows() {
        for (s, v) in sums.iter_mut().zip(a.row(i)) {
            *s += v.abs();
        }
    }
    vec_inf(&sums)
}

pub fn vec_2(v: &[f64]) -> f64 {
    // scaled accumulation avoids overflow/underflow for badly scaled data
    let scale = vec_inf(v);
    if scale == 0.0 {
        return 0.0;
    }
    let ss: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * ss.sqrt()
}

pub fn vec_1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn vec_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

const JACOBI_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 80;

/// Singular values in descending order (`min(rows, cols)` of them).
pub fn singular_values(a: &Mat) -> Vec<f64> {
    // Orthogonalize the columns of whichever orientation has fewer columns.
    let work = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    let n = work.cols();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| work.col(j)).collect();
    let scale = work.max_abs();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for c in cols.iter_mut() {
        c.iter_mut().for_each(|v| *v /= scale);
    }

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut a = 0.0;
                    let mut b = 0.0;
                    let mut g = 0.0;
                    for (x, y) in cp.iter().zip(cq) {
                        a += x * x;
                        b += y * y;
                        g += x * y;
                    }
                    (a, b, g)
                };
                if gamma == 0.0 || gamma.abs() <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| vec_2(c) * scale).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Largest singular value.
pub fn spectral(a: &Mat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Smallest singular value (of the `min(rows, cols)` ones).
pub fn sigma_min(a: &Mat) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Spectral norm by power iteration on `A^T A`, stopping when successive
/// estimates agree to `tol` relative.
pub fn spectral_power(a: &Mat, tol: f64, max_iter: usize) -> f64 {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return 0.0;
    }
    // deterministic, non-degenerate start
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * (i as f64 + 1.0).sin()).collect();
    let mut est = 0.0;
    for _ in 0..max_iter {
        let nv = vec_2(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let av = a.matvec(&v).expect("shape");
        let new_est = vec_2(&av);
        v = a.tr_matvec(&av).expect("shape");
        if (new_est - est).abs() <= tol * new_est {
            return new_est;
        }
        est = new_est;
    }
    est
}
