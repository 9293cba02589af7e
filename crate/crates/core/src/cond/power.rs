//! Matvec-only lower-bound estimator of the matrix 1-norm (Hager's power
//! method). An infinity norm `||C||_inf` is obtained as `||C^T||_1` by
//! passing the closures for `C^T` and `C` in that order.

/// Default number of sweeps.
pub const DEFAULT_MAX_ITERS: usize = 5;

/// Estimates `||B||_1` for the implicit `rows x dim` matrix `B`.
///
/// `matvec` must compute `B v` (`v` of length `dim`) and `rmatvec` `B^T w`.
/// The value returned is `||B v||_1` for some `v` with `||v||_1 = 1`, hence
/// never exceeds `||B||_1`.
pub fn power_estimate<F, G>(matvec: F, rmatvec: G, dim: usize, max_iters: usize) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    if dim == 0 {
        return 0.0;
    }
    let mut v = vec![1.0 / dim as f64; dim];
    let mut est = 0.0_f64;
    let mut last_j: Option<usize> = None;
    for _ in 0..max_iters.max(1) {
        let y = matvec(&v);
        est = est.max(y.iter().map(|t| t.abs()).sum());
        let xi: Vec<f64> = y.iter().map(|&t| if t >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = rmatvec(&xi);
        // argmax |z_j|, smallest index on ties
        let (j, zmax) = z
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bj, bz), (i, &zi)| if zi.abs() > bz { (i, zi.abs()) } else { (bj, bz) });
        let ztv: f64 = z.iter().zip(&v).map(|(a, b)| a * b).sum();
        if zmax <= ztv || last_j == Some(j) {
            break;
        }
        v.iter_mut().for_each(|t| *t = 0.0);
        v[j] = 1.0;
        last_j = Some(j);
    }
    est
}
