//! Dense real linear algebra kernel: matrix type, Householder QR, Cholesky,
//! triangular solves, norms, and `vec`/Kronecker helpers.

pub mod cholesky;
pub mod io;
pub mod kron;
pub mod mat;
pub mod norms;
pub mod qr;
pub mod solve;
pub mod triangular;

pub use cholesky::cholesky;
pub use kron::{kron, kron_apply, unvec, vec, vec_perm_apply};
pub use mat::{vecops, Mat};
pub use norms::{frobenius, inf_norm, one_norm, sigma_min, singular_values, spectral, vec_1, vec_2, vec_inf};
pub use qr::{qr_thin, HouseholderQr};
pub use solve::{min_norm_solve, Lu};
pub use triangular::{tri_solve, tri_solve_vec, Side, Trans, Uplo};
