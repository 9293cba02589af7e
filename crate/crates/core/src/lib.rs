//! Indefinite least squares toolkit.
//!
//! Solves `min_x (b - Ax)^T Sigma (b - Ax)` with the QR-Cholesky method and
//! analyses the solution: mixed and componentwise condition numbers of any
//! linear function `L^T x`, cheap power-method estimates of their upper
//! bounds that reuse the solver's triangular factors, and the linearization
//! estimate of the normwise backward error of an approximate solution.

#![allow(clippy::needless_range_loop)]

pub mod backerr;
pub mod cli;
pub mod cond;
pub mod error;
pub mod ils;
pub mod matcore;
pub mod oracle;
pub mod testgen;

pub use error::{IlsError, Result};
pub use ils::{IlsFactorization, IlsProblem, IlsSolution, Selector};
