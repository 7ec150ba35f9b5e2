//! Zero statistics of Gaussian random polynomials on complete Reinhardt
//! domains.
//!
//! * [`limits`]: the model function `F_m` and closed-form scaling limits.
//! * [`geometry`]: radial defining functions and boundary jets.
//! * [`szego`]: monomial norms and exact partial Szegő kernels.
//! * [`kacrice`]: finite-degree densities and pair correlations.
//! * [`montecarlo`]: sampled zeros for one-variable ensembles.
//! * [`cli`]: the `rzl` command-line driver.

// `!(x > y)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod kacrice;
pub mod limits;
pub mod montecarlo;
pub mod quadrature;
pub mod szego;

pub use error::{Error, ErrorClass, Result};
pub use num_complex::Complex64;
