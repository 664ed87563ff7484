//! Low-rank structure of radial basis function kernel matrices.
//!
//! A kernel `K(x, y) = f(|x - y|^2)` restricted to a bounded domain admits
//! explicit separable expansions `K(x, y) ~ sum_r g_r(x) h_r(y)` whose term
//! count grows polynomially in the dimension. This crate builds those
//! expansions, bounds their error, samples point clouds, and measures the
//! spectra of the resulting matrices.

pub mod cheb1d;
pub mod cheb_factor;
pub mod concentration;
pub mod error;
pub mod fourier_taylor;
pub mod indexcomb;
pub mod io;
pub mod linalg;
pub mod pointgen;
pub mod profile;
pub mod spectrum;

pub use error::{Error, ErrorClass, Result};
