//! Dense complex kernels: the matrix carrier, Hermitian and general
//! eigenvalues, singular values, LU solves and the polar decomposition.

mod eig;
mod general_eig;
mod matrix;
mod polar;
mod solve;
mod svd;

pub use eig::{hermitian_eig, hermitian_function, hermitian_sqrt, is_hermitian, HermitianEig};
pub use general_eig::eigenvalues;
pub use matrix::{ComplexMatrix, C64};
pub use polar::{polar_decompose, PolarDecomposition};
pub use solve::{inverse, solve_linear, Lu};
pub use svd::{op_norm, singular_extremes, singular_values};

use num_traits::Float;

pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    Float::hypot(x, y)
}
