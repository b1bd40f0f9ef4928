//! Angular operators and block diagonalization of 2×2 block operator matrices.
//!
//! For `B = A + V` with `A = diag(A0, A1)` and off-diagonal coupling
//! `V = [[0, W], [W*, 0]]`, this crate finds angular operators `X: H0 → H1`
//! whose graph subspaces reduce `B`, evaluates the operator Riccati equation
//! `AY − YA − YVY + V = 0` in all of its equivalent forms, and performs the
//! similarity and unitary block diagonalizations built from
//! `Y = [[0, −X*], [X, 0]]` and `T = I + Y`.
//!
//! Everything here is dense and finite-dimensional. The crate is `no_std`
//! and needs only `alloc`; file formats, random instances and the command
//! line live in the `blockdiag` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod block;
pub mod bounds;
pub mod diagonalize;
mod error;
pub mod linalg;
pub mod residual;
pub mod riccati;
pub mod subspace;

pub use block::{BlockProblem, ThetaRotation};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use residual::Residual;

#[cfg(test)]
pub(crate) mod testutil;
