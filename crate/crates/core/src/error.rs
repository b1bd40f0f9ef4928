use alloc::boxed::Box;
use core::fmt;

use crate::linalg::ComplexMatrix;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch {
        context: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    NotSquare {
        rows: usize,
        cols: usize,
    },
    /// Entry count does not match `rows × cols`, or a dimension is zero.
    BadShape {
        rows: usize,
        cols: usize,
        len: usize,
    },
    NonFinite,
    NotHermitian {
        asymmetry: f64,
    },
    NoConvergence {
        iterations: usize,
    },
    Singular {
        sigma_min: f64,
    },
    NotUnimodular {
        modulus: f64,
    },
    GapViolation {
        eigenvalue: f64,
        gap: f64,
    },
    IndexOutOfRange {
        index: usize,
        len: usize,
    },
    NotAGraph {
        sigma_min: f64,
    },
    RankMismatch {
        expected: usize,
        found: usize,
    },
    SpectraOverlap {
        sigma_min: f64,
    },
    NewtonNoConvergence {
        best: Box<ComplexMatrix>,
        residual: f64,
        iterations: usize,
    },
    ZeroLambda,
    BadPair {
        a: f64,
        b: f64,
    },
    NotHermitianMode,
    BadFamily(&'static str),
    InvalidOption(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                context,
                expected,
                found,
            } => write!(
                f,
                "dimension mismatch in {context}: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::NotSquare { rows, cols } => write!(f, "matrix is not square ({rows}x{cols})"),
            Error::BadShape { rows, cols, len } => {
                write!(f, "bad matrix shape {rows}x{cols} with {len} entries")
            }
            Error::NonFinite => write!(f, "matrix has non-finite entries"),
            Error::NotHermitian { asymmetry } => {
                write!(f, "matrix is not Hermitian (asymmetry {asymmetry:e})")
            }
            Error::NoConvergence { iterations } => {
                write!(f, "no convergence after {iterations} iterations")
            }
            Error::Singular { sigma_min } => {
                write!(f, "matrix is singular (smallest singular value {sigma_min:e})")
            }
            Error::NotUnimodular { modulus } => {
                write!(f, "theta must lie on the unit circle (|theta| = {modulus})")
            }
            Error::GapViolation { eigenvalue, gap } => write!(
                f,
                "spectral split has no gap: eigenvalue {eigenvalue} within {gap:e} of the split"
            ),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "eigenvalue index {index} out of range for dimension {len}")
            }
            Error::NotAGraph { sigma_min } => write!(
                f,
                "subspace is not a graph over H0 (smallest singular value of the H0 block {sigma_min:e})"
            ),
            Error::RankMismatch { expected, found } => {
                write!(f, "projection has rank {found}, expected {expected}")
            }
            Error::SpectraOverlap { sigma_min } => write!(
                f,
                "Sylvester operator is singular: spectra overlap (smallest singular value {sigma_min:e})"
            ),
            Error::NewtonNoConvergence {
                residual,
                iterations,
                ..
            } => write!(
                f,
                "Newton iteration did not converge after {iterations} steps (residual {residual:e})"
            ),
            Error::ZeroLambda => write!(f, "resolvent estimate requires lambda != 0"),
            Error::BadPair { a, b } => {
                write!(f, "relative bound pair needs a >= 0 and 0 <= b < 1 (a = {a}, b = {b})")
            }
            Error::NotHermitianMode => write!(f, "operation requires a Hermitian problem"),
            Error::BadFamily(msg) => write!(f, "bad family: {msg}"),
            Error::InvalidOption(msg) => write!(f, "invalid option: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
