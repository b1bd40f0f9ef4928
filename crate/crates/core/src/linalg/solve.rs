use alloc::vec::Vec;

use super::{singular_extremes, ComplexMatrix, C64};
use crate::error::{Error, Result};

const SINGULAR_TOL: f64 = 1e-13;

/// LU factorization with partial pivoting, `P·M = L·U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Factors `m`, failing with [`Error::Singular`] when a pivot drops to
    /// `pivot_floor` or below. The error carries the true smallest singular
    /// value of `m`.
    pub fn factor(m: &ComplexMatrix, pivot_floor: f64) -> Result<Self> {
        let n = m.require_square()?;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_mag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mag <= pivot_floor {
                return Err(Error::Singular {
                    sigma_min: singular_extremes(m).1,
                });
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            let (upper, lower) = lu.as_mut_slice().split_at_mut((k + 1) * n);
            let pivot_entries = &upper[k * n..];
            for row in lower.chunks_exact_mut(n) {
                let factor = row[k] / pivot;
                row[k] = factor;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for (x, &u) in row[k + 1..].iter_mut().zip(&pivot_entries[k + 1..]) {
                    *x -= factor * u;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let n = self.lu.rows();
        assert_eq!(rhs.rows(), n, "rhs row mismatch");
        let k = rhs.cols();
        let mut x = ComplexMatrix::from_fn(n, k, |i, j| rhs[(self.perm[i], j)]);
        for col in 0..k {
            for i in 0..n {
                let mut acc = x[(i, col)];
                for j in 0..i {
                    acc -= self.lu[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, col)];
                for j in i + 1..n {
                    acc -= self.lu[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = acc / self.lu[(i, i)];
            }
        }
        x
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Vec<C64> {
        let b = ComplexMatrix::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        self.solve(&b).into_vec()
    }
}

/// Solves `M·X = RHS` by partially pivoted elimination.
///
/// Singularity is detected on the pivots against `1e-13·(1 + ‖M‖_F)`.
pub fn solve_linear(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    if rhs.rows() != n {
        return Err(Error::DimensionMismatch {
            context: "solve_linear right-hand side",
            expected: (n, rhs.cols()),
            found: rhs.shape(),
        });
    }
    let floor = SINGULAR_TOL * (1.0 + m.frobenius_norm());
    Ok(Lu::factor(m, floor)?.solve(rhs))
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    solve_linear(m, &ComplexMatrix::identity(n))
}
