//! Problem data `(A0, A1, W)` and the operators assembled from it.
//!
//! `A = diag(A0, A1)`, `V = [[0, W], [W*, 0]]`, `B = A + V`, and the
//! unitary signature operators `J_θ = diag(I, θ·I)` with `J = J_{−1}`.

use crate::error::{Error, Result};
use crate::linalg::{is_hermitian, op_norm, ComplexMatrix, C64};

const UNIMODULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockProblem {
    a0: ComplexMatrix,
    a1: ComplexMatrix,
    w: ComplexMatrix,
    hermitian: bool,
}

impl BlockProblem {
    /// Validates shapes (`A0: n0×n0`, `A1: n1×n1`, `W: n0×n1`) and, in
    /// Hermitian mode, the symmetry of the diagonal blocks.
    pub fn assemble(
        a0: ComplexMatrix,
        a1: ComplexMatrix,
        w: ComplexMatrix,
        hermitian_mode: bool,
    ) -> Result<Self> {
        let n0 = a0.require_square()?;
        let n1 = a1.require_square()?;
        if w.shape() != (n0, n1) {
            return Err(Error::DimensionMismatch {
                context: "coupling W",
                expected: (n0, n1),
                found: w.shape(),
            });
        }
        if !(a0.is_finite() && a1.is_finite() && w.is_finite()) {
            return Err(Error::NonFinite);
        }
        if hermitian_mode {
            for block in [&a0, &a1] {
                if !is_hermitian(block) {
                    return Err(Error::NotHermitian {
                        asymmetry: (block - &block.adjoint()).frobenius_norm(),
                    });
                }
            }
        }
        Ok(BlockProblem {
            a0,
            a1,
            w,
            hermitian: hermitian_mode,
        })
    }

    pub fn n0(&self) -> usize {
        self.a0.rows()
    }

    pub fn n1(&self) -> usize {
        self.a1.rows()
    }

    pub fn dim(&self) -> usize {
        self.n0() + self.n1()
    }

    pub fn a0(&self) -> &ComplexMatrix {
        &self.a0
    }

    pub fn a1(&self) -> &ComplexMatrix {
        &self.a1
    }

    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn hermitian_mode(&self) -> bool {
        self.hermitian
    }

    /// `A = diag(A0, A1)`.
    pub fn diagonal(&self) -> ComplexMatrix {
        ComplexMatrix::block_diag(&self.a0, &self.a1)
    }

    /// `V = [[0, W], [W*, 0]]`, Hermitian by construction.
    pub fn coupling(&self) -> ComplexMatrix {
        ComplexMatrix::from_blocks(
            &ComplexMatrix::zeros(self.n0(), self.n0()),
            &self.w,
            &self.w.adjoint(),
            &ComplexMatrix::zeros(self.n1(), self.n1()),
        )
    }

    /// `B = A + V`.
    pub fn full(&self) -> ComplexMatrix {
        ComplexMatrix::from_blocks(&self.a0, &self.w, &self.w.adjoint(), &self.a1)
    }

    pub fn norm_full(&self) -> f64 {
        op_norm(&self.full())
    }

    /// The problem `J_θ B J_θ*`: `W` becomes `θ̄·W`.
    pub fn conjugate_theta(&self, rotation: &ThetaRotation) -> BlockProblem {
        BlockProblem {
            a0: self.a0.clone(),
            a1: self.a1.clone(),
            w: self.w.scale(rotation.theta().conj()),
            hermitian: self.hermitian,
        }
    }
}

/// A unimodular `θ` and the operator `J_θ = diag(I_{n0}, θ·I_{n1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRotation {
    theta: C64,
}

impl ThetaRotation {
    pub fn new(theta: C64) -> Result<Self> {
        let modulus = theta.norm();
        if !modulus.is_finite() || (modulus - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular { modulus });
        }
        Ok(ThetaRotation { theta })
    }

    /// `J = diag(I, −I)`.
    pub fn signature() -> Self {
        ThetaRotation {
            theta: C64::new(-1.0, 0.0),
        }
    }

    pub fn theta(&self) -> C64 {
        self.theta
    }

    /// `J_θ* = J_θ̄`.
    pub fn adjoint(&self) -> Self {
        ThetaRotation {
            theta: self.theta.conj(),
        }
    }

    pub fn matrix(&self, n0: usize, n1: usize) -> ComplexMatrix {
        ComplexMatrix::block_diag(
            &ComplexMatrix::identity(n0),
            &ComplexMatrix::identity(n1).scale(self.theta),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;
    use crate::testutil::{assert_close, c, random_hermitian, random_matrix};
    use proptest::prelude::*;

    pub(crate) fn golden() -> BlockProblem {
        BlockProblem::assemble(
            ComplexMatrix::from_real_rows(&[[0.0]]),
            ComplexMatrix::from_real_rows(&[[1.0]]),
            ComplexMatrix::from_real_rows(&[[1.0]]),
            true,
        )
        .unwrap()
    }

    fn random_problem(n0: usize, n1: usize, seed: u64) -> BlockProblem {
        BlockProblem::assemble(
            random_hermitian(n0, seed),
            random_hermitian(n1, seed ^ 1),
            random_matrix(n0, n1, seed ^ 2),
            true,
        )
        .unwrap()
    }

    #[test]
    fn golden_assembly() {
        let p = golden();
        assert_eq!(p.full(), ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 1.0]]));
    }

    #[test]
    fn zero_coupling_is_block_diagonal() {
        let a0 = random_hermitian(2, 3);
        let a1 = random_hermitian(3, 4);
        let p = BlockProblem::assemble(a0.clone(), a1.clone(), ComplexMatrix::zeros(2, 3), true).unwrap();
        assert_eq!(p.full(), ComplexMatrix::block_diag(&a0, &a1));
    }

    #[test]
    fn rejects_non_hermitian_block() {
        let r = BlockProblem::assemble(
            ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]),
            ComplexMatrix::identity(1),
            ComplexMatrix::zeros(2, 1),
            true,
        );
        assert!(matches!(r, Err(Error::NotHermitian { .. })));
        // Accepted in non-Hermitian mode.
        assert!(BlockProblem::assemble(
            ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]),
            ComplexMatrix::identity(1),
            ComplexMatrix::zeros(2, 1),
            false,
        )
        .is_ok());
    }

    #[test]
    fn rejects_bad_coupling_shape() {
        let r = BlockProblem::assemble(
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(1),
            ComplexMatrix::zeros(1, 2),
            true,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn theta_one_is_identity() {
        let p = golden();
        let t = ThetaRotation::new(c(1.0, 0.0)).unwrap();
        assert_eq!(p.conjugate_theta(&t), p);
    }

    #[test]
    fn theta_minus_one_flips_coupling() {
        let q = golden().conjugate_theta(&ThetaRotation::signature());
        assert_eq!(q.w(), &ComplexMatrix::from_real_rows(&[[-1.0]]));
        assert_eq!(q.full(), ComplexMatrix::from_real_rows(&[[0.0, -1.0], [-1.0, 1.0]]));
    }

    #[test]
    fn theta_i() {
        let t = ThetaRotation::new(c(0.0, 1.0)).unwrap();
        let q = golden().conjugate_theta(&t);
        assert_eq!(q.w()[(0, 0)], c(0.0, -1.0));
        let expected = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            (1, 1) => c(1.0, 0.0),
            _ => c(0.0, 0.0),
        });
        assert_eq!(q.full(), expected);
        assert!(is_hermitian(&q.full()));
        let j = t.matrix(1, 1);
        assert_close(&(&(&j * &golden().full()) * &j.adjoint()), &expected, 1e-15);
    }

    #[test]
    fn theta_must_be_unimodular() {
        assert!(matches!(ThetaRotation::new(c(1.5, 0.0)), Err(Error::NotUnimodular { .. })));
    }

    #[test]
    fn theta_adjoint_is_conjugate() {
        let t = ThetaRotation::new(c(0.6, 0.8)).unwrap();
        let j = t.matrix(2, 3);
        assert_close(&j.adjoint(), &t.adjoint().matrix(2, 3), 0.0);
        assert_close(&(&j * &j.adjoint()), &ComplexMatrix::identity(5), 1e-15);
    }

    proptest! {
        #[test]
        fn full_matrix_is_hermitian(n0 in 1usize..6, n1 in 1usize..6, seed in any::<u64>()) {
            let p = random_problem(n0, n1, seed);
            let b = p.full();
            prop_assert!(op_norm(&(&b - &b.adjoint())) <= 1e-12 * (1.0 + op_norm(&b)));
        }

        #[test]
        fn signature_conjugation_gives_a_minus_v(n0 in 1usize..6, n1 in 1usize..6, seed in any::<u64>()) {
            let p = random_problem(n0, n1, seed);
            let j = ThetaRotation::signature().matrix(n0, n1);
            let b = p.full();
            let lhs = &(&j * &b) * &j.adjoint();
            let rhs = &p.diagonal() - &p.coupling();
            prop_assert!(op_norm(&(&lhs - &rhs)) <= 1e-12 * (1.0 + op_norm(&b)));
        }

        #[test]
        fn conjugation_preserves_spectrum(
            n0 in 1usize..6, n1 in 1usize..6, seed in any::<u64>(), angle in 0.0f64..core::f64::consts::TAU
        ) {
            let p = random_problem(n0, n1, seed);
            let t = ThetaRotation::new(c(angle.cos(), angle.sin())).unwrap();
            let q = p.conjugate_theta(&t);
            let jm = t.matrix(n0, n1);
            let direct = &(&jm * &p.full()) * &jm.adjoint();
            prop_assert!((&direct - &q.full()).max_abs() <= 1e-14);
            let e1 = hermitian_eig(&p.full()).unwrap().eigenvalues;
            let e2 = hermitian_eig(&q.full()).unwrap().eigenvalues;
            for (a, b) in e1.iter().zip(&e2) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }
    }
}
