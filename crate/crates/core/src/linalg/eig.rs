use alloc::vec::Vec;

use super::{sqrt, ComplexMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V · diag(f(λ)) · V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.vectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &w) in fl.iter().enumerate() {
                acc += v[(i, k)] * v[(j, k)].conj() * w;
            }
            acc
        })
    }
}

/// `‖M − M*‖_F ≤ 1e-12·(1 + ‖M‖_F)`.
pub fn is_hermitian(m: &ComplexMatrix) -> bool {
    hermitian_defect(m).is_some_and(|d| d <= HERMITIAN_TOL * (1.0 + m.frobenius_norm()))
}

fn hermitian_defect(m: &ComplexMatrix) -> Option<f64> {
    if !m.is_square() {
        return None;
    }
    Some((m - &m.adjoint()).frobenius_norm())
}

/// Cyclic complex Jacobi eigensolver.
///
/// Sweeps until the off-diagonal Frobenius norm falls below
/// `1e-13·‖M‖_F`, at most 100 sweeps. The input is symmetrized first, so
/// the iteration works on an exactly Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let n = m.require_square()?;
    let defect = hermitian_defect(m).unwrap_or(f64::INFINITY);
    if defect > HERMITIAN_TOL * (1.0 + m.frobenius_norm()) {
        return Err(Error::NotHermitian { asymmetry: defect });
    }
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            return Ok(sorted(a, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if off_diagonal_norm(&a) <= threshold {
        return Ok(sorted(a, v));
    }
    Err(Error::NoConvergence {
        iterations: MAX_SWEEPS,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    sqrt(acc)
}

/// Annihilates `a[p][q]` with `J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]`,
/// where `a[p][q] = |a[p][q]| e^{iφ}`: `A ← J* A J`, `V ← V J`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let phase_conj = (apq / mag).conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / sqrt(1.0 + t * t);
    let s = t * c;

    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = phase_conj * (-s);
    let j_qq = phase_conj * c;

    let n = a.rows();
    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * j_pp + y * j_qp;
        a[(k, q)] = x * j_pq + y * j_qq;
    }
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = j_pp.conj() * x + j_qp.conj() * y;
        a[(q, k)] = j_pq.conj() * x + j_qq.conj() * y;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * j_pp + y * j_qp;
        v[(k, q)] = x * j_pq + y * j_qq;
    }
}

fn sorted(a: ComplexMatrix, v: ComplexMatrix) -> HermitianEig {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    HermitianEig {
        eigenvalues: order.iter().map(|&i| a[(i, i)].re).collect(),
        vectors: v.select_columns(&order),
    }
}

/// `f(M)` for Hermitian `M` through its eigendecomposition.
pub fn hermitian_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.apply(f))
}

/// Square root of a positive semidefinite matrix; eigenvalues below zero
/// from round-off are clamped to zero.
pub fn hermitian_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    hermitian_function(m, |l| sqrt(l.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{assert_close, random_hermitian};
    use proptest::prelude::*;

    #[test]
    fn identity_has_unit_eigenvalues() {
        let e = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, [1.0, 1.0]);
        assert_eq!(e.vectors, ComplexMatrix::identity(2));
    }

    #[test]
    fn golden_matrix() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 1.0]]);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((e.eigenvalues[0] + 0.6180339887).abs() < 1e-10);
        assert!((e.eigenvalues[1] - 1.6180339887).abs() < 1e-10);
    }

    #[test]
    fn diagonal_input_is_sorted_permutation() {
        let m = ComplexMatrix::from_real_diagonal(&[3.0, -2.0, 7.0]);
        let e = hermitian_eig(&m).unwrap();
        assert_eq!(e.eigenvalues, [-2.0, 3.0, 7.0]);
        let expected = ComplexMatrix::identity(3).select_columns(&[1, 0, 2]);
        assert_eq!(e.vectors, expected);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&r), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn zero_matrix() {
        let e = hermitian_eig(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e.eigenvalues, [0.0; 3]);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = ComplexMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]);
        let r = hermitian_sqrt(&m).unwrap();
        assert_close(&(&r * &r), &m, 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn reconstruction_and_orthonormality(n in 1usize..=20, seed in any::<u64>()) {
            let m = random_hermitian(n, seed);
            let e = hermitian_eig(&m).unwrap();
            let norm = super::super::op_norm(&m);
            let rebuilt = e.apply(|l| l);
            prop_assert!((&rebuilt - &m).frobenius_norm() <= 1e-11 * (1.0 + norm));
            let mv = &m * &e.vectors;
            let vl = ComplexMatrix::from_fn(n, n, |i, j| e.vectors[(i, j)] * e.eigenvalues[j]);
            prop_assert!(super::super::op_norm(&(&mv - &vl)) <= 1e-12 * (1.0 + norm));
            let gram = &e.vectors.adjoint() * &e.vectors;
            prop_assert!(super::super::op_norm(&(&gram - &ComplexMatrix::identity(n))) <= 1e-12);
            prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
