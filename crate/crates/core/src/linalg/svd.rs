use alloc::vec::Vec;

use super::{sqrt, ComplexMatrix, C64};

const MAX_SWEEPS: usize = 100;

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
///
/// Columns are rotated pairwise until mutually orthogonal to working
/// precision; the singular values are then the column norms. Small
/// singular values come out with absolute error of order `ε‖M‖`, which a
/// square-root of the eigenvalues of `M*M` cannot deliver.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    // Work on the orientation with at least as many rows as columns.
    let work = if m.rows() >= m.cols() {
        m.clone()
    } else {
        m.adjoint()
    };
    let (rows, cols) = work.shape();
    let mut columns: Vec<Vec<C64>> = (0..cols).map(|j| work.column(j)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let (left, right) = columns.split_at_mut(j);
                if orthogonalize_pair(&mut left[i], &mut right[0], rows) {
                    rotated = true;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = columns
        .iter()
        .map(|c| sqrt(c.iter().map(|z| z.norm_sqr()).sum()))
        .collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    sigma
}

fn orthogonalize_pair(ci: &mut [C64], cj: &mut [C64], rows: usize) -> bool {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = C64::new(0.0, 0.0);
    for k in 0..rows {
        alpha += ci[k].norm_sqr();
        beta += cj[k].norm_sqr();
        gamma += ci[k].conj() * cj[k];
    }
    let mag = gamma.norm();
    if mag <= f64::EPSILON * sqrt(alpha * beta) || mag < f64::MIN_POSITIVE {
        return false;
    }
    // After b = c_j·e^{-iφ} the pair has real Gram matrix [[α, |γ|], [|γ|, β]].
    let phase_conj = (gamma / mag).conj();
    let zeta = (beta - alpha) / (2.0 * mag);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + sqrt(1.0 + zeta * zeta))
    } else {
        -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
    };
    let c = 1.0 / sqrt(1.0 + t * t);
    let s = t * c;
    for k in 0..rows {
        let x = ci[k];
        let y = cj[k] * phase_conj;
        ci[k] = x * c - y * s;
        cj[k] = x * s + y * c;
    }
    true
}

/// `(σmax, σmin)`; for non-square input σmin is the smallest of the
/// `min(rows, cols)` singular values.
pub fn singular_extremes(m: &ComplexMatrix) -> (f64, f64) {
    let sigma = singular_values(m);
    let max = sigma.first().copied().unwrap_or(0.0);
    let min = sigma.last().copied().unwrap_or(0.0);
    (max, min.max(0.0))
}

/// Spectral (operator 2-) norm.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    singular_extremes(m).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_matrix;
    use proptest::prelude::*;

    #[test]
    fn identity() {
        assert_eq!(singular_extremes(&ComplexMatrix::identity(3)), (1.0, 1.0));
    }

    #[test]
    fn rank_deficient_diagonal() {
        let m = ComplexMatrix::from_real_diagonal(&[2.0, 0.0]);
        assert_eq!(singular_extremes(&m), (2.0, 0.0));
    }

    #[test]
    fn golden_matrix_singular_values_are_eigenvalue_moduli() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 1.0]]);
        let (max, min) = singular_extremes(&m);
        assert!((max - 1.6180339887).abs() < 1e-10);
        assert!((min - 0.6180339887).abs() < 1e-10);
    }

    #[test]
    fn exactly_singular_matrix_has_tiny_sigma_min() {
        // B - λI for an eigenvalue λ of the golden matrix.
        let x = (1.0 - 5f64.sqrt()) / 2.0;
        let m = ComplexMatrix::from_real_rows(&[[-x, 1.0], [1.0, 1.0 - x]]);
        assert!(singular_extremes(&m).1 < 1e-15);
    }

    #[test]
    fn wide_matrix() {
        let m = ComplexMatrix::from_real_rows(&[[3.0, 0.0, 0.0], [0.0, 4.0, 0.0]]);
        assert_eq!(singular_extremes(&m), (4.0, 3.0));
    }

    proptest! {
        #[test]
        fn extremes_are_ordered_and_adjoint_invariant(
            rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()
        ) {
            let m = random_matrix(rows, cols, seed);
            let (max, min) = singular_extremes(&m);
            prop_assert!(min <= max);
            let (max_h, _) = singular_extremes(&m.adjoint());
            prop_assert!((max - max_h).abs() <= 1e-13 * (1.0 + max));
            prop_assert!(max <= m.frobenius_norm() * (1.0 + 1e-14));
        }
    }
}
