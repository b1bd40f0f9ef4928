use alloc::vec;
use alloc::vec::Vec;

use super::{hypot, sqrt, ComplexMatrix, C64};
use crate::error::{Error, Result};

const ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of a general square complex matrix.
///
/// Householder reduction to upper Hessenberg form followed by single-shift
/// complex QR with Wilkinson shifts and bottom deflation. Only the active
/// window is updated since no Schur vectors are needed. The result is in
/// deflation order, not sorted.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = m.require_square()?;
    let mut h = m.clone();
    hessenberg(&mut h);

    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let budget = ITERATIONS_PER_EIGENVALUE * n;
    let mut total = 0usize;

    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= f64::EPSILON * scale || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::NoConvergence { iterations: total });
        }
        let shift = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_step(&mut h, lo, hi, shift);
    }
    out[0] = h[(0, 0)];
    Ok(out)
}

fn hessenberg(h: &mut ComplexMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if norm < f64::MIN_POSITIVE {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() < f64::MIN_POSITIVE {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x + e^{i arg x0}‖x‖ e1 maps x to -e^{i arg x0}‖x‖ e1.
        v[0] += phase * norm;
        let vnorm = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vv*) H
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (idx, i) in (k + 1..n).enumerate() {
                dot += v[idx].conj() * h[(i, j)];
            }
            for (idx, i) in (k + 1..n).enumerate() {
                h[(i, j)] -= v[idx] * dot * 2.0;
            }
        }
        // H ← H (I − 2vv*)
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (idx, j) in (k + 1..n).enumerate() {
                dot += h[(i, j)] * v[idx];
            }
            for (idx, j) in (k + 1..n).enumerate() {
                h[(i, j)] -= dot * v[idx].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicitly shifted QR step `H − μ = QR, H ← RQ + μ` on the window
/// `lo..=hi` using Givens rotations.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = hypot(a.norm(), b.norm());
        let (c, s) = if r < f64::MIN_POSITIVE {
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
        } else {
            (a / r, b / r)
        };
        // G = [[c̄, s̄], [−s, c]] sends (a, b) to (r, 0).
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c.conj() * x + s.conj() * y;
            h[(k + 1, j)] = -s * x + c * y;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s;
            h[(i, k + 1)] = -(x * s.conj()) + y * c.conj();
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;
    use crate::testutil::{random_hermitian, random_matrix};
    use proptest::prelude::*;

    fn sorted_real(mut v: Vec<C64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn triangular_matrix() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, 5.0, 2.0], [0.0, 3.0, 7.0], [0.0, 0.0, -2.0]]);
        let e = sorted_real(eigenvalues(&m).unwrap());
        for (a, b) in e.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rotation_has_complex_pair() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        let mut e = eigenvalues(&m).unwrap();
        e.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((e[0] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // x³ − 6x² + 11x − 6 = (x−1)(x−2)(x−3)
        let m = ComplexMatrix::from_real_rows(&[[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let e = sorted_real(eigenvalues(&m).unwrap());
        for (a, b) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn agrees_with_jacobi_on_hermitian(n in 1usize..16, seed in any::<u64>()) {
            let m = random_hermitian(n, seed);
            let general = eigenvalues(&m).unwrap();
            prop_assert!(general.iter().all(|z| z.im.abs() < 1e-12));
            let a = sorted_real(general);
            let b = hermitian_eig(&m).unwrap().eigenvalues;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-11);
            }
        }

        #[test]
        fn trace_is_eigenvalue_sum(n in 1usize..16, seed in any::<u64>()) {
            let m = random_matrix(n, n, seed);
            let sum: C64 = eigenvalues(&m).unwrap().into_iter().sum();
            let trace: C64 = m.diagonal().into_iter().sum();
            prop_assert!((sum - trace).norm() < 1e-11 * (1.0 + m.frobenius_norm()));
        }
    }
}
