//! The operator Riccati equation `AY − YA − YVY + V = 0` in its
//! equivalent forms, and a Newton solver for the angular operator.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::block::BlockProblem;
use crate::error::{Error, Result};
use crate::linalg::{op_norm, singular_extremes, ComplexMatrix, Lu, C64};
use crate::residual::{residual_scale, Residual};
use crate::subspace::{invariance_residuals, require_angular_shape, split_riccati_operator, InvarianceResiduals};

/// `Y = [[0, −X*], [X, 0]]`.
pub fn skew_operator(x: &ComplexMatrix) -> ComplexMatrix {
    let (n1, n0) = x.shape();
    ComplexMatrix::from_blocks(
        &ComplexMatrix::zeros(n0, n0),
        &-&x.adjoint(),
        x,
        &ComplexMatrix::zeros(n1, n1),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiReport {
    /// `AY − YA − YVY + V`.
    pub full: Residual,
    pub split: InvarianceResiduals,
    /// `(A + V)T − T(A + VY)`.
    pub intertwining_t: Residual,
    /// `T*(A + V) − (A − YV)T*`.
    pub intertwining_t_star: Residual,
    /// `full` passes the tolerance. At finite dimension `Y` maps the whole
    /// space into itself, so the range condition is automatic.
    pub strong_solution: bool,
}

impl RiccatiReport {
    pub fn intertwining_passes(&self, tol: f64) -> bool {
        self.intertwining_t.passes(tol) && self.intertwining_t_star.passes(tol)
    }
}

/// Evaluates all four residual forms on full matrices.
pub fn riccati_residual(p: &BlockProblem, x: &ComplexMatrix, tol: f64) -> Result<RiccatiReport> {
    require_angular_shape(p, x)?;
    let a = p.diagonal();
    let v = p.coupling();
    let b = p.full();
    let y = skew_operator(x);
    let n = p.dim();
    let t = &ComplexMatrix::identity(n) + &y;
    let t_star = &ComplexMatrix::identity(n) - &y;
    let scale = residual_scale(op_norm(&b), op_norm(x));

    let vy = &v * &y;
    let yv = &y * &v;
    let mut full = &(&a * &y) - &(&y * &a);
    full = &full - &(&y * &vy);
    full = &full + &v;

    let first = &(&b * &t) - &(&t * &(&a + &vy));
    let second = &(&t_star * &b) - &(&(&a - &yv) * &t_star);

    let full = Residual::new(op_norm(&full), scale);
    Ok(RiccatiReport {
        full,
        split: invariance_residuals(p, x)?,
        intertwining_t: Residual::new(op_norm(&first), scale),
        intertwining_t_star: Residual::new(op_norm(&second), scale),
        strong_solution: full.passes(tol),
    })
}

/// Solves `L·Z − Z·R = C` as one dense system on the column-stacked
/// unknown, `(I ⊗ L − Rᵀ ⊗ I)·vec(Z) = vec(C)`.
pub fn sylvester_solve(l: &ComplexMatrix, r: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    let m = l.require_square()?;
    let k = r.require_square()?;
    if c.shape() != (m, k) {
        return Err(Error::DimensionMismatch {
            context: "Sylvester right-hand side",
            expected: (m, k),
            found: c.shape(),
        });
    }
    let size = m * k;
    let mut kron = ComplexMatrix::zeros(size, size);
    for j in 0..k {
        for i in 0..m {
            let row = j * m + i;
            for q in 0..m {
                kron[(row, j * m + q)] += l[(i, q)];
            }
            for q in 0..k {
                kron[(row, q * m + i)] -= r[(q, j)];
            }
        }
    }
    let rhs: Vec<C64> = (0..k).flat_map(|j| (0..m).map(move |i| c[(i, j)])).collect();

    let floor = 1e-12 * (1.0 + op_norm(l) + op_norm(r));
    let lu = Lu::factor(&kron, floor).map_err(|e| match e {
        Error::Singular { sigma_min } => Error::SpectraOverlap { sigma_min },
        other => other,
    })?;
    let sol = lu.solve_vec(&rhs);
    let z = ComplexMatrix::from_fn(m, k, |i, j| sol[j * m + i]);

    let residual = op_norm(&(&(&(l * &z) - &(&z * r)) - c));
    if !residual.is_finite() || residual > 1e-9 * (1.0 + op_norm(c)) {
        return Err(Error::SpectraOverlap {
            sigma_min: singular_extremes(&kron).1,
        });
    }
    Ok(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Stagnation threshold on `‖Δ‖ / (1 + ‖X‖)`.
    pub step_tol: f64,
    /// Target for the normalized split residual.
    pub residual_tol: f64,
    /// Starting point; `None` means `X0 = 0`.
    pub initial: Option<ComplexMatrix>,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 50,
            step_tol: 1e-12,
            residual_tol: 1e-11,
            initial: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub x: ComplexMatrix,
    pub iterations: usize,
    /// Normalized split residual at `x`.
    pub residual: f64,
    /// `X0, X1, …, X_final`.
    pub iterates: Vec<ComplexMatrix>,
}

/// Newton's method on `F(X) = A1X − XA0 − XWX + W*`.
///
/// Each step solves `(A1 − XW)·Δ − Δ·(A0 + WX) = −F(X)` and sets
/// `X ← X + Δ`. No damping: failure to converge is reported with the best
/// iterate.
pub fn newton_solve(p: &BlockProblem, opts: &NewtonOptions) -> Result<NewtonSolution> {
    if !(opts.step_tol > 0.0 && opts.residual_tol > 0.0) {
        return Err(Error::InvalidOption("Newton tolerances must be positive"));
    }
    let mut x = match &opts.initial {
        Some(x0) => {
            require_angular_shape(p, x0)?;
            x0.clone()
        }
        None => ComplexMatrix::zeros(p.n1(), p.n0()),
    };
    let norm_b = p.norm_full();
    let normalized = |x: &ComplexMatrix, f: &ComplexMatrix| {
        op_norm(f) / residual_scale(norm_b, op_norm(x))
    };

    let mut iterates = Vec::new();
    iterates.push(x.clone());
    let mut best = (f64::INFINITY, x.clone());
    for k in 0..=opts.max_iter {
        let f = split_riccati_operator(p, &x);
        let r = normalized(&x, &f);
        if r < best.0 {
            best = (r, x.clone());
        }
        if r <= opts.residual_tol {
            return Ok(NewtonSolution {
                x,
                iterations: k,
                residual: r,
                iterates,
            });
        }
        if k == opts.max_iter || !r.is_finite() {
            break;
        }
        let xw = &x * p.w();
        let wx = p.w() * &x;
        let delta = sylvester_solve(&(p.a1() - &xw), &(p.a0() + &wx), &-&f)?;
        x = &x + &delta;
        iterates.push(x.clone());
        if op_norm(&delta) <= opts.step_tol * (1.0 + op_norm(&x)) {
            let r = normalized(&x, &split_riccati_operator(p, &x));
            if r <= opts.residual_tol {
                return Ok(NewtonSolution {
                    x,
                    iterations: k + 1,
                    residual: r,
                    iterates,
                });
            }
            if r < best.0 {
                best = (r, x.clone());
            }
            break;
        }
    }
    Err(Error::NewtonNoConvergence {
        best: Box::new(best.1),
        residual: best.0,
        iterations: iterates.len() - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{angular_from_projection, spectral_projection, Selector};
    use crate::testutil::{assert_close, hermitian_with_spectrum, random_hermitian, random_matrix, SplitMix};
    use proptest::prelude::*;

    const GOLDEN_X: f64 = -0.618_033_988_749_894_9;

    fn scalar(v: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[v]])
    }

    fn golden() -> BlockProblem {
        BlockProblem::assemble(scalar(0.0), scalar(1.0), scalar(1.0), true).unwrap()
    }

    fn subordinated(n0: usize, n1: usize, coupling: f64, seed: u64) -> BlockProblem {
        let mut rng = SplitMix(seed);
        let lower: Vec<f64> = (0..n0).map(|_| -1.5 + 0.5 * rng.uniform()).collect();
        let upper: Vec<f64> = (0..n1).map(|_| 1.5 + 0.5 * rng.uniform()).collect();
        let w = random_matrix(n0, n1, seed ^ 5);
        let w = w.scale_real(coupling / op_norm(&w));
        BlockProblem::assemble(
            hermitian_with_spectrum(&lower, seed ^ 1),
            hermitian_with_spectrum(&upper, seed ^ 2),
            w,
            true,
        )
        .unwrap()
    }

    #[test]
    fn zero_coupling_zero_residuals() {
        let p = BlockProblem::assemble(scalar(0.0), scalar(1.0), scalar(0.0), true).unwrap();
        let r = riccati_residual(&p, &scalar(0.0), 1e-9).unwrap();
        assert_eq!(r.full.raw, 0.0);
        assert_eq!(r.intertwining_t.raw, 0.0);
        assert_eq!(r.intertwining_t_star.raw, 0.0);
        assert!(r.strong_solution);
    }

    #[test]
    fn golden_solution_residuals() {
        let r = riccati_residual(&golden(), &scalar(GOLDEN_X), 1e-9).unwrap();
        for res in [r.full, r.split.graph, r.split.complement, r.intertwining_t, r.intertwining_t_star] {
            assert!(res.raw <= 1e-12, "{res:?}");
        }
        assert!(r.strong_solution);
    }

    #[test]
    fn golden_non_solution() {
        // -x² + x + 1 at x = 0.5 is 1.25, appearing in both off-diagonal entries.
        let r = riccati_residual(&golden(), &scalar(0.5), 1e-9).unwrap();
        assert!((r.full.raw - 1.25).abs() < 1e-12);
        assert!(!r.strong_solution);
    }

    #[test]
    fn sylvester_examples() {
        let z = sylvester_solve(&scalar(2.0), &scalar(0.0), &scalar(1.0)).unwrap();
        assert_close(&z, &scalar(0.5), 1e-15);
        let z = sylvester_solve(
            &ComplexMatrix::from_real_diagonal(&[1.0, 2.0]),
            &scalar(0.0),
            &ComplexMatrix::from_real_rows(&[[1.0], [1.0]]),
        )
        .unwrap();
        assert_close(&z, &ComplexMatrix::from_real_rows(&[[1.0], [0.5]]), 1e-15);
        assert!(matches!(
            sylvester_solve(&scalar(1.0), &scalar(1.0), &scalar(1.0)),
            Err(Error::SpectraOverlap { .. })
        ));
    }

    #[test]
    fn newton_zero_coupling() {
        let p = BlockProblem::assemble(scalar(0.0), scalar(1.0), scalar(0.0), true).unwrap();
        let s = newton_solve(&p, &NewtonOptions::default()).unwrap();
        assert_eq!(s.iterations, 0);
        assert_eq!(s.x, scalar(0.0));
    }

    #[test]
    fn newton_golden_iterates() {
        let s = newton_solve(&golden(), &NewtonOptions::default()).unwrap();
        assert!((s.x[(0, 0)].re - GOLDEN_X).abs() <= 1e-10);
        let it: Vec<f64> = s.iterates.iter().map(|m| m[(0, 0)].re).collect();
        assert!((it[1] + 1.0).abs() < 1e-15);
        assert!((it[2] + 2.0 / 3.0).abs() < 1e-15);
        assert!((it[3] + 13.0 / 21.0).abs() < 1e-15);
        assert!((it[3] + 0.6190476).abs() < 1e-7);
    }

    #[test]
    fn newton_golden_quadratic_convergence() {
        let s = newton_solve(&golden(), &NewtonOptions::default()).unwrap();
        let err: Vec<f64> = s.iterates.iter().map(|m| (m[(0, 0)].re - GOLDEN_X).abs()).collect();
        let informative: Vec<(f64, f64)> = err
            .windows(2)
            .map(|w| (w[0], w[1]))
            .filter(|&(_, next)| next > 1e-15)
            .collect();
        assert!(informative.len() >= 3);
        for &(e, next) in &informative[informative.len() - 3..] {
            assert!(next <= 2.0 * e * e, "{next:e} vs {e:e}");
        }
    }

    #[test]
    fn newton_other_basin() {
        let opts = NewtonOptions {
            initial: Some(scalar(2.0)),
            ..NewtonOptions::default()
        };
        let s = newton_solve(&golden(), &opts).unwrap();
        let root = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((s.x[(0, 0)].re - root).abs() <= 1e-10);
        assert!((s.x[(0, 0)].re - 1.6180339887).abs() <= 1e-9);
    }

    #[test]
    fn newton_budget_exhaustion_reports_best() {
        let opts = NewtonOptions {
            max_iter: 1,
            ..NewtonOptions::default()
        };
        match newton_solve(&golden(), &opts) {
            Err(Error::NewtonNoConvergence { best, iterations, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(best.shape(), (1, 1));
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn newton_rejects_bad_options() {
        let opts = NewtonOptions {
            residual_tol: 0.0,
            ..NewtonOptions::default()
        };
        assert!(matches!(newton_solve(&golden(), &opts), Err(Error::InvalidOption(_))));
    }

    fn verdicts(p: &BlockProblem, x: &ComplexMatrix, tol: f64) -> (bool, bool, bool) {
        let r = riccati_residual(p, x, tol).unwrap();
        (r.strong_solution, r.split.passes(tol), r.intertwining_passes(tol))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn equivalence_chain(n0 in 1usize..5, n1 in 1usize..5, seed in any::<u64>(), solve in any::<bool>()) {
            let p = subordinated(n0, n1, 0.8, seed);
            let x = if solve {
                let sp = spectral_projection(&p.full(), &Selector::Indices((0..n0).collect())).unwrap();
                angular_from_projection(&sp.projection, n0).unwrap()
            } else {
                random_matrix(n1, n0, seed ^ 77).scale_real(0.5)
            };
            let (full, split, inter) = verdicts(&p, &x, 1e-9);
            prop_assert_eq!(full, split);
            prop_assert_eq!(full, inter);
            prop_assert_eq!(full, solve);
        }

        #[test]
        fn newton_matches_spectral_route(n0 in 1usize..5, n1 in 1usize..5, seed in any::<u64>()) {
            // gap ≥ 2, ‖W‖ = 0.9 < gap / 2
            let p = subordinated(n0, n1, 0.9, seed);
            let s = newton_solve(&p, &NewtonOptions::default()).unwrap();
            let sp = spectral_projection(&p.full(), &Selector::Indices((0..n0).collect())).unwrap();
            let x = angular_from_projection(&sp.projection, n0).unwrap();
            prop_assert!((&s.x - &x).max_abs() <= 1e-8);
        }

        #[test]
        fn sylvester_residual(m in 1usize..6, k in 1usize..6, seed in any::<u64>()) {
            let l = random_hermitian(m, seed).shifted(C64::new(4.0, 0.0));
            let r = random_hermitian(k, seed ^ 3).shifted(C64::new(-4.0, 0.0));
            let c = random_matrix(m, k, seed ^ 4);
            let z = sylvester_solve(&l, &r, &c).unwrap();
            prop_assert!(op_norm(&(&(&(&l * &z) - &(&z * &r)) - &c)) <= 1e-9 * (1.0 + op_norm(&c)));
        }
    }
}
