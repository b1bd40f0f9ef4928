//! Spectral projections, graph subspaces `𝒢(H0, X) = {f ⊕ Xf}` and the
//! invariance residuals of a graph subspace and its orthogonal complement.

use alloc::vec::Vec;

use crate::block::BlockProblem;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, inverse, op_norm, singular_extremes, sqrt, ComplexMatrix,
    C64,
};
use crate::residual::{residual_scale, Residual};

const GAP_TOL: f64 = 1e-10;
/// Smallest admissible singular value of the `H0` block of a basis.
pub const GRAPH_TOL: f64 = 1e-8;

/// Which eigenvalues of a Hermitian matrix a split selects.
#[derive(Debug, Clone, PartialEq)]
pub enum Selector {
    /// Every eigenvalue `≤ c`.
    Threshold(f64),
    /// Positions in the ascending eigenvalue list.
    Indices(Vec<usize>),
}

/// `E_H(σ)` together with the data it was built from.
#[derive(Debug, Clone)]
pub struct SpectralProjection {
    pub projection: ComplexMatrix,
    pub complement: ComplexMatrix,
    /// Orthonormal eigenvectors spanning the range, as columns.
    pub basis: ComplexMatrix,
    pub selected: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    /// Distance between selected and unselected eigenvalues
    /// (`f64::INFINITY` when either side is empty).
    pub gap: f64,
}

/// Orthogonal projection onto the span of the eigenvectors of `h` picked
/// by `selector`.
pub fn spectral_projection(h: &ComplexMatrix, selector: &Selector) -> Result<SpectralProjection> {
    let eig = hermitian_eig(h)?;
    let n = eig.eigenvalues.len();
    let norm = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let tol = GAP_TOL * (1.0 + norm);

    let mut selected: Vec<usize> = match selector {
        Selector::Threshold(c) => {
            if let Some(&l) = eig.eigenvalues.iter().find(|&&l| (l - c).abs() <= tol) {
                return Err(Error::GapViolation {
                    eigenvalue: l,
                    gap: (l - c).abs(),
                });
            }
            (0..n).filter(|&i| eig.eigenvalues[i] <= *c).collect()
        }
        Selector::Indices(idx) => {
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(Error::IndexOutOfRange { index: bad, len: n });
            }
            idx.clone()
        }
    };
    selected.sort_unstable();
    selected.dedup();

    let mut gap = f64::INFINITY;
    let mut worst = 0.0;
    for &i in &selected {
        for j in (0..n).filter(|j| selected.binary_search(j).is_err()) {
            let d = (eig.eigenvalues[i] - eig.eigenvalues[j]).abs();
            if d < gap {
                gap = d;
                worst = eig.eigenvalues[i];
            }
        }
    }
    if gap <= tol {
        return Err(Error::GapViolation {
            eigenvalue: worst,
            gap,
        });
    }

    let basis = eig.vectors.select_columns(&selected);
    let projection = &basis * &basis.adjoint();
    let complement = &ComplexMatrix::identity(n) - &projection;
    Ok(SpectralProjection {
        projection,
        complement,
        basis,
        selected,
        eigenvalues: eig.eigenvalues,
        gap,
    })
}

/// Modified Gram–Schmidt on the columns, in place.
fn orthonormalize(m: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = m.shape();
    let mut c: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j)).collect();
    for j in 0..cols {
        let (done, rest) = c.split_at_mut(j);
        let col = &mut rest[0];
        for q in done.iter() {
            let proj: C64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            col.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
        }
        let norm = sqrt(c[j].iter().map(|z| z.norm_sqr()).sum());
        if norm > 0.0 {
            for z in c[j].iter_mut() {
                *z /= norm;
            }
        }
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| c[j][i])
}

/// Recovers `X` from a projection whose range is a graph over the first
/// `n0` coordinates: with an orthonormal basis `[F; G]` of `Ran P`,
/// `X = G·F⁻¹`.
pub fn angular_from_projection(p: &ComplexMatrix, n0: usize) -> Result<ComplexMatrix> {
    let n = p.require_square()?;
    let eig = hermitian_eig(&p.hermitian_part())?;
    let rank = eig.eigenvalues.iter().filter(|&&l| l > 0.5).count();
    if rank != n0 || n0 >= n {
        return Err(Error::RankMismatch {
            expected: n0,
            found: rank,
        });
    }
    let top: Vec<usize> = (n - n0..n).collect();
    let basis = orthonormalize(&eig.vectors.select_columns(&top));
    angular_from_basis(&basis, n0)
}

/// `X = G·F⁻¹` for a basis `[F; G]` of a subspace with `n0` columns.
pub fn angular_from_basis(basis: &ComplexMatrix, n0: usize) -> Result<ComplexMatrix> {
    let n = basis.rows();
    let f = basis.submatrix(0, 0, n0, n0);
    let g = basis.submatrix(n0, 0, n - n0, n0);
    let (_, sigma_min) = singular_extremes(&f);
    if sigma_min < GRAPH_TOL {
        return Err(Error::NotAGraph { sigma_min });
    }
    Ok(&g * &inverse(&f)?)
}

/// The graph subspace of `X` with its orthogonal projection and an
/// orthonormal basis `[I; X]·(I + X*X)^{−1/2}`.
#[derive(Debug, Clone)]
pub struct GraphSubspace {
    pub x: ComplexMatrix,
    pub projection: ComplexMatrix,
    pub basis: ComplexMatrix,
}

/// `Q = [I; X]·(I + X*X)⁻¹·[I; X]*`.
pub fn graph_projection(x: &ComplexMatrix) -> GraphSubspace {
    let n0 = x.cols();
    let stacked = ComplexMatrix::vstack(&ComplexMatrix::identity(n0), x);
    let gram = (&ComplexMatrix::identity(n0) + &(&x.adjoint() * x)).hermitian_part();
    // I + X*X ⪰ I, so both functions are well defined.
    let eig = hermitian_eig(&gram).expect("I + X*X is Hermitian");
    let inv = eig.apply(|l| 1.0 / l);
    let inv_sqrt = eig.apply(|l| 1.0 / sqrt(l));
    GraphSubspace {
        x: x.clone(),
        projection: &(&stacked * &inv) * &stacked.adjoint(),
        basis: &stacked * &inv_sqrt,
    }
}

/// Projection onto `𝒢(H1, −X*) = 𝒢(H0, X)^⊥`, written in `H0 ⊕ H1`
/// coordinates.
pub fn complement_graph_projection(x: &ComplexMatrix) -> ComplexMatrix {
    // Graph of -X* over H1 in H1 ⊕ H0 ordering, then swap the blocks back.
    let swapped = graph_projection(&-&x.adjoint()).projection;
    let (n1, n0) = x.shape();
    let q11 = swapped.submatrix(0, 0, n1, n1);
    let q10 = swapped.submatrix(0, n1, n1, n0);
    let q01 = swapped.submatrix(n1, 0, n0, n1);
    let q00 = swapped.submatrix(n1, n1, n0, n0);
    ComplexMatrix::from_blocks(&q00, &q01, &q10, &q11)
}

pub(crate) fn require_angular_shape(p: &BlockProblem, x: &ComplexMatrix) -> Result<()> {
    if x.shape() != (p.n1(), p.n0()) {
        return Err(Error::DimensionMismatch {
            context: "angular operator X",
            expected: (p.n1(), p.n0()),
            found: x.shape(),
        });
    }
    Ok(())
}

/// Residuals of the two split Riccati equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceResiduals {
    /// `A1X − XA0 − XWX + W*`: invariance of `𝒢(H0, X)`.
    pub graph: Residual,
    /// `A0X* − X*A1 + X*W*X* − W`: invariance of `𝒢(H1, −X*)`.
    pub complement: Residual,
}

impl InvarianceResiduals {
    pub fn passes(&self, tol: f64) -> bool {
        self.graph.passes(tol) && self.complement.passes(tol)
    }
}

/// `A1X − XA0 − XWX + W*`.
pub fn split_riccati_operator(p: &BlockProblem, x: &ComplexMatrix) -> ComplexMatrix {
    let xw = x * p.w();
    let mut r = &(p.a1() * x) - &(x * p.a0());
    r = &r - &(&xw * x);
    &r + &p.w().adjoint()
}

pub fn invariance_residuals(p: &BlockProblem, x: &ComplexMatrix) -> Result<InvarianceResiduals> {
    require_angular_shape(p, x)?;
    let scale = residual_scale(p.norm_full(), op_norm(x));
    let xs = x.adjoint();
    let r0 = split_riccati_operator(p, x);
    let mut r1 = &(p.a0() * &xs) - &(&xs * p.a1());
    r1 = &r1 + &(&(&xs * &p.w().adjoint()) * &xs);
    r1 = &r1 - p.w();
    Ok(InvarianceResiduals {
        graph: Residual::new(op_norm(&r0), scale),
        complement: Residual::new(op_norm(&r1), scale),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducingVerdict {
    pub reducing: bool,
    pub residuals: InvarianceResiduals,
    /// `T⁻¹` maps the whole (finite-dimensional) space onto itself, so the
    /// domain splitting part of "reducing" holds automatically.
    pub domain_splitting_automatic: bool,
}

/// `𝒢(H0, X)` reduces `B` iff it and its orthogonal complement are both
/// invariant.
pub fn reducing_check(p: &BlockProblem, x: &ComplexMatrix, tol: f64) -> Result<ReducingVerdict> {
    let residuals = invariance_residuals(p, x)?;
    Ok(ReducingVerdict {
        reducing: residuals.passes(tol),
        residuals,
        domain_splitting_automatic: true,
    })
}
