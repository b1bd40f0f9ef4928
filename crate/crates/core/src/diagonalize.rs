//! Similarity and unitary block diagonalizations built from an angular
//! operator `X`.
//!
//! With `Y = [[0, −X*], [X, 0]]` and `T = I + Y`:
//!
//! * `T⁻¹(A + V)T = A + VY = diag(A0 + WX, A1 − W*X*)`,
//! * `T*(A + V)(T*)⁻¹ = A − YV = diag(A0 + X*W*, A1 − XW)`,
//! * `U*(A + V)U = diag(B0, B1)` for the polar factor `T = U|T|`.
//!
//! Every routine returns its residuals rather than failing when `X` is not
//! a solution, so callers can inspect failure modes.

use alloc::vec::Vec;

use crate::block::BlockProblem;
use crate::error::Result;
use crate::linalg::{
    eigenvalues, hermitian_eig, hermitian_function, inverse, op_norm, polar_decompose,
    singular_extremes, ComplexMatrix, C64,
};
use crate::residual::{residual_scale, NamedResidual, Residual};
use crate::riccati::{riccati_residual, skew_operator, RiccatiReport};
use crate::subspace::{reducing_check, require_angular_shape, ReducingVerdict};

/// `X` and the operators derived from it.
#[derive(Debug, Clone)]
pub struct AngularData {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub t: ComplexMatrix,
    pub t_star: ComplexMatrix,
    pub t_inv: ComplexMatrix,
    /// `|T| = (T*T)^{1/2}`.
    pub abs_t: ComplexMatrix,
    /// Polar factor, `T = U·|T|`.
    pub unitary: ComplexMatrix,
}

/// `T` is always invertible (`σmin(T) ≥ 1` because `Y` is skew-Hermitian),
/// so this only fails if an inner eigensolver does not converge.
pub fn build_angular(x: &ComplexMatrix) -> Result<AngularData> {
    let y = skew_operator(x);
    let n = y.rows();
    let t = &ComplexMatrix::identity(n) + &y;
    let t_star = &ComplexMatrix::identity(n) - &y;
    let t_inv = inverse(&t)?;
    let polar = polar_decompose(&t)?;
    Ok(AngularData {
        x: x.clone(),
        y,
        t,
        t_star,
        t_inv,
        abs_t: polar.positive,
        unitary: polar.unitary,
    })
}

/// Deviations of the structural identities every `AngularData` satisfies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularDefects {
    /// `‖Y* + Y‖`.
    pub skew: f64,
    pub sigma_min_t: f64,
    /// `‖T* − J·T·J*‖`.
    pub signature_coupling: f64,
    /// `‖T*T − diag(I + X*X, I + XX*)‖`.
    pub gram_block_diagonal: f64,
    /// `‖T*T − TT*‖`.
    pub normality: f64,
    /// `‖U*U − I‖`.
    pub unitarity: f64,
}

impl AngularData {
    pub fn n0(&self) -> usize {
        self.x.cols()
    }

    pub fn defects(&self) -> AngularDefects {
        let (n1, n0) = self.x.shape();
        let n = n0 + n1;
        let j = crate::block::ThetaRotation::signature().matrix(n0, n1);
        let tt = &self.t.adjoint() * &self.t;
        let gram = ComplexMatrix::block_diag(
            &(&ComplexMatrix::identity(n0) + &(&self.x.adjoint() * &self.x)),
            &(&ComplexMatrix::identity(n1) + &(&self.x * &self.x.adjoint())),
        );
        AngularDefects {
            skew: op_norm(&(&self.y.adjoint() + &self.y)),
            sigma_min_t: singular_extremes(&self.t).1,
            signature_coupling: op_norm(&(&self.t_star - &(&(&j * &self.t) * &j.adjoint()))),
            gram_block_diagonal: op_norm(&(&tt - &gram)),
            normality: op_norm(&(&tt - &(&self.t * &self.t.adjoint()))),
            unitarity: op_norm(&(&(&self.unitary.adjoint() * &self.unitary) - &ComplexMatrix::identity(n))),
        }
    }
}

/// Powers of `I + X*X` (`left`) or `I + XX*`.
fn gram_power(x: &ComplexMatrix, power: f64, left: bool) -> Result<ComplexMatrix> {
    let gram = if left {
        &ComplexMatrix::identity(x.cols()) + &(&x.adjoint() * x)
    } else {
        &ComplexMatrix::identity(x.rows()) + &(x * &x.adjoint())
    };
    hermitian_function(&gram.hermitian_part(), |l| num_traits::Float::powf(l, power))
}

fn scale_for(p: &BlockProblem, x: &ComplexMatrix) -> f64 {
    residual_scale(p.norm_full(), op_norm(x))
}

/// Diagonal blocks of one similarity transform and how far the transformed
/// matrix is from `diag(first, second)`.
#[derive(Debug, Clone)]
pub struct BlockPair {
    pub first: ComplexMatrix,
    pub second: ComplexMatrix,
    pub residual: Residual,
    /// Frobenius norm of the off-diagonal blocks of the transformed matrix.
    pub off_diagonal: f64,
}

/// `T⁻¹BT` against `diag(A0 + WX, A1 − W*X*)`.
pub fn first_diagonalization(p: &BlockProblem, ad: &AngularData) -> Result<BlockPair> {
    require_angular_shape(p, &ad.x)?;
    let x = &ad.x;
    let d0 = p.a0() + &(p.w() * x);
    let d1 = p.a1() - &(&p.w().adjoint() * &x.adjoint());
    let transformed = &(&ad.t_inv * &p.full()) * &ad.t;
    let target = ComplexMatrix::block_diag(&d0, &d1);
    Ok(BlockPair {
        residual: Residual::new(op_norm(&(&transformed - &target)), scale_for(p, x)),
        off_diagonal: transformed.off_diagonal_block_norm(p.n0()),
        first: d0,
        second: d1,
    })
}

/// `T*B(T*)⁻¹` against `diag(A0 + X*W*, A1 − XW)`.
pub fn second_diagonalization(p: &BlockProblem, ad: &AngularData) -> Result<BlockPair> {
    require_angular_shape(p, &ad.x)?;
    let x = &ad.x;
    let e0 = p.a0() + &(&x.adjoint() * &p.w().adjoint());
    let e1 = p.a1() - &(x * p.w());
    // (T*)⁻¹ = (T⁻¹)*
    let transformed = &(&ad.t_star * &p.full()) * &ad.t_inv.adjoint();
    let target = ComplexMatrix::block_diag(&e0, &e1);
    Ok(BlockPair {
        residual: Residual::new(op_norm(&(&transformed - &target)), scale_for(p, x)),
        off_diagonal: transformed.off_diagonal_block_norm(p.n0()),
        first: e0,
        second: e1,
    })
}

#[derive(Debug, Clone)]
pub struct UnitaryForm {
    pub unitary: ComplexMatrix,
    /// `(I + X*X)^{1/2}(A0 + WX)(I + X*X)^{−1/2}`.
    pub b0: ComplexMatrix,
    /// `(I + XX*)^{1/2}(A1 − W*X*)(I + XX*)^{−1/2}`.
    pub b1: ComplexMatrix,
    /// `U*BU` against `diag(B0, B1)`.
    pub residual: Residual,
    /// `|T|(A + VY)|T|⁻¹` against `|T|⁻¹(A − YV)|T|`.
    pub middle_identity: Residual,
    /// `|T|(A + VY)|T|⁻¹` against `U*BU`.
    pub coherence: Residual,
    pub off_diagonal: f64,
}

pub fn unitary_diagonalization(p: &BlockProblem, ad: &AngularData) -> Result<UnitaryForm> {
    require_angular_shape(p, &ad.x)?;
    let x = &ad.x;
    let scale = scale_for(p, x);
    let d0 = p.a0() + &(p.w() * x);
    let d1 = p.a1() - &(&p.w().adjoint() * &x.adjoint());
    let b0 = &(&gram_power(x, 0.5, true)? * &d0) * &gram_power(x, -0.5, true)?;
    let b1 = &(&gram_power(x, 0.5, false)? * &d1) * &gram_power(x, -0.5, false)?;

    let rotated = &(&ad.unitary.adjoint() * &p.full()) * &ad.unitary;
    let target = ComplexMatrix::block_diag(&b0, &b1);

    let a = p.diagonal();
    let v = p.coupling();
    let abs_t_inv = inverse(&ad.abs_t)?;
    let left = &(&ad.abs_t * &(&a + &(&v * &ad.y))) * &abs_t_inv;
    let right = &(&abs_t_inv * &(&a - &(&ad.y * &v))) * &ad.abs_t;

    Ok(UnitaryForm {
        residual: Residual::new(op_norm(&(&rotated - &target)), scale),
        middle_identity: Residual::new(op_norm(&(&left - &right)), scale),
        coherence: Residual::new(op_norm(&(&left - &rotated)), scale),
        off_diagonal: rotated.off_diagonal_block_norm(p.n0()),
        unitary: ad.unitary.clone(),
        b0,
        b1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityAudit {
    /// `T*T(A + VY)(T*T)⁻¹` against `A − YV`.
    pub gram: Residual,
    /// `(I + X*X)(A0 + WX)(I + X*X)⁻¹` against `A0 + X*W*`.
    pub upper_block: Residual,
    /// `(I + XX*)(A1 − W*X*)(I + XX*)⁻¹` against `A1 − XW`.
    pub lower_block: Residual,
}

impl SimilarityAudit {
    pub fn passes(&self, tol: f64) -> bool {
        self.gram.passes(tol) && self.upper_block.passes(tol) && self.lower_block.passes(tol)
    }
}

pub fn similarity_audit(p: &BlockProblem, ad: &AngularData) -> Result<SimilarityAudit> {
    require_angular_shape(p, &ad.x)?;
    let x = &ad.x;
    let scale = scale_for(p, x);
    let a = p.diagonal();
    let v = p.coupling();
    let tt = &ad.t_star * &ad.t;
    let lhs = &(&tt * &(&a + &(&v * &ad.y))) * &inverse(&tt)?;
    let gram = Residual::new(op_norm(&(&lhs - &(&a - &(&ad.y * &v)))), scale);

    let xs = x.adjoint();
    let g0 = &ComplexMatrix::identity(x.cols()) + &(&xs * x);
    let g1 = &ComplexMatrix::identity(x.rows()) + &(x * &xs);
    let d0 = p.a0() + &(p.w() * x);
    let d1 = p.a1() - &(&p.w().adjoint() * &xs);
    let e0 = p.a0() + &(&xs * &p.w().adjoint());
    let e1 = p.a1() - &(x * p.w());
    let upper = &(&(&g0 * &d0) * &inverse(&g0)?) - &e0;
    let lower = &(&(&g1 * &d1) * &inverse(&g1)?) - &e1;
    Ok(SimilarityAudit {
        gram,
        upper_block: Residual::new(op_norm(&upper), scale),
        lower_block: Residual::new(op_norm(&lower), scale),
    })
}

/// Smallest singular values of the shifted operators at `λ`. At finite
/// dimension a positive value certifies bijectivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityProbe {
    pub lambda: C64,
    /// `σmin(B − λ)`.
    pub full: f64,
    /// `σmin(A − YV − λ)`.
    pub second_form: f64,
    /// `σmin(A + VY − λ)`.
    pub first_form: f64,
}

pub fn regularity_check(p: &BlockProblem, ad: &AngularData, lambda: C64) -> Result<RegularityProbe> {
    require_angular_shape(p, &ad.x)?;
    let a = p.diagonal();
    let v = p.coupling();
    let shift = -lambda;
    Ok(RegularityProbe {
        lambda,
        full: singular_extremes(&p.full().shifted(shift)).1,
        second_form: singular_extremes(&(&a - &(&ad.y * &v)).shifted(shift)).1,
        first_form: singular_extremes(&(&a + &(&v * &ad.y)).shifted(shift)).1,
    })
}

/// Largest distance in a greedy nearest-neighbour matching of two spectra.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut sorted_a = a.to_vec();
    sorted_a.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut used = alloc::vec![false; b.len()];
    let mut worst = 0.0f64;
    for z in sorted_a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, w)| (i, (z - w).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        used[idx] = true;
        worst = worst.max(d);
    }
    worst
}

/// Spectrum of `B`: real eigenvalues in Hermitian mode, general otherwise.
pub fn full_spectrum(p: &BlockProblem) -> Result<Vec<C64>> {
    if p.hermitian_mode() {
        Ok(hermitian_eig(&p.full())?
            .eigenvalues
            .into_iter()
            .map(|l| C64::new(l, 0.0))
            .collect())
    } else {
        eigenvalues(&p.full())
    }
}

/// Everything this module and the Riccati module can say about one `X`.
#[derive(Debug, Clone)]
pub struct DiagonalizationResult {
    pub angular: AngularData,
    pub riccati: RiccatiReport,
    pub reducing: ReducingVerdict,
    pub first: BlockPair,
    pub second: BlockPair,
    pub unitary: UnitaryForm,
    pub similarity: SimilarityAudit,
    /// `spec(D0) ⊎ spec(D1)` against `spec(B)`.
    pub spectrum_deviation: f64,
    /// `max(‖B0 − B0*‖, ‖B1 − B1*‖)`.
    pub unitary_blocks_asymmetry: f64,
    pub tol: f64,
}

impl DiagonalizationResult {
    /// All residuals in a fixed order.
    pub fn residuals(&self) -> Vec<NamedResidual> {
        let named = |name, residual| NamedResidual { name, residual };
        alloc::vec![
            named("split_graph", self.riccati.split.graph),
            named("split_complement", self.riccati.split.complement),
            named("riccati_full", self.riccati.full),
            named("intertwining_t", self.riccati.intertwining_t),
            named("intertwining_t_star", self.riccati.intertwining_t_star),
            named("first_diagonalization", self.first.residual),
            named("second_diagonalization", self.second.residual),
            named("unitary_diagonalization", self.unitary.residual),
            named("unitary_middle_identity", self.unitary.middle_identity),
            named("unitary_coherence", self.unitary.coherence),
            named("similarity_gram", self.similarity.gram),
            named("similarity_upper_block", self.similarity.upper_block),
            named("similarity_lower_block", self.similarity.lower_block),
        ]
    }

    pub fn diagonalizations_pass(&self) -> bool {
        self.first.residual.passes(self.tol) && self.second.residual.passes(self.tol)
    }

    /// Reducing, strong solution, and every diagonalization residual within
    /// tolerance.
    pub fn passes(&self) -> bool {
        self.reducing.reducing
            && self.riccati.strong_solution
            && self.residuals().iter().all(|r| r.residual.passes(self.tol))
    }
}

pub fn diagonalize(p: &BlockProblem, x: &ComplexMatrix, tol: f64) -> Result<DiagonalizationResult> {
    require_angular_shape(p, x)?;
    let angular = build_angular(x)?;
    let first = first_diagonalization(p, &angular)?;
    let second = second_diagonalization(p, &angular)?;
    let unitary = unitary_diagonalization(p, &angular)?;
    let similarity = similarity_audit(p, &angular)?;

    let mut blocks = eigenvalues(&first.first)?;
    blocks.extend(eigenvalues(&first.second)?);
    let spectrum_deviation = spectrum_distance(&blocks, &full_spectrum(p)?);
    let unitary_blocks_asymmetry = op_norm(&(&unitary.b0 - &unitary.b0.adjoint()))
        .max(op_norm(&(&unitary.b1 - &unitary.b1.adjoint())));

    Ok(DiagonalizationResult {
        riccati: riccati_residual(p, x, tol)?,
        reducing: reducing_check(p, x, tol)?,
        angular,
        first,
        second,
        unitary,
        similarity,
        spectrum_deviation,
        unitary_blocks_asymmetry,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::ThetaRotation;
    use crate::subspace::{angular_from_projection, spectral_projection, Selector};
    use crate::testutil::{assert_close, c, hermitian_with_spectrum, random_matrix, SplitMix};
    use proptest::prelude::*;

    const GOLDEN_X: f64 = -0.618_033_988_749_894_9;
    const GOLDEN_UPPER: f64 = 1.618_033_988_749_895;

    fn scalar(v: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[v]])
    }

    fn golden() -> BlockProblem {
        BlockProblem::assemble(scalar(0.0), scalar(1.0), scalar(1.0), true).unwrap()
    }

    fn uncoupled() -> BlockProblem {
        BlockProblem::assemble(
            ComplexMatrix::from_real_diagonal(&[-1.0, 0.5]),
            ComplexMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 3.0]]),
            ComplexMatrix::zeros(2, 2),
            true,
        )
        .unwrap()
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

    fn spectral_x(p: &BlockProblem) -> ComplexMatrix {
        let sp = spectral_projection(&p.full(), &Selector::Indices((0..p.n0()).collect())).unwrap();
        angular_from_projection(&sp.projection, p.n0()).unwrap()
    }

    #[test]
    fn build_angular_zero() {
        let ad = build_angular(&ComplexMatrix::zeros(2, 3)).unwrap();
        let id = ComplexMatrix::identity(5);
        assert_eq!(ad.y, ComplexMatrix::zeros(5, 5));
        assert_eq!(ad.t, id);
        assert_close(&ad.unitary, &id, 1e-15);
        assert_close(&ad.abs_t, &id, 1e-15);
    }

    #[test]
    fn build_angular_golden() {
        let ad = build_angular(&scalar(GOLDEN_X)).unwrap();
        // T = [[1, -x], [x, 1]]
        assert_eq!(ad.t, ComplexMatrix::from_real_rows(&[[1.0, -GOLDEN_X], [GOLDEN_X, 1.0]]));
        let r = (1.0 + GOLDEN_X * GOLDEN_X).sqrt();
        assert!((r - 1.1755705).abs() < 1e-7);
        assert_close(&ad.abs_t, &ComplexMatrix::identity(2).scale_real(r), 1e-14);
    }

    #[test]
    fn build_angular_imaginary() {
        let ad = build_angular(&ComplexMatrix::from_fn(1, 1, |_, _| c(0.0, 1.0))).unwrap();
        let expected = ComplexMatrix::from_fn(2, 2, |i, j| if i == j { c(0.0, 0.0) } else { c(0.0, 1.0) });
        assert_eq!(ad.y, expected);
        assert_eq!(ad.y.adjoint(), -&ad.y);
    }

    #[test]
    fn uncoupled_forms_are_trivial() {
        let p = uncoupled();
        let ad = build_angular(&ComplexMatrix::zeros(2, 2)).unwrap();
        let f = first_diagonalization(&p, &ad).unwrap();
        assert_eq!((&f.first, &f.second), (p.a0(), p.a1()));
        assert_eq!(f.residual.raw, 0.0);
        let s = second_diagonalization(&p, &ad).unwrap();
        assert_eq!((&s.first, &s.second), (p.a0(), p.a1()));
        assert_eq!(s.residual.raw, 0.0);
        let u = unitary_diagonalization(&p, &ad).unwrap();
        assert_close(&u.unitary, &ComplexMatrix::identity(4), 1e-15);
        assert_close(&u.b0, p.a0(), 1e-15);
        assert_close(&u.b1, p.a1(), 1e-15);
        let a = similarity_audit(&p, &ad).unwrap();
        assert!(a.gram.raw <= 1e-15 && a.upper_block.raw <= 1e-15 && a.lower_block.raw <= 1e-15);
    }

    #[test]
    fn golden_forms() {
        let p = golden();
        let ad = build_angular(&scalar(GOLDEN_X)).unwrap();
        let f = first_diagonalization(&p, &ad).unwrap();
        assert!((f.first[(0, 0)].re - GOLDEN_X).abs() < 1e-15);
        assert!((f.second[(0, 0)].re - GOLDEN_UPPER).abs() < 1e-15);
        assert!(f.residual.raw <= 1e-12);
        let s = second_diagonalization(&p, &ad).unwrap();
        assert_close(&s.first, &f.first, 1e-15);
        assert_close(&s.second, &f.second, 1e-15);
        assert!(s.residual.raw <= 1e-12);
        let u = unitary_diagonalization(&p, &ad).unwrap();
        assert!((u.b0[(0, 0)].re - GOLDEN_X).abs() < 1e-14);
        assert!((u.b1[(0, 0)].re - GOLDEN_UPPER).abs() < 1e-14);
        let r = (1.0 + GOLDEN_X * GOLDEN_X).sqrt();
        assert_close(&u.unitary, &ad.t.scale_real(1.0 / r), 1e-14);
        let a = similarity_audit(&p, &ad).unwrap();
        assert!(a.gram.raw <= 1e-12 && a.upper_block.raw <= 1e-12 && a.lower_block.raw <= 1e-12);
    }

    #[test]
    fn golden_non_solution_leaks() {
        let p = golden();
        let ad = build_angular(&scalar(0.0)).unwrap();
        let f = first_diagonalization(&p, &ad).unwrap();
        assert!((f.residual.raw - 1.0).abs() < 1e-14);
        assert!(f.off_diagonal > 0.5);
    }

    #[test]
    fn regularity_examples() {
        let p = golden();
        let ad = build_angular(&scalar(GOLDEN_X)).unwrap();
        let r = regularity_check(&p, &ad, c(0.0, 1.0)).unwrap();
        // min over eigenvalues μ of |μ − i| = √(1 + μ²)
        let expected = (1.0 + GOLDEN_X * GOLDEN_X).sqrt();
        assert!((r.full - expected).abs() < 1e-14);
        assert!(r.first_form > 0.0 && r.second_form > 0.0);
        let r = regularity_check(&p, &ad, c(GOLDEN_X, 0.0)).unwrap();
        assert!(r.full < 1e-14);

        let q = uncoupled();
        let ad = build_angular(&ComplexMatrix::zeros(2, 2)).unwrap();
        let r = regularity_check(&q, &ad, c(-10.0, 0.0)).unwrap();
        // dist(−10, spec A) = 9 from the eigenvalue −1
        assert!((r.full - 9.0).abs() < 1e-13);
        assert!((r.first_form - 9.0).abs() < 1e-13);
    }

    #[test]
    fn spectrum_distance_matches_permutations() {
        let a = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)];
        let b = [c(0.0, 3.0), c(1.0, 1e-12), c(-2.0, 0.0)];
        assert!(spectrum_distance(&a, &b) < 2e-12);
        assert_eq!(spectrum_distance(&a, &b[..2]), f64::INFINITY);
    }

    #[test]
    fn random_two_plus_two_second_form() {
        let p = subordinated(2, 2, 0.7, 11);
        let x = spectral_x(&p);
        let ad = build_angular(&x).unwrap();
        let s = second_diagonalization(&p, &ad).unwrap();
        assert!(s.residual.normalized <= 1e-10);
        // Brute force: multiply out T* B (T*)⁻¹ with an independent inverse.
        let ts = &ComplexMatrix::identity(4) - &skew_operator(&x);
        let brute = &(&ts * &p.full()) * &inverse(&ts).unwrap();
        assert!(brute.off_diagonal_block_norm(2) <= 1e-10);
        assert_close(&brute.submatrix(0, 0, 2, 2), &s.first, 1e-10);
    }

    #[test]
    fn random_three_plus_three_similarities() {
        let p = subordinated(3, 3, 1.3, 29);
        let ad = build_angular(&spectral_x(&p)).unwrap();
        let a = similarity_audit(&p, &ad).unwrap();
        assert!(a.passes(1e-9), "{a:?}");
    }

    #[test]
    fn non_hermitian_graph_solution_is_not_reducing() {
        let p = BlockProblem::assemble(
            ComplexMatrix::from_real_rows(&[[-2.0, 1.0], [0.0, -1.5]]),
            ComplexMatrix::from_real_rows(&[[2.0, 0.0], [3.0, 1.5]]),
            ComplexMatrix::from_real_rows(&[[0.3, 0.1], [0.0, 0.2]]),
            false,
        )
        .unwrap();
        let s = crate::riccati::newton_solve(&p, &Default::default()).unwrap();
        let d = diagonalize(&p, &s.x, 1e-9).unwrap();
        assert!(d.riccati.split.graph.passes(1e-9));
        // the complement equation is independent once A0, A1 are not Hermitian
        assert!(!d.riccati.split.complement.passes(1e-9));
        assert!(!d.passes());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn angular_invariants(n0 in 1usize..5, n1 in 1usize..5, seed in any::<u64>()) {
            let x = random_matrix(n1, n0, seed).scale_real(2.0);
            let d = build_angular(&x).unwrap().defects();
            prop_assert_eq!(d.skew, 0.0);
            prop_assert!(d.sigma_min_t >= 1.0 - 1e-12);
            prop_assert!(d.signature_coupling <= 1e-13);
            prop_assert!(d.gram_block_diagonal <= 1e-12 * (1.0 + op_norm(&x)).powi(2));
            prop_assert!(d.normality <= 1e-12 * (1.0 + op_norm(&x)).powi(2));
            prop_assert!(d.unitarity <= 1e-11);
        }

        #[test]
        fn solutions_diagonalize(n0 in 1usize..5, n1 in 1usize..5, seed in any::<u64>(), coupling in 0.0f64..3.0) {
            let p = subordinated(n0, n1, coupling, seed);
            let d = diagonalize(&p, &spectral_x(&p), 1e-9).unwrap();
            prop_assert!(d.passes(), "{:?}", d.residuals());
            prop_assert!(d.spectrum_deviation <= 1e-9);
            prop_assert!(d.unitary_blocks_asymmetry <= 1e-11);
        }

        #[test]
        fn theta_invariance(n0 in 1usize..4, n1 in 1usize..4, seed in any::<u64>(), k in 0usize..5) {
            let thetas = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0),
                          c(0.5, 3f64.sqrt() / 2.0)];
            let p = subordinated(n0, n1, 1.0, seed);
            let x = spectral_x(&p);
            let t = ThetaRotation::new(thetas[k]).unwrap();
            let q = p.conjugate_theta(&t);
            let xq = x.scale(t.theta());
            let base = diagonalize(&p, &x, 1e-9).unwrap();
            let rotated = diagonalize(&q, &xq, 1e-9).unwrap();
            prop_assert!(rotated.passes());
            prop_assert!((&base.first.first - &rotated.first.first).max_abs() <= 1e-10);
            prop_assert!((&base.first.second - &rotated.first.second).max_abs() <= 1e-10);
            prop_assert!((&base.second.first - &rotated.second.first).max_abs() <= 1e-10);
            prop_assert!((&base.second.second - &rotated.second.second).max_abs() <= 1e-10);
        }
    }
}
