//! Relative bounds, resolvent estimates, subordinated-spectra checks and
//! growing finite sections of diagonal-power families.

use alloc::vec::Vec;

use crate::block::BlockProblem;
use crate::diagonalize::{diagonalize, DiagonalizationResult};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, hermitian_function, inverse, is_hermitian, op_norm, singular_extremes,
    ComplexMatrix, C64,
};
use crate::riccati::{newton_solve, NewtonOptions};
use crate::subspace::{angular_from_projection, spectral_projection, Selector};

/// Slack on the certificate eigenvalue, relative to `1 + ‖V‖² + a²`.
pub const CERTIFICATE_TOL: f64 = 1e-10;
/// Additional slack relative to `b²‖A‖²`, covering roundoff only.
const ROUNDOFF_TOL: f64 = 1e-13;

/// `‖Vx‖ ≤ a‖x‖ + b‖Ax‖`, certified through `V*V ⪯ a²I + b²A*A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeBoundPair {
    pub a: f64,
    pub b: f64,
    /// Largest eigenvalue of `V*V − a²I − b²A*A`.
    pub certificate: f64,
    pub certified: bool,
}

impl RelativeBoundPair {
    /// `a/(1 − b)`, defined for `b < 1`.
    pub fn enclosure_radius(&self) -> Option<f64> {
        (self.b < 1.0).then(|| self.a / (1.0 - self.b))
    }
}

fn square_pair(a: &ComplexMatrix, v: &ComplexMatrix) -> Result<usize> {
    let n = a.require_square()?;
    if v.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            context: "relative perturbation",
            expected: (n, n),
            found: v.shape(),
        });
    }
    Ok(n)
}

fn largest_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(*hermitian_eig(&m.hermitian_part())?
        .eigenvalues
        .last()
        .expect("non-empty matrix"))
}

/// Checks `V*V ⪯ a²I + b²A*A` for a given pair.
pub fn certify_pair(a_op: &ComplexMatrix, v: &ComplexMatrix, a: f64, b: f64) -> Result<RelativeBoundPair> {
    let n = square_pair(a_op, v)?;
    let vv = &v.adjoint() * v;
    let aa = &a_op.adjoint() * a_op;
    let excess = &(&vv - &ComplexMatrix::identity(n).scale_real(a * a)) - &aa.scale_real(b * b);
    let certificate = largest_eigenvalue(&excess)?;
    let slack = CERTIFICATE_TOL * (1.0 + op_norm(&vv) + a * a) + ROUNDOFF_TOL * b * b * op_norm(&aa);
    Ok(RelativeBoundPair {
        a,
        b,
        certificate,
        certified: certificate <= slack,
    })
}

/// Smallest certified `b` for every `a` in `a_grid`, returned in grid order.
///
/// `b(a)²` is the largest generalized eigenvalue of `V*V − a²I` against
/// `A*A + δI` with `δ = 1e-12(1 + ‖A‖²)`, clamped at zero, then made
/// non-increasing in `a`. For invertible `A` it is then multiplied by
/// `1 + δ/λmin(A*A)`, which removes the part of `V*V` absorbed by `δ`.
/// When `A` is singular and `V` does not vanish on its kernel no finite `b`
/// exists below `a = ‖V|ker A‖`; those pairs come back uncertified.
pub fn relative_bound_fit(
    a_op: &ComplexMatrix,
    v: &ComplexMatrix,
    a_grid: &[f64],
) -> Result<Vec<RelativeBoundPair>> {
    let n = square_pair(a_op, v)?;
    if a_grid.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(Error::InvalidOption("a-grid entries must be finite and non-negative"));
    }
    let vv = &v.adjoint() * v;
    let aa = &a_op.adjoint() * a_op;
    let (v_norm, _) = singular_extremes(v);
    let delta = 1e-12 * (1.0 + op_norm(&aa));
    let aa_min = hermitian_eig(&aa.hermitian_part())?.eigenvalues[0];
    let inflation = if aa_min > 0.0 { 1.0 + delta / aa_min } else { 1.0 };
    let whitening = hermitian_function(
        &aa.shifted(C64::new(delta, 0.0)).hermitian_part(),
        |l| 1.0 / crate::linalg::sqrt(l),
    )?;

    let mut order: Vec<usize> = (0..a_grid.len()).collect();
    order.sort_by(|&i, &j| a_grid[i].total_cmp(&a_grid[j]));
    let mut fitted = alloc::vec![0.0; a_grid.len()];
    let mut running = f64::INFINITY;
    for i in order {
        let a = a_grid[i];
        let b = if a >= v_norm * (1.0 - 1e-12) {
            0.0
        } else {
            let shifted = &vv - &ComplexMatrix::identity(n).scale_real(a * a);
            let g = largest_eigenvalue(&(&(&whitening * &shifted) * &whitening))?;
            crate::linalg::sqrt(g.max(0.0) * inflation)
        };
        running = running.min(b);
        fitted[i] = running;
    }
    a_grid
        .iter()
        .zip(fitted)
        .map(|(&a, b)| certify_pair(a_op, v, a, b))
        .collect()
}

fn require_hermitian(m: &ComplexMatrix) -> Result<usize> {
    let n = m.require_square()?;
    if !is_hermitian(m) {
        return Err(Error::NotHermitian {
            asymmetry: (m - &m.adjoint()).frobenius_norm(),
        });
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventCheck {
    pub lambda: f64,
    /// `‖(A − iλ)⁻¹‖`.
    pub resolvent_norm: f64,
    /// `1/|λ|`.
    pub bound: f64,
    /// `‖A(A − iλ)⁻¹‖`, bounded by one.
    pub scaled_norm: f64,
    pub pass: bool,
}

/// `‖(A − iλ)⁻¹‖ ≤ 1/|λ|` and `‖A(A − iλ)⁻¹‖ ≤ 1` for Hermitian `A`.
pub fn resolvent_estimate_check(a: &ComplexMatrix, lambdas: &[f64]) -> Result<Vec<ResolventCheck>> {
    require_hermitian(a)?;
    if lambdas.contains(&0.0) {
        return Err(Error::ZeroLambda);
    }
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::NonFinite);
    }
    lambdas
        .iter()
        .map(|&lambda| {
            let shifted = a.shifted(C64::new(0.0, -lambda));
            let resolvent_norm = 1.0 / singular_extremes(&shifted).1;
            let scaled_norm = op_norm(&(a * &inverse(&shifted)?));
            let bound = 1.0 / lambda.abs();
            Ok(ResolventCheck {
                lambda,
                resolvent_norm,
                bound,
                scaled_norm,
                pass: resolvent_norm <= bound + 1e-12 && scaled_norm <= 1.0 + 1e-12,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftCheck {
    pub lambda: f64,
    /// `σmin(A + H − iλ)`.
    pub sigma_min: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnclosureReport {
    pub pair: RelativeBoundPair,
    /// `k = a/(1 − b)`.
    pub k: f64,
    pub checks: Vec<ShiftCheck>,
}

impl EnclosureReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Samples `|λ| ∈ (k, 10·max(k, 1)]` at both signs and checks that `iλ` is
/// a regular point of `A + H`.
pub fn spectral_enclosure_check(
    a: &ComplexMatrix,
    h: &ComplexMatrix,
    a_coef: f64,
    b_coef: f64,
    samples: usize,
) -> Result<EnclosureReport> {
    if !(a_coef >= 0.0 && (0.0..1.0).contains(&b_coef)) || !a_coef.is_finite() {
        return Err(Error::BadPair { a: a_coef, b: b_coef });
    }
    require_hermitian(a)?;
    let pair = certify_pair(a, h, a_coef, b_coef)?;
    let k = a_coef / (1.0 - b_coef);
    let upper = 10.0 * k.max(1.0);
    let sum = a + h;
    let floor = 1e-12 * (1.0 + op_norm(&sum));
    let mut checks = Vec::with_capacity(2 * samples);
    for i in 1..=samples {
        let magnitude = k + (upper - k) * i as f64 / samples as f64;
        for lambda in [magnitude, -magnitude] {
            let sigma_min = singular_extremes(&sum.shifted(C64::new(0.0, -lambda))).1;
            checks.push(ShiftCheck {
                lambda,
                sigma_min,
                pass: sigma_min > floor,
            });
        }
    }
    Ok(EnclosureReport { pair, k, checks })
}

/// `√2/2`.
pub const SUBORDINATED_BOUND: f64 = core::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone)]
pub struct DavisKahanReport {
    /// `sup spec(A0) < inf spec(A1)`.
    pub subordinated: bool,
    pub lower_sup: f64,
    pub upper_inf: f64,
    /// `‖E_A(δ) − E_B(δ)‖` for `δ = (−∞, sup spec(A0)]`; `None` when not
    /// subordinated.
    pub proj_diff: Option<f64>,
    pub bound: f64,
    pub x: Option<ComplexMatrix>,
    pub x_norm: Option<f64>,
    pub contractive: Option<bool>,
}

impl DavisKahanReport {
    pub fn applicable(&self) -> bool {
        self.subordinated
    }

    /// `None` when not applicable.
    pub fn passes(&self) -> Option<bool> {
        Some(self.proj_diff? <= self.bound + 1e-9 && self.x_norm? <= 1.0 + 1e-9)
    }
}

pub fn davis_kahan_check(p: &BlockProblem) -> Result<DavisKahanReport> {
    if !p.hermitian_mode() {
        return Err(Error::NotHermitianMode);
    }
    let lower_sup = *hermitian_eig(p.a0())?.eigenvalues.last().expect("non-empty block");
    let upper_inf = hermitian_eig(p.a1())?.eigenvalues[0];
    let subordinated = lower_sup < upper_inf;
    let mut report = DavisKahanReport {
        subordinated,
        lower_sup,
        upper_inf,
        proj_diff: None,
        bound: SUBORDINATED_BOUND,
        x: None,
        x_norm: None,
        contractive: None,
    };
    if !subordinated {
        return Ok(report);
    }
    // Both spectra below the gap have exactly n0 points (counting multiplicity),
    // so the lowest n0 eigenvalues are the closed half-line selection.
    let lowest = Selector::Indices((0..p.n0()).collect());
    let unperturbed = spectral_projection(&p.diagonal(), &lowest)?;
    let perturbed = spectral_projection(&p.full(), &lowest)?;
    let x = angular_from_projection(&perturbed.projection, p.n0())?;
    let x_norm = op_norm(&x);
    report.proj_diff = Some(op_norm(&(&unperturbed.projection - &perturbed.projection)));
    report.x_norm = Some(x_norm);
    report.contractive = Some(x_norm <= 1.0 + 1e-9);
    report.x = Some(x);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayProbe {
    pub mu: C64,
    /// `σmin(A − μ)`.
    pub sigma_min: f64,
}

/// `σmin(A − μ)` for `μ = origin + r·direction`, `r ∈ radii`. Reported only;
/// growth along the ray is the finite-dimensional trace of a half line in
/// the resolvent set.
pub fn ray_probe(a: &ComplexMatrix, origin: C64, direction: C64, radii: &[f64]) -> Result<Vec<RayProbe>> {
    a.require_square()?;
    if direction.norm() == 0.0 {
        return Err(Error::InvalidOption("ray direction must be nonzero"));
    }
    let unit = direction / direction.norm();
    Ok(radii
        .iter()
        .map(|&r| {
            let mu = origin + unit * r;
            RayProbe {
                mu,
                sigma_min: singular_extremes(&a.shifted(-mu)).1,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyCoupling {
    /// `W = scale·diag(j^q)`.
    Identity,
    /// `W_ij = scale·j^q/(1 + |i − j|)` for `|i − j| ≤ band`.
    Banded { band: usize },
}

/// `A0 = diag(−j^p)`, `A1 = diag(j^p)`, `j = 1..n`, coupled by a
/// column-weighted `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    pub p: f64,
    pub q: f64,
    pub coupling: FamilyCoupling,
    pub scale: f64,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.q.is_finite() && self.scale.is_finite()) {
            return Err(Error::BadFamily("p, q and scale must be finite"));
        }
        Ok(())
    }

    pub fn instance(&self, n: usize) -> Result<BlockProblem> {
        self.validate()?;
        if n == 0 {
            return Err(Error::BadFamily("section size must be positive"));
        }
        let growth: Vec<f64> = (1..=n).map(|j| num_traits::Float::powf(j as f64, self.p)).collect();
        let weight = |j: usize| self.scale * num_traits::Float::powf((j + 1) as f64, self.q);
        let w = match self.coupling {
            FamilyCoupling::Identity => {
                ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::new(weight(j), 0.0) } else { C64::new(0.0, 0.0) })
            }
            FamilyCoupling::Banded { band } => ComplexMatrix::from_fn(n, n, |i, j| {
                let d = i.abs_diff(j);
                if d <= band {
                    C64::new(weight(j) / (1 + d) as f64, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        };
        let negated: Vec<f64> = growth.iter().map(|g| -g).collect();
        BlockProblem::assemble(
            ComplexMatrix::from_real_diagonal(&negated),
            ComplexMatrix::from_real_diagonal(&growth),
            w,
            true,
        )
    }
}

/// One finite section of a family.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub pairs: Vec<RelativeBoundPair>,
    pub davis_kahan: DavisKahanReport,
    pub newton_x: ComplexMatrix,
    pub newton_iterations: usize,
    /// `‖X_spectral − X_newton‖`.
    pub solver_gap: f64,
    pub diagonalization: DiagonalizationResult,
    pub max_residual: f64,
}

/// Agreement required between the two solvers.
pub const SOLVER_AGREEMENT: f64 = 1e-8;

impl SweepRow {
    pub fn x_norm(&self) -> f64 {
        op_norm(&self.diagonalization.angular.x)
    }

    pub fn verdict(&self) -> bool {
        self.diagonalization.passes()
            && self.solver_gap <= SOLVER_AGREEMENT
            && self.davis_kahan.passes().unwrap_or(true)
    }
}

pub fn sweep_row(family: &FamilySpec, n: usize, a_grid: &[f64], tol: f64) -> Result<SweepRow> {
    let p = family.instance(n)?;
    let pairs = relative_bound_fit(&p.diagonal(), &p.coupling(), a_grid)?;
    let davis_kahan = davis_kahan_check(&p)?;
    let spectral_x = match &davis_kahan.x {
        Some(x) => x.clone(),
        None => {
            let sp = spectral_projection(&p.full(), &Selector::Indices((0..p.n0()).collect()))?;
            angular_from_projection(&sp.projection, p.n0())?
        }
    };
    let newton = newton_solve(&p, &NewtonOptions::default())?;
    let solver_gap = op_norm(&(&spectral_x - &newton.x));
    let diagonalization = diagonalize(&p, &spectral_x, tol)?;
    let max_residual = diagonalization
        .residuals()
        .iter()
        .fold(0.0f64, |m, r| m.max(r.residual.normalized));
    Ok(SweepRow {
        n,
        pairs,
        davis_kahan,
        newton_x: newton.x,
        newton_iterations: newton.iterations,
        solver_gap,
        diagonalization,
        max_residual,
    })
}

/// Rows in the order of `sizes`.
pub fn truncation_sweep(family: &FamilySpec, sizes: &[usize], a_grid: &[f64], tol: f64) -> Result<Vec<SweepRow>> {
    sizes.iter().map(|&n| sweep_row(family, n, a_grid, tol)).collect()
}
