//! Machine-readable reports. Key order follows field order.

use blockdiag_core::bounds::{
    DavisKahanReport, EnclosureReport, RayProbe, RelativeBoundPair, ResolventCheck, SweepRow,
};
use blockdiag_core::diagonalize::DiagonalizationResult;
use blockdiag_core::linalg::{hermitian_eig, op_norm};
use blockdiag_core::subspace::Selector;
use blockdiag_core::{BlockProblem, ComplexMatrix};
use serde::Serialize;

pub const REPORT_SCHEMA: &str = "blockdiag-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Spectra of `D0 ⊎ D1` and `B` must agree to this.
pub const SPECTRUM_TOL: f64 = 1e-9;
/// `B0`, `B1` must be Hermitian to this in Hermitian mode.
pub const UNITARY_BLOCK_TOL: f64 = 1e-11;

/// Rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemDigest {
    pub n0: usize,
    pub n1: usize,
    pub hermitian: bool,
    pub norm_a0: f64,
    pub norm_a1: f64,
    pub norm_w: f64,
    pub norm_b: f64,
    /// `inf spec(A1) − sup spec(A0)` in Hermitian mode; negative when the
    /// block spectra overlap.
    pub block_gap: Option<f64>,
}

impl ProblemDigest {
    pub fn new(p: &BlockProblem) -> Self {
        let block_gap = if p.hermitian_mode() {
            match (hermitian_eig(p.a0()), hermitian_eig(p.a1())) {
                (Ok(e0), Ok(e1)) => Some(e1.eigenvalues[0] - e0.eigenvalues[e0.eigenvalues.len() - 1]),
                _ => None,
            }
        } else {
            None
        };
        ProblemDigest {
            n0: p.n0(),
            n1: p.n1(),
            hermitian: p.hermitian_mode(),
            norm_a0: op_norm(p.a0()),
            norm_a1: op_norm(p.a1()),
            norm_w: op_norm(p.w()),
            norm_b: p.norm_full(),
            block_gap,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SplitJson {
    Threshold { value: f64 },
    Indices { values: Vec<usize> },
}

impl From<&Selector> for SplitJson {
    fn from(s: &Selector) -> Self {
        match s {
            Selector::Threshold(value) => SplitJson::Threshold { value: *value },
            Selector::Indices(values) => SplitJson::Indices { values: values.clone() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum XSource {
    Spectral,
    Newton,
    File,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualEntry {
    pub name: &'static str,
    pub raw: f64,
    pub normalized: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdicts {
    pub reducing: bool,
    pub strong_solution: bool,
    pub diagonalizations: bool,
    pub all_residuals: bool,
    pub spectrum_deviation: f64,
    pub spectrum_preserved: bool,
    pub unitary_blocks_asymmetry: f64,
    /// Only meaningful in Hermitian mode.
    pub unitary_blocks_hermitian: Option<bool>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub problem: ProblemDigest,
    pub split: Option<SplitJson>,
    /// Distance between selected and unselected eigenvalues of `B`.
    pub split_gap: Option<f64>,
    pub x_source: XSource,
    pub newton_iterations: Option<usize>,
    pub tol: f64,
    pub x: MatrixJson,
    pub x_norm: f64,
    pub first_blocks: [MatrixJson; 2],
    pub residuals: Vec<ResidualEntry>,
    pub verdicts: Verdicts,
    pub wall_time_seconds: f64,
}

pub struct RunContext {
    pub command: &'static str,
    pub split: Option<Selector>,
    pub split_gap: Option<f64>,
    pub x_source: XSource,
    pub newton_iterations: Option<usize>,
}

impl RunReport {
    /// `pass` is the verdict of `verify`: reducing, strong, and every
    /// residual within `tol`.
    pub fn new(p: &BlockProblem, d: &DiagonalizationResult, ctx: RunContext, wall_time_seconds: f64) -> Self {
        let residuals: Vec<ResidualEntry> = d
            .residuals()
            .iter()
            .map(|r| ResidualEntry {
                name: r.name,
                raw: r.residual.raw,
                normalized: r.residual.normalized,
                pass: r.residual.passes(d.tol),
            })
            .collect();
        let unitary_blocks_hermitian = p
            .hermitian_mode()
            .then_some(d.unitary_blocks_asymmetry <= UNITARY_BLOCK_TOL);
        let verdicts = Verdicts {
            reducing: d.reducing.reducing,
            strong_solution: d.riccati.strong_solution,
            diagonalizations: d.diagonalizations_pass(),
            all_residuals: residuals.iter().all(|r| r.pass),
            spectrum_deviation: d.spectrum_deviation,
            spectrum_preserved: d.spectrum_deviation <= SPECTRUM_TOL,
            unitary_blocks_asymmetry: d.unitary_blocks_asymmetry,
            unitary_blocks_hermitian,
            pass: d.passes(),
        };
        RunReport {
            schema: REPORT_SCHEMA,
            tool_version: TOOL_VERSION,
            command: ctx.command,
            problem: ProblemDigest::new(p),
            split: ctx.split.as_ref().map(SplitJson::from),
            split_gap: ctx.split_gap.filter(|g| g.is_finite()),
            x_source: ctx.x_source,
            newton_iterations: ctx.newton_iterations,
            tol: d.tol,
            x: matrix_json(&d.angular.x),
            x_norm: op_norm(&d.angular.x),
            first_blocks: [matrix_json(&d.first.first), matrix_json(&d.first.second)],
            residuals,
            verdicts,
            wall_time_seconds,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairJson {
    pub a: f64,
    pub b: f64,
    pub certificate: f64,
    pub certified: bool,
}

impl From<&RelativeBoundPair> for PairJson {
    fn from(p: &RelativeBoundPair) -> Self {
        PairJson {
            a: p.a,
            b: p.b,
            certificate: p.certificate,
            certified: p.certified,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResolventJson {
    pub lambda: f64,
    pub resolvent_norm: f64,
    pub bound: f64,
    pub scaled_norm: f64,
    pub pass: bool,
}

impl From<&ResolventCheck> for ResolventJson {
    fn from(c: &ResolventCheck) -> Self {
        ResolventJson {
            lambda: c.lambda,
            resolvent_norm: c.resolvent_norm,
            bound: c.bound,
            scaled_norm: c.scaled_norm,
            pass: c.pass,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShiftJson {
    pub lambda: f64,
    pub sigma_min: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnclosureJson {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub checks: Vec<ShiftJson>,
}

impl From<&EnclosureReport> for EnclosureJson {
    fn from(e: &EnclosureReport) -> Self {
        EnclosureJson {
            a: e.pair.a,
            b: e.pair.b,
            k: e.k,
            checks: e
                .checks
                .iter()
                .map(|c| ShiftJson {
                    lambda: c.lambda,
                    sigma_min: c.sigma_min,
                    pass: c.pass,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DavisKahanJson {
    pub subordinated: bool,
    pub lower_sup: f64,
    pub upper_inf: f64,
    pub proj_diff: Option<f64>,
    pub bound: f64,
    pub x_norm: Option<f64>,
    pub contractive: Option<bool>,
    /// `None` when the spectra are not subordinated.
    pub pass: Option<bool>,
}

impl From<&DavisKahanReport> for DavisKahanJson {
    fn from(r: &DavisKahanReport) -> Self {
        DavisKahanJson {
            subordinated: r.subordinated,
            lower_sup: r.lower_sup,
            upper_inf: r.upper_inf,
            proj_diff: r.proj_diff,
            bound: r.bound,
            x_norm: r.x_norm,
            contractive: r.contractive,
            pass: r.passes(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RayJson {
    pub mu: [f64; 2],
    pub sigma_min: f64,
}

impl From<&RayProbe> for RayJson {
    fn from(r: &RayProbe) -> Self {
        RayJson {
            mu: [r.mu.re, r.mu.im],
            sigma_min: r.sigma_min,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub problem: ProblemDigest,
    pub pairs: Vec<PairJson>,
    /// Certified pair with `b < 1` and the smallest `k = a/(1 − b)`.
    pub selected: Option<PairJson>,
    pub k: Option<f64>,
    /// Hermitian mode only.
    pub resolvent_checks: Option<Vec<ResolventJson>>,
    pub enclosure: Option<EnclosureJson>,
    pub davis_kahan: Option<DavisKahanJson>,
    /// `σmin(A − μ)` along both real half lines; non-Hermitian mode only,
    /// reported without a verdict.
    pub ray_probes: Option<Vec<RayJson>>,
    pub pass: bool,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRowJson {
    pub n: usize,
    pub pairs: Vec<PairJson>,
    pub x_norm: f64,
    pub proj_diff: Option<f64>,
    pub solver_gap: f64,
    pub newton_iterations: usize,
    pub max_residual: f64,
    pub verdict: bool,
}

impl From<&SweepRow> for SweepRowJson {
    fn from(r: &SweepRow) -> Self {
        SweepRowJson {
            n: r.n,
            pairs: r.pairs.iter().map(PairJson::from).collect(),
            x_norm: r.x_norm(),
            proj_diff: r.davis_kahan.proj_diff,
            solver_gap: r.solver_gap,
            newton_iterations: r.newton_iterations,
            max_residual: r.max_residual,
            verdict: r.verdict(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyJson {
    pub kind: &'static str,
    pub p: f64,
    pub q: f64,
    pub coupling: &'static str,
    pub band: Option<usize>,
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub family: FamilyJson,
    pub a_grid: Vec<f64>,
    pub tol: f64,
    pub rows: Vec<SweepRowJson>,
    pub pass: bool,
    pub wall_time_seconds: f64,
}

/// Ten significant digits.
pub fn sig10(v: f64) -> String {
    format!("{v:.9e}")
}
