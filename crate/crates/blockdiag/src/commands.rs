//! The subcommands, independent of argument parsing and output files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use blockdiag_core::bounds::{
    davis_kahan_check, ray_probe, relative_bound_fit, resolvent_estimate_check,
    spectral_enclosure_check, sweep_row, FamilyCoupling, FamilySpec, RelativeBoundPair,
};
use blockdiag_core::diagonalize::diagonalize;
use blockdiag_core::riccati::{newton_solve, NewtonOptions};
use blockdiag_core::subspace::{angular_from_projection, spectral_projection, Selector};
use blockdiag_core::C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::format::{parse_angular, parse_family, parse_problem, serialize_problem, FormatError, ProblemFile};
use crate::generate::{random_batch, GenerateError, RandomParams};
use crate::report::{
    sig10, BoundsReport, DavisKahanJson, EnclosureJson, FamilyJson, PairJson, RayJson, ResolventJson,
    RunContext, RunReport, SweepReport, SweepRowJson, XSource, REPORT_SCHEMA, TOOL_VERSION,
};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    VerificationFailed = 1,
    InputError = 2,
    SplitError = 3,
    NoConvergence = 4,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Ok
        } else {
            Status::VerificationFailed
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] blockdiag_core::Error),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn core_status(e: &blockdiag_core::Error) -> Status {
    use blockdiag_core::Error as E;
    match e {
        E::GapViolation { .. } | E::NotAGraph { .. } | E::RankMismatch { .. } => Status::SplitError,
        E::NoConvergence { .. } | E::NewtonNoConvergence { .. } | E::SpectraOverlap { .. } | E::Singular { .. } => {
            Status::NoConvergence
        }
        _ => Status::InputError,
    }
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Core(e) | CliError::Format(FormatError::Core(e)) | CliError::Generate(GenerateError::Core(e)) => {
                core_status(e)
            }
            _ => Status::InputError,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Text for the terminal, and the JSON document for `--out`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub text: String,
    pub json: String,
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn check_tol(tol: f64) -> CliResult<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("tolerance must be positive and finite, got {tol}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Spectral,
    Newton,
}

fn run_table(report: &RunReport) -> String {
    let mut out = format!(
        "{} n0={} n1={} hermitian={} x_source={:?} tol={}\n",
        report.command, report.problem.n0, report.problem.n1, report.problem.hermitian, report.x_source, report.tol
    )
    .to_lowercase();
    out += &format!("{:<26}{:>18}\n", "x_norm", sig10(report.x_norm));
    if let Some(it) = report.newton_iterations {
        out += &format!("{:<26}{:>18}\n", "newton_iterations", it);
    }
    out += &format!("{:<26}{:>18}{:>18}  pass\n", "residual", "raw", "normalized");
    for r in &report.residuals {
        out += &format!("{:<26}{:>18}{:>18}  {}\n", r.name, sig10(r.raw), sig10(r.normalized), r.pass);
    }
    let v = &report.verdicts;
    out += &format!("{:<26}{:>18}  {}\n", "spectrum_deviation", sig10(v.spectrum_deviation), v.spectrum_preserved);
    out += &format!("reducing={} strong_solution={} diagonalizations={}\n", v.reducing, v.strong_solution, v.diagonalizations);
    out
}

fn finish_run(report: RunReport, pass: bool) -> CliResult<Outcome> {
    let mut text = run_table(&report);
    text += if pass { "verdict: PASS\n" } else { "verdict: FAIL\n" };
    Ok(Outcome {
        status: Status::from_pass(pass),
        text,
        json: serde_json::to_string_pretty(&report)? + "\n",
    })
}

/// `split` overrides `sigma0` from the file.
pub fn solve(problem_path: &Path, method: Method, split: Option<Selector>, tol: f64) -> CliResult<Outcome> {
    check_tol(tol)?;
    let start = Instant::now();
    let file = parse_problem(&read_file(problem_path)?)?;
    let p = &file.problem;
    let (x, ctx) = match method {
        Method::Spectral => {
            let selector = split.or(file.sigma0).ok_or_else(|| {
                CliError::Usage("the spectral method needs a split: pass --threshold or --indices, or set sigma0".into())
            })?;
            if !p.hermitian_mode() {
                return Err(CliError::Usage("the spectral method needs a Hermitian problem".into()));
            }
            let sp = spectral_projection(&p.full(), &selector)?;
            let x = angular_from_projection(&sp.projection, p.n0())?;
            let ctx = RunContext {
                command: "solve",
                split: Some(selector),
                split_gap: Some(sp.gap),
                x_source: XSource::Spectral,
                newton_iterations: None,
            };
            (x, ctx)
        }
        Method::Newton => {
            let sol = newton_solve(p, &NewtonOptions::default())?;
            let ctx = RunContext {
                command: "solve",
                split: None,
                split_gap: None,
                x_source: XSource::Newton,
                newton_iterations: Some(sol.iterations),
            };
            (sol.x, ctx)
        }
    };
    let d = diagonalize(p, &x, tol)?;
    let pass = d.riccati.strong_solution && d.diagonalizations_pass();
    let report = RunReport::new(p, &d, ctx, start.elapsed().as_secs_f64());
    finish_run(report, pass)
}

pub fn verify(problem_path: &Path, x_path: &Path, tol: f64) -> CliResult<Outcome> {
    check_tol(tol)?;
    let start = Instant::now();
    let file = parse_problem(&read_file(problem_path)?)?;
    let x = parse_angular(&read_file(x_path)?)?;
    let d = diagonalize(&file.problem, &x, tol)?;
    let ctx = RunContext {
        command: "verify",
        split: None,
        split_gap: None,
        x_source: XSource::File,
        newton_iterations: None,
    };
    let report = RunReport::new(&file.problem, &d, ctx, start.elapsed().as_secs_f64());
    let pass = report.verdicts.pass;
    finish_run(report, pass)
}

/// Serialized problem files, one per instance.
pub fn random(params: &RandomParams, count: usize, jobs: usize) -> CliResult<Vec<String>> {
    if count == 0 {
        return Err(CliError::Usage("count must be positive".into()));
    }
    Ok(random_batch(params, count, jobs)?
        .into_iter()
        .map(|p| serialize_problem(&ProblemFile::from(p)))
        .collect())
}

fn selected_pair(pairs: &[RelativeBoundPair]) -> Option<(RelativeBoundPair, f64)> {
    pairs
        .iter()
        .filter(|p| p.certified)
        .filter_map(|p| Some((*p, p.enclosure_radius()?)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
}

/// `±10^t` for `t` evenly spaced in `[−1, 2]`.
pub fn lambda_grid(samples: usize) -> Vec<f64> {
    let exponents: Vec<f64> = match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        s => (0..s).map(|i| -1.0 + 3.0 * i as f64 / (s - 1) as f64).collect(),
    };
    exponents
        .into_iter()
        .flat_map(|t| {
            let l = 10f64.powf(t);
            [l, -l]
        })
        .collect()
}

pub fn bounds(problem_path: &Path, a_grid: &[f64], lambda_samples: usize) -> CliResult<Outcome> {
    let start = Instant::now();
    let file = parse_problem(&read_file(problem_path)?)?;
    let p = &file.problem;
    let a = p.diagonal();
    let v = p.coupling();
    let pairs = relative_bound_fit(&a, &v, a_grid)?;
    let selected = selected_pair(&pairs);

    let (resolvent_checks, enclosure, davis_kahan, ray_probes) = if p.hermitian_mode() {
        let checks: Vec<ResolventJson> = resolvent_estimate_check(&a, &lambda_grid(lambda_samples))?
            .iter()
            .map(ResolventJson::from)
            .collect();
        let enclosure = match selected {
            Some((pair, _)) => Some(EnclosureJson::from(&spectral_enclosure_check(
                &a,
                &v,
                pair.a,
                pair.b,
                lambda_samples,
            )?)),
            None => None,
        };
        let dk = DavisKahanJson::from(&davis_kahan_check(p)?);
        (Some(checks), enclosure, Some(dk), None)
    } else {
        let radii: Vec<f64> = lambda_grid(lambda_samples).into_iter().filter(|r| *r > 0.0).collect();
        let mut probes = ray_probe(&a, C64::new(0.0, 0.0), C64::new(-1.0, 0.0), &radii)?;
        probes.extend(ray_probe(&a, C64::new(0.0, 0.0), C64::new(1.0, 0.0), &radii)?);
        (None, None, None, Some(probes.iter().map(RayJson::from).collect::<Vec<_>>()))
    };

    let pass = resolvent_checks.iter().flatten().all(|c| c.pass)
        && enclosure.iter().flat_map(|e| &e.checks).all(|c| c.pass)
        && davis_kahan.as_ref().and_then(|d| d.pass) != Some(false);
    let report = BoundsReport {
        schema: REPORT_SCHEMA,
        tool_version: TOOL_VERSION,
        command: "bounds",
        problem: crate::report::ProblemDigest::new(p),
        pairs: pairs.iter().map(PairJson::from).collect(),
        selected: selected.map(|(pair, _)| PairJson::from(&pair)),
        k: selected.map(|(_, k)| k),
        resolvent_checks,
        enclosure,
        davis_kahan,
        ray_probes,
        pass,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };

    let mut text = format!("bounds n0={} n1={} hermitian={}\n", p.n0(), p.n1(), p.hermitian_mode());
    text += &format!("{:>18}{:>18}{:>18}  certified\n", "a", "b", "certificate");
    for pair in &report.pairs {
        text += &format!("{:>18}{:>18}{:>18}  {}\n", sig10(pair.a), sig10(pair.b), sig10(pair.certificate), pair.certified);
    }
    if let Some(k) = report.k {
        text += &format!("k = {}\n", sig10(k));
    }
    if let Some(checks) = &report.resolvent_checks {
        let fails = checks.iter().filter(|c| !c.pass).count();
        text += &format!("resolvent checks: {} of {} pass\n", checks.len() - fails, checks.len());
    }
    if let Some(e) = &report.enclosure {
        let min = e.checks.iter().map(|c| c.sigma_min).fold(f64::INFINITY, f64::min);
        text += &format!("enclosure: {} shifts beyond k, min sigma_min = {}\n", e.checks.len(), sig10(min));
    }
    if let Some(dk) = &report.davis_kahan {
        match (dk.proj_diff, dk.x_norm) {
            (Some(pd), Some(xn)) => {
                text += &format!("subordinated: proj_diff = {} (bound {}), x_norm = {}\n", sig10(pd), sig10(dk.bound), sig10(xn))
            }
            _ => text += "not subordinated: projection bound not applicable\n",
        }
    }
    if let Some(probes) = &report.ray_probes {
        for r in probes {
            text += &format!("ray mu = {:>18}  sigma_min = {}\n", sig10(r.mu[0]), sig10(r.sigma_min));
        }
    }
    text += if pass { "verdict: PASS\n" } else { "verdict: FAIL\n" };
    Ok(Outcome {
        status: Status::from_pass(pass),
        text,
        json: serde_json::to_string_pretty(&report)? + "\n",
    })
}

fn family_json(f: &FamilySpec) -> FamilyJson {
    let (coupling, band) = match f.coupling {
        FamilyCoupling::Identity => ("identity", None),
        FamilyCoupling::Banded { band } => ("banded", Some(band)),
    };
    FamilyJson {
        kind: "diag-power",
        p: f.p,
        q: f.q,
        coupling,
        band,
        scale: f.scale,
    }
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Rows follow the order of `sizes` for any `jobs`.
pub fn sweep_family(family: &FamilySpec, sizes: &[usize], a_grid: &[f64], tol: f64, jobs: usize) -> CliResult<Outcome> {
    check_tol(tol)?;
    if sizes.is_empty() {
        return Err(CliError::Usage("at least one size is required".into()));
    }
    let start = Instant::now();
    let rows = pool(jobs)?.install(|| {
        sizes
            .par_iter()
            .map(|&n| sweep_row(family, n, a_grid, tol))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let rows: Vec<SweepRowJson> = rows.iter().map(SweepRowJson::from).collect();
    let pass = rows.iter().all(|r| r.verdict);
    let report = SweepReport {
        schema: REPORT_SCHEMA,
        tool_version: TOOL_VERSION,
        command: "sweep",
        family: family_json(family),
        a_grid: a_grid.to_vec(),
        tol,
        rows,
        pass,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };

    let mut text = format!("{:>6}{:>18}{:>18}{:>18}{:>18}", "n", "x_norm", "proj_diff", "solver_gap", "max_residual");
    for a in a_grid {
        text += &format!("{:>18}", format!("b({a})"));
    }
    text += "  verdict\n";
    for r in &report.rows {
        let pd = r.proj_diff.map_or_else(|| "-".to_owned(), sig10);
        text += &format!("{:>6}{:>18}{:>18}{:>18}{:>18}", r.n, sig10(r.x_norm), pd, sig10(r.solver_gap), sig10(r.max_residual));
        for pair in &r.pairs {
            text += &format!("{:>18}", sig10(pair.b));
        }
        text += &format!("  {}\n", if r.verdict { "pass" } else { "fail" });
    }
    Ok(Outcome {
        status: Status::from_pass(pass),
        text,
        json: serde_json::to_string_pretty(&report)? + "\n",
    })
}

pub fn sweep(family_path: &Path, sizes: &[usize], a_grid: &[f64], tol: f64, jobs: usize) -> CliResult<Outcome> {
    let family = parse_family(&read_file(family_path)?)?;
    sweep_family(&family, sizes, a_grid, tol, jobs)
}
