//! Seeded random Hermitian block problems with subordinated spectra.

use blockdiag_core::linalg::op_norm;
use blockdiag_core::{BlockProblem, ComplexMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Core(#[from] blockdiag_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomParams {
    pub n0: usize,
    pub n1: usize,
    /// `spec(A0) ⊂ [−2, −gap/2]`, `spec(A1) ⊂ [gap/2, 2]`.
    pub gap: f64,
    /// `‖W‖`.
    pub coupling_scale: f64,
    pub seed: u64,
}

impl RandomParams {
    fn validate(&self) -> Result<(), GenerateError> {
        if self.n0 == 0 || self.n1 == 0 {
            return Err(GenerateError::BadParams("block sizes must be positive".into()));
        }
        if !(self.gap > 0.0 && self.gap < 4.0) {
            return Err(GenerateError::BadParams(format!("gap must lie in (0, 4), got {}", self.gap)));
        }
        if !(self.coupling_scale >= 0.0 && self.coupling_scale.is_finite()) {
            return Err(GenerateError::BadParams(format!(
                "coupling scale must be finite and non-negative, got {}",
                self.coupling_scale
            )));
        }
        Ok(())
    }
}

fn orthogonal(n: usize, rng: &mut ChaCha20Rng) -> ComplexMatrix {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for q in &cols {
                let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= dot * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-6 {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
        if cols.len() == n {
            return ComplexMatrix::from_fn(n, n, |i, j| C64::new(cols[j][i], 0.0));
        }
    }
}

fn conjugated_diagonal(eigenvalues: &[f64], rng: &mut ChaCha20Rng) -> ComplexMatrix {
    let q = orthogonal(eigenvalues.len(), rng);
    (&(&q * &ComplexMatrix::from_real_diagonal(eigenvalues)) * &q.adjoint()).hermitian_part()
}

fn build(params: &RandomParams, rng: &mut ChaCha20Rng) -> Result<BlockProblem, GenerateError> {
    let half = params.gap / 2.0;
    let lower: Vec<f64> = (0..params.n0).map(|_| rng.gen_range(-2.0..=-half)).collect();
    let upper: Vec<f64> = (0..params.n1).map(|_| rng.gen_range(half..=2.0)).collect();
    let a0 = conjugated_diagonal(&lower, rng);
    let a1 = conjugated_diagonal(&upper, rng);
    let raw = ComplexMatrix::from_fn(params.n0, params.n1, |_, _| C64::new(rng.gen_range(-1.0..1.0), 0.0));
    let w = if params.coupling_scale == 0.0 {
        ComplexMatrix::zeros(params.n0, params.n1)
    } else {
        raw.scale_real(params.coupling_scale / op_norm(&raw))
    };
    Ok(BlockProblem::assemble(a0, a1, w, true)?)
}

/// Deterministic in `params`.
pub fn random_problem(params: &RandomParams) -> Result<BlockProblem, GenerateError> {
    params.validate()?;
    build(params, &mut ChaCha20Rng::seed_from_u64(params.seed))
}

/// Instance `i` uses stream `i` of the seeded generator, so the batch does
/// not depend on how the work is scheduled.
pub fn random_batch(params: &RandomParams, count: usize, jobs: usize) -> Result<Vec<BlockProblem>, GenerateError> {
    params.validate()?;
    let one = |i: usize| {
        let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
        rng.set_stream(i as u64);
        build(params, &mut rng)
    };
    if jobs <= 1 {
        return (0..count).map(one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| GenerateError::BadParams(e.to_string()))?;
    pool.install(|| (0..count).into_par_iter().map(one).collect())
}
