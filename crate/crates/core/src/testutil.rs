//! Deterministic random matrices for unit tests.

use alloc::vec::Vec;

use crate::linalg::{ComplexMatrix, C64};

pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    pub fn complex(&mut self) -> C64 {
        C64::new(self.uniform(), self.uniform())
    }
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = SplitMix(seed);
    ComplexMatrix::from_fn(rows, cols, |_, _| rng.complex())
}

pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    random_matrix(n, n, seed).hermitian_part()
}

/// Random unitary from Gram–Schmidt on a random matrix.
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let m = random_matrix(n, n, seed);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| m.column(j)).collect();
    for j in 0..n {
        let (done, rest) = cols.split_at_mut(j);
        let col = &mut rest[0];
        for q in done.iter() {
            let proj: C64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            col.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Hermitian matrix with the given spectrum in a random eigenbasis.
pub fn hermitian_with_spectrum(spectrum: &[f64], seed: u64) -> ComplexMatrix {
    let u = random_unitary(spectrum.len(), seed);
    let d = ComplexMatrix::from_real_diagonal(spectrum);
    (&(&u * &d) * &u.adjoint()).hermitian_part()
}

pub fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
    assert_eq!(a.shape(), b.shape());
    let diff = (a - b).max_abs();
    assert!(diff <= tol, "matrices differ by {diff:e} > {tol:e}\n{a:?}\n{b:?}");
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
