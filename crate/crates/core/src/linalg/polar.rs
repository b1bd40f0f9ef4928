use super::{hermitian_eig, singular_extremes, sqrt, ComplexMatrix};
use crate::error::{Error, Result};

const SINGULAR_TOL: f64 = 1e-12;

/// `M = U·P` with `U` unitary and `P = (M*M)^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarDecomposition {
    pub unitary: ComplexMatrix,
    pub positive: ComplexMatrix,
}

/// Polar decomposition of a square invertible matrix. `P` and `P⁻¹` come
/// from one eigendecomposition of `M*M`; `U = M·P⁻¹`.
pub fn polar_decompose(m: &ComplexMatrix) -> Result<PolarDecomposition> {
    m.require_square()?;
    let (sigma_max, sigma_min) = singular_extremes(m);
    if sigma_min <= SINGULAR_TOL * sigma_max || sigma_max == 0.0 {
        return Err(Error::Singular { sigma_min });
    }
    let gram = (&m.adjoint() * m).hermitian_part();
    let eig = hermitian_eig(&gram)?;
    let positive = eig.apply(|l| sqrt(l.max(0.0)));
    let positive_inv = eig.apply(|l| 1.0 / sqrt(l.max(0.0)));
    Ok(PolarDecomposition {
        unitary: m * &positive_inv,
        positive,
    })
}
