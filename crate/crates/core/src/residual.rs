//! Raw and scale-normalized residual norms.

/// Normalization used for every verdict: `(1 + ‖B‖)(1 + ‖X‖)²`.
pub fn residual_scale(norm_b: f64, norm_x: f64) -> f64 {
    (1.0 + norm_b) * (1.0 + norm_x) * (1.0 + norm_x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub raw: f64,
    pub normalized: f64,
}

impl Residual {
    pub fn new(raw: f64, scale: f64) -> Self {
        Residual {
            raw,
            normalized: raw / scale,
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.normalized <= tol
    }
}

/// A residual tagged with the identity it measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NamedResidual {
    pub name: &'static str,
    pub residual: Residual,
}
