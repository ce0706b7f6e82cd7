use serde::Serialize;

/// Numeric thresholds shared by induction, irreducibility tests and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Gram eigenvalues below `null_tol × largest` are treated as zero.
    pub null_tol: f64,
    /// Singular values below `rank_tol × largest` count toward a null space.
    pub rank_tol: f64,
    /// Bound on identity residuals (transfer, stages).
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { null_tol: 1e-9, rank_tol: 1e-8, residual_tol: 1e-10 }
    }
}
