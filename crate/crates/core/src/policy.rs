//! Numeric tolerances shared across the crate.

/// Tolerance policy for every numeric check in the pipeline.
///
/// All operations that verify a structural property (symplecticity,
/// Hermiticity, derived equalities, region membership) take a policy
/// reference instead of hard-coding thresholds, so a single record controls
/// the whole run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Constructor-level checks: symplectic residual of a canonical map,
    /// exact-symmetry enforcement.
    pub construction_tol: f64,
    /// Derived-equality checks: closed form vs transform chain, oracle
    /// comparisons.
    pub equality_tol: f64,
    /// Region classification: eigen-residual verdicts, sign classification
    /// of eigenvalues, reality flags.
    pub region_tol: f64,
    /// |μτ| below which sinh(θ)/θ and friends switch to their Taylor
    /// series to avoid the 0/0 at θ = 0.
    pub series_threshold: f64,
    /// Denominator magnitude treated as a pole.
    pub pole_tol: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            construction_tol: 1e-12,
            equality_tol: 1e-10,
            region_tol: 1e-9,
            series_threshold: 1e-8,
            pole_tol: 1e-9,
        }
    }
}
