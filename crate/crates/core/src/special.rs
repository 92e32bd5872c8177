//! Even-analytic evaluations of the hyperbolic functions of θ = √(μτ).
//!
//! cosh θ and sinh(θ)/θ are even functions of θ and hence single-valued
//! functions of s = μτ. Evaluating them through s keeps the maps continuous
//! across μτ = 0 and avoids the branch cut of √s for s < 0, where
//! cosh √s = cos √(−s) and sinh(√s)/√s = sin(√(−s))/√(−s).

/// cosh √s, continued evenly through s < 0.
pub fn cosh_sqrt(s: f64) -> f64 {
    if s >= 0.0 {
        s.sqrt().cosh()
    } else {
        (-s).sqrt().cos()
    }
}

/// sinh(√s)/√s, continued evenly through s < 0; Taylor series near 0.
pub fn sinhc_sqrt(s: f64, series_threshold: f64) -> f64 {
    if s.abs() < series_threshold {
        // sinh(t)/t = 1 + t²/6 + t⁴/120 + O(t⁶), t² = s
        1.0 + s / 6.0 + s * s / 120.0
    } else if s > 0.0 {
        let t = s.sqrt();
        t.sinh() / t
    } else {
        let t = (-s).sqrt();
        t.sin() / t
    }
}
