//! Error and divergence types.

use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A canonical map failed the symplectic check S C Sᵀ = C.
    #[error("map is not symplectic: residual {residual:.3e} exceeds {tol:.3e}")]
    NonSymplectic { residual: f64, tol: f64 },

    /// An operation required a Hermitian form but the input was not.
    #[error("operator is not Hermitian: imaginary residual {residual:.3e}")]
    NonHermitian { residual: f64 },

    /// A momentum-Gaussian factor hit a pole: det(A) = 0 or det(A⁻¹ − K) = 0,
    /// so the transformed state leaves the Gaussian class.
    #[error("gaussian exponent is singular (denominator magnitude {det_mag:.3e})")]
    SingularExponent { det_mag: f64 },

    /// The composition scalar χ = ζ₋²(γ̂² − α̂β̂) + 2γ̂ζ₋ + 1 vanished.
    #[error("composition scalar chi is singular (|chi| = {chi_mag:.3e})")]
    ChiSingular { chi_mag: f64 },

    /// Sector scale Σ = 2η√(ν² − Ω + σ) vanished.
    #[error("sector scale vanished: nu^2 - omega + sigma = 0")]
    SigmaZero,

    /// A hermitising parameter choice sits on one of its excluded lines.
    #[error("singular parameter choice: {denominator} vanishes")]
    SingularChoice { denominator: &'static str },

    /// |Θ| ≥ 1: the similarity chain leaves the real regime.
    #[error("mixing parameter theta = {theta} lies outside (-1, 1)")]
    ThetaOutOfRange { theta: f64 },

    /// Ω fails the third compatibility constraint.
    #[error("omega = {actual} inconsistent with constraint value {expected}")]
    OmegaInconsistent { expected: f64, actual: f64 },

    /// The δ branches are undefined at λ = 0.
    #[error("delta branches are undefined at lambda = 0")]
    LambdaZero,

    /// cosh θ = 0 under the even-function evaluation; Gauss factors blow up.
    #[error("cosh(theta) vanishes; Gauss decomposition undefined")]
    CoshZero,

    /// Bisection bracket does not straddle a sign change.
    #[error("no sign change over bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    /// Transform chain and printed closed form disagree beyond tolerance.
    #[error("closed form and transform chain disagree: residual {residual:.3e}")]
    DerivationMismatch { residual: f64 },

    /// Malformed scan configuration.
    #[error("invalid scan config: {0}")]
    InvalidConfig(String),

    /// Unparseable CSV content.
    #[error("malformed csv: {0}")]
    CsvParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Result of an integral that may fail to converge.
///
/// Divergence is a physical outcome (a non-normalisable state), not a
/// failure, so it is carried as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaybeDivergent<T> {
    Finite(T),
    Divergent,
}

impl<T> MaybeDivergent<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, MaybeDivergent::Finite(_))
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, MaybeDivergent::Divergent)
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<T> {
        match self {
            MaybeDivergent::Finite(v) => Some(v),
            MaybeDivergent::Divergent => None,
        }
    }
}

/// Squared norm of a state: finite positive number or divergent.
pub type Norm = MaybeDivergent<f64>;

/// Metric inner product value.
pub type Overlap = MaybeDivergent<Complex64>;
