//! Gaussian states and their transformation under the similarity factors.
//!
//! A state is ψ(x, y) = exp(−½ (x y) A (x y)ᵀ + log_norm) with A complex
//! symmetric; the exponent entries encode the parameters as A₁₁ = α,
//! A₂₂ = β, A₁₂ = A₂₁ = −γ. The state is normalisable exactly when Re(A) is
//! positive definite, which for real parameters is the familiar condition
//! α > 0, β > 0, αβ − γ² > 0.
//!
//! The three similarity factors act in closed form:
//!
//! * multiplication by exp(−½ xᵀ K x) adds K to the exponent;
//! * exp(+½ pᵀ K p) acts by Fourier conjugation, A ↦ (A⁻¹ − K)⁻¹, with the
//!   Gaussian-integral prefactor −½ log det(1 − A K) folded into log_norm;
//! * the dilatation factor scales A ↦ ζ A and adds ½ log ζ to log_norm.
//!
//! log_norm is tracked additively through every factor so that overlaps and
//! metric inner products are absolute values, not just ratios.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, MaybeDivergent, Norm, Overlap, Result};
use crate::model;
use crate::operator_algebra::WeylQuadraticForm;
use crate::policy::NumericPolicy;

/// Gaussian state exp(−½ xᵀ A x + log_norm) on the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    exponent: Matrix2<Complex64>,
    log_norm: Complex64,
}

impl GaussianState {
    /// Builds a state from an exponent matrix (symmetrised exactly) and a
    /// log-prefactor.
    pub fn new(exponent: Matrix2<Complex64>, log_norm: Complex64) -> Self {
        let sym = (exponent + exponent.transpose()).scale(0.5);
        Self {
            exponent: sym,
            log_norm,
        }
    }

    /// State with exponent parameters (α, β, γ) and unit prefactor.
    pub fn from_exponents(alpha: Complex64, beta: Complex64, gamma: Complex64) -> Self {
        Self {
            exponent: Matrix2::new(alpha, -gamma, -gamma, beta),
            log_norm: Complex64::new(0.0, 0.0),
        }
    }

    pub fn exponent(&self) -> &Matrix2<Complex64> {
        &self.exponent
    }

    pub fn log_norm(&self) -> Complex64 {
        self.log_norm
    }

    pub fn alpha(&self) -> Complex64 {
        self.exponent[(0, 0)]
    }

    pub fn beta(&self) -> Complex64 {
        self.exponent[(1, 1)]
    }

    pub fn gamma(&self) -> Complex64 {
        -self.exponent[(0, 1)]
    }

    /// True when Re(A) is positive definite, i.e. the state is normalisable.
    pub fn is_normalisable(&self) -> bool {
        let re = self.exponent.map(|z| z.re);
        re[(0, 0)] > 0.0 && re.determinant() > 0.0
    }
}

/// Multiplies the state by exp(−½ xᵀ K x): A ↦ A + K, prefactor unchanged.
pub fn multiply_position_gaussian(k: &Matrix2<Complex64>, state: &GaussianState) -> GaussianState {
    GaussianState::new(state.exponent + k, state.log_norm)
}

/// Applies exp(+½ pᵀ K p) by Fourier conjugation: A ↦ (A⁻¹ − K)⁻¹ and
/// log_norm gains −½ log det(1 − A K).
///
/// Fails with [`Error::SingularExponent`] when det A = 0 or
/// det(A⁻¹ − K) = 0, where the image leaves the Gaussian class.
pub fn multiply_momentum_gaussian(
    k: &Matrix2<Complex64>,
    state: &GaussianState,
    policy: &NumericPolicy,
) -> Result<GaussianState> {
    let a = state.exponent;
    let det_a = a.determinant();
    if det_a.norm() < policy.pole_tol {
        return Err(Error::SingularExponent {
            det_mag: det_a.norm(),
        });
    }
    // det(A⁻¹ − K) = det(1 − A K)/det A, so 1 − A K carries the pole.
    let w = Matrix2::identity() - a * k;
    let det_w = w.determinant();
    if det_w.norm() < policy.pole_tol {
        return Err(Error::SingularExponent {
            det_mag: det_w.norm(),
        });
    }
    let w_inv = w.try_inverse().ok_or(Error::SingularExponent {
        det_mag: det_w.norm(),
    })?;
    let new_a = w_inv * a;
    let log_norm = state.log_norm - det_w.ln() * 0.5;
    Ok(GaussianState::new(new_a, log_norm))
}

/// Dilatation factor: A ↦ ζ A, log_norm gains ½ log ζ.
///
/// Requires ζ ≠ 0; the factor is the adjoint exp(ln ζ · S_z) with
/// S_z = i/2 (p_x x + y p_y), which acts on functions as
/// ψ(x, y) ↦ √ζ ψ(√ζ x, √ζ y).
pub fn scale_state(zeta: Complex64, state: &GaussianState) -> GaussianState {
    assert!(zeta.norm() > 0.0, "scale_state requires zeta != 0");
    GaussianState::new(state.exponent * zeta, state.log_norm + zeta.ln() * 0.5)
}

/// Applies the full η₂ = exp(μ p_x p_y + τ x y) factor by Gauss
/// decomposition: momentum factor exp(ζ₋ p_x p_y), dilatation ζ_z, then
/// position factor exp(ζ₊ x y).
///
/// Fails with [`Error::ChiSingular`] when the composition scalar
/// χ = ζ₋²(γ² − αβ) + 2γζ₋ + 1 vanishes.
pub fn apply_eta2(
    mu: f64,
    tau: f64,
    state: &GaussianState,
    policy: &NumericPolicy,
) -> Result<GaussianState> {
    let factors = model::gauss_decompose(mu, tau, policy)?;
    let chi = factors.chi(state);
    if chi.norm() <= policy.pole_tol {
        return Err(Error::ChiSingular {
            chi_mag: chi.norm(),
        });
    }
    let zm = Complex64::new(factors.zeta_minus, 0.0);
    let zp = Complex64::new(factors.zeta_plus, 0.0);
    let k_minus = Matrix2::new(Complex64::new(0.0, 0.0), zm, zm, Complex64::new(0.0, 0.0));
    let k_plus = Matrix2::new(Complex64::new(0.0, 0.0), -zp, -zp, Complex64::new(0.0, 0.0));

    let state = multiply_momentum_gaussian(&k_minus, state, policy)?;
    let state = scale_state(Complex64::new(factors.zeta_z, 0.0), &state);
    Ok(multiply_position_gaussian(&k_plus, &state))
}

/// One step of a similarity chain acting on states.
#[derive(Debug, Clone, PartialEq)]
pub enum StateTransform {
    /// Multiplication by exp(−½ xᵀ K x).
    PositionGaussian(Matrix2<Complex64>),
    /// Fourier-conjugated exp(+½ pᵀ K p).
    MomentumGaussian(Matrix2<Complex64>),
    /// Dilatation with scalar ζ.
    Scale(Complex64),
    /// The full exp(μ p_x p_y + τ x y) factor.
    HyperbolicMix { mu: f64, tau: f64 },
}

/// Applies one chain step.
pub fn apply_transform(
    transform: &StateTransform,
    state: &GaussianState,
    policy: &NumericPolicy,
) -> Result<GaussianState> {
    match transform {
        StateTransform::PositionGaussian(k) => Ok(multiply_position_gaussian(k, state)),
        StateTransform::MomentumGaussian(k) => multiply_momentum_gaussian(k, state, policy),
        StateTransform::Scale(zeta) => Ok(scale_state(*zeta, state)),
        StateTransform::HyperbolicMix { mu, tau } => apply_eta2(*mu, *tau, state, policy),
    }
}

/// Applies a chain of steps in order.
pub fn apply_chain(
    chain: &[StateTransform],
    state: &GaussianState,
    policy: &NumericPolicy,
) -> Result<GaussianState> {
    let mut current = state.clone();
    for step in chain {
        current = apply_transform(step, &current, policy)?;
    }
    Ok(current)
}

/// Residual of the eigenvalue equation H ψ = E ψ for a Gaussian ψ.
///
/// With p = −i∇ acting on exp(−½ xᵀ A x), H ψ = (xᵀ Q x + t) ψ with
///
/// ```text
/// Q = M_xx − A M_pp A + i (M_xp A + A M_px),
/// t = tr(M_pp A) − i tr(M_xp) + shift,
/// ```
///
/// so ψ is an eigenstate with energy E exactly when Q = 0 and t = E.
#[derive(Debug, Clone)]
pub struct EigenResidual {
    /// Residual quadratic coefficient Q.
    pub quadratic: Matrix2<Complex64>,
    /// Residual scalar t − E.
    pub scalar: Complex64,
}

impl EigenResidual {
    /// Largest magnitude over the quadratic entries and the scalar.
    pub fn max_residual(&self) -> f64 {
        self.quadratic
            .iter()
            .map(|z| z.norm())
            .fold(self.scalar.norm(), f64::max)
    }
}

/// Applies H to ψ analytically and returns the eigen-equation residual.
pub fn eigen_residual(
    form: &WeylQuadraticForm,
    state: &GaussianState,
    energy: Complex64,
) -> EigenResidual {
    let m = form.matrix();
    let a = state.exponent;
    let m_xx = m.fixed_view::<2, 2>(0, 0).into_owned();
    let m_xp = m.fixed_view::<2, 2>(0, 2).into_owned();
    let m_px = m.fixed_view::<2, 2>(2, 0).into_owned();
    let m_pp = m.fixed_view::<2, 2>(2, 2).into_owned();

    let quadratic = m_xx - a * m_pp * a + (m_xp * a + a * m_px) * Complex64::i();
    let t = (m_pp * a).trace() - m_xp.trace() * Complex64::i() + form.shift();
    EigenResidual {
        quadratic,
        scalar: t - energy,
    }
}

/// ∫|ψ|², i.e. exp(2 Re log_norm) · 2π / √det(A + conj A) when Re(A) is
/// positive definite, and [`Norm::Divergent`] otherwise.
pub fn norm_squared(state: &GaussianState) -> Norm {
    if !state.is_normalisable() {
        return MaybeDivergent::Divergent;
    }
    let b = state.exponent + state.exponent.map(|z| z.conj());
    let det = b.map(|z| z.re).determinant();
    MaybeDivergent::Finite((2.0 * state.log_norm.re).exp() * 2.0 * std::f64::consts::PI / det.sqrt())
}

/// Standard Gaussian overlap ⟨bra|ket⟩ = ∫ conj(bra) · ket, finite when the
/// combined exponent has positive-definite real part.
pub fn gaussian_overlap(bra: &GaussianState, ket: &GaussianState) -> Overlap {
    let b = bra.exponent.map(|z| z.conj()) + ket.exponent;
    let re = b.map(|z| z.re);
    if !(re[(0, 0)] > 0.0 && re.determinant() > 0.0) {
        return MaybeDivergent::Divergent;
    }
    let det = b.determinant();
    let prefactor = (bra.log_norm.conj() + ket.log_norm).exp();
    MaybeDivergent::Finite(prefactor * 2.0 * std::f64::consts::PI / det.sqrt())
}

/// Inner product ⟨ηφ'|ηφ⟩ with respect to the metric ρ = η†η, computed as
/// the standard overlap of the two transformed states.
///
/// Returns [`Overlap::Divergent`] when the combined exponent fails positive
/// definiteness; chain singularities propagate as errors.
pub fn metric_inner_product(
    chain: &[StateTransform],
    phi: &GaussianState,
    phi_prime: &GaussianState,
    policy: &NumericPolicy,
) -> Result<Overlap> {
    let ket = apply_chain(chain, phi, policy)?;
    let bra = apply_chain(chain, phi_prime, policy)?;
    Ok(gaussian_overlap(&bra, &ket))
}
