//! The concrete ghost model and its similarity chain.
//!
//! The starting Hamiltonian is h₀ = p_x² − p_y² + ν² x² + Ω y² + g x y. Its
//! Gaussian eigensystem splits into four branches labelled (ε, η): with
//! σ_ε = ε√(g² − 4ν²Ω) and Σ = 2η√(ν² − Ω + σ_ε) the exponent parameters
//! are
//!
//! ```text
//! α = (2ν² + σ)/Σ,   β = (2Ω − σ)/Σ,   γ = −g/Σ,
//! ```
//!
//! the ground state is exp(−½αx² − ½βy² + γxy) with energy α − β, and the
//! spectrum reads E±_Nn = (N+1)(α−β) ± (2−2n+N)√((α+β)² − 4γ²) together
//! with the diagonal level (N+1)(α−β) at even N.
//!
//! The similarity factors
//!
//! ```text
//! η₀ = exp(−δ/2 x² − λ/2 y²),  η₁ = exp(κ/2 p_x² + ξ/2 p_y²),
//! η₂ = exp(μ p_x p_y + τ x y)
//! ```
//!
//! produce H₁ = η₀ h₀ η₀⁻¹, H₂ = η₁ H₁ η₁⁻¹ and h₃ = η₂ H₂ η₂⁻¹. The
//! choices κ = δ/(δ² − ν²), ξ = λ/(λ² + Ω) cancel the i p_x x and i p_y y
//! terms of H₂, and the η₂ strengths are fixed by the mixing parameter
//! Θ = gδ²/[(δ² − ν²)(ν² − δλ)] via
//!
//! ```text
//! τ = −(δ² − ν²)/(2δ) · arctanh Θ,   μ = −δ/(2(δ² − ν²)) · arctanh Θ,
//! ```
//!
//! subject to |Θ| < 1 and Ω = λ[ν² − δ(δ + λ)]/δ, which makes h₃ Hermitian.
//! (Verifying against the adjoint-series oracle fixes the sign of the
//! arctanh terms; the positive sign leaves residual imaginary p-x cross
//! terms.) Every derivation here is computed both through the transform
//! chain and through its closed form, and the two must agree.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::cx;
use crate::error::{Error, Result};
use crate::gaussian_states::{GaussianState, StateTransform};
use crate::operator_algebra::{
    max_matrix_distance, transform_quadratic, CanonicalMap, WeylQuadraticForm, PX, PY, X, Y,
};
use crate::policy::NumericPolicy;
use crate::special::{cosh_sqrt, sinhc_sqrt};

/// Model parameters of h₀ = p_x² − p_y² + ν²x² + Ωy² + gxy.
///
/// Ω enters linearly (as Ω y², not squared).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub nu: f64,
    pub omega: f64,
    pub coupling: f64,
}

impl ModelParams {
    pub fn new(nu: f64, omega: f64, coupling: f64) -> Self {
        Self {
            nu,
            omega,
            coupling,
        }
    }
}

/// One of the two square-root signs in the branch parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSign {
    Plus,
    Minus,
}

impl BranchSign {
    pub fn value(self) -> f64 {
        match self {
            BranchSign::Plus => 1.0,
            BranchSign::Minus => -1.0,
        }
    }

    pub fn from_int(v: i64) -> Option<Self> {
        match v {
            1 => Some(BranchSign::Plus),
            -1 => Some(BranchSign::Minus),
            _ => None,
        }
    }
}

/// Sector label (ε, η); the four combinations give the four branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorLabel {
    pub epsilon: BranchSign,
    pub eta: BranchSign,
}

impl SectorLabel {
    pub fn new(epsilon: BranchSign, eta: BranchSign) -> Self {
        Self { epsilon, eta }
    }

    /// All four sectors in output order: (1,1), (1,−1), (−1,1), (−1,−1).
    pub fn all() -> [SectorLabel; 4] {
        use BranchSign::{Minus, Plus};
        [
            SectorLabel::new(Plus, Plus),
            SectorLabel::new(Plus, Minus),
            SectorLabel::new(Minus, Plus),
            SectorLabel::new(Minus, Minus),
        ]
    }
}

/// Branch data of one sector: σ_ε, Σ and the exponent parameters.
#[derive(Debug, Clone)]
pub struct SectorFrame {
    pub sigma: Complex64,
    pub big_sigma: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub label: SectorLabel,
    pub params: ModelParams,
    /// True when α, β, γ are all real within tolerance.
    pub is_real: bool,
}

impl SectorFrame {
    /// Ground-state energy α − β.
    pub fn ground_energy(&self) -> Complex64 {
        self.alpha - self.beta
    }
}

/// Computes the branch parameters of one sector in complex arithmetic;
/// reality is flagged, never assumed.
pub fn sector_params(
    params: &ModelParams,
    label: SectorLabel,
    policy: &NumericPolicy,
) -> Result<SectorFrame> {
    let (nu, omega, g) = (params.nu, params.omega, params.coupling);
    let sigma = cx(g * g - 4.0 * nu * nu * omega, 0.0).sqrt() * label.epsilon.value();
    let under = cx(nu * nu - omega, 0.0) + sigma;
    if under.norm() < policy.pole_tol {
        return Err(Error::SigmaZero);
    }
    let big_sigma = under.sqrt() * 2.0 * label.eta.value();
    let alpha = (cx(2.0 * nu * nu, 0.0) + sigma) / big_sigma;
    let beta = (cx(2.0 * omega, 0.0) - sigma) / big_sigma;
    let gamma = cx(-g, 0.0) / big_sigma;
    let is_real = alpha.im.abs() <= policy.region_tol
        && beta.im.abs() <= policy.region_tol
        && gamma.im.abs() <= policy.region_tol;
    Ok(SectorFrame {
        sigma,
        big_sigma,
        alpha,
        beta,
        gamma,
        label,
        params: *params,
        is_real,
    })
}

/// Ground state of a sector: exponent [[α, −γ], [−γ, β]], unit prefactor.
pub fn ground_state(frame: &SectorFrame) -> GaussianState {
    GaussianState::from_exponents(frame.alpha, frame.beta, frame.gamma)
}

/// Position of a level within its N-multiplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelIndex {
    Plus(u32),
    Minus(u32),
    Diagonal,
}

/// One energy level E of the N-th multiplet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumLevel {
    pub n_total: u32,
    pub index: LevelIndex,
    pub energy: Complex64,
    pub is_real: bool,
}

/// Enumerates the spectrum up to N = n_max:
/// E±_Nn = (N+1)(α−β) ± (2−2n+N)√((α+β)² − 4γ²) for n = 1..⌊N/2⌋ plus the
/// diagonal level (N+1)(α−β) at even N. Identical (N, E) pairs are emitted
/// once.
pub fn energy_levels(
    frame: &SectorFrame,
    n_max: u32,
    policy: &NumericPolicy,
) -> Vec<SpectrumLevel> {
    let base = frame.ground_energy();
    let sum = frame.alpha + frame.beta;
    let disc = (sum * sum - frame.gamma * frame.gamma * 4.0).sqrt();
    let mut levels = Vec::new();
    for n_total in 0..=n_max {
        let centre = base * (n_total as f64 + 1.0);
        let mut multiplet: Vec<SpectrumLevel> = Vec::new();
        for n in 1..=(n_total / 2) {
            let spread = disc * (2.0 + (n_total as f64) - 2.0 * (n as f64));
            for (index, energy) in [
                (LevelIndex::Plus(n), centre + spread),
                (LevelIndex::Minus(n), centre - spread),
            ] {
                if !multiplet
                    .iter()
                    .any(|l| (l.energy - energy).norm() <= policy.equality_tol)
                {
                    multiplet.push(SpectrumLevel {
                        n_total,
                        index,
                        energy,
                        is_real: energy.im.abs() <= policy.region_tol,
                    });
                }
            }
        }
        if n_total % 2 == 0
            && !multiplet
                .iter()
                .any(|l| (l.energy - centre).norm() <= policy.equality_tol)
        {
            multiplet.push(SpectrumLevel {
                n_total,
                index: LevelIndex::Diagonal,
                energy: centre,
                is_real: centre.im.abs() <= policy.region_tol,
            });
        }
        levels.extend(multiplet);
    }
    levels
}

/// The ghostly Hamiltonian h₀ = p_x² − p_y² + ν²x² + Ωy² + gxy.
pub fn build_h0(params: &ModelParams) -> WeylQuadraticForm {
    WeylQuadraticForm::from_terms(&[
        (PX, PX, cx(1.0, 0.0)),
        (PY, PY, cx(-1.0, 0.0)),
        (X, X, cx(params.nu * params.nu, 0.0)),
        (Y, Y, cx(params.omega, 0.0)),
        (X, Y, cx(params.coupling, 0.0)),
    ])
}

/// Adjoint map of η₀ = exp(−δ/2 x² − λ/2 y²):
/// p_x ↦ p_x − iδx, p_y ↦ p_y − iλy, positions fixed.
pub fn build_eta0(delta: f64, lambda: f64) -> CanonicalMap {
    let mut s = Matrix4::identity();
    s[(PX, X)] = cx(0.0, -delta);
    s[(PY, Y)] = cx(0.0, -lambda);
    CanonicalMap::from_matrix_unchecked(s)
}

/// Adjoint map of η₁ = exp(κ/2 p_x² + ξ/2 p_y²):
/// x ↦ x − iκp_x, y ↦ y − iξp_y, momenta fixed.
pub fn build_eta1(kappa: f64, xi: f64) -> CanonicalMap {
    let mut s = Matrix4::identity();
    s[(X, PX)] = cx(0.0, -kappa);
    s[(Y, PY)] = cx(0.0, -xi);
    CanonicalMap::from_matrix_unchecked(s)
}

/// Adjoint map of η₂ = exp(μ p_x p_y + τ x y) with θ = √(μτ):
///
/// ```text
/// x ↦ cosh(θ)x − i(μ/θ)sinh(θ)p_y,   p_x ↦ cosh(θ)p_x + i(τ/θ)sinh(θ)y,
/// y ↦ cosh(θ)y − i(μ/θ)sinh(θ)p_x,   p_y ↦ cosh(θ)p_y + i(τ/θ)sinh(θ)x.
/// ```
///
/// cosh θ and sinh(θ)/θ are evaluated as even functions of μτ, so the map
/// is continuous through μτ ≤ 0.
pub fn build_eta2(mu: f64, tau: f64) -> CanonicalMap {
    build_eta2_with(mu, tau, &NumericPolicy::default())
}

/// [`build_eta2`] with an explicit series threshold.
pub fn build_eta2_with(mu: f64, tau: f64, policy: &NumericPolicy) -> CanonicalMap {
    let s = mu * tau;
    let ch = cosh_sqrt(s);
    let sc = sinhc_sqrt(s, policy.series_threshold);
    let mut m = Matrix4::zeros();
    for j in 0..4 {
        m[(j, j)] = cx(ch, 0.0);
    }
    m[(X, PY)] = cx(0.0, -mu * sc);
    m[(Y, PX)] = cx(0.0, -mu * sc);
    m[(PX, Y)] = cx(0.0, tau * sc);
    m[(PY, X)] = cx(0.0, tau * sc);
    CanonicalMap::from_matrix_unchecked(m)
}

/// Generator of η₀ as a Weyl form, for oracle comparisons.
pub fn eta0_generator(delta: f64, lambda: f64) -> WeylQuadraticForm {
    WeylQuadraticForm::from_terms(&[(X, X, cx(-delta / 2.0, 0.0)), (Y, Y, cx(-lambda / 2.0, 0.0))])
}

/// Generator of η₁ as a Weyl form.
pub fn eta1_generator(kappa: f64, xi: f64) -> WeylQuadraticForm {
    WeylQuadraticForm::from_terms(&[(PX, PX, cx(kappa / 2.0, 0.0)), (PY, PY, cx(xi / 2.0, 0.0))])
}

/// Generator of η₂ as a Weyl form.
pub fn eta2_generator(mu: f64, tau: f64) -> WeylQuadraticForm {
    WeylQuadraticForm::from_terms(&[(PX, PY, cx(mu, 0.0)), (X, Y, cx(tau, 0.0))])
}

/// The hermitising parameter choices κ = δ/(δ² − ν²), ξ = λ/(λ² + Ω) that
/// remove the i p_x x and i p_y y terms from H₂.
pub fn hermitising_choices(
    nu: f64,
    omega: f64,
    delta: f64,
    lambda: f64,
    policy: &NumericPolicy,
) -> Result<(f64, f64)> {
    let d1 = delta * delta - nu * nu;
    if d1.abs() < policy.pole_tol {
        return Err(Error::SingularChoice {
            denominator: "delta^2 - nu^2",
        });
    }
    let d2 = lambda * lambda + omega;
    if d2.abs() < policy.pole_tol {
        return Err(Error::SingularChoice {
            denominator: "lambda^2 + omega",
        });
    }
    Ok((delta / d1, lambda / d2))
}

/// Mixing parameter Θ = gδ²/[(δ² − ν²)(ν² − δλ)].
pub fn theta(params: &ModelParams, delta: f64, lambda: f64, policy: &NumericPolicy) -> Result<f64> {
    let d1 = delta * delta - params.nu * params.nu;
    if d1.abs() < policy.pole_tol {
        return Err(Error::SingularChoice {
            denominator: "delta^2 - nu^2",
        });
    }
    let d2 = params.nu * params.nu - delta * lambda;
    if d2.abs() < policy.pole_tol {
        return Err(Error::SingularChoice {
            denominator: "nu^2 - delta*lambda",
        });
    }
    Ok(params.coupling * delta * delta / (d1 * d2))
}

/// δ branches solving the Ω constraint at fixed (λ, ν, Ω):
/// δ± = [±√(4λ²ν² + (λ² + Ω)²) − λ² − Ω]/(2λ).
pub fn delta_branches(lambda: f64, nu: f64, omega: f64) -> Result<(f64, f64)> {
    if lambda == 0.0 {
        return Err(Error::LambdaZero);
    }
    let l2 = lambda * lambda;
    let root = (4.0 * l2 * nu * nu + (l2 + omega) * (l2 + omega)).sqrt();
    Ok((
        (root - l2 - omega) / (2.0 * lambda),
        (-root - l2 - omega) / (2.0 * lambda),
    ))
}

/// Constraint data for the η₂ stage.
#[derive(Debug, Clone, Copy)]
pub struct H3Constraints {
    pub theta: f64,
    pub b1: f64,
    pub b2_plus: f64,
    pub b2_minus: f64,
    pub tau: f64,
    pub mu: f64,
    pub omega_consistent: bool,
    pub delta_plus: f64,
    pub delta_minus: f64,
}

/// Solves the η₂ constraints at (δ, λ):
///
/// Θ must satisfy |Θ| < 1, Ω must equal λ[ν² − δ(δ + λ)]/δ, and then
/// τ = −(δ² − ν²)/(2δ)·arctanh Θ, μ = −δ/(2(δ² − ν²))·arctanh Θ together
/// with the coefficient data b₁, b₂± of the target Hamiltonian.
pub fn eta2_constraints(
    params: &ModelParams,
    delta: f64,
    lambda: f64,
    policy: &NumericPolicy,
) -> Result<H3Constraints> {
    if delta.abs() < policy.pole_tol {
        return Err(Error::SingularChoice {
            denominator: "delta",
        });
    }
    let th = theta(params, delta, lambda, policy)?;
    if th.abs() >= 1.0 {
        return Err(Error::ThetaOutOfRange { theta: th });
    }
    let omega_expected = lambda * (params.nu * params.nu - delta * (delta + lambda)) / delta;
    if (omega_expected - params.omega).abs() > policy.equality_tol * (1.0 + params.omega.abs()) {
        return Err(Error::OmegaInconsistent {
            expected: omega_expected,
            actual: params.omega,
        });
    }
    let d1 = delta * delta - params.nu * params.nu;
    let t = -th.atanh();
    let tau = d1 / (2.0 * delta) * t;
    let mu = delta / (2.0 * d1) * t;
    let b1 = -delta * (delta + lambda) / d1;
    let root = (1.0 - th * th).sqrt();
    let b2 = (delta * lambda - params.nu * params.nu) / d1 * root;
    let (delta_plus, delta_minus) = delta_branches(lambda, params.nu, params.omega)?;
    Ok(H3Constraints {
        theta: th,
        b1,
        b2_plus: b2 + 1.0,
        b2_minus: b2 - 1.0,
        tau,
        mu,
        omega_consistent: true,
        delta_plus,
        delta_minus,
    })
}

/// Parameters of the full similarity chain η₂η₁η₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub delta: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub xi: f64,
    pub mu: f64,
    pub tau: f64,
}

impl ChainParams {
    /// Free construction from explicit factor strengths.
    pub fn new(delta: f64, lambda: f64, kappa: f64, xi: f64, mu: f64, tau: f64) -> Self {
        Self {
            delta,
            lambda,
            kappa,
            xi,
            mu,
            tau,
        }
    }

    /// The canonical chain: κ, ξ from the hermitising choices and μ, τ from
    /// the η₂ constraints.
    pub fn hermitising(
        params: &ModelParams,
        delta: f64,
        lambda: f64,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let (kappa, xi) = hermitising_choices(params.nu, params.omega, delta, lambda, policy)?;
        let constraints = eta2_constraints(params, delta, lambda, policy)?;
        Ok(Self {
            delta,
            lambda,
            kappa,
            xi,
            mu: constraints.mu,
            tau: constraints.tau,
        })
    }

    pub fn eta0_map(&self) -> CanonicalMap {
        build_eta0(self.delta, self.lambda)
    }

    pub fn eta1_map(&self) -> CanonicalMap {
        build_eta1(self.kappa, self.xi)
    }

    pub fn eta2_map(&self, policy: &NumericPolicy) -> CanonicalMap {
        build_eta2_with(self.mu, self.tau, policy)
    }

    /// Map of the full chain, acting first with η₀, then η₁, then η₂.
    pub fn full_map(&self, policy: &NumericPolicy) -> CanonicalMap {
        self.eta0_map()
            .then(&self.eta1_map())
            .then(&self.eta2_map(policy))
    }

    /// The chain as state transformations, in application order.
    pub fn state_transforms(&self) -> Vec<StateTransform> {
        let zero = cx(0.0, 0.0);
        vec![
            StateTransform::PositionGaussian(Matrix2::new(
                cx(self.delta, 0.0),
                zero,
                zero,
                cx(self.lambda, 0.0),
            )),
            StateTransform::MomentumGaussian(Matrix2::new(
                cx(self.kappa, 0.0),
                zero,
                zero,
                cx(self.xi, 0.0),
            )),
            StateTransform::HyperbolicMix {
                mu: self.mu,
                tau: self.tau,
            },
        ]
    }
}

/// Printed closed form of H₁ = η₀ h₀ η₀⁻¹ (with the p_y row of the adjoint
/// action corrected to p_y − iλy):
///
/// ```text
/// H₁ = p_x² − p_y² + (ν² − δ²)x² + (Ω + λ²)y² + gxy
///      − iδ(p_x x + x p_x) + iλ(p_y y + y p_y).
/// ```
pub fn h1_closed_form(params: &ModelParams, delta: f64, lambda: f64) -> WeylQuadraticForm {
    let (nu, omega, g) = (params.nu, params.omega, params.coupling);
    WeylQuadraticForm::from_terms(&[
        (PX, PX, cx(1.0, 0.0)),
        (PY, PY, cx(-1.0, 0.0)),
        (X, X, cx(nu * nu - delta * delta, 0.0)),
        (Y, Y, cx(omega + lambda * lambda, 0.0)),
        (X, Y, cx(g, 0.0)),
        (X, PX, cx(0.0, -2.0 * delta)),
        (Y, PY, cx(0.0, 2.0 * lambda)),
    ])
}

/// Printed closed form of H₂ = η₁ H₁ η₁⁻¹ under the hermitising choices
/// (with the sign of the x p_y term fixed by the chain computation):
///
/// ```text
/// H₂ = ν²/(ν² − δ²) p_x² − Ω/(λ² + Ω) p_y² + (ν² − δ²)x² + (Ω + λ²)y²
///      + gxy + gδλ/[(ν² − δ²)(λ² + Ω)] p_x p_y
///      + i gδ/(ν² − δ²) p_x y − i gλ/(λ² + Ω) x p_y.
/// ```
pub fn h2_closed_form(
    params: &ModelParams,
    delta: f64,
    lambda: f64,
    policy: &NumericPolicy,
) -> Result<WeylQuadraticForm> {
    let (nu, omega, g) = (params.nu, params.omega, params.coupling);
    // the same excluded lines as the hermitising choices
    hermitising_choices(nu, omega, delta, lambda, policy)?;
    let a = nu * nu - delta * delta;
    let b = lambda * lambda + omega;
    Ok(WeylQuadraticForm::from_terms(&[
        (PX, PX, cx(nu * nu / a, 0.0)),
        (PY, PY, cx(-omega / b, 0.0)),
        (X, X, cx(a, 0.0)),
        (Y, Y, cx(b, 0.0)),
        (X, Y, cx(g, 0.0)),
        (PX, PY, cx(g * delta * lambda / (a * b), 0.0)),
        (Y, PX, cx(0.0, g * delta / a)),
        (X, PY, cx(0.0, -g * lambda / b)),
    ]))
}

/// Printed closed form of h₃ = η₂ H₂ η₂⁻¹ under the constraints:
///
/// ```text
/// h₃ = ½(b₁ + b₂⁺)p_x² + ½(b₁ − b₂⁺)p_y²
///      + (δ² − ν²)²/(2δ²) [(b₁ + b₂⁻)x² + (b₁ − b₂⁻)y²]
///      + gδ²/(δ² − ν²)² p_x p_y + gxy.
/// ```
pub fn h3_closed_form(
    params: &ModelParams,
    delta: f64,
    lambda: f64,
    policy: &NumericPolicy,
) -> Result<WeylQuadraticForm> {
    let c = eta2_constraints(params, delta, lambda, policy)?;
    let (nu, g) = (params.nu, params.coupling);
    let d1 = delta * delta - nu * nu;
    let w = d1 * d1 / (2.0 * delta * delta);
    Ok(WeylQuadraticForm::from_terms(&[
        (PX, PX, cx(0.5 * (c.b1 + c.b2_plus), 0.0)),
        (PY, PY, cx(0.5 * (c.b1 - c.b2_plus), 0.0)),
        (X, X, cx(w * (c.b1 + c.b2_minus), 0.0)),
        (Y, Y, cx(w * (c.b1 - c.b2_minus), 0.0)),
        (PX, PY, cx(g * delta * delta / (d1 * d1), 0.0)),
        (X, Y, cx(g, 0.0)),
    ]))
}

fn check_agreement(
    chain: &WeylQuadraticForm,
    closed: &WeylQuadraticForm,
    policy: &NumericPolicy,
) -> Result<()> {
    let residual = max_matrix_distance(chain.matrix(), closed.matrix());
    if residual > policy.equality_tol {
        return Err(Error::DerivationMismatch { residual });
    }
    Ok(())
}

/// H₁ by the η₀ transform chain, cross-checked against the closed form.
pub fn derive_h1(
    params: &ModelParams,
    delta: f64,
    lambda: f64,
    policy: &NumericPolicy,
) -> Result<WeylQuadraticForm> {
    let chain = transform_quadratic(&build_eta0(delta, lambda), &build_h0(params), policy)?;
    check_agreement(&chain, &h1_closed_form(params, delta, lambda), policy)?;
    Ok(chain)
}

/// H₂ by the η₁η₀ transform chain with hermitising κ, ξ, cross-checked
/// against the closed form.
pub fn derive_h2(
    params: &ModelParams,
    delta: f64,
    lambda: f64,
    policy: &NumericPolicy,
) -> Result<WeylQuadraticForm> {
    let (kappa, xi) = hermitising_choices(params.nu, params.omega, delta, lambda, policy)?;
    let map = build_eta0(delta, lambda).then(&build_eta1(kappa, xi));
    let chain = transform_quadratic(&map, &build_h0(params), policy)?;
    check_agreement(&chain, &h2_closed_form(params, delta, lambda, policy)?, policy)?;
    Ok(chain)
}

/// h₃ by the full η₂η₁η₀ transform chain, cross-checked against the closed
/// form; the result is Hermitian whenever the constraints hold.
pub fn derive_h3(
    params: &ModelParams,
    chain_params: &ChainParams,
    policy: &NumericPolicy,
) -> Result<WeylQuadraticForm> {
    let map = chain_params.full_map(policy);
    let chain = transform_quadratic(&map, &build_h0(params), policy)?;
    let closed = h3_closed_form(params, chain_params.delta, chain_params.lambda, policy)?;
    check_agreement(&chain, &closed, policy)?;
    Ok(chain)
}

/// Gauss-factor strengths of η₂ = η₊ η_z η₋:
/// ζ_z = 1/cosh²θ, ζ₊ = (τ/θ)tanh θ, ζ₋ = (μ/θ)tanh θ, all even in θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussFactors {
    pub zeta_z: f64,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
}

impl GaussFactors {
    /// Composition scalar χ = ζ₋²(γ² − αβ) + 2γζ₋ + 1 for a state with
    /// exponents (α, β, γ).
    pub fn chi(&self, state: &GaussianState) -> Complex64 {
        let (a, b, c) = (state.alpha(), state.beta(), state.gamma());
        let zm = cx(self.zeta_minus, 0.0);
        zm * zm * (c * c - a * b) + c * zm * 2.0 + cx(1.0, 0.0)
    }

    /// Adjoint map of η₋ = exp(ζ₋ p_x p_y).
    pub fn minus_map(&self) -> CanonicalMap {
        build_eta2(self.zeta_minus, 0.0)
    }

    /// Adjoint map of η₊ = exp(ζ₊ x y).
    pub fn plus_map(&self) -> CanonicalMap {
        build_eta2(0.0, self.zeta_plus)
    }

    /// Adjoint map of η_z: x, y ↦ √ζ_z x, √ζ_z y and p ↦ p/√ζ_z.
    pub fn z_map(&self) -> CanonicalMap {
        let root = cx(self.zeta_z, 0.0).sqrt();
        let mut m = Matrix4::zeros();
        m[(X, X)] = root;
        m[(Y, Y)] = root;
        m[(PX, PX)] = 1.0 / root;
        m[(PY, PY)] = 1.0 / root;
        CanonicalMap::from_matrix_unchecked(m)
    }

    /// Generator of η_z as a Weyl form: ln ζ_z · i/2 (p_x x + y p_y) in
    /// symmetrised ordering (its shift contribution cancels).
    pub fn z_generator(&self) -> WeylQuadraticForm {
        let c = cx(0.0, self.zeta_z.ln() / 2.0);
        WeylQuadraticForm::from_terms(&[(X, PX, c), (Y, PY, c)])
    }

    /// The composed map η₊ η_z η₋, which must equal the direct η₂.
    pub fn composed_map(&self) -> CanonicalMap {
        self.minus_map().then(&self.z_map()).then(&self.plus_map())
    }
}

/// Gauss decomposition of η₂ into su(2) triangular factors.
///
/// Uses the even-function evaluation through μτ ≤ 0; fails only where
/// cosh θ vanishes (possible for μτ < 0 beyond the real-|Θ|<1 regime).
pub fn gauss_decompose(mu: f64, tau: f64, policy: &NumericPolicy) -> Result<GaussFactors> {
    let s = mu * tau;
    let ch = cosh_sqrt(s);
    if ch.abs() < policy.pole_tol {
        return Err(Error::CoshZero);
    }
    let tanhc = sinhc_sqrt(s, policy.series_threshold) / ch;
    Ok(GaussFactors {
        zeta_z: 1.0 / (ch * ch),
        zeta_plus: tau * tanhc,
        zeta_minus: mu * tanhc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian_states::{eigen_residual, norm_squared};
    use crate::operator_algebra::{bch_adjoint_oracle, classify_definiteness, Sign};
    use BranchSign::{Minus, Plus};

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn figure_params() -> ModelParams {
        ModelParams::new(4.0, -2.0, 0.0)
    }

    #[test]
    fn frame_values_at_the_figure_point_are_exact() {
        let p = figure_params();
        let frame = sector_params(&p, SectorLabel::new(Plus, Plus), &policy()).unwrap();
        assert!((frame.alpha - cx(4.0, 0.0)).norm() < 1e-12);
        assert!((frame.beta - cx(-2.0f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!(frame.gamma.norm() < 1e-15);
        assert!(frame.is_real);

        let frame = sector_params(&p, SectorLabel::new(Minus, Plus), &policy()).unwrap();
        assert!((frame.alpha - cx(4.0, 0.0)).norm() < 1e-12);
        assert!((frame.beta - cx(2.0f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_coupling_gives_zero_gamma() {
        let p = ModelParams::new(1.7, 0.4, 0.0);
        for label in SectorLabel::all() {
            let frame = sector_params(&p, label, &policy()).unwrap();
            assert!(frame.gamma.norm() < 1e-15);
        }
    }

    #[test]
    fn frame_ratios_hold_identically() {
        // alpha = (2 nu^2 + sigma)/Sigma etc., by construction
        let p = ModelParams::new(2.3, -1.1, 0.7);
        for label in SectorLabel::all() {
            let f = sector_params(&p, label, &policy()).unwrap();
            let r1 = f.alpha * f.big_sigma - (cx(2.0 * p.nu * p.nu, 0.0) + f.sigma);
            let r2 = f.beta * f.big_sigma - (cx(2.0 * p.omega, 0.0) - f.sigma);
            let r3 = f.gamma * f.big_sigma + cx(p.coupling, 0.0);
            assert!(r1.norm() < 1e-13 && r2.norm() < 1e-13 && r3.norm() < 1e-13);
        }
    }

    #[test]
    fn ground_state_solves_h0_in_all_four_sectors() {
        let p = ModelParams::new(4.0, -2.0, 3.0);
        let h0 = build_h0(&p);
        for label in SectorLabel::all() {
            let frame = sector_params(&p, label, &policy()).unwrap();
            let state = ground_state(&frame);
            let res = eigen_residual(&h0, &state, frame.ground_energy());
            assert!(res.max_residual() < 1e-10, "sector {:?}", label);
        }
    }

    #[test]
    fn normalisability_splits_by_epsilon() {
        let p = figure_params();
        let plus = sector_params(&p, SectorLabel::new(Plus, Plus), &policy()).unwrap();
        assert!(norm_squared(&ground_state(&plus)).is_divergent());
        let minus = sector_params(&p, SectorLabel::new(Minus, Plus), &policy()).unwrap();
        assert!(norm_squared(&ground_state(&minus)).is_finite());
    }

    #[test]
    fn spectrum_starts_at_the_ground_energy() {
        let p = figure_params();
        let frame = sector_params(&p, SectorLabel::new(Plus, Plus), &policy()).unwrap();
        let levels = energy_levels(&frame, 0, &policy());
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].index, LevelIndex::Diagonal);
        assert!((levels[0].energy - frame.ground_energy()).norm() < 1e-14);
    }

    #[test]
    fn spectrum_boundedness_dichotomy() {
        let p = figure_params();
        let bounded = sector_params(&p, SectorLabel::new(Plus, Plus), &policy()).unwrap();
        let min_bounded = energy_levels(&bounded, 200, &policy())
            .iter()
            .filter(|l| l.is_real)
            .map(|l| l.energy.re)
            .fold(f64::INFINITY, f64::min);
        assert!((min_bounded - (4.0 + 2.0f64.sqrt())).abs() < 1e-10);

        let unbounded = sector_params(&p, SectorLabel::new(Minus, Plus), &policy()).unwrap();
        let min_unbounded = energy_levels(&unbounded, 200, &policy())
            .iter()
            .filter(|l| l.is_real)
            .map(|l| l.energy.re)
            .fold(f64::INFINITY, f64::min);
        assert!(min_unbounded < -500.0);
    }

    #[test]
    fn level_multiset_reflects_under_index_reflection() {
        // E+ at n is E- at N + 2 - n, as a formula identity
        let p = ModelParams::new(3.0, -1.0, 0.5);
        let frame = sector_params(&p, SectorLabel::new(Plus, Plus), &policy()).unwrap();
        let base = frame.ground_energy();
        let disc =
            (frame.alpha + frame.beta).powu(2) - frame.gamma * frame.gamma * 4.0;
        let disc = disc.sqrt();
        for n_total in [4u32, 7, 12] {
            for n in 1..=(n_total / 2) {
                let up = base * (n_total as f64 + 1.0)
                    + disc * (2.0 + n_total as f64 - 2.0 * n as f64);
                let reflected = n_total + 2 - n;
                let down = base * (n_total as f64 + 1.0)
                    - disc * (2.0 + n_total as f64 - 2.0 * reflected as f64);
                assert!((up - down).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_maps_match_the_bch_oracle() {
        let pol = policy();
        let cases: Vec<(CanonicalMap, WeylQuadraticForm)> = vec![
            (build_eta0(0.3, 0.7), eta0_generator(0.3, 0.7)),
            (build_eta1(-0.4, 0.9), eta1_generator(-0.4, 0.9)),
            (build_eta2(0.6, 0.8), eta2_generator(0.6, 0.8)),
            (build_eta2(0.6, -0.8), eta2_generator(0.6, -0.8)),
        ];
        for (closed, generator) in cases {
            let oracle = bch_adjoint_oracle(&generator, 30);
            assert!(
                max_matrix_distance(closed.matrix(), oracle.matrix()) < pol.equality_tol,
                "closed form disagrees with oracle"
            );
            assert!(closed.symplectic_residual() < pol.construction_tol);
        }
    }

    #[test]
    fn eta0_px_row_carries_minus_i_delta() {
        let map = build_eta0(0.3, 0.7);
        assert_eq!(map.matrix()[(PX, X)], cx(0.0, -0.3));
        assert_eq!(map.matrix()[(PY, Y)], cx(0.0, -0.7));
    }

    #[test]
    fn eta2_x_row_is_cosh_sinh() {
        let t = 0.45;
        let map = build_eta2(t, t);
        assert!((map.matrix()[(X, X)] - cx(t.cosh(), 0.0)).norm() < 1e-14);
        assert!((map.matrix()[(X, PY)] - cx(0.0, -t.sinh())).norm() < 1e-14);
    }

    #[test]
    fn eta2_at_zero_is_the_identity_map() {
        let map = build_eta2(0.0, 0.0);
        assert!(max_matrix_distance(map.matrix(), CanonicalMap::identity().matrix()) == 0.0);
    }

    #[test]
    fn hermitising_choices_match_direct_substitution() {
        let pol = policy();
        let (kappa, xi) = hermitising_choices(4.0, -2.0, 0.0, 1.0, &pol).unwrap();
        assert_eq!(kappa, 0.0);
        assert!((xi - (-1.0)).abs() < 1e-15);
        let (kappa, xi) = hermitising_choices(2.0, 3.0, 1.0, 1.0, &pol).unwrap();
        assert!((kappa - (-1.0 / 3.0)).abs() < 1e-15);
        assert!((xi - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hermitising_choices_reject_the_excluded_lines() {
        let pol = policy();
        assert!(matches!(
            hermitising_choices(1.0, -2.0, 1.0, 0.5, &pol),
            Err(Error::SingularChoice { .. })
        ));
        assert!(matches!(
            hermitising_choices(2.0, -1.0, 0.5, 1.0, &pol),
            Err(Error::SingularChoice { .. })
        ));
    }

    #[test]
    fn h1_at_zero_parameters_is_h0() {
        let p = ModelParams::new(1.4, 0.6, 0.3);
        let h1 = derive_h1(&p, 0.0, 0.0, &policy()).unwrap();
        assert!(max_matrix_distance(h1.matrix(), build_h0(&p).matrix()) < 1e-15);
    }

    #[test]
    fn h1_is_pt_symmetric_but_not_hermitian() {
        let p = ModelParams::new(2.0, 1.0, 0.5);
        let h1 = derive_h1(&p, 0.4, -0.8, &policy()).unwrap();
        assert!(h1.is_pt_symmetric(&policy()));
        assert!(!h1.is_hermitian(&policy()));
    }

    #[test]
    fn h2_loses_its_mixed_terms_at_zero_coupling() {
        let p = ModelParams::new(4.0, -2.0, 0.0);
        let pol = policy();
        // |lambda| < sqrt(2): difference of oscillators, ghost signature
        let h2 = derive_h2(&p, 0.2, 1.0, &pol).unwrap();
        assert!(h2.is_hermitian(&pol));
        let report = classify_definiteness(&h2, &pol).unwrap();
        assert!(report.is_ghostly());
        // |lambda| > sqrt(2): sum of oscillators
        let h2 = derive_h2(&p, 0.2, 2.0, &pol).unwrap();
        assert!(h2.is_hermitian(&pol));
        let report = classify_definiteness(&h2, &pol).unwrap();
        assert_eq!(report.kinetic_signature, [Sign::Positive, Sign::Positive]);
        assert_eq!(
            report.definiteness,
            crate::operator_algebra::Definiteness::PositiveDefinite
        );
    }

    #[test]
    fn h2_hermitising_kills_ipxx_and_ipyy() {
        let p = ModelParams::new(4.0, -2.0, 1.0);
        let h2 = derive_h2(&p, 0.3, 0.9, &policy()).unwrap();
        assert!(h2.matrix()[(X, PX)].norm() < 1e-12);
        assert!(h2.matrix()[(Y, PY)].norm() < 1e-12);
    }

    #[test]
    fn delta_branches_match_the_printed_formula() {
        let (dp, dm) = delta_branches(1.0, 4.0, -2.0).unwrap();
        assert!((dp - (1.0 + 65.0f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((dm - (1.0 - 65.0f64.sqrt()) / 2.0).abs() < 1e-12);
        let (dp, _) = delta_branches(2.5, 4.0, -2.0).unwrap();
        assert!((dp - 3.23932).abs() < 1e-5);
    }

    #[test]
    fn delta_branches_round_trip_the_omega_identity() {
        let (nu, omega) = (4.0, -2.0);
        for lambda in [0.3, 1.0, 2.5, -1.7] {
            let (dp, dm) = delta_branches(lambda, nu, omega).unwrap();
            for d in [dp, dm] {
                let omega_back = lambda * (nu * nu - d * (d + lambda)) / d;
                assert!((omega_back - omega).abs() < 1e-12);
            }
        }
        assert!(matches!(
            delta_branches(0.0, 4.0, -2.0),
            Err(Error::LambdaZero)
        ));
    }

    #[test]
    fn theta_values_at_the_figure_two_samples() {
        let p = ModelParams::new(4.0, -2.0, 3.0);
        let pol = policy();
        let (dp, _) = delta_branches(1.0, p.nu, p.omega).unwrap();
        let th = theta(&p, dp, 1.0, &pol).unwrap();
        assert!((th - 1.18524).abs() < 1e-5);
        assert!(matches!(
            eta2_constraints(&p, dp, 1.0, &pol),
            Err(Error::ThetaOutOfRange { .. })
        ));

        let (dp, _) = delta_branches(2.5, p.nu, p.omega).unwrap();
        let th = theta(&p, dp, 2.5, &pol).unwrap();
        assert!((th - (-0.72345)).abs() < 1e-5);
        assert!(eta2_constraints(&p, dp, 2.5, &pol).is_ok());
    }

    #[test]
    fn zero_coupling_gives_identity_eta2_constraints() {
        let p = ModelParams::new(4.0, 0.0, 0.0);
        // pick delta, lambda satisfying the omega identity for omega = 0:
        // lambda (nu^2 - delta(delta + lambda)) = 0 with lambda != 0 needs
        // nu^2 = delta (delta + lambda)
        let delta = 2.0;
        let lambda = (p.nu * p.nu - delta * delta) / delta;
        let c = eta2_constraints(&p, delta, lambda, &policy()).unwrap();
        assert_eq!(c.theta, 0.0);
        assert_eq!(c.tau, 0.0);
        assert_eq!(c.mu, 0.0);
    }

    #[test]
    fn inconsistent_omega_is_rejected() {
        let p = ModelParams::new(4.0, -2.0, 3.0);
        assert!(matches!(
            eta2_constraints(&p, 1.0, 0.5, &policy()),
            Err(Error::OmegaInconsistent { .. })
        ));
    }

    #[test]
    fn h3_is_hermitian_at_the_region_one_sample() {
        let p = ModelParams::new(4.0, -2.0, 3.0);
        let pol = policy();
        let (dp, _) = delta_branches(2.5, p.nu, p.omega).unwrap();
        let chain = ChainParams::hermitising(&p, dp, 2.5, &pol).unwrap();
        let h3 = derive_h3(&p, &chain, &pol).unwrap();
        assert!(h3.hermiticity_residual() < 1e-10);
        let report = classify_definiteness(&h3, &pol).unwrap();
        assert!(!report.is_ghostly());
        assert_eq!(
            report.definiteness,
            crate::operator_algebra::Definiteness::PositiveDefinite
        );
    }

    #[test]
    fn constraint_strengths_square_to_the_mixing_angle() {
        // tau * mu = arctanh(theta)^2 / 4
        let p = ModelParams::new(4.0, -2.0, 3.0);
        let (dp, _) = delta_branches(2.5, p.nu, p.omega).unwrap();
        let c = eta2_constraints(&p, dp, 2.5, &policy()).unwrap();
        assert!((c.tau * c.mu - c.theta.atanh().powi(2) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_factors_at_equal_strengths() {
        let t = 0.65;
        let f = gauss_decompose(t, t, &policy()).unwrap();
        assert!((f.zeta_plus - t.tanh()).abs() < 1e-14);
        assert!((f.zeta_minus - t.tanh()).abs() < 1e-14);
        assert!((f.zeta_z - 1.0 / t.cosh().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn gauss_factors_limit_to_the_strengths_at_small_theta() {
        let f = gauss_decompose(3e-9, -2e-9, &policy()).unwrap();
        assert!((f.zeta_plus - (-2e-9)).abs() < 1e-22);
        assert!((f.zeta_minus - 3e-9).abs() < 1e-22);
        assert!((f.zeta_z - 1.0).abs() < 1e-15);
    }

    #[test]
    fn composed_gauss_factors_equal_the_direct_map() {
        for (mu, tau) in [(0.7, 0.4), (0.7, -0.4), (-1.1, 0.3), (1e-9, 1e-9)] {
            let f = gauss_decompose(mu, tau, &policy()).unwrap();
            let composed = f.composed_map();
            let direct = build_eta2(mu, tau);
            assert!(
                max_matrix_distance(composed.matrix(), direct.matrix()) < 1e-12,
                "mu = {mu}, tau = {tau}"
            );
        }
    }

    #[test]
    fn gauss_factor_maps_match_their_generators() {
        let pol = policy();
        let f = gauss_decompose(0.8, -0.5, &pol).unwrap();
        for (map, generator) in [
            (f.minus_map(), eta2_generator(f.zeta_minus, 0.0)),
            (f.plus_map(), eta2_generator(0.0, f.zeta_plus)),
            (f.z_map(), f.z_generator()),
        ] {
            let oracle = bch_adjoint_oracle(&generator, 30);
            assert!(max_matrix_distance(map.matrix(), oracle.matrix()) < 1e-10);
        }
    }
}
