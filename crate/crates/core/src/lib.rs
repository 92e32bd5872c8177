//! Ghost-free quantisation of a two-dimensional ghostly oscillator by
//! non-unitary similarity maps.
//!
//! The starting point is the Hermitian but ghostly Hamiltonian
//!
//! ```text
//! h₀ = p_x² − p_y² + ν² x² + Ω y² + g x y
//! ```
//!
//! whose (ε, η) = (1, 1) sector has a real spectrum bounded from below but
//! non-normalisable Gaussian eigenstates. Conjugating with the non-unitary
//! maps η₀ = exp(−δ/2 x² − λ/2 y²), η₁ = exp(κ/2 p_x² + ξ/2 p_y²) and
//! η₂ = exp(μ p_x p_y + τ x y) turns h₀ into an isospectral Hermitian
//! Hamiltonian whose ground state is normalisable in part of parameter
//! space; equivalently, the original states become normalisable under the
//! metric ρ = η†η.
//!
//! The crate is organised around the pipeline:
//!
//! * [`operator_algebra`] — quadratic operators on the phase space
//!   (x, y, p_x, p_y) in Weyl (symmetrised) ordering, linear canonical maps
//!   acting on them, and a Baker–Campbell–Hausdorff series oracle used as
//!   ground truth for every closed-form map.
//! * [`gaussian_states`] — Gaussian ground states, their transformation
//!   under each similarity factor, analytic eigen-residuals, norms and
//!   metric inner products.
//! * [`model`] — the concrete model: sector parameters, spectra, the maps
//!   η₀, η₁, η₂ with their hermitising parameter choices, the derived
//!   Hamiltonians H₁, H₂, h₃ and the constraint solvers.
//! * [`scan`] — λ-sweeps over the normalisability quantities, bisection on
//!   region boundaries, CSV output.

pub mod error;
pub mod gaussian_states;
pub mod model;
pub mod operator_algebra;
pub mod policy;
pub mod scan;
pub(crate) mod special;

pub use error::{Error, MaybeDivergent, Norm, Overlap, Result};
pub use policy::NumericPolicy;

use num_complex::Complex64;

/// Shorthand complex constructor.
#[inline]
pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
