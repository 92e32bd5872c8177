//! Quadratic operators on two-dimensional phase space and the linear
//! canonical maps that transform them.
//!
//! The canonical operators are ordered z = (x, y, p_x, p_y). A quadratic
//! Hamiltonian is kept in Weyl (symmetrised) ordering,
//!
//! ```text
//! H = Σ_jk M_jk · ½(z_j z_k + z_k z_j) + shift,     M = Mᵀ,
//! ```
//!
//! because symmetrised forms transform covariantly under linear canonical
//! maps: if η z_j η⁻¹ = Σ_k S_jk z_k then η H η⁻¹ has coefficient matrix
//! Sᵀ M S and the shift is untouched — no ordering anomaly appears.
//!
//! A map is admissible when it preserves the canonical commutators, i.e.
//! S C Sᵀ = C with C the commutation matrix C_jk = [z_j, z_k]/i. Every
//! closed-form map in this crate is cross-checked against
//! [`bch_adjoint_oracle`], a truncated Baker–Campbell–Hausdorff series
//! e^G z e^{−G} = z + [G, z] + ½[G, [G, z]] + ⋯ which for quadratic G
//! reduces to the matrix exponential of ad_G restricted to the span of z.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

/// Index of x in the phase basis.
pub const X: usize = 0;
/// Index of y.
pub const Y: usize = 1;
/// Index of p_x.
pub const PX: usize = 2;
/// Index of p_y.
pub const PY: usize = 3;

/// Fixed ordering of the canonical operators with their commutation matrix.
#[derive(Debug, Clone, Copy)]
pub struct PhaseBasis;

impl PhaseBasis {
    /// Commutation matrix C with C_jk = [z_j, z_k]/i: C₁₃ = C₂₄ = 1,
    /// C₃₁ = C₄₂ = −1, all other entries zero.
    pub fn commutation_matrix() -> Matrix4<Complex64> {
        let mut c = Matrix4::zeros();
        let one = Complex64::new(1.0, 0.0);
        c[(X, PX)] = one;
        c[(Y, PY)] = one;
        c[(PX, X)] = -one;
        c[(PY, Y)] = -one;
        c
    }

    /// Parity signs under P: x → −x, y → −y, p_x → p_x, p_y → p_y.
    pub fn parity_signs() -> [f64; 4] {
        [-1.0, -1.0, 1.0, 1.0]
    }
}

/// A quadratic operator in Weyl ordering: symmetric coefficient matrix over
/// (x, y, p_x, p_y) plus a scalar shift.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylQuadraticForm {
    matrix: Matrix4<Complex64>,
    shift: Complex64,
}

impl WeylQuadraticForm {
    /// Builds a form from an arbitrary coefficient matrix; the matrix is
    /// symmetrised exactly so the invariant M = Mᵀ holds bit-for-bit.
    pub fn new(matrix: Matrix4<Complex64>, shift: Complex64) -> Self {
        let sym = (matrix + matrix.transpose()).scale(0.5);
        Self { matrix: sym, shift }
    }

    /// The zero operator.
    pub fn zero() -> Self {
        Self {
            matrix: Matrix4::zeros(),
            shift: Complex64::new(0.0, 0.0),
        }
    }

    /// Builds a form from terms (j, k, c), each meaning c·½(z_j z_k + z_k z_j).
    pub fn from_terms(terms: &[(usize, usize, Complex64)]) -> Self {
        let mut m = Matrix4::zeros();
        for &(j, k, c) in terms {
            if j == k {
                m[(j, j)] += c;
            } else {
                m[(j, k)] += c * 0.5;
                m[(k, j)] += c * 0.5;
            }
        }
        Self {
            matrix: m,
            shift: Complex64::new(0.0, 0.0),
        }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    /// Total weight carried by the symmetrised product of z_j and z_k:
    /// M_jj on the diagonal, 2·M_jk off it (both M_jk and M_kj contribute).
    pub fn coefficient(&self, j: usize, k: usize) -> Complex64 {
        if j == k {
            self.matrix[(j, j)]
        } else {
            self.matrix[(j, k)] * 2.0
        }
    }

    /// Largest imaginary part over coefficients and shift. With Weyl
    /// ordering and a Hermitian operator every coefficient is real, so this
    /// is the Hermiticity residual.
    pub fn hermiticity_residual(&self) -> f64 {
        let m = self
            .matrix
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0f64, f64::max);
        m.max(self.shift.im.abs())
    }

    /// True when every coefficient and the shift are real within tolerance.
    pub fn is_hermitian(&self, policy: &NumericPolicy) -> bool {
        self.hermiticity_residual() <= policy.construction_tol.max(policy.region_tol)
    }

    /// Residual of PT symmetry: P·conj(M)·P = M with P = diag(−1, −1, 1, 1)
    /// and conj(shift) = shift.
    pub fn pt_residual(&self) -> f64 {
        let p = PhaseBasis::parity_signs();
        let mut worst = (self.shift.conj() - self.shift).norm();
        for j in 0..4 {
            for k in 0..4 {
                let image = self.matrix[(j, k)].conj() * p[j] * p[k];
                worst = worst.max((image - self.matrix[(j, k)]).norm());
            }
        }
        worst
    }

    /// True when the form is PT-symmetric within tolerance.
    pub fn is_pt_symmetric(&self, policy: &NumericPolicy) -> bool {
        self.pt_residual() <= policy.construction_tol.max(policy.region_tol)
    }
}

/// Sign of an eigenvalue relative to the classification tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of(x: f64, tol: f64) -> Self {
        if x > tol {
            Sign::Positive
        } else if x < -tol {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Definiteness class of a real symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Semidefinite,
}

/// Eigenvalue-based classification of a Hermitian quadratic form.
#[derive(Debug, Clone)]
pub struct DefinitenessReport {
    /// Eigenvalues of the momentum–momentum 2×2 block, ascending.
    pub kinetic_eigenvalues: [f64; 2],
    /// Signs of the kinetic eigenvalues; (+, −) marks a ghost.
    pub kinetic_signature: [Sign; 2],
    /// Eigenvalues of the full real 4×4 coefficient matrix, ascending.
    pub eigenvalues: [f64; 4],
    /// Classification of the full form.
    pub definiteness: Definiteness,
}

impl DefinitenessReport {
    /// A mixed-sign kinetic block signals a ghostly degree of freedom.
    pub fn is_ghostly(&self) -> bool {
        self.kinetic_signature.contains(&Sign::Positive)
            && self.kinetic_signature.contains(&Sign::Negative)
    }
}

/// Classifies the kinetic signature and overall definiteness of a Hermitian
/// form. Fails on non-Hermitian input.
pub fn classify_definiteness(
    form: &WeylQuadraticForm,
    policy: &NumericPolicy,
) -> Result<DefinitenessReport> {
    let residual = form.hermiticity_residual();
    if !form.is_hermitian(policy) {
        return Err(Error::NonHermitian { residual });
    }
    let real = form.matrix().map(|z| z.re);

    let kinetic = real.fixed_view::<2, 2>(PX, PX).into_owned();
    let mut kin: Vec<f64> = kinetic.symmetric_eigen().eigenvalues.iter().copied().collect();
    kin.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let kinetic_eigenvalues = [kin[0], kin[1]];
    let kinetic_signature = [
        Sign::of(kin[0], policy.region_tol),
        Sign::of(kin[1], policy.region_tol),
    ];

    let mut full: Vec<f64> = real.symmetric_eigen().eigenvalues.iter().copied().collect();
    full.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eigenvalues = [full[0], full[1], full[2], full[3]];
    let signs: Vec<Sign> = full.iter().map(|&e| Sign::of(e, policy.region_tol)).collect();
    let definiteness = if signs.iter().all(|&s| s == Sign::Positive) {
        Definiteness::PositiveDefinite
    } else if signs.iter().all(|&s| s == Sign::Negative) {
        Definiteness::NegativeDefinite
    } else if signs.contains(&Sign::Positive) && signs.contains(&Sign::Negative) {
        Definiteness::Indefinite
    } else {
        Definiteness::Semidefinite
    };

    Ok(DefinitenessReport {
        kinetic_eigenvalues,
        kinetic_signature,
        eigenvalues,
        definiteness,
    })
}

/// A linear canonical map S with η z_j η⁻¹ = Σ_k S_jk z_k.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalMap {
    matrix: Matrix4<Complex64>,
}

impl CanonicalMap {
    /// The identity map.
    pub fn identity() -> Self {
        Self {
            matrix: Matrix4::identity(),
        }
    }

    /// Builds a map after verifying the symplectic condition S C Sᵀ = C.
    pub fn new(matrix: Matrix4<Complex64>, policy: &NumericPolicy) -> Result<Self> {
        let map = Self { matrix };
        let residual = map.symplectic_residual();
        if residual > policy.construction_tol {
            return Err(Error::NonSymplectic {
                residual,
                tol: policy.construction_tol,
            });
        }
        Ok(map)
    }

    /// Builds a map without the symplectic check. Reserved for series
    /// truncations and test scaffolding; [`transform_quadratic`] re-checks
    /// the residual before use.
    pub fn from_matrix_unchecked(matrix: Matrix4<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    /// ‖S C Sᵀ − C‖_max.
    pub fn symplectic_residual(&self) -> f64 {
        let c = PhaseBasis::commutation_matrix();
        let delta = self.matrix * c * self.matrix.transpose() - c;
        delta.iter().map(|z| z.norm()).fold(0.0f64, f64::max)
    }

    /// Composition: acting first with `self`'s operator, then with
    /// `second`'s. Operator product η₂η₁ composes matrices as S₁·S₂.
    pub fn then(&self, second: &CanonicalMap) -> CanonicalMap {
        CanonicalMap {
            matrix: self.matrix * second.matrix,
        }
    }
}

/// Composes two maps: the result encodes acting first with `first`'s
/// operator, then with `second`'s.
pub fn compose_maps(second: &CanonicalMap, first: &CanonicalMap) -> CanonicalMap {
    first.then(second)
}

/// Conjugates a quadratic form by a canonical map: M ↦ Sᵀ M S, shift
/// unchanged. Rejects maps that fail the symplectic residual bound.
pub fn transform_quadratic(
    map: &CanonicalMap,
    form: &WeylQuadraticForm,
    policy: &NumericPolicy,
) -> Result<WeylQuadraticForm> {
    let residual = map.symplectic_residual();
    if residual > policy.construction_tol {
        return Err(Error::NonSymplectic {
            residual,
            tol: policy.construction_tol,
        });
    }
    let m = map.matrix.transpose() * form.matrix() * map.matrix;
    Ok(WeylQuadraticForm::new(m, form.shift()))
}

/// ad_G restricted to the linear span of z: since [G, z_j] is linear in z
/// for quadratic G, the bracket acts as the 4×4 matrix −2i C G.
pub fn adjoint_matrix(generator: &WeylQuadraticForm) -> Matrix4<Complex64> {
    let c = PhaseBasis::commutation_matrix();
    -(c * generator.matrix()).scale(2.0) * Complex64::i()
}

/// Truncated BCH series Σ_{k≤K} ad_G^k/k! acting on the span of z.
///
/// Serves as the independent ground truth for every closed-form map in the
/// crate; the generator's shift commutes with everything and is ignored.
pub fn bch_adjoint_oracle(generator: &WeylQuadraticForm, order: usize) -> CanonicalMap {
    let ad = adjoint_matrix(generator);
    let mut sum = Matrix4::identity();
    let mut term = Matrix4::identity();
    for k in 1..=order {
        term = term * ad / Complex64::new(k as f64, 0.0);
        sum += term;
    }
    CanonicalMap::from_matrix_unchecked(sum)
}

/// Largest entrywise distance between two 4×4 coefficient matrices.
pub fn max_matrix_distance(a: &Matrix4<Complex64>, b: &Matrix4<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0f64, f64::max)
}
