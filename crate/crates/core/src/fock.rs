//! Truncated Fock-space linear algebra for a single bosonic mode.
//!
//! The basis is |0⟩ … |n−1⟩. Operators are dense complex matrices; the
//! dimensions used here stay in the low hundreds, so nothing is sparse.

use log::warn;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::composite::DensityOperator;
use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Number of retained Fock levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockDim(usize);

impl FockDim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for FockDim {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

/// Physical constants of the single-mode cavity.
///
/// `omega` is the mode frequency, `gamma_prime` the loss rate through the
/// partially transparent mirror and `kappa` the gain rate. The amplitude
/// damping is `g = (gamma_prime - kappa) / 2`, which must be positive
/// except in the closed-system diagnostic mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    omega: f64,
    gamma_prime: f64,
    kappa: f64,
    hbar: f64,
    mass: f64,
    closed: bool,
}

impl CavityParams {
    pub fn new(omega: f64, gamma_prime: f64, kappa: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidParams(format!("kappa must be non-negative, got {kappa}")));
        }
        if !(gamma_prime.is_finite() && gamma_prime > kappa) {
            return Err(Error::InvalidParams(format!(
                "need gamma' > kappa, got gamma'={gamma_prime}, kappa={kappa}"
            )));
        }
        Ok(Self {
            omega,
            gamma_prime,
            kappa,
            hbar: 1.0,
            mass: 1.0,
            closed: false,
        })
    }

    /// Lossless, gainless cavity (`gamma_prime = kappa = 0`, so `g = 0`).
    ///
    /// Only meant for unitary-limit regression checks; it bypasses the
    /// `g > 0` invariant and several operations (steady state, dilation)
    /// reject it.
    pub fn closed_system(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        Ok(Self {
            omega,
            gamma_prime: 0.0,
            kappa: 0.0,
            hbar: 1.0,
            mass: 1.0,
            closed: true,
        })
    }

    /// ω = 1, γ′ = 0.5, κ = 0.1, so g = 0.2.
    pub fn reference() -> Self {
        Self::new(1.0, 0.5, 0.1).expect("reference parameters are valid")
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParams(format!("hbar must be positive, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParams(format!("mass must be positive, got {mass}")));
        }
        self.mass = mass;
        Ok(self)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn is_closed_system(&self) -> bool {
        self.closed
    }

    /// Amplitude damping rate g = (γ′ − κ)/2.
    pub fn g(&self) -> f64 {
        0.5 * (self.gamma_prime - self.kappa)
    }

    /// g + iω, the complex rate of the mean amplitude.
    pub fn complex_rate(&self) -> Complex64 {
        Complex64::new(self.g(), self.omega)
    }
}

/// â with â|n⟩ = √n |n−1⟩.
pub fn annihilation(dim: FockDim) -> ComplexMatrix {
    let n = dim.get();
    let mut a = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// â† as the conjugate transpose of [`annihilation`].
pub fn creation(dim: FockDim) -> ComplexMatrix {
    annihilation(dim).adjoint()
}

/// â†â = diag(0, 1, …, n−1).
pub fn number_operator(dim: FockDim) -> ComplexMatrix {
    let n = dim.get();
    ComplexMatrix::from_diagonal(&DVector::from_fn(n, |k, _| Complex64::new(k as f64, 0.0)))
}

pub fn identity(dim: FockDim) -> ComplexMatrix {
    ComplexMatrix::identity(dim.get(), dim.get())
}

/// Coherent-state amplitudes e^{−|α|²/2} αⁿ/√n! cut off at `dim` levels,
/// before renormalization.
pub fn coherent_amplitudes(alpha: Complex64, dim: FockDim) -> StateVector {
    let n = dim.get();
    let mut c = StateVector::zeros(n);
    c[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for k in 1..n {
        c[k] = c[k - 1] * alpha / (k as f64).sqrt();
    }
    c
}

/// Emits a diagnostic when |α|² exceeds a quarter of the truncation.
pub(crate) fn check_truncation(alpha: Complex64, dim: FockDim, what: &str) {
    if alpha.norm_sqr() > dim.get() as f64 / 4.0 {
        warn!(
            "{what}: |alpha|^2 = {:.3} exceeds dim/4 = {:.3}; truncation error may be significant",
            alpha.norm_sqr(),
            dim.get() as f64 / 4.0
        );
    }
}

/// Truncated coherent state |α⟩, renormalized to unit norm.
pub fn coherent_state(alpha: Complex64, dim: FockDim) -> StateVector {
    check_truncation(alpha, dim, "coherent_state");
    let c = coherent_amplitudes(alpha, dim);
    let norm = c.norm();
    if norm < 0.999 {
        warn!("coherent_state: truncated norm {norm:.6} < 0.999 before renormalization");
    }
    c / Complex64::new(norm, 0.0)
}

fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn ensure_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Matrix exponential by scaling and squaring with Padé approximants.
pub fn matrix_exp(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(m)?;
    Ok(m.exp())
}

/// e^A for skew-Hermitian A through the eigendecomposition of the
/// Hermitian matrix iA. The result is unitary to working precision.
pub fn exp_skew_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(a)?;
    let h = a * I;
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    // A = −iH, so e^A = V diag(e^{−iλ}) V†.
    let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l));
    let v = &eig.eigenvectors;
    Ok(v * ComplexMatrix::from_diagonal(&phases) * v.adjoint())
}

/// tr(ρ·op).
pub fn expectation(op: &ComplexMatrix, rho: &DensityOperator) -> Result<Complex64> {
    ensure_square(op)?;
    ensure_same_dim(rho.dim(), op.nrows())?;
    Ok(trace_of_product(rho.matrix(), op))
}

/// tr(A·B) without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Max-abs entry of M − M†.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().min()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dim(n: usize) -> FockDim {
        FockDim::new(n).unwrap()
    }

    #[test]
    fn rejects_small_dimension() {
        assert_eq!(FockDim::new(1), Err(Error::InvalidDimension(1)));
        assert_eq!(FockDim::new(0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn annihilation_dim2() {
        let a = annihilation(dim(2));
        let expected = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert_eq!(a, expected);
        let ad = creation(dim(2));
        let expected = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)]);
        assert_eq!(ad, expected);
    }

    #[test]
    fn annihilation_dim3_entry() {
        let a = annihilation(dim(3));
        assert_eq!(a[(1, 2)], c(2f64.sqrt(), 0.0));
    }

    #[test]
    fn creation_is_adjoint_entrywise() {
        for n in 2..12 {
            let a = annihilation(dim(n));
            let ad = creation(dim(n));
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(ad[(i, j)], a[(j, i)].conj());
                }
            }
        }
    }

    #[test]
    fn truncated_commutator_diagonal() {
        for n in [2, 5, 17] {
            let d = dim(n);
            let comm = commutator(&annihilation(d), &creation(d));
            for k in 0..n - 1 {
                assert!((comm[(k, k)] - c(1.0, 0.0)).norm() < 1e-14);
            }
            assert!((comm[(n - 1, n - 1)] - c(-((n - 1) as f64), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn number_operator_from_product() {
        let d = dim(7);
        let n = creation(d) * annihilation(d);
        assert!((n - number_operator(d)).norm() < 1e-14);
    }

    #[test]
    fn vacuum_coherent_state() {
        let v = coherent_state(c(0.0, 0.0), dim(6));
        assert_eq!(v[0], c(1.0, 0.0));
        assert!(v.iter().skip(1).all(|x| *x == c(0.0, 0.0)));
    }

    #[test]
    fn coherent_state_eigenvalue() {
        let d = dim(30);
        let psi = coherent_state(c(1.0, 0.0), d);
        let a_psi = annihilation(d) * &psi;
        let mean = psi.dotc(&a_psi);
        assert!((mean - c(1.0, 0.0)).norm() < 1e-10, "{mean}");
    }

    #[test]
    fn coherent_norm_before_renormalization() {
        let raw = coherent_amplitudes(c(0.5, 0.0), dim(20));
        assert!((raw.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_unit_norm() {
        for (alpha, n) in [
            (c(0.3, 0.1), 10),
            (c(1.5, -0.7), 12),
            (c(2.0, 2.0), 8),
            (c(0.0, 3.0), 50),
        ] {
            let psi = coherent_state(alpha, dim(n));
            assert!((psi.norm() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(4, 4);
        assert_eq!(matrix_exp(&z).unwrap(), ComplexMatrix::identity(4, 4));
    }

    #[test]
    fn exp_of_diagonal_phase() {
        let m = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0, 0.0), c(0.0, std::f64::consts::PI)]));
        let e = matrix_exp(&m).unwrap();
        let expected = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!((e - expected).norm() < 1e-14);
    }

    #[test]
    fn exp_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert_eq!(matrix_exp(&m), Err(Error::NotSquare { rows: 2, cols: 3 }));
        assert!(exp_skew_hermitian(&m).is_err());
    }

    #[test]
    fn exp_group_inverse() {
        let d = dim(12);
        let m = (annihilation(d) * c(0.7, 0.2) + creation(d) * c(-0.1, 0.4)) + number_operator(d) * c(0.05, 0.3);
        let prod = matrix_exp(&m).unwrap() * matrix_exp(&(-&m)).unwrap();
        assert!((prod - ComplexMatrix::identity(12, 12)).norm() < 1e-10);
    }

    #[test]
    fn pade_and_eigen_routes_agree() {
        let d = dim(40);
        let z = c(0.4, -0.3);
        let gen = annihilation(d) * z - creation(d) * z.conj();
        let pade = matrix_exp(&gen).unwrap();
        let eig = exp_skew_hermitian(&gen).unwrap();
        assert!(operator_norm(&(pade - eig)) < 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let d = dim(20);
        let vac = DensityOperator::pure(&coherent_state(c(0.0, 0.0), d)).unwrap();
        assert!((expectation(&identity(d), &vac).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!(expectation(&number_operator(d), &vac).unwrap().norm() < 1e-14);
        let rho = DensityOperator::pure(&coherent_state(c(0.5, 0.0), d)).unwrap();
        let mean = expectation(&annihilation(d), &rho).unwrap();
        assert!((mean - c(0.5, 0.0)).norm() < 1e-8);
        assert!(matches!(
            expectation(&identity(dim(3)), &rho),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(CavityParams::new(1.0, 0.5, 0.1).is_ok());
        assert!(CavityParams::new(0.0, 0.5, 0.1).is_err());
        assert!(CavityParams::new(1.0, 0.1, 0.1).is_err());
        assert!(CavityParams::new(1.0, 0.5, -0.1).is_err());
        let p = CavityParams::reference();
        assert!((p.g() - 0.2).abs() < 1e-15);
        let closed = CavityParams::closed_system(1.0).unwrap();
        assert_eq!(closed.g(), 0.0);
        assert!(closed.is_closed_system());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn skew_hermitian(n: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
            let mut h = ComplexMatrix::zeros(n, n);
            let mut it = entries.iter();
            for i in 0..n {
                for j in i..n {
                    let &(re, im) = it.next().unwrap();
                    if i == j {
                        h[(i, i)] = c(re, 0.0);
                    } else {
                        h[(i, j)] = c(re, im);
                        h[(j, i)] = c(re, -im);
                    }
                }
            }
            h * c(0.0, 1.0)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn exp_inverse_skew_hermitian(
                n in 2usize..40,
                entries in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 820),
            ) {
                let a = skew_hermitian(n, &entries);
                let prod = matrix_exp(&a).unwrap() * matrix_exp(&(-&a)).unwrap();
                let err = operator_norm(&(prod - ComplexMatrix::identity(n, n)));
                prop_assert!(err < 1e-10, "n={} err={}", n, err);
            }

            #[test]
            fn coherent_unit_norm(re in -2.0f64..2.0, im in -2.0f64..2.0, n in 2usize..60) {
                let psi = coherent_state(c(re, im), dim(n));
                prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}
