//! Weyl operators Ŵ(z) = e^{zâ − z*â†} in truncated Fock space and the
//! quasi-free transition semigroup
//!
//! ```text
//! T_t(Ŵ(z)) = exp(½(e^{−2gt} − 1)|z|²) · Ŵ(e^{−(g+iω)t} z)
//! ```
//!
//! of the noiseless (κ = 0) cavity.
//!
//! Under this sign convention the Weyl relation reads
//! Ŵ(f)Ŵ(h) = e^{−i Im⟨f,h⟩} Ŵ(f+h) with the inner product ⟨f,h⟩ = f·h*
//! linear in its first slot.
//!
//! A truncated â† cannot lift the top level, so every identity here fails
//! by O(1) on the highest Fock states regardless of the cutoff. Operator
//! distances are therefore measured with [`physical_norm`], the operator
//! norm of the block acting on the lower half of the basis, where
//! truncation effects vanish as the dimension grows.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{self, CavityParams, ComplexMatrix, FockDim};
use crate::lindblad::LindbladModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylLabel(pub Complex64);

/// `coefficient · Ŵ(label)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupImage {
    pub coefficient: f64,
    pub label: WeylLabel,
}

/// Number of levels entering [`physical_norm`] for a `dim`-level space.
pub fn physical_levels(dim: usize) -> usize {
    (dim / 2).max(1)
}

/// Operator norm of the upper-left block on levels n < dim/2.
pub fn physical_norm(m: &ComplexMatrix) -> f64 {
    let k = physical_levels(m.nrows().min(m.ncols()));
    fock::operator_norm(&m.view((0, 0), (k, k)).into_owned())
}

/// z·â − z*·â†.
fn weyl_generator(z: Complex64, dim: FockDim) -> ComplexMatrix {
    fock::annihilation(dim) * z - fock::creation(dim) * z.conj()
}

pub fn weyl_operator(z: Complex64, dim: FockDim) -> ComplexMatrix {
    fock::check_truncation(z, dim, "weyl_operator");
    weyl_generator(z, dim).exp()
}

/// e^{−i Im(f·h*)}.
pub fn ccr_phase(f: Complex64, h: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, -(f * h.conj()).im)
}

/// Physical-block distance between Ŵ(f)Ŵ(h) and e^{−i Im⟨f,h⟩}Ŵ(f+h).
pub fn ccr_residual(f: Complex64, h: Complex64, dim: FockDim) -> f64 {
    let lhs = weyl_operator(f, dim) * weyl_operator(h, dim);
    let rhs = weyl_operator(f + h, dim) * ccr_phase(f, h);
    physical_norm(&(lhs - rhs))
}

/// Quasi-free image of Ŵ(z) under the one-mode contraction z ↦ c·z:
/// coefficient exp(½(|cz|² − |z|²)).
pub fn quasi_free_image(contraction: Complex64, z: Complex64) -> SemigroupImage {
    let image = contraction * z;
    SemigroupImage {
        coefficient: (0.5 * (image.norm_sqr() - z.norm_sqr())).exp(),
        label: WeylLabel(image),
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Precondition(format!("t must be non-negative, got {t}")));
    }
    Ok(())
}

/// T_t(Ŵ(z)) on labels.
pub fn semigroup_on_label(z: Complex64, t: f64, params: &CavityParams) -> Result<SemigroupImage> {
    check_time(t)?;
    let factor = (-params.complex_rate() * t).exp();
    let label = factor * z;
    // ½(e^{−2gt} − 1)|z|², written with expm1 so that small t stays exact.
    let exponent = 0.5 * (-2.0 * params.g() * t).exp_m1() * z.norm_sqr();
    Ok(SemigroupImage {
        coefficient: exponent.exp(),
        label: WeylLabel(label),
    })
}

/// Mismatch between T_{t+s} and T_s ∘ T_t acting on Ŵ(z).
pub fn semigroup_law_residual(t: f64, s: f64, z: Complex64, params: &CavityParams) -> Result<f64> {
    let whole = semigroup_on_label(z, t + s, params)?;
    let first = semigroup_on_label(z, t, params)?;
    let second = semigroup_on_label(first.label.0, s, params)?;
    let coefficient = (whole.coefficient - first.coefficient * second.coefficient).abs();
    let label = (whole.label.0 - second.label.0).norm();
    Ok(coefficient + label)
}

/// `coefficient · Ŵ(label)` as a matrix.
pub fn semigroup_image_matrix(z: Complex64, t: f64, dim: FockDim, params: &CavityParams) -> Result<ComplexMatrix> {
    let img = semigroup_on_label(z, t, params)?;
    Ok(weyl_operator(img.label.0, dim) * Complex64::new(img.coefficient, 0.0))
}

/// Physical-block distance between Ŵ(z) evolved by the adjoint master
/// equation and the closed-form semigroup image. Only defined for κ = 0.
pub fn lindblad_channel_crosscheck(z: Complex64, t: f64, dim: FockDim, params: &CavityParams, dt: f64) -> Result<f64> {
    if params.kappa() != 0.0 {
        return Err(Error::Precondition(format!(
            "the Weyl semigroup image is only known in closed form for kappa = 0, got {}",
            params.kappa()
        )));
    }
    check_time(t)?;
    let model = LindbladModel::new(*params, dim);
    let evolved = model.evolve_observable(&weyl_operator(z, dim), t, dt)?;
    let closed = semigroup_image_matrix(z, t, dim, params)?;
    Ok(physical_norm(&(evolved - closed)))
}

/// T_t(Ŵ(z)) continued to independent z and z̄ = w:
/// exp(½(e^{−2gt} − 1) z w) · exp(λ z â − λ* w â†), λ = e^{−(g+iω)t}.
/// Equals [`semigroup_image_matrix`] when w = z*.
pub fn semigroup_image_continued(
    z: Complex64,
    w: Complex64,
    t: f64,
    dim: FockDim,
    params: &CavityParams,
) -> Result<ComplexMatrix> {
    check_time(t)?;
    let lambda = (-params.complex_rate() * t).exp();
    let coefficient = (0.5 * (-2.0 * params.g() * t).exp_m1() * z * w).exp();
    let gen = fock::annihilation(dim) * (lambda * z) - fock::creation(dim) * (lambda.conj() * w);
    Ok(gen.exp() * coefficient)
}

/// Recovers â(t) = ∂_z T_t(Ŵ(z))|₀ and â†(t) = −∂_{z̄} T_t(Ŵ(z))|₀ by
/// central differences of step `h` in each Wirtinger variable.
pub fn recover_ladder(t: f64, dim: FockDim, params: &CavityParams, h: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !(1e-4..=1e-2).contains(&h) {
        return Err(Error::Precondition(format!(
            "finite-difference step {h} outside [1e-4, 1e-2]"
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    let step = Complex64::new(h, 0.0);
    let inv = Complex64::new(0.5 / h, 0.0);
    let image = |z, w| semigroup_image_continued(z, w, t, dim, params);
    let a_t = (image(step, zero)? - image(-step, zero)?) * inv;
    let adag_t = (image(zero, -step)? - image(zero, step)?) * inv;
    Ok((a_t, adag_t))
}
