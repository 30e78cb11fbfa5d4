#![allow(dead_code)]

use cavity_core::fock::ComplexMatrix;
use cavity_core::Complex64;
use rand::Rng;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// κ e^{−2gt} ∫₀ᵗ e^{2gt′} dt′ by quadrature.
pub fn variance_by_quadrature(kappa: f64, g: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let n = 2 * ((t * 2000.0).ceil() as usize).max(50);
    kappa * (-2.0 * g * t).exp() * simpson(|s| (2.0 * g * s).exp(), 0.0, t, n)
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let m = random_matrix(rng, n);
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random density matrix M M† / tr.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let m = random_matrix(rng, n);
    let p = &m * m.adjoint();
    let tr = p.trace();
    p / tr
}

/// Haar-ish random unitary: exponential of a random anti-Hermitian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, n) * Complex64::new(0.0, 2.0);
    h.exp()
}

/// Orthogonal projector onto the span of `k` random vectors.
pub fn random_projector<R: Rng>(rng: &mut R, n: usize, k: usize) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(n, k, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let q = m.qr().q();
    &q * q.adjoint()
}
