//! Heisenberg-picture field and quadratures at the level of first and
//! second moments.
//!
//! The quadratures are expressed in units where the bracketed form
//!
//! ```text
//! Q(t) = e^{−gt}[Q cos ωt + P sin ωt /(mω)] + √κ e^{−gt} ∫₀ᵗ e^{gt′}[cos ω(t−t′) dη₁ + sin ω(t−t′) dη₂]
//! P(t) = e^{−gt}[P cos ωt − mω Q sin ωt]    + √κ e^{−gt} ∫₀ᵗ e^{gt′}[cos ω(t−t′) dη₂ − sin ω(t−t′) dη₁]
//! ```
//!
//! holds as written: the √(ħ/2mω) prefactor is applied once, outside the
//! bracket. With dη = ½(dη₁ + i dη₂), ⟨dη* dη⟩ = dt and ⟨dη dη⟩ = 0 force
//! ⟨dη₁²⟩ = ⟨dη₂²⟩ = 2dt and ⟨dη₁ dη₂⟩ = 0.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::CavityParams;
use crate::ou::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub t: f64,
    pub q_mean: f64,
    pub p_mean: f64,
    pub q_var: f64,
    pub p_var: f64,
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Precondition(format!("t must be non-negative, got {t}")));
    }
    Ok(())
}

/// Damped harmonic rotation of the initial quadratures.
pub fn quadrature_mean(t: f64, q0: f64, p0: f64, params: &CavityParams) -> Result<(f64, f64)> {
    check_time(t)?;
    let mw = params.mass() * params.omega();
    let decay = (-params.g() * t).exp();
    let (s, c) = (params.omega() * t).sin_cos();
    Ok((decay * (q0 * c + p0 / mw * s), decay * (p0 * c - mw * q0 * s)))
}

/// Variance of each quadrature's noise integral, (κ/g)(1 − e^{−2gt}).
pub fn quadrature_noise_variance(t: f64, params: &CavityParams) -> Result<(f64, f64)> {
    check_time(t)?;
    let g = params.g();
    let kappa = params.kappa();
    // Itô isometry: κ e^{−2gt} ∫₀ᵗ e^{2gt′}(cos² + sin²)·2 dt′.
    let v = if g == 0.0 {
        2.0 * kappa * t
    } else {
        kappa / g * (-(-2.0 * g * t).exp_m1())
    };
    Ok((v, v))
}

pub fn quadrature_moments(t: f64, q0: f64, p0: f64, params: &CavityParams) -> Result<QuadratureMoments> {
    let (q_mean, p_mean) = quadrature_mean(t, q0, p0, params)?;
    let (q_var, p_var) = quadrature_noise_variance(t, params)?;
    Ok(QuadratureMoments {
        t,
        q_mean,
        p_mean,
        q_var,
        p_var,
    })
}

/// ⟨â(t)⟩ from the quadrature rotation, e^{−gt}(cos ωt − i sin ωt)·⟨â(0)⟩.
pub fn field_mean(t: f64, a0_mean: Complex64, params: &CavityParams) -> Result<Complex64> {
    check_time(t)?;
    let decay = (-params.g() * t).exp();
    let (s, c) = (params.omega() * t).sin_cos();
    let (re, im) = (a0_mean.re, a0_mean.im);
    Ok(Complex64::new(decay * (re * c + im * s), decay * (im * c - re * s)))
}

/// Monte Carlo estimate of the quadrature noise variances, simulating the
/// discretized integrals with classical Gaussians dη₁, dη₂ ~ N(0, 2dt).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseEstimate {
    pub q_var: f64,
    pub p_var: f64,
    pub q_var_std_error: f64,
    pub p_var_std_error: f64,
}

pub fn noise_variance_monte_carlo(
    t: f64,
    params: &CavityParams,
    n_steps: usize,
    n_paths: usize,
    seed: RngSeed,
) -> Result<NoiseEstimate> {
    check_time(t)?;
    if n_steps == 0 || n_paths < 2 {
        return Err(Error::InvalidConfig("need n_steps >= 1 and n_paths >= 2".into()));
    }
    let dt = t / n_steps as f64;
    let sd = (2.0 * dt).sqrt();
    let (g, omega, root_kappa) = (params.g(), params.omega(), params.kappa().sqrt());
    // Midpoint weights e^{g(t′−t)} cos/sin ω(t−t′).
    let weights: Vec<(f64, f64, f64)> = (0..n_steps)
        .map(|k| {
            let tp = (k as f64 + 0.5) * dt;
            let (s, c) = (omega * (t - tp)).sin_cos();
            ((g * (tp - t)).exp(), c, s)
        })
        .collect();

    let samples: Vec<(f64, f64)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed.stream(k);
            let (mut q, mut p) = (0.0, 0.0);
            for &(w, c, s) in &weights {
                let d1: f64 = sd * rng.sample::<f64, _>(StandardNormal);
                let d2: f64 = sd * rng.sample::<f64, _>(StandardNormal);
                q += w * (c * d1 + s * d2);
                p += w * (c * d2 - s * d1);
            }
            (root_kappa * q, root_kappa * p)
        })
        .collect();

    let n = n_paths as f64;
    let moments = |pick: fn(&(f64, f64)) -> f64| {
        let mean = samples.iter().map(pick).sum::<f64>() / n;
        let (mut m2, mut m4) = (0.0, 0.0);
        for s in &samples {
            let d = (pick(s) - mean).powi(2);
            m2 += d;
            m4 += d * d;
        }
        let var = m2 / (n - 1.0);
        let biased = m2 / n;
        (var, ((m4 / n - biased * biased).max(0.0) / n).sqrt())
    };
    let (q_var, q_se) = moments(|s| s.0);
    let (p_var, p_se) = moments(|s| s.1);
    Ok(NoiseEstimate {
        q_var,
        p_var,
        q_var_std_error: q_se,
        p_var_std_error: p_se,
    })
}
