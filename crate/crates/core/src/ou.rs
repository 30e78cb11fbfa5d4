//! Classical side of the cavity: the complex Ornstein–Uhlenbeck process
//!
//! ```text
//! dα = −(g + iω) α dt + √κ dη,    ⟨dη* dη⟩ = dt,  ⟨dη dη⟩ = 0
//! ```
//!
//! obeyed by the P-function amplitude. Paths are generated either with
//! Euler–Maruyama or with the exact Gaussian transition, and every path owns
//! its own RNG stream so ensembles are bitwise reproducible for any thread
//! count.
//!
//! RNG provenance: trajectory `k` of master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `k`. Normal deviates
//! come from `rand_distr::StandardNormal` (ziggurat); the real part of each
//! complex increment is drawn before the imaginary part.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::CavityParams;
use crate::lindblad::IntegratorConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Independent stream for trajectory `index`.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    EulerMaruyama,
    Exact,
}

/// Complex Wiener increment with independent N(0, dt/2) real and imaginary
/// parts.
pub fn wiener_increment<R: Rng + ?Sized>(rng: &mut R, dt: f64) -> Result<Complex64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
    }
    Ok(complex_gaussian(rng, 0.5 * dt))
}

/// Circular complex Gaussian with ⟨|ζ|²⟩ = 2·`half_variance`.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, half_variance: f64) -> Complex64 {
    let s = half_variance.sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// One Euler–Maruyama step α − (g + iω)α·dt + √κ·dη.
pub fn em_step(alpha: Complex64, dt: f64, deta: Complex64, params: &CavityParams) -> Complex64 {
    alpha - params.complex_rate() * alpha * dt + params.kappa().sqrt() * deta
}

/// e^{−(g+iω)t}·α₀.
pub fn analytic_mean(alpha0: Complex64, t: f64, params: &CavityParams) -> Complex64 {
    (-params.complex_rate() * t).exp() * alpha0
}

/// (κ/2g)(1 − e^{−2gt}), the variance ⟨|α − ⟨α⟩|²⟩ of the process started
/// from a point.
pub fn analytic_variance(t: f64, params: &CavityParams) -> f64 {
    let g = params.g();
    let kappa = params.kappa();
    if g == 0.0 {
        return kappa * t;
    }
    kappa / (2.0 * g) * (-(-2.0 * g * t).exp_m1())
}

/// (κ/g)(1 − e^{−gt}). Reported next to [`analytic_variance`] for comparison
/// only; it is not the variance of the process.
pub fn printed_variance(t: f64, params: &CavityParams) -> f64 {
    let g = params.g();
    let kappa = params.kappa();
    if g == 0.0 {
        return kappa * t;
    }
    kappa / g * (-(-g * t).exp_m1())
}

/// Draws α(t) from the exact transition law starting at α₀.
pub fn exact_sample<R: Rng + ?Sized>(
    alpha0: Complex64,
    t: f64,
    rng: &mut R,
    params: &CavityParams,
) -> Result<Complex64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Precondition(format!("t must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(alpha0);
    }
    let mean = analytic_mean(alpha0, t, params);
    let var = analytic_variance(t, params);
    if var == 0.0 {
        return Ok(mean);
    }
    Ok(mean + complex_gaussian(rng, 0.5 * var))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Arc<[f64]>,
    pub values: Vec<Complex64>,
    pub seed: RngSeed,
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub trajectories: Vec<Trajectory>,
    pub params: CavityParams,
}

impl Ensemble {
    pub fn times(&self) -> &[f64] {
        self.trajectories.first().map(|t| &t.times[..]).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }
}

fn simulate_one(
    alpha0: Complex64,
    cfg: &IntegratorConfig,
    times: &Arc<[f64]>,
    seed: RngSeed,
    index: u64,
    params: &CavityParams,
    method: Method,
) -> Trajectory {
    let mut rng = seed.stream(index);
    let mut values = Vec::with_capacity(times.len());
    values.push(alpha0);
    let mut alpha = alpha0;
    let mut t = 0.0;
    let mut step = 0usize;
    for &t_next in times.iter().skip(1) {
        match method {
            Method::Exact => {
                alpha = exact_sample(alpha, t_next - t, &mut rng, params).expect("increasing grid");
            }
            Method::EulerMaruyama => {
                // Sub-steps of dt between records; the last one may be short.
                let mut t_cur = t;
                while t_cur < t_next {
                    step += 1;
                    let target = (step as f64 * cfg.dt).min(t_next);
                    let target = if (t_next - target).abs() <= 1e-9 * cfg.dt {
                        t_next
                    } else {
                        target
                    };
                    let h = target - t_cur;
                    let deta = complex_gaussian(&mut rng, 0.5 * h);
                    alpha = em_step(alpha, h, deta, params);
                    t_cur = target;
                }
            }
        }
        t = t_next;
        values.push(alpha);
    }
    Trajectory {
        times: Arc::clone(times),
        values,
        seed,
        index,
    }
}

/// Samples `n_traj` paths on the record grid of `cfg`.
///
/// Paths are generated in parallel on the current rayon pool; trajectory `k`
/// only ever touches stream `k`, so the result does not depend on the
/// schedule.
pub fn simulate_ensemble(
    alpha0: Complex64,
    cfg: &IntegratorConfig,
    n_traj: usize,
    seed: RngSeed,
    params: &CavityParams,
    method: Method,
) -> Result<Ensemble> {
    cfg.validate()?;
    if n_traj == 0 {
        return Err(Error::InvalidConfig("n_traj must be at least 1".into()));
    }
    let times: Arc<[f64]> = cfg.record_times().into();
    let trajectories = (0..n_traj as u64)
        .into_par_iter()
        .map(|k| simulate_one(alpha0, cfg, &times, seed, k, params, method))
        .collect();
    Ok(Ensemble {
        trajectories,
        params: *params,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointStats {
    pub t: f64,
    pub mean: Complex64,
    /// Unbiased estimate of ⟨|α − ⟨α⟩|²⟩.
    pub variance: f64,
    pub mean_std_error: f64,
    pub variance_std_error: f64,
}

/// Per-time sample statistics.
///
/// Sums run sequentially in trajectory order. The standard error of the
/// variance uses the sample fourth central moment, √((m₄ − s⁴)/N).
pub fn ensemble_stats(ens: &Ensemble) -> Result<Vec<PointStats>> {
    if ens.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = ens.len();
    let nf = n as f64;
    let times = ens.times();
    let stats = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mean = ens.trajectories.iter().map(|tr| tr.values[i]).sum::<Complex64>() / nf;
            let (mut m2, mut m4) = (0.0, 0.0);
            for tr in &ens.trajectories {
                let d = (tr.values[i] - mean).norm_sqr();
                m2 += d;
                m4 += d * d;
            }
            let (variance, mean_se, var_se) = if n > 1 {
                let variance = m2 / (nf - 1.0);
                let m4 = m4 / nf;
                let biased = m2 / nf;
                (
                    variance,
                    (variance / nf).sqrt(),
                    ((m4 - biased * biased).max(0.0) / nf).sqrt(),
                )
            } else {
                (0.0, 0.0, 0.0)
            };
            PointStats {
                t,
                mean,
                variance,
                mean_std_error: mean_se,
                variance_std_error: var_se,
            }
        })
        .collect();
    Ok(stats)
}

/// First and second moments of the P-function: ⟨α⟩ and ⟨|α|²⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub m1: Complex64,
    pub m2: f64,
}

impl MomentState {
    pub fn new(m1: Complex64, m2: f64) -> Result<Self> {
        if m2 < m1.norm_sqr() - 1e-12 {
            return Err(Error::Precondition(format!("m2={m2} below |m1|^2={}", m1.norm_sqr())));
        }
        Ok(Self { m1, m2 })
    }

    /// Point mass at α₀.
    pub fn deterministic(alpha0: Complex64) -> Self {
        Self {
            m1: alpha0,
            m2: alpha0.norm_sqr(),
        }
    }

    pub fn central_variance(&self) -> f64 {
        self.m2 - self.m1.norm_sqr()
    }

    /// Time derivative under the Fokker–Planck generator:
    /// d⟨α⟩/dt = −(g+iω)⟨α⟩, d⟨|α|²⟩/dt = −2g⟨|α|²⟩ + κ.
    pub fn derivative(&self, params: &CavityParams) -> (Complex64, f64) {
        (
            -params.complex_rate() * self.m1,
            -2.0 * params.g() * self.m2 + params.kappa(),
        )
    }
}

/// Closed-form solution of the moment equations.
pub fn moment_ode_evolve(m0: MomentState, t: f64, params: &CavityParams) -> Result<MomentState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Precondition(format!("t must be non-negative, got {t}")));
    }
    let g = params.g();
    let decay = (-2.0 * g * t).exp();
    let forced = if g == 0.0 {
        params.kappa() * t
    } else {
        params.kappa() / (2.0 * g) * (-(-2.0 * g * t).exp_m1())
    };
    Ok(MomentState {
        m1: (-params.complex_rate() * t).exp() * m0.m1,
        m2: decay * m0.m2 + forced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reference() -> CavityParams {
        CavityParams::reference()
    }

    #[test]
    fn wiener_increment_rejects_bad_dt() {
        let mut rng = RngSeed(1).stream(0);
        assert!(wiener_increment(&mut rng, 0.0).is_err());
        assert!(wiener_increment(&mut rng, -1.0).is_err());
    }

    #[test]
    fn wiener_increment_covariances() {
        let dt = 0.01;
        let n = 1_000_000;
        let mut rng = RngSeed(2024).stream(0);
        let (mut sum, mut abs2, mut sq) = (c(0.0, 0.0), 0.0, c(0.0, 0.0));
        for _ in 0..n {
            let d = wiener_increment(&mut rng, dt).unwrap();
            sum += d;
            abs2 += d.norm_sqr();
            sq += d * d;
        }
        let nf = n as f64;
        let mean = sum / nf;
        // E|mean|² = dt/N; 4σ on the modulus.
        assert!(mean.norm() < 4.0 * (dt / nf).sqrt(), "{mean}");
        assert!((abs2 / nf - dt).abs() < 0.01 * dt);
        // ⟨dη dη⟩: each component of d² has variance dt²/2.
        let sigma = (dt * dt / 2.0 / nf).sqrt();
        assert!((sq / nf).norm() < 4.0 * sigma * 2f64.sqrt());
    }

    #[test]
    fn em_step_examples() {
        let p = reference();
        let deta = c(0.3, -0.7);
        let no_noise = CavityParams::new(1.0, 0.4, 0.0).unwrap();
        let alpha = c(0.8, 0.1);
        let expected = alpha * (c(1.0, 0.0) - no_noise.complex_rate() * 0.05);
        assert!((em_step(alpha, 0.05, deta, &no_noise) - expected).norm() < 1e-16);
        assert_eq!(em_step(c(0.0, 0.0), 0.01, c(0.0, 0.0), &p), c(0.0, 0.0));
        let out = em_step(c(1.0, 0.0), 0.01, c(0.0, 0.0), &p);
        assert!((out - c(0.998, -0.01)).norm() < 1e-15);
    }

    #[test]
    fn exact_sample_edge_cases() {
        let p = reference();
        let mut rng = RngSeed(7).stream(3);
        assert_eq!(exact_sample(c(0.3, 0.4), 0.0, &mut rng, &p).unwrap(), c(0.3, 0.4));
        assert!(exact_sample(c(0.3, 0.4), -1.0, &mut rng, &p).is_err());
        let quiet = CavityParams::new(1.0, 0.4, 0.0).unwrap();
        let got = exact_sample(c(1.0, 0.0), 2.0, &mut rng, &quiet).unwrap();
        assert_eq!(got, analytic_mean(c(1.0, 0.0), 2.0, &quiet));
    }

    #[test]
    fn analytic_mean_examples() {
        let p = reference();
        assert_eq!(analytic_mean(c(0.2, 0.1), 0.0, &p), c(0.2, 0.1));
        assert_eq!(analytic_mean(c(0.0, 0.0), 3.0, &p), c(0.0, 0.0));
        let m = analytic_mean(c(1.0, 0.0), 5.0, &p);
        let expected = c((-1f64).exp() * 5f64.cos(), -(-1f64).exp() * 5f64.sin());
        assert!((m - expected).norm() < 1e-15);
        assert!((m.re - 0.1043).abs() < 1e-4 && (m.im - 0.3528).abs() < 1e-4);
    }

    #[test]
    fn analytic_variance_examples() {
        let p = reference();
        assert_eq!(analytic_variance(0.0, &p), 0.0);
        assert!((analytic_variance(2.0, &p) - 0.25 * (1.0 - (-0.8f64).exp())).abs() < 1e-15);
        assert!((analytic_variance(2.0, &p) - 0.13767).abs() < 1e-5);
        assert!((analytic_variance(1e3, &p) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn variance_monotone_and_bounded() {
        let p = reference();
        let mut prev = 0.0;
        for k in 0..2000 {
            let v = analytic_variance(k as f64 * 0.05, &p);
            assert!(v >= prev && v <= 0.25);
            prev = v;
        }
    }

    #[test]
    fn single_noiseless_exact_trajectory() {
        let p = CavityParams::new(1.0, 0.4, 0.0).unwrap();
        let cfg = IntegratorConfig::new(0.1, 2.0, 1).unwrap();
        let ens = simulate_ensemble(c(1.0, 0.0), &cfg, 1, RngSeed(5), &p, Method::Exact).unwrap();
        assert_eq!(ens.len(), 1);
        for (t, v) in ens.times().iter().zip(&ens.trajectories[0].values) {
            assert!((v - analytic_mean(c(1.0, 0.0), *t, &p)).norm() < 1e-14);
        }
    }

    #[test]
    fn same_seed_same_ensemble() {
        let p = reference();
        let cfg = IntegratorConfig::new(0.01, 1.0, 10).unwrap();
        for method in [Method::Exact, Method::EulerMaruyama] {
            let a = simulate_ensemble(c(0.5, 0.0), &cfg, 64, RngSeed(99), &p, method).unwrap();
            let b = simulate_ensemble(c(0.5, 0.0), &cfg, 64, RngSeed(99), &p, method).unwrap();
            assert_eq!(a, b);
            let other = simulate_ensemble(c(0.5, 0.0), &cfg, 64, RngSeed(100), &p, method).unwrap();
            assert_ne!(a, other);
        }
    }

    #[test]
    fn rejects_empty_request() {
        let cfg = IntegratorConfig::new(0.01, 1.0, 1).unwrap();
        assert!(simulate_ensemble(c(0.0, 0.0), &cfg, 0, RngSeed(0), &reference(), Method::Exact).is_err());
    }

    #[test]
    fn stats_hand_examples() {
        let times: Arc<[f64]> = vec![0.0, 1.0].into();
        let traj = |vals: Vec<Complex64>, index| Trajectory {
            times: Arc::clone(&times),
            values: vals,
            seed: RngSeed(0),
            index,
        };
        let constant = Ensemble {
            trajectories: vec![traj(vec![c(0.3, 0.2), c(0.3, 0.2)], 0)],
            params: reference(),
        };
        let s = ensemble_stats(&constant).unwrap();
        assert_eq!(s[1].variance, 0.0);
        assert_eq!(s[1].mean, c(0.3, 0.2));

        let pair = Ensemble {
            trajectories: vec![
                traj(vec![c(0.0, 0.0), c(1.0, 0.0)], 0),
                traj(vec![c(0.0, 0.0), c(-1.0, 0.0)], 1),
            ],
            params: reference(),
        };
        let s = ensemble_stats(&pair).unwrap();
        assert_eq!(s[1].mean, c(0.0, 0.0));
        assert_eq!(s[1].variance, 2.0);

        let empty = Ensemble {
            trajectories: vec![],
            params: reference(),
        };
        assert_eq!(ensemble_stats(&empty), Err(Error::EmptyEnsemble));
    }

    #[test]
    fn moment_evolution_examples() {
        let p = reference();
        let m0 = MomentState::new(c(0.3, -0.2), 0.5).unwrap();
        assert_eq!(moment_ode_evolve(m0, 0.0, &p).unwrap(), m0);

        let fixed = MomentState::new(c(0.0, 0.0), 0.25).unwrap();
        for t in [0.5, 3.0, 40.0] {
            let m = moment_ode_evolve(fixed, t, &p).unwrap();
            assert!(m.m1.norm() == 0.0 && (m.m2 - 0.25).abs() < 1e-15);
        }

        let alpha0 = c(0.7, 0.4);
        for t in [0.1, 1.0, 2.0, 5.0, 30.0] {
            let m = moment_ode_evolve(MomentState::deterministic(alpha0), t, &p).unwrap();
            assert!((m.central_variance() - analytic_variance(t, &p)).abs() < 1e-12);
        }
        assert!(MomentState::new(c(1.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn moment_closed_form_matches_rk4_of_generator() {
        let p = reference();
        let m0 = MomentState::new(c(0.6, 0.3), 1.1).unwrap();
        let (dt, steps) = (1e-3, 3000);
        let mut m = m0;
        for _ in 0..steps {
            let f = |s: &MomentState| s.derivative(&p);
            let shift = |s: &MomentState, (d1, d2): (Complex64, f64), h: f64| MomentState {
                m1: s.m1 + d1 * h,
                m2: s.m2 + d2 * h,
            };
            let k1 = f(&m);
            let k2 = f(&shift(&m, k1, dt / 2.0));
            let k3 = f(&shift(&m, k2, dt / 2.0));
            let k4 = f(&shift(&m, k3, dt));
            m = MomentState {
                m1: m.m1 + (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) * (dt / 6.0),
                m2: m.m2 + (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) * (dt / 6.0),
            };
        }
        let closed = moment_ode_evolve(m0, dt * steps as f64, &p).unwrap();
        assert!((closed.m1 - m.m1).norm() < 1e-12);
        assert!((closed.m2 - m.m2).abs() < 1e-12);
    }
}
