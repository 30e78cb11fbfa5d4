//! Master equation for the damped, pumped cavity mode
//!
//! ```text
//! dρ/dt = −(i/ħ)[H, ρ] + D[c₁]ρ + D[c₂]ρ,   H = ħω â†â,  c₁ = √γ′ â,  c₂ = √κ â†
//! ```
//!
//! integrated with fixed-step classical RK4. Because H is diagonal and the
//! jump operators are single off-diagonal bands, the generator is evaluated
//! entrywise in O(n²); [`LindbladModel::rhs_dense`] keeps the plain
//! matrix-product form for cross-checking.

use num_complex::Complex64;

use crate::composite::DensityOperator;
use crate::error::{Error, Result};
use crate::fock::{self, CavityParams, ComplexMatrix, FockDim, I};

const SNAPSHOT_HERMITIAN_TOL: f64 = 1e-10;
const SNAPSHOT_TRACE_TOL: f64 = 1e-8;
const SNAPSHOT_POSITIVITY_TOL: f64 = -1e-8;

/// D[c]ρ = cρc† − ½(c†cρ + ρc†c).
pub fn dissipator(c: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    fock::ensure_same_dim(c.nrows(), rho.nrows())?;
    fock::ensure_same_dim(c.ncols(), rho.ncols())?;
    fock::ensure_same_dim(c.nrows(), c.ncols())?;
    let cd = c.adjoint();
    let cdc = &cd * c;
    let half = Complex64::new(0.5, 0.0);
    Ok(c * rho * &cd - (&cdc * rho + rho * &cdc) * half)
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    params: CavityParams,
    dim: FockDim,
    hamiltonian: ComplexMatrix,
    c1: ComplexMatrix,
    c2: ComplexMatrix,
}

impl LindbladModel {
    pub fn new(params: CavityParams, dim: FockDim) -> Self {
        let a = fock::annihilation(dim);
        let ad = fock::creation(dim);
        let hamiltonian = fock::number_operator(dim) * Complex64::new(params.hbar() * params.omega(), 0.0);
        let c1 = a * Complex64::new(params.gamma_prime().sqrt(), 0.0);
        let c2 = ad * Complex64::new(params.kappa().sqrt(), 0.0);
        Self {
            params,
            dim,
            hamiltonian,
            c1,
            c2,
        }
    }

    pub fn params(&self) -> &CavityParams {
        &self.params
    }

    pub fn dim(&self) -> FockDim {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jump_operators(&self) -> [&ComplexMatrix; 2] {
        [&self.c1, &self.c2]
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<()> {
        fock::ensure_same_dim(self.dim.get(), m.nrows())?;
        fock::ensure_same_dim(self.dim.get(), m.ncols())
    }

    /// Eigenvalue of ââ† on level k in the truncated space; the top level
    /// is annihilated by â†.
    fn aad_diag(&self, k: usize) -> f64 {
        if k + 1 < self.dim.get() {
            (k + 1) as f64
        } else {
            0.0
        }
    }

    /// Schrödinger-picture generator applied to ρ.
    pub fn rhs(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(rho)?;
        Ok(self.rhs_unchecked(rho))
    }

    fn rhs_unchecked(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim.get();
        let omega = self.params.omega();
        let gp = self.params.gamma_prime();
        let kappa = self.params.kappa();
        ComplexMatrix::from_fn(n, n, |m, k| {
            let (mf, kf) = (m as f64, k as f64);
            let mut v = -I * omega * (mf - kf) * rho[(m, k)];
            let mut loss = -0.5 * (mf + kf) * rho[(m, k)];
            if m + 1 < n && k + 1 < n {
                loss += ((mf + 1.0) * (kf + 1.0)).sqrt() * rho[(m + 1, k + 1)];
            }
            v += gp * loss;
            let mut gain = -0.5 * (self.aad_diag(m) + self.aad_diag(k)) * rho[(m, k)];
            if m >= 1 && k >= 1 {
                gain += (mf * kf).sqrt() * rho[(m - 1, k - 1)];
            }
            v + kappa * gain
        })
    }

    /// Same generator as [`Self::rhs`], built from dense matrix products.
    pub fn rhs_dense(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(rho)?;
        let unitary = fock::commutator(&self.hamiltonian, rho) * (-I / self.params.hbar());
        Ok(unitary + dissipator(&self.c1, rho)? + dissipator(&self.c2, rho)?)
    }

    /// Heisenberg-picture (adjoint) generator:
    /// (i/ħ)[H, X] + Σ c†Xc − ½{c†c, X}.
    pub fn adjoint_rhs(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(x)?;
        Ok(self.adjoint_rhs_unchecked(x))
    }

    fn adjoint_rhs_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim.get();
        let omega = self.params.omega();
        let gp = self.params.gamma_prime();
        let kappa = self.params.kappa();
        ComplexMatrix::from_fn(n, n, |m, k| {
            let (mf, kf) = (m as f64, k as f64);
            let mut v = I * omega * (mf - kf) * x[(m, k)];
            let mut loss = -0.5 * (mf + kf) * x[(m, k)];
            if m >= 1 && k >= 1 {
                loss += (mf * kf).sqrt() * x[(m - 1, k - 1)];
            }
            v += gp * loss;
            let mut gain = -0.5 * (self.aad_diag(m) + self.aad_diag(k)) * x[(m, k)];
            if m + 1 < n && k + 1 < n {
                gain += ((mf + 1.0) * (kf + 1.0)).sqrt() * x[(m + 1, k + 1)];
            }
            v + kappa * gain
        })
    }

    pub fn adjoint_rhs_dense(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(x)?;
        let mut out = fock::commutator(&self.hamiltonian, x) * (I / self.params.hbar());
        let half = Complex64::new(0.5, 0.0);
        for c in [&self.c1, &self.c2] {
            let cd = c.adjoint();
            let cdc = &cd * c;
            out += &cd * x * c - (&cdc * x + x * &cdc) * half;
        }
        Ok(out)
    }

    /// Evolves an observable X(0) under the adjoint generator up to time `t`.
    pub fn evolve_observable(&self, x0: &ComplexMatrix, t: f64, dt: f64) -> Result<ComplexMatrix> {
        self.check_dim(x0)?;
        let steps = StepPlan::new(dt, t)?;
        let mut x = x0.clone();
        for h in steps.iter() {
            x = rk4_step(&x, h, |y| self.adjoint_rhs_unchecked(y));
        }
        Ok(x)
    }
}

/// One classical RK4 step for a matrix ODE.
pub fn rk4_step<F>(x: &ComplexMatrix, h: f64, f: F) -> ComplexMatrix
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let k1 = f(x);
    let k2 = f(&(x + &k1 * half));
    let k3 = f(&(x + &k2 * half));
    let k4 = f(&(x + &k3 * full));
    x + (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    /// Rescale ρ to unit trace after every step. Off by default so that
    /// trace drift stays visible.
    pub renormalize_trace: bool,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_final: f64, record_every: usize) -> Result<Self> {
        let cfg = Self {
            dt,
            t_final,
            record_every,
            renormalize_trace: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_final must be non-negative, got {}",
                self.t_final
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Times at which [`integrate`] records a snapshot.
    pub fn record_times(&self) -> Vec<f64> {
        let plan = StepPlan::new(self.dt, self.t_final).expect("validated config");
        plan.record_times(self.record_every)
    }
}

/// Fixed steps of `dt`, plus one shorter final step when `t_final` is not a
/// multiple of `dt`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepPlan {
    dt: f64,
    full: usize,
    remainder: f64,
    t_final: f64,
}

impl StepPlan {
    pub(crate) fn new(dt: f64, t_final: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) || !(t_final.is_finite() && t_final >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bad step plan dt={dt}, t_final={t_final}"
            )));
        }
        let ratio = t_final / dt;
        let nearest = ratio.round();
        let (full, remainder) = if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            (nearest as usize, 0.0)
        } else {
            let full = ratio.floor() as usize;
            (full, t_final - full as f64 * dt)
        };
        Ok(Self {
            dt,
            full,
            remainder,
            t_final,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.full + usize::from(self.remainder > 0.0)
    }

    pub(crate) fn time_after(&self, step: usize) -> f64 {
        if step >= self.len() {
            self.t_final
        } else {
            step as f64 * self.dt
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| if k < self.full { self.dt } else { self.remainder })
    }

    pub(crate) fn is_recorded(&self, step: usize, every: usize) -> bool {
        step.is_multiple_of(every) || step == self.len()
    }

    pub(crate) fn record_times(&self, every: usize) -> Vec<f64> {
        (0..=self.len())
            .filter(|&k| self.is_recorded(k, every))
            .map(|k| self.time_after(k))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub rho: DensityOperator,
}

fn check_snapshot(rho: &ComplexMatrix, t: f64) -> Result<()> {
    let diverged = |reason: String| Error::IntegrationDiverged { time: t, reason };
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(diverged("non-finite entries".into()));
    }
    let herm = fock::hermiticity_defect(rho);
    if herm > SNAPSHOT_HERMITIAN_TOL {
        return Err(diverged(format!("hermiticity defect {herm:.3e}")));
    }
    let tr = rho.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > SNAPSHOT_TRACE_TOL {
        return Err(diverged(format!("trace {tr:.12}")));
    }
    let min_eig = fock::min_eigenvalue(rho);
    if min_eig < SNAPSHOT_POSITIVITY_TOL {
        return Err(diverged(format!("minimum eigenvalue {min_eig:.3e}")));
    }
    Ok(())
}

/// Integrates the master equation from `rho0`, returning the recorded
/// snapshots (the initial state first, the final state last).
pub fn integrate(model: &LindbladModel, rho0: &DensityOperator, cfg: &IntegratorConfig) -> Result<Vec<Snapshot>> {
    cfg.validate()?;
    model.check_dim(rho0.matrix())?;
    let plan = StepPlan::new(cfg.dt, cfg.t_final)?;

    let mut rho = rho0.matrix().clone();
    let mut out = vec![Snapshot {
        t: 0.0,
        rho: rho0.clone(),
    }];
    for (k, h) in plan.iter().enumerate() {
        rho = rk4_step(&rho, h, |r| model.rhs_unchecked(r));
        if cfg.renormalize_trace {
            let tr = rho.trace().re;
            rho /= Complex64::new(tr, 0.0);
        }
        let step = k + 1;
        if plan.is_recorded(step, cfg.record_every) {
            let t = plan.time_after(step);
            check_snapshot(&rho, t)?;
            out.push(Snapshot {
                t,
                rho: DensityOperator::from_matrix_unchecked(rho.clone()),
            });
        }
    }
    Ok(out)
}

/// Long-time photon number κ/(γ′ − κ).
pub fn steady_photon_number(params: &CavityParams) -> Result<f64> {
    let (gp, kappa) = (params.gamma_prime(), params.kappa());
    if gp <= kappa {
        return Err(Error::NoSteadyState { gamma_prime: gp, kappa });
    }
    Ok(kappa / (gp - kappa))
}

/// Thermal (geometric) occupation with mean `n_mean`, cut at `dim` levels
/// and renormalized.
pub fn thermal_state(dim: FockDim, n_mean: f64) -> Result<DensityOperator> {
    if !(n_mean.is_finite() && n_mean >= 0.0) {
        return Err(Error::InvalidState(format!(
            "mean occupation {n_mean} must be non-negative"
        )));
    }
    let ratio = n_mean / (1.0 + n_mean);
    let weights: Vec<f64> = (0..dim.get()).map(|k| ratio.powi(k as i32)).collect();
    let total: f64 = weights.iter().sum();
    let diag = nalgebra::DVector::from_iterator(weights.len(), weights.iter().map(|w| Complex64::new(w / total, 0.0)));
    DensityOperator::new(ComplexMatrix::from_diagonal(&diag))
}
