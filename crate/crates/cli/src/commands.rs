//! The four verification campaigns. Each returns a [`Report`] whose checks
//! decide the exit status.

use std::f64::consts::TAU;

use cavity_core::composite::DensityOperator;
use cavity_core::dilation::{cyclic_vector, diagram_residual, inner_product};
use cavity_core::fock::{self, coherent_state, expectation};
use cavity_core::lindblad::integrate;
use cavity_core::ou::{
    analytic_mean, analytic_variance, ensemble_stats, moment_ode_evolve, printed_variance, simulate_ensemble,
    MomentState,
};
use cavity_core::weyl::{
    ccr_residual, lindblad_channel_crosscheck, physical_norm, recover_ladder, semigroup_law_residual,
};
use cavity_core::{Complex64, Error, FockDim, LindbladModel, RngSeed};
use rand::Rng;

use crate::config::{ConfigError, ScenarioConfig};
use crate::report::{Check, Report, Section};

pub const MASTER_MEAN_TOL: f64 = 1e-6;
pub const Z_SCORE_LIMIT: f64 = 4.0;
pub const DILATION_RESIDUAL_PER_Z: f64 = 1e-3;
pub const DILATION_RATIO: (f64, f64) = (1.4, 2.8);
pub const CYCLIC_NORM_TOL: f64 = 5e-4;
pub const CCR_TOL: f64 = 1e-6;
pub const CCR_MONOTONE_SLACK: f64 = 1e-14;
pub const CCR_DIMS: [usize; 3] = [20, 40, 60];
pub const SEMIGROUP_TOL: f64 = 1e-12;
pub const CROSSCHECK_TOL: f64 = 1e-4;
pub const LADDER_TOL: f64 = 1e-5;
pub const LADDER_RATIO: (f64, f64) = (3.5, 4.5);

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Failed(Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failed(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::IntegrationDiverged { .. } => CliError::Failed(e),
            other => CliError::Config(ConfigError::Invalid(other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Master,
    Ou,
    Dilation,
    Weyl,
}

impl Command {
    pub const ALL: [Command; 4] = [Command::Master, Command::Ou, Command::Dilation, Command::Weyl];

    pub fn name(self) -> &'static str {
        match self {
            Command::Master => "master",
            Command::Ou => "ou",
            Command::Dilation => "dilation",
            Command::Weyl => "weyl",
        }
    }

    pub fn run(self, cfg: &ScenarioConfig) -> Result<Report, CliError> {
        match self {
            Command::Master => cmd_master(cfg),
            Command::Ou => cmd_ou(cfg),
            Command::Dilation => cmd_dilation(cfg),
            Command::Weyl => cmd_weyl(cfg),
        }
    }
}

pub fn cmd_master(cfg: &ScenarioConfig) -> Result<Report, CliError> {
    let params = cfg.params()?;
    let dim = cfg.fock_dim()?;
    let integrator = cfg.integrator()?;
    let rho0 = DensityOperator::pure(&coherent_state(cfg.alpha0, dim))?;
    let snaps = integrate(&LindbladModel::new(params, dim), &rho0, &integrator)?;

    let a = fock::annihilation(dim);
    let n = fock::number_operator(dim);
    let mut table = Section::new(
        "master",
        &[
            "t",
            "re_a",
            "im_a",
            "n",
            "trace",
            "min_eigenvalue",
            "analytic_re_a",
            "analytic_im_a",
            "abs_error",
        ],
    );
    let mut worst: f64 = 0.0;
    for s in &snaps {
        let mean = expectation(&a, &s.rho)?;
        let exact = analytic_mean(cfg.alpha0, s.t, &params);
        let err = (mean - exact).norm();
        worst = worst.max(err);
        table.push(vec![
            s.t,
            mean.re,
            mean.im,
            expectation(&n, &s.rho)?.re,
            s.rho.trace().re,
            s.rho.min_eigenvalue(),
            exact.re,
            exact.im,
            err,
        ]);
    }
    let mut report = Report::new("master");
    report.sections.push(table);
    report
        .checks
        .push(Check::below("master.max_abs_error", worst, MASTER_MEAN_TOL));
    Ok(report)
}

/// Standard score of `delta`; a deterministic column (zero standard error)
/// scores 0 when it matches and ±∞ otherwise.
pub fn z_score(delta: f64, std_error: f64) -> f64 {
    if std_error > 0.0 {
        delta / std_error
    } else if delta.abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY.copysign(delta)
    }
}

pub fn cmd_ou(cfg: &ScenarioConfig) -> Result<Report, CliError> {
    let params = cfg.params()?;
    let schedule = cfg.ou_integrator()?;
    let ens = simulate_ensemble(
        cfg.alpha0,
        &schedule,
        cfg.n_traj,
        RngSeed(cfg.seed),
        &params,
        cfg.ou_method,
    )?;
    let stats = ensemble_stats(&ens)?;

    let mut table = Section::new(
        "ou",
        &[
            "t",
            "mc_mean_re",
            "mc_mean_im",
            "mc_variance",
            "mean_std_error",
            "variance_std_error",
            "analytic_mean_re",
            "analytic_mean_im",
            "derived_variance",
            "printed_variance",
            "moment_variance",
            "z_mean",
            "z_variance",
            "z_printed_variance",
        ],
    );
    let (mut worst_mean, mut worst_var): (f64, f64) = (0.0, 0.0);
    for s in &stats {
        let mean = analytic_mean(cfg.alpha0, s.t, &params);
        let derived = analytic_variance(s.t, &params);
        let printed = printed_variance(s.t, &params);
        let moments = moment_ode_evolve(MomentState::deterministic(cfg.alpha0), s.t, &params)?;
        let z_mean = z_score((s.mean - mean).norm(), s.mean_std_error);
        let z_var = z_score(s.variance - derived, s.variance_std_error);
        worst_mean = worst_mean.max(z_mean.abs());
        worst_var = worst_var.max(z_var.abs());
        table.push(vec![
            s.t,
            s.mean.re,
            s.mean.im,
            s.variance,
            s.mean_std_error,
            s.variance_std_error,
            mean.re,
            mean.im,
            derived,
            printed,
            moments.central_variance(),
            z_mean,
            z_var,
            z_score(s.variance - printed, s.variance_std_error),
        ]);
    }
    let mut report = Report::new("ou");
    report.sections.push(table);
    report
        .checks
        .push(Check::below("ou.max_abs_z_mean", worst_mean, Z_SCORE_LIMIT));
    report
        .checks
        .push(Check::below("ou.max_abs_z_variance", worst_var, Z_SCORE_LIMIT));
    Ok(report)
}

pub fn cmd_dilation(cfg: &ScenarioConfig) -> Result<Report, CliError> {
    let params = cfg.params()?;
    let z = cfg.dilation_z;
    if z.norm() == 0.0 {
        return Err(ConfigError::BadValue {
            key: "dilation_z_re".into(),
            msg: "z must be nonzero for a relative residual".into(),
        }
        .into());
    }
    if cfg.dilation_dx.is_empty() || cfg.dilation_times.is_empty() {
        return Err(ConfigError::BadValue {
            key: "dilation_dx".into(),
            msg: "need at least one grid spacing and one time".into(),
        }
        .into());
    }
    let grids = cfg
        .dilation_dx
        .iter()
        .map(|&dx| cfg.dilation_grid(dx))
        .collect::<Result<Vec<_>, _>>()?;
    for grid in &grids {
        for &t in &cfg.dilation_times {
            grid.shift_points(t).map_err(|_| ConfigError::BadValue {
                key: "dilation_times".into(),
                msg: format!(
                    "t = {t} is not a multiple of dx = {}; the shift acts on grid points, so every t must be grid-aligned",
                    grid.dx()
                ),
            })?;
        }
    }

    let mut table = Section::new("dilation", &["dx", "x_max", "t", "z_re", "z_im", "residual", "ratio"]);
    let mut norms = Section::new("cyclic_norm", &["dx", "norm_sq", "deviation"]);
    let mut report = Report::new("dilation");
    let mut previous: Vec<Option<f64>> = vec![None; cfg.dilation_times.len()];
    for (level, grid) in grids.iter().enumerate() {
        let finest = level + 1 == grids.len();
        for (i, &t) in cfg.dilation_times.iter().enumerate() {
            let r = diagram_residual(z, t, grid, &params)?;
            let ratio = previous[i].map_or(f64::NAN, |p| p / r);
            table.push(vec![grid.dx(), grid.x_max(), t, z.re, z.im, r, ratio]);
            if level > 0 {
                report.checks.push(Check::within(
                    format!("dilation.ratio[dx={},t={t}]", grid.dx()),
                    ratio,
                    DILATION_RATIO.0,
                    DILATION_RATIO.1,
                ));
            }
            if finest {
                report.checks.push(Check::below(
                    format!("dilation.residual_per_z[dx={},t={t}]", grid.dx()),
                    r / z.norm(),
                    DILATION_RESIDUAL_PER_Z,
                ));
            }
            previous[i] = Some(r);
        }
        let v = cyclic_vector(grid, &params);
        let nsq = inner_product(&v, &v, grid)?.re;
        norms.push(vec![grid.dx(), nsq, (nsq - 1.0).abs()]);
        if finest {
            report.checks.push(Check::below(
                format!("dilation.cyclic_norm[dx={}]", grid.dx()),
                (nsq - 1.0).abs(),
                CYCLIC_NORM_TOL,
            ));
        }
    }
    report.sections.push(table);
    report.sections.push(norms);
    Ok(report)
}

fn ccr_dims(extra: usize) -> Vec<usize> {
    let mut dims = CCR_DIMS.to_vec();
    dims.push(extra);
    dims.sort_unstable();
    dims.dedup();
    dims
}

pub fn cmd_weyl(cfg: &ScenarioConfig) -> Result<Report, CliError> {
    if cfg.weyl_kappa != 0.0 {
        return Err(ConfigError::BadValue {
            key: "weyl_kappa".into(),
            msg: format!(
                "the Weyl cross-check needs a noiseless cavity (weyl_kappa = 0), got {}",
                cfg.weyl_kappa
            ),
        }
        .into());
    }
    let params = cfg.params()?;
    let weyl_params = cfg.weyl_params()?;
    let weyl_dim = cfg.weyl_fock_dim()?;
    let mut report = Report::new("weyl");

    // Commutation relations on a ring of radius weyl_ccr_radius.
    let dims = ccr_dims(cfg.dim);
    let mut ccr = Section::new("ccr", &["dim", "f_re", "f_im", "h_re", "h_im", "residual"]);
    let r = cfg.weyl_ccr_radius;
    let mut monotone = true;
    let mut at_top: f64 = 0.0;
    for k in 0..cfg.weyl_ccr_cases {
        let theta = TAU * k as f64 / cfg.weyl_ccr_cases as f64;
        let f = Complex64::from_polar(r, theta);
        let h = Complex64::from_polar(r, theta + 0.25 * TAU);
        let mut last = f64::INFINITY;
        for &d in &dims {
            let res = ccr_residual(f, h, FockDim::new(d)?);
            ccr.push(vec![d as f64, f.re, f.im, h.re, h.im, res]);
            monotone &= res <= last + CCR_MONOTONE_SLACK;
            last = res;
            if d == CCR_DIMS[2] {
                at_top = at_top.max(res);
            }
        }
    }
    report.sections.push(ccr);
    report
        .checks
        .push(Check::below("weyl.ccr_max_residual[dim=60]", at_top, CCR_TOL));
    report.checks.push(Check::holds(
        "weyl.ccr_monotone_in_dim",
        monotone,
        "non-increasing in dim",
    ));

    // Semigroup law on labels, fuzzed.
    let mut rng = RngSeed(cfg.seed).stream(0);
    let mut worst = (0.0, 0.0, 0.0, Complex64::new(0.0, 0.0));
    for _ in 0..cfg.weyl_semigroup_cases {
        let t = rng.random_range(0.0..10.0);
        let s = rng.random_range(0.0..10.0);
        let z = Complex64::from_polar(3.0 * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU));
        let res = semigroup_law_residual(t, s, z, &params)?;
        if res >= worst.0 {
            worst = (res, t, s, z);
        }
    }
    let mut semigroup = Section::new("semigroup", &["cases", "max_residual", "t", "s", "z_re", "z_im"]);
    semigroup.push(vec![
        cfg.weyl_semigroup_cases as f64,
        worst.0,
        worst.1,
        worst.2,
        worst.3.re,
        worst.3.im,
    ]);
    report.sections.push(semigroup);
    report
        .checks
        .push(Check::below("weyl.semigroup_max_residual", worst.0, SEMIGROUP_TOL));

    // Adjoint master equation against the closed-form image.
    let dist = lindblad_channel_crosscheck(cfg.weyl_z, cfg.weyl_t, weyl_dim, &weyl_params, cfg.weyl_dt)?;
    let mut cross = Section::new(
        "crosscheck",
        &["dim", "z_re", "z_im", "t", "dt", "gamma_prime", "distance"],
    );
    cross.push(vec![
        cfg.weyl_dim as f64,
        cfg.weyl_z.re,
        cfg.weyl_z.im,
        cfg.weyl_t,
        cfg.weyl_dt,
        cfg.weyl_gamma_prime,
        dist,
    ]);
    report.sections.push(cross);
    report
        .checks
        .push(Check::below("weyl.crosscheck_distance", dist, CROSSCHECK_TOL));

    // Ladder operators from the generating function.
    let lambda = (-weyl_params.complex_rate() * cfg.weyl_t).exp();
    let a = fock::annihilation(weyl_dim) * lambda;
    let adag = fock::creation(weyl_dim) * lambda.conj();
    let mut ladder = Section::new("ladder", &["h", "a_error", "adag_error"]);
    let mut errors = Vec::new();
    for h in [cfg.weyl_h, 0.5 * cfg.weyl_h] {
        let (a_t, adag_t) = recover_ladder(cfg.weyl_t, weyl_dim, &weyl_params, h)?;
        let (ea, eb) = (physical_norm(&(a_t - &a)), physical_norm(&(adag_t - &adag)));
        ladder.push(vec![h, ea, eb]);
        errors.push(ea.max(eb));
    }
    report.sections.push(ladder);
    report
        .checks
        .push(Check::below("weyl.ladder_error", errors[0], LADDER_TOL));
    report.checks.push(Check::within(
        "weyl.ladder_halving_ratio",
        errors[0] / errors[1],
        LADDER_RATIO.0,
        LADDER_RATIO.1,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_score_edges() {
        assert_eq!(z_score(0.5, 0.25), 2.0);
        assert_eq!(z_score(1e-13, 0.0), 0.0);
        assert_eq!(z_score(-1.0, 0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn ccr_dims_merge() {
        assert_eq!(ccr_dims(10), vec![10, 20, 40, 60]);
        assert_eq!(ccr_dims(40), vec![20, 40, 60]);
    }

    #[test]
    fn divergence_is_not_a_config_error() {
        let e: CliError = Error::IntegrationDiverged {
            time: 1.0,
            reason: "trace".into(),
        }
        .into();
        assert_eq!(e.exit_code(), 1);
        let e: CliError = Error::InvalidConfig("x".into()).into();
        assert_eq!(e.exit_code(), 2);
    }
}
