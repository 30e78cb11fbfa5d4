//! Flat `key = value` scenario files.
//!
//! Blank lines and lines starting with `#` or `;` are ignored. Unknown keys
//! are rejected so that typos do not silently fall back to defaults.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use cavity_core::dilation::DilationGrid;
use cavity_core::{CavityParams, Complex64, FockDim, IntegratorConfig, Method};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {msg}")]
    BadValue { key: String, msg: String },
    #[error(transparent)]
    Invalid(#[from] cavity_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected csv or json, got `{other}`")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Exact => "exact",
        Method::EulerMaruyama => "euler-maruyama",
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "exact" => Ok(Method::Exact),
        "euler-maruyama" | "em" => Ok(Method::EulerMaruyama),
        other => Err(format!("expected exact or euler-maruyama, got `{other}`")),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{}`: {e}", x.trim())))
        .collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Every tunable of a campaign. Defaults reproduce the reference scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub omega: f64,
    pub gamma_prime: f64,
    pub kappa: f64,
    pub hbar: f64,
    pub mass: f64,
    pub dim: usize,
    pub alpha0: Complex64,
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub n_traj: usize,
    pub seed: u64,
    pub ou_method: Method,
    pub ou_dt: f64,
    pub ou_record_interval: f64,
    pub dilation_x_max: f64,
    pub dilation_dx: Vec<f64>,
    pub dilation_times: Vec<f64>,
    pub dilation_z: Complex64,
    pub weyl_gamma_prime: f64,
    pub weyl_kappa: f64,
    pub weyl_dim: usize,
    pub weyl_z: Complex64,
    pub weyl_t: f64,
    pub weyl_dt: f64,
    pub weyl_h: f64,
    pub weyl_ccr_radius: f64,
    pub weyl_ccr_cases: usize,
    pub weyl_semigroup_cases: usize,
    pub format: Format,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            gamma_prime: 0.5,
            kappa: 0.1,
            hbar: 1.0,
            mass: 1.0,
            dim: 20,
            alpha0: Complex64::new(0.5, 0.0),
            dt: 1e-3,
            t_final: 5.0,
            record_every: 100,
            n_traj: 10_000,
            seed: 42,
            ou_method: Method::Exact,
            ou_dt: 1e-3,
            ou_record_interval: 0.5,
            dilation_x_max: 100.0,
            dilation_dx: vec![4e-3, 2e-3, 1e-3],
            dilation_times: vec![0.0, 0.5, 1.0, 2.0],
            dilation_z: Complex64::new(1.0, 0.0),
            weyl_gamma_prime: 0.4,
            weyl_kappa: 0.0,
            weyl_dim: 40,
            weyl_z: Complex64::new(0.4, 0.0),
            weyl_t: 1.0,
            weyl_dt: 1e-3,
            weyl_h: 1e-3,
            weyl_ccr_radius: 0.5,
            weyl_ccr_cases: 8,
            weyl_semigroup_cases: 1000,
            format: Format::Csv,
        }
    }
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
        where
            T::Err: fmt::Display,
        {
            v.parse().map_err(|e: T::Err| ConfigError::BadValue {
                key: key.into(),
                msg: e.to_string(),
            })
        }
        let bad = |msg: String| ConfigError::BadValue { key: key.into(), msg };
        match key {
            "omega" => self.omega = num(key, value)?,
            "gamma_prime" => self.gamma_prime = num(key, value)?,
            "kappa" => self.kappa = num(key, value)?,
            "hbar" => self.hbar = num(key, value)?,
            "mass" => self.mass = num(key, value)?,
            "dim" => self.dim = num(key, value)?,
            "alpha0_re" => self.alpha0.re = num(key, value)?,
            "alpha0_im" => self.alpha0.im = num(key, value)?,
            "dt" => self.dt = num(key, value)?,
            "t_final" => self.t_final = num(key, value)?,
            "record_every" => self.record_every = num(key, value)?,
            "n_traj" => self.n_traj = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "ou_method" => self.ou_method = parse_method(value).map_err(bad)?,
            "ou_dt" => self.ou_dt = num(key, value)?,
            "ou_record_interval" => self.ou_record_interval = num(key, value)?,
            "dilation_x_max" => self.dilation_x_max = num(key, value)?,
            "dilation_dx" => self.dilation_dx = parse_list(value).map_err(bad)?,
            "dilation_times" => self.dilation_times = parse_list(value).map_err(bad)?,
            "dilation_z_re" => self.dilation_z.re = num(key, value)?,
            "dilation_z_im" => self.dilation_z.im = num(key, value)?,
            "weyl_gamma_prime" => self.weyl_gamma_prime = num(key, value)?,
            "weyl_kappa" => self.weyl_kappa = num(key, value)?,
            "weyl_dim" => self.weyl_dim = num(key, value)?,
            "weyl_z_re" => self.weyl_z.re = num(key, value)?,
            "weyl_z_im" => self.weyl_z.im = num(key, value)?,
            "weyl_t" => self.weyl_t = num(key, value)?,
            "weyl_dt" => self.weyl_dt = num(key, value)?,
            "weyl_h" => self.weyl_h = num(key, value)?,
            "weyl_ccr_radius" => self.weyl_ccr_radius = num(key, value)?,
            "weyl_ccr_cases" => self.weyl_ccr_cases = num(key, value)?,
            "weyl_semigroup_cases" => self.weyl_semigroup_cases = num(key, value)?,
            "format" => self.format = value.parse().map_err(bad)?,
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Resolved settings in a fixed order, for output headers.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("omega", self.omega.to_string()),
            ("gamma_prime", self.gamma_prime.to_string()),
            ("kappa", self.kappa.to_string()),
            ("hbar", self.hbar.to_string()),
            ("mass", self.mass.to_string()),
            ("dim", self.dim.to_string()),
            ("alpha0_re", self.alpha0.re.to_string()),
            ("alpha0_im", self.alpha0.im.to_string()),
            ("dt", self.dt.to_string()),
            ("t_final", self.t_final.to_string()),
            ("record_every", self.record_every.to_string()),
            ("n_traj", self.n_traj.to_string()),
            ("seed", self.seed.to_string()),
            ("ou_method", method_name(self.ou_method).into()),
            ("ou_dt", self.ou_dt.to_string()),
            ("ou_record_interval", self.ou_record_interval.to_string()),
            ("dilation_x_max", self.dilation_x_max.to_string()),
            ("dilation_dx", join(&self.dilation_dx)),
            ("dilation_times", join(&self.dilation_times)),
            ("dilation_z_re", self.dilation_z.re.to_string()),
            ("dilation_z_im", self.dilation_z.im.to_string()),
            ("weyl_gamma_prime", self.weyl_gamma_prime.to_string()),
            ("weyl_kappa", self.weyl_kappa.to_string()),
            ("weyl_dim", self.weyl_dim.to_string()),
            ("weyl_z_re", self.weyl_z.re.to_string()),
            ("weyl_z_im", self.weyl_z.im.to_string()),
            ("weyl_t", self.weyl_t.to_string()),
            ("weyl_dt", self.weyl_dt.to_string()),
            ("weyl_h", self.weyl_h.to_string()),
            ("weyl_ccr_radius", self.weyl_ccr_radius.to_string()),
            ("weyl_ccr_cases", self.weyl_ccr_cases.to_string()),
            ("weyl_semigroup_cases", self.weyl_semigroup_cases.to_string()),
            ("format", self.format.to_string()),
        ]
    }

    pub fn params(&self) -> Result<CavityParams, ConfigError> {
        Ok(CavityParams::new(self.omega, self.gamma_prime, self.kappa)?
            .with_hbar(self.hbar)?
            .with_mass(self.mass)?)
    }

    pub fn fock_dim(&self) -> Result<FockDim, ConfigError> {
        Ok(FockDim::new(self.dim)?)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, ConfigError> {
        Ok(IntegratorConfig::new(self.dt, self.t_final, self.record_every)?)
    }

    /// Sampling schedule for the amplitude ensemble: records every
    /// `ou_record_interval` up to `t_final`.
    pub fn ou_integrator(&self) -> Result<IntegratorConfig, ConfigError> {
        let interval = self.ou_record_interval;
        if !(interval.is_finite() && interval > 0.0) {
            return Err(ConfigError::BadValue {
                key: "ou_record_interval".into(),
                msg: format!("must be positive, got {interval}"),
            });
        }
        match self.ou_method {
            Method::Exact => Ok(IntegratorConfig::new(interval, self.t_final, 1)?),
            Method::EulerMaruyama => {
                let ratio = interval / self.ou_dt;
                let stride = ratio.round();
                if !(stride >= 1.0 && (ratio - stride).abs() < 1e-9 * stride) {
                    return Err(ConfigError::BadValue {
                        key: "ou_record_interval".into(),
                        msg: format!("must be a positive multiple of ou_dt = {}", self.ou_dt),
                    });
                }
                Ok(IntegratorConfig::new(self.ou_dt, self.t_final, stride as usize)?)
            }
        }
    }

    pub fn dilation_grid(&self, dx: f64) -> Result<DilationGrid, ConfigError> {
        Ok(DilationGrid::new(self.dilation_x_max, dx, &self.params()?)?)
    }

    pub fn weyl_params(&self) -> Result<CavityParams, ConfigError> {
        Ok(CavityParams::new(self.omega, self.weyl_gamma_prime, self.weyl_kappa)?
            .with_hbar(self.hbar)?
            .with_mass(self.mass)?)
    }

    pub fn weyl_fock_dim(&self) -> Result<FockDim, ConfigError> {
        Ok(FockDim::new(self.weyl_dim)?)
    }
}
