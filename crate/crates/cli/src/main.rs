use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cavity_cli::report::write_atomic;
use cavity_cli::{CliError, Command, ConfigError, Format, ScenarioConfig};
use clap::{Args, Parser, Subcommand};
use log::info;

/// Environment variable selecting the Monte Carlo thread count.
const THREADS_VAR: &str = "CAVITY_THREADS";

#[derive(Parser)]
#[command(
    name = "cavity",
    version,
    about = "Cross-verification campaigns for a damped optical cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Master equation in truncated Fock space vs the analytic mean field.
    Master,
    /// Monte Carlo amplitude ensemble vs the analytic mean and variance.
    Ou,
    /// Dilation diagram residual over a grid refinement ladder.
    Dilation,
    /// Weyl commutation relations, semigroup law, Lindblad cross-check and ladder recovery.
    Weyl,
    /// Every campaign; `--out` names a directory receiving one file per campaign.
    All,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` scenario file; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fock truncation dimension.
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
}

fn resolve(common: &Common) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = match &common.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(dim) = common.dim {
        cfg.dim = dim;
    }
    if let Some(format) = common.format {
        cfg.format = format;
    }
    Ok(cfg)
}

fn init_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let bad = |msg: String| ConfigError::BadValue {
        key: THREADS_VAR.into(),
        msg,
    };
    let n: usize = raw.trim().parse().map_err(|e| bad(format!("`{raw}`: {e}")))?;
    if n == 0 {
        return Err(bad("must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| bad(e.to_string()))
}

fn run_one(cmd: Command, cfg: &ScenarioConfig, path: &Path) -> Result<bool, CliError> {
    info!("running {}", cmd.name());
    let report = cmd.run(cfg)?;
    write_atomic(path, &report.render(cfg.format, &cfg.entries()))?;
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {} = {:.6e} ({})", c.name, c.value, c.criterion);
    }
    println!("wrote {}", path.display());
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    init_threads()?;
    let cfg = resolve(&cli.common)?;
    let ext = cfg.format.extension();
    let file = |cmd: Command| PathBuf::from(format!("{}.{ext}", cmd.name()));
    let single = |cmd: Command| {
        let path = cli.common.out.clone().unwrap_or_else(|| file(cmd));
        run_one(cmd, &cfg, &path)
    };
    match cli.command {
        Sub::Master => single(Command::Master),
        Sub::Ou => single(Command::Ou),
        Sub::Dilation => single(Command::Dilation),
        Sub::Weyl => single(Command::Weyl),
        Sub::All => {
            let dir = cli.common.out.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            let mut passed = true;
            for cmd in Command::ALL {
                passed &= run_one(cmd, &cfg, &dir.join(file(cmd)))?;
            }
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
