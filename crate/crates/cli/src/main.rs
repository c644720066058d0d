//! Command-line front end for the harmonic mortar solver and the discrete
//! inf-sup analyzer.

use clap::{Parser, Subcommand, ValueEnum};
use harmonic_mortar_cli::commands;
use harmonic_mortar_cli::config::RunConfig;
use harmonic_mortar::infsup::Scope;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "harmonic-mortar",
    about = "Two-domain Poisson solves on annular stator/rotor geometry with \
             harmonic mortar coupling, and the discrete inf-sup analyzer",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScopeArg {
    Stator,
    Full,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Scope {
        match s {
            ScopeArg::Stator => Scope::StatorOnly,
            ScopeArg::Full => Scope::Full,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sweep discrete inf-sup constants over refinement levels, degrees and
    /// multiplier orders; prints a stability grid and writes one CSV row per
    /// cell.
    Infsup {
        /// JSON run configuration (defaults reproduce the reference setup).
        #[arg(long)]
        config: Option<PathBuf>,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Field space the supremum ranges over.
        #[arg(long)]
        scope: Option<ScopeArg>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Closed-form per-mode inf-sup constants of the annulus problem.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest harmonic mode to report.
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
    /// Assemble and solve the coupled field problem at one or more rotor
    /// angles; writes field, trace-grid and multiplier CSVs.
    Solve {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for CSV artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Solve the built-in manufactured problem and report its errors.
        #[arg(long)]
        manufactured: bool,
        /// Rotor angle override [rad].
        #[arg(long)]
        alpha: Option<f64>,
        /// Also dump system matrices as `row col value` text files.
        #[arg(long)]
        dump_matrices: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Manufactured-solution convergence study over the configured levels
    /// and degrees, with fitted rates.
    Convergence {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_file(p),
        None => {
            let cfg = RunConfig::default();
            cfg.validate()?;
            Ok(cfg)
        }
    }
}

fn set_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // Ignore failure when a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Infsup { config, out, scope, threads } => {
            set_threads(threads);
            let cfg = load_config(&config).map_err(ConfigError::wrap)?;
            commands::cmd_infsup(&cfg, scope.map(Into::into), out)
        }
        Command::Oracle { config, out, n_max } => {
            let cfg = load_config(&config).map_err(ConfigError::wrap)?;
            commands::cmd_oracle(&cfg, n_max, out)
        }
        Command::Solve { config, out, manufactured, alpha, dump_matrices, threads } => {
            set_threads(threads);
            let cfg = load_config(&config).map_err(ConfigError::wrap)?;
            commands::cmd_solve(&cfg, manufactured, alpha, out, dump_matrices)
        }
        Command::Convergence { config, out, threads } => {
            set_threads(threads);
            let cfg = load_config(&config).map_err(ConfigError::wrap)?;
            commands::cmd_convergence(&cfg, out)
        }
    }
}

/// Marker wrapper distinguishing configuration errors (exit code 2) from
/// numerical failures (exit code 3).
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl ConfigError {
    fn wrap(e: anyhow::Error) -> anyhow::Error {
        anyhow::Error::new(ConfigError(e))
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
