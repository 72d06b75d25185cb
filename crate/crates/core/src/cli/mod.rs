//! Command-line front-end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure (the
//! table is still written with the failed rows flagged in `status`), 1 for
//! output I/O errors.

pub mod commands;
pub mod config;
pub mod output;

use clap::{Parser, Subcommand};
use commands::Report;
use config::{ConfigError, OutputFormat, RunConfig};
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable read for the log filter.
pub const LOG_ENV: &str = "DISLOC_SPECTRA_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "disloc-spectra",
    version,
    about = "Bound-state spectra of a particle in a screw-dislocated medium"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output format; overrides `[output] format`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Output path or `-` for stdout; overrides `[output] path`.
    #[arg(long, global = true)]
    pub out: Option<String>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Reserved; every algorithm is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form levels over the configured grid.
    Spectrum,
    /// Exact and asymptotic levels with error columns, long format.
    Sweep,
    /// Exact-equation oracle against the closed form.
    Oracle,
    /// Crossings of rotating levels inside `rotation.omega_range`.
    Crossings,
    #[command(hide = true)]
    SpecfunTable {
        /// Bessel orders, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        orders: Vec<f64>,
        /// Zeros per order.
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

fn load(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let path = cli.config.as_ref().ok_or_else(|| {
        ConfigError::Missing("--config <path> is required for this subcommand".into())
    })?;
    RunConfig::from_path(path)
}

fn emit(report: &Report, format: OutputFormat, path: &str) -> std::io::Result<()> {
    if path == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        report.table.write(format, &mut lock)?;
        lock.flush()
    } else {
        let file = std::fs::File::create(path)?;
        report.table.write(format, std::io::BufWriter::new(file))
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(seed) = cli.seed {
        log::debug!("--seed {seed} accepted; no algorithm draws random numbers");
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_CONFIG;
        }
        pool = pool.num_threads(jobs);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_IO;
        }
    };

    let outcome = pool.install(|| -> Result<(Report, OutputFormat, String), ConfigError> {
        if let Command::SpecfunTable { orders, count } = &cli.command {
            let report = commands::specfun_table(orders, *count);
            let format = cli.format.unwrap_or(OutputFormat::Csv);
            return Ok((
                report,
                format,
                cli.out.clone().unwrap_or_else(|| "-".into()),
            ));
        }
        let cfg = load(&cli)?;
        log::info!("loaded configuration: {cfg:?}");
        let report = match cli.command {
            Command::Spectrum => commands::spectrum(&cfg),
            Command::Sweep => commands::sweep(&cfg),
            Command::Oracle => commands::oracle(&cfg),
            Command::Crossings => commands::crossings(&cfg)?,
            Command::SpecfunTable { .. } => unreachable!("handled above"),
        };
        let format = cli.format.unwrap_or(cfg.format);
        let path = cli.out.clone().unwrap_or(cfg.path);
        Ok((report, format, path))
    });

    let (report, format, path) = match outcome {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = emit(&report, format, &path) {
        eprintln!("error: cannot write output to {path}: {e}");
        return EXIT_IO;
    }
    if report.failures > 0 {
        eprintln!(
            "error: {} row(s) failed; see the status column",
            report.failures
        );
        return EXIT_NUMERICAL;
    }
    EXIT_OK
}
