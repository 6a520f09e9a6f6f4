//! `qtwist`: Taylor coefficients, sign surveys and family moments of
//! quadratic twists from the command line.

mod config;
mod output;
mod tasks;

use clap::{Parser, Subcommand, ValueEnum};
use config::{parse_pairs, ConfigError, Format, JobConfig, Task};
use output::Artifact;
use qtwist::arith::TableCache;
use qtwist::Exec;
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "qtwist", version, about = "Central Taylor coefficients of quadratic twists")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Job file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (1 runs sequentially).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Directory for coefficient-table caches.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Output file; a manifest is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// c_0..c_R for each listed twist.
    Taylor,
    /// Check the predicted sign of c_m over a discriminant range.
    SignSurvey,
    /// Empirical against predicted family moments.
    Moments,
    /// Count twists with nonvanishing central derivatives.
    Nonvanish,
    /// Internal consistency checks.
    Selftest,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Lib(#[from] qtwist::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("sign rule violated at d={d}, m={m}")]
    Violation { artifact: Box<Artifact>, d: i64, m: usize },

    #[error("selftest failed: {failed}")]
    SelftestFailed { artifact: Box<Artifact>, failed: String },
}

impl CliError {
    pub fn config(key: &str, err: impl std::fmt::Display) -> Self {
        CliError::Config(ConfigError { key: key.to_string(), message: err.to_string() })
    }

    fn exit_code(&self) -> u8 {
        use qtwist::Error as E;
        match self {
            CliError::Config(_) => 1,
            CliError::Lib(E::InvalidCurve(_) | E::Inadmissible { .. }) => 1,
            CliError::Lib(E::Io(_) | E::Cache(_)) | CliError::Io { .. } => 3,
            CliError::Lib(_) | CliError::Violation { .. } | CliError::SelftestFailed { .. } => 2,
        }
    }
}

impl std::fmt::Debug for Artifact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Artifact").field("rows", &self.table.rows.len()).finish()
    }
}

fn load_config(cli: &Cli, task: Task) -> Result<JobConfig, CliError> {
    let mut map = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            parse_pairs(&text)?
        }
        None if task == Task::Selftest => BTreeMap::new(),
        None => return Err(CliError::config("--config", "required for this subcommand")),
    };
    // flags override the file
    let flags = [
        ("workers", cli.workers.map(|w| w.to_string())),
        ("cache_dir", cli.cache_dir.as_ref().map(|p| p.display().to_string())),
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
        (
            "format",
            cli.format.map(|f| match f {
                FormatArg::Csv => "csv".to_string(),
                FormatArg::Json => "json".to_string(),
            }),
        ),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    }
    Ok(JobConfig::from_map(task, map)?)
}

fn write(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(cfg: &JobConfig, artifact: &Artifact, wall: f64) -> Result<(), CliError> {
    let body = match cfg.format {
        Format::Csv => artifact.table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&artifact.json).expect("json values serialize") + "\n",
    };
    let Some(out) = &cfg.out else {
        print!("{body}");
        return Ok(());
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    write(out, &body)?;
    let manifest = json!({
        "tool": "qtwist",
        "version": env!("CARGO_PKG_VERSION"),
        "task": cfg.task.name(),
        "config": cfg.echo,
        "parallel_feature": cfg!(feature = "parallel"),
        "wall_time_seconds": wall,
        "cache_hits": artifact.cache_hits,
        "rows": artifact.table.rows.len(),
    });
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    write(Path::new(&name), &(serde_json::to_string_pretty(&manifest).expect("json values serialize") + "\n"))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let task = match cli.command {
        Command::Taylor => Task::Taylor,
        Command::SignSurvey => Task::SignSurvey,
        Command::Moments => Task::Moments,
        Command::Nonvanish => Task::Nonvanish,
        Command::Selftest => Task::Selftest,
    };
    let cfg = load_config(cli, task)?;
    let exec = cfg.workers.map(Exec::with_workers).unwrap_or_default();
    let cache = match &cfg.cache_dir {
        Some(dir) => Some(TableCache::new(dir)?),
        None => None,
    };
    let ctx = tasks::Context { exec, cache };
    let start = Instant::now();
    let result = match task {
        Task::Taylor => tasks::taylor(&cfg, &ctx),
        Task::SignSurvey => tasks::survey(&cfg, &ctx),
        Task::Moments => tasks::moments(&cfg, &ctx),
        Task::Nonvanish => tasks::nonvanish(&cfg, &ctx),
        Task::Selftest => tasks::selftest(&ctx),
    };
    let wall = start.elapsed().as_secs_f64();
    match result {
        Ok(a) => emit(&cfg, &a, wall),
        // the report is still written before failing
        Err(CliError::Violation { artifact, d, m }) => {
            emit(&cfg, &artifact, wall)?;
            Err(CliError::Violation { artifact, d, m })
        }
        Err(CliError::SelftestFailed { artifact, failed }) => {
            emit(&cfg, &artifact, wall)?;
            Err(CliError::SelftestFailed { artifact, failed })
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
