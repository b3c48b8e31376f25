//! Reproducible experiment runs from JSON configuration files.
//!
//! A run reads an [`ExperimentConfig`], executes it on a dedicated thread
//! pool and writes its data files plus `summary.json` and `run_manifest.json`
//! into an output directory. Data files depend only on the config, so two
//! runs of the same config produce byte-identical data.

pub mod config;
pub mod error;
pub mod experiments;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ergodiclab_core::fourier::FrequencySet;
use ergodiclab_core::metrics::noise_floor;
use ergodiclab_core::Space;
use serde_json::{json, Value};

pub use config::{ExperimentConfig, CONFIG_FORMAT};
pub use error::CliError;
pub use experiments::{RunOutput, Summary};

pub const MANIFEST_FILE: &str = "run_manifest.json";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub assume_ergodic: bool,
    /// Worker threads; all available cores when `None`.
    pub threads: Option<usize>,
    /// Enforce the config's checks.
    pub check: bool,
}

/// Parses a config, or the config echoed inside a run manifest.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut value: Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
    if value.get("tool").and_then(Value::as_str) == Some("ergodiclab") {
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
    }
    let config: ExperimentConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("at `{path}`: {}", e.inner()))
    })?;
    if config.format != CONFIG_FORMAT {
        return Err(CliError::Config(format!(
            "at `format`: unsupported format {}, expected {CONFIG_FORMAT}",
            config.format
        )));
    }
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))
}

/// Runs a config in memory; `base_dir` resolves relative paths inside it.
pub fn execute(config: &ExperimentConfig, base_dir: &Path, opts: &RunOptions) -> Result<RunOutput, CliError> {
    let ctx = experiments::Context {
        seed: config.seed,
        metric: config.metric,
        noise_repeats: config.noise_repeats,
        assume_ergodic: opts.assume_ergodic,
        base_dir,
    };
    pool(opts.threads)?.install(|| experiments::execute(config, &ctx))
}

/// Failed checks, as readable messages.
pub fn evaluate_checks(config: &ExperimentConfig, summary: &Summary) -> Vec<String> {
    let mut failed = Vec::new();
    for c in &config.checks {
        let Some(&v) = summary.get(&c.quantity) else {
            failed.push(format!("`{}` is not reported by this experiment", c.quantity));
            continue;
        };
        if let Some(min) = c.min {
            if !(v >= min) {
                failed.push(format!("{} = {v:e} is below {min:e}", c.quantity));
            }
        }
        if let Some(max) = c.max {
            if !(v <= max) {
                failed.push(format!("{} = {v:e} exceeds {max:e}", c.quantity));
            }
        }
    }
    failed
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub out_dir: PathBuf,
    pub output: RunOutput,
    pub failed_checks: Vec<String>,
}

/// Executes `config` and writes every output file into `out_dir`.
///
/// With `opts.check`, failed checks are recorded in the manifest and returned
/// as [`CliError::Checks`] after all files are written.
pub fn run(
    config: &ExperimentConfig,
    base_dir: &Path,
    out_dir: &Path,
    opts: &RunOptions,
) -> Result<RunRecord, CliError> {
    let started = Instant::now();
    let output = execute(config, base_dir, opts)?;
    let wall = started.elapsed().as_secs_f64();
    std::fs::create_dir_all(out_dir)?;
    for (name, bytes) in &output.files {
        write_atomic(out_dir, name, bytes)?;
    }
    let mut summary = serde_json::to_vec_pretty(&output.summary).map_err(|e| CliError::Config(e.to_string()))?;
    summary.push(b'\n');
    write_atomic(out_dir, SUMMARY_FILE, &summary)?;

    let failed = if opts.check { evaluate_checks(config, &output.summary) } else { Vec::new() };
    let mut outputs: Vec<&str> = output.files.iter().map(|(n, _)| n.as_str()).collect();
    outputs.push(SUMMARY_FILE);
    let manifest = json!({
        "tool": "ergodiclab",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": ergodiclab_core::VERSION,
        "kind": config.experiment.kind(),
        "config": config,
        "threads": pool(opts.threads)?.current_num_threads(),
        "assume_ergodic": opts.assume_ergodic,
        "wall_time_s": wall,
        "noise_floor": output.noise_floor,
        "outputs": outputs,
        "summary": output.summary,
        "checks": if opts.check { json!({"evaluated": config.checks.len(), "failed": failed}) } else { Value::Null },
    });
    let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Config(e.to_string()))?;
    bytes.push(b'\n');
    write_atomic(out_dir, MANIFEST_FILE, &bytes)?;
    if !failed.is_empty() {
        return Err(CliError::Checks(failed));
    }
    Ok(RunRecord { out_dir: out_dir.to_path_buf(), output, failed_checks: failed })
}

/// Parameters of a standalone noise-floor calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrateParams {
    pub space: Space,
    pub size: usize,
    pub cutoff: i64,
    pub s: f64,
    pub seed: u64,
    pub repeats: usize,
}

/// Median Haar-cloud distance for clouds of the given size.
pub fn calibrate(p: &CalibrateParams, threads: Option<usize>) -> Result<f64, CliError> {
    if p.repeats < 3 {
        return Err(CliError::Config("repeats must be at least 3".into()));
    }
    pool(threads)?.install(|| {
        let set = FrequencySet::cube(p.space.dim(), p.cutoff)?;
        Ok(noise_floor(p.space, p.size, &set, p.s, p.seed, p.repeats)?)
    })
}
