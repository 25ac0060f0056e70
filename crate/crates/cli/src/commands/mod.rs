//! Experiment subcommands and their shared plumbing.

pub mod audit;
pub mod dispersion;
pub mod inflate;
pub mod simulate;
pub mod sweep;

use std::path::{Path, PathBuf};

use crate::config::{Experiment, RunConfig};
use crate::{CliError, Result};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct GlobalArgs {
    pub config: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

pub const OUTPUT_ROOT_ENV: &str = "OV_LAB_OUTPUT_ROOT";

pub fn load_config(args: &GlobalArgs, expected: Experiment) -> Result<RunConfig> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config PATH is required"))?;
    let cfg = RunConfig::load(path)?;
    if cfg.experiment != expected {
        return Err(CliError::config(format!(
            "config declares experiment \"{}\" but the \"{expected}\" subcommand was invoked",
            cfg.experiment
        )));
    }
    Ok(cfg)
}

/// Output directory: `--output` wins, then `output_dir` from the config,
/// then a deterministic default name. Relative paths resolve under
/// `OV_LAB_OUTPUT_ROOT` when that is set.
pub fn resolve_output_dir(cfg: &RunConfig, args: &GlobalArgs) -> PathBuf {
    let base = args
        .output
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| {
            let seed = args.seed.or(cfg.seed).unwrap_or(0);
            PathBuf::from(format!("ovlab-{}-seed{}", cfg.experiment, seed))
        });
    if base.is_absolute() {
        return base;
    }
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join(base),
        _ => base,
    }
}

/// Create the run directory; refuses to reuse a non-empty one.
pub fn create_fresh_dir(path: &Path) -> Result<()> {
    if path.exists() {
        let occupied = std::fs::read_dir(path)
            .map_err(|e| CliError::io(format!("cannot inspect {}: {e}", path.display())))?
            .next()
            .is_some();
        if occupied {
            return Err(CliError::io(format!(
                "output directory {} already exists and is not empty",
                path.display()
            )));
        }
        return Ok(());
    }
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))
}
