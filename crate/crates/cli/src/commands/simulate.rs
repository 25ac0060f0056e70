//! `ovlab simulate`: one Euler- or Voigt-Oldroyd-B run with diagnostics and
//! snapshots persisted to a run directory.

use std::io::Write;
use std::path::{Path, PathBuf};

use ovlab_core::energy::EnergyLedger;
use ovlab_core::solver::{run, RunObserver, RunOptions, SimState, SystemKind};

use crate::commands::{create_fresh_dir, load_config, resolve_output_dir, GlobalArgs};
use crate::config::{Experiment, RunConfig};
use crate::csvio::{sample_row, write_header};
use crate::fld;
use crate::manifest::{self, BlowupEntry, RunManifest, SnapshotEntry};
use crate::{CliError, Result};

pub const DIAGNOSTICS_NAME: &str = "diagnostics.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";

/// Writes diagnostics rows and FLD1 snapshots as samples arrive.
pub struct DiskObserver {
    csv: std::io::BufWriter<std::fs::File>,
    snapshot_every: usize,
    snap_dir: PathBuf,
    pub snapshots: Vec<SnapshotEntry>,
    last_snap_step: Option<u64>,
}

impl DiskObserver {
    pub fn create(run_dir: &Path, snapshot_every: usize) -> Result<DiskObserver> {
        let file = std::fs::File::create(run_dir.join(DIAGNOSTICS_NAME))?;
        let mut csv = std::io::BufWriter::new(file);
        write_header(&mut csv)?;
        let snap_dir = run_dir.join(SNAPSHOT_DIR);
        if snapshot_every > 0 {
            std::fs::create_dir_all(&snap_dir)?;
        }
        Ok(DiskObserver {
            csv,
            snapshot_every,
            snap_dir,
            snapshots: Vec::new(),
            last_snap_step: None,
        })
    }

    pub fn write_snapshot(&mut self, state: &SimState) -> Result<()> {
        let step = state.step_count;
        let u_name = format!("u_step{step:08}.fld");
        let tau_name = format!("tau_step{step:08}.fld");
        fld::write_field(&self.snap_dir.join(&u_name), &state.u.spectral().to_physical())?;
        fld::write_field(
            &self.snap_dir.join(&tau_name),
            &state.tau.spectral().to_physical(),
        )?;
        self.snapshots.push(SnapshotEntry {
            step,
            t: state.t,
            velocity_file: format!("{SNAPSHOT_DIR}/{u_name}"),
            stress_file: format!("{SNAPSHOT_DIR}/{tau_name}"),
        });
        self.last_snap_step = Some(step);
        Ok(())
    }

    pub fn finish(mut self, final_state: &SimState) -> Result<Vec<SnapshotEntry>> {
        if self.snapshot_every > 0 && self.last_snap_step != Some(final_state.step_count) {
            self.write_snapshot(final_state)?;
        }
        self.csv.flush()?;
        Ok(self.snapshots)
    }
}

impl RunObserver for DiskObserver {
    fn on_sample(&mut self, state: &SimState, ledger: &EnergyLedger) -> ovlab_core::Result<()> {
        let sample = ledger.samples().last().expect("sample just pushed");
        writeln!(self.csv, "{}", sample_row(sample))
            .map_err(|e| ovlab_core::Error::Observer(e.to_string()))?;
        if self.snapshot_every > 0 && state.step_count % self.snapshot_every as u64 == 0 {
            self.write_snapshot(state)
                .map_err(|e| ovlab_core::Error::Observer(e.to_string()))?;
        }
        Ok(())
    }
}

pub fn execute(args: &GlobalArgs) -> Result<()> {
    let cfg = load_config(args, Experiment::Simulate)?;
    let out_dir = resolve_output_dir(&cfg, args);
    create_fresh_dir(&out_dir)?;
    let outcome = run_into_dir(&cfg, &out_dir, args.seed)?;
    println!("run directory: {}", out_dir.display());
    if let Some(b) = outcome {
        return Err(CliError::BlowUp {
            t: b.t,
            reason: b.reason,
        });
    }
    Ok(())
}

/// Run one simulation into `run_dir`; returns the blow-up entry if the run
/// halted early. The manifest is written in every case.
pub fn run_into_dir(
    cfg: &RunConfig,
    run_dir: &Path,
    seed_override: Option<u64>,
) -> Result<Option<BlowupEntry>> {
    let start = manifest::now_ms();
    let grid = cfg.build_grid()?;
    let params = cfg.model_params();
    let stepper = cfg.stepper_config()?;
    let t_end = cfg.resolve_t_end()?;
    let (u0, tau0) = cfg.build_initial(&grid, seed_override)?;
    let state = SimState::new(u0, tau0, params).map_err(CliError::from)?;
    let system = if params.voigt {
        SystemKind::VoigtOldroydB
    } else {
        SystemKind::EulerOldroydB
    };
    let opts = RunOptions {
        t_end,
        diagnostics_every: cfg.diagnostics_every,
        amp_limit: cfg.amp_limit,
        ..Default::default()
    };

    let mut observer = DiskObserver::create(run_dir, cfg.snapshot_every)?;
    let outcome = run(system, state, &stepper, &opts, &mut observer).map_err(CliError::from)?;
    let snapshots = observer.finish(&outcome.final_state)?;

    let blowup = outcome.blowup.as_ref().map(|b| BlowupEntry {
        t: b.t,
        reason: b.reason.clone(),
    });
    let m = RunManifest {
        schema: "ovlab-run/1".into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        experiment: cfg.experiment.to_string(),
        config: cfg.clone(),
        seed: seed_override.or(cfg.seed),
        start_unix_ms: start,
        end_unix_ms: manifest::now_ms(),
        exit_status: if blowup.is_some() { "blow-up" } else { "ok" }.into(),
        blowup: blowup.clone(),
        t_end,
        epsilon: params.epsilon,
        snapshots,
        files: manifest::inventory(run_dir)?,
    };
    m.write(run_dir)?;
    Ok(blowup)
}
