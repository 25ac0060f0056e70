//! `ovlab sweep`: Voigt runs over an ε-list plus one Navier-Stokes reference
//! from the same initial velocity, followed by relaxation-limit metrics and
//! the uniform-bound check at t = ε^{−2/3}.

use std::io::Write;
use std::path::Path;

use ovlab_core::energy::{limit_metrics, LimitMetrics};
use ovlab_core::fit::log_log_slope;
use ovlab_core::solver::{run, RunOptions, RunOutcome, SimState, StepperConfig, SystemKind};

use crate::commands::simulate::DiskObserver;
use crate::commands::{create_fresh_dir, load_config, resolve_output_dir, GlobalArgs};
use crate::config::{Experiment, RunConfig};
use crate::csvio::fmt_f64;
use crate::manifest::{self, BlowupEntry, RunManifest};
use crate::{CliError, Result};

pub const SUMMARY_NAME: &str = "sweep_summary.csv";
pub const SUMMARY_HEADER: &str = "eps,sup_h2_gap,sup_h5_gap,l2t_h2_sigma,e_total_at_eps_tend,\
slope_l2t_h2_sigma,slope_sup_h2_gap,uniform_ratio";

struct MemberSpec {
    label: String,
    eps: Option<f64>, // None for the NS reference
    config: RunConfig,
    system: SystemKind,
    opts: RunOptions,
}

struct MemberResult {
    label: String,
    eps: Option<f64>,
    outcome: RunOutcome,
}

pub fn execute(args: &GlobalArgs) -> Result<()> {
    let cfg = load_config(args, Experiment::Sweep)?;
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| CliError::config("missing [sweep] section"))?;
    let t_compare = sweep
        .t_compare
        .or(cfg.time.t_end)
        .ok_or_else(|| CliError::config("sweep needs sweep.t_compare or time.t_end"))?;
    let out_dir = resolve_output_dir(&cfg, args);
    create_fresh_dir(&out_dir)?;
    let start = manifest::now_ms();

    let grid = cfg.build_grid()?;
    let seed = args.seed.or(cfg.seed);
    let (u0, tau0) = cfg.build_initial(&grid, seed)?;
    let stepper = cfg.stepper_config()?;

    let mut specs = Vec::new();
    for &eps in &sweep.eps_list {
        let mut member_cfg = cfg.clone();
        member_cfg.params.epsilon = eps;
        member_cfg.params.voigt = true;
        let t_eps = eps.powf(-2.0 / 3.0);
        specs.push(MemberSpec {
            label: format!("eps_{eps}"),
            eps: Some(eps),
            config: member_cfg,
            system: SystemKind::VoigtOldroydB,
            opts: RunOptions {
                t_end: t_compare,
                diagnostics_every: cfg.diagnostics_every,
                store_velocity: true,
                sample_count: sweep.sample_count,
                amp_limit: cfg.amp_limit,
                extend_to: (t_eps > t_compare).then_some(t_eps),
            },
        });
    }
    {
        let mut ns_cfg = cfg.clone();
        ns_cfg.params.epsilon = 1.0;
        ns_cfg.params.voigt = false;
        specs.push(MemberSpec {
            label: "ns_ref".into(),
            eps: None,
            config: ns_cfg,
            system: SystemKind::NavierStokes,
            opts: RunOptions {
                t_end: t_compare,
                diagnostics_every: cfg.diagnostics_every,
                store_velocity: true,
                sample_count: sweep.sample_count,
                amp_limit: cfg.amp_limit,
                extend_to: None,
            },
        });
    }

    let threads = args.threads.unwrap_or(1).max(1);
    let results = run_members(&out_dir, specs, &u0, &tau0, &stepper, seed, threads)?;

    // Metrics in eps order against the NS reference.
    let ns = results
        .iter()
        .find(|r| r.eps.is_none())
        .expect("NS member present");
    let mut rows: Vec<(f64, LimitMetrics, Option<f64>)> = Vec::new();
    let mut failed = None;
    for r in &results {
        let Some(eps) = r.eps else { continue };
        if r.outcome.blowup.is_some() {
            failed = Some((r.label.clone(), r.outcome.blowup.clone().unwrap()));
            continue;
        }
        let metrics =
            limit_metrics(&r.outcome.trajectory, &ns.outcome.trajectory).map_err(CliError::from)?;
        let t_eps = eps.powf(-2.0 / 3.0);
        let e_total = r.outcome.ledger.e_total_at(t_eps.max(t_compare));
        rows.push((eps, metrics, e_total));
    }

    let eps_vals: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let sigma_vals: Vec<f64> = rows.iter().map(|r| r.1.l2t_h2_sigma).collect();
    let gap_vals: Vec<f64> = rows.iter().map(|r| r.1.sup_h2_gap).collect();
    let (slope_sigma, slope_gap) = if rows.len() >= 2
        && sigma_vals.iter().all(|&v| v > 0.0)
        && gap_vals.iter().all(|&v| v > 0.0)
    {
        (
            log_log_slope(&eps_vals, &sigma_vals),
            log_log_slope(&eps_vals, &gap_vals),
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    let e_totals: Vec<f64> = rows.iter().filter_map(|r| r.2).collect();
    let uniform_ratio = if e_totals.is_empty() {
        f64::NAN
    } else {
        let max = e_totals.iter().cloned().fold(f64::MIN, f64::max);
        let min = e_totals.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    };

    let summary_path = out_dir.join(SUMMARY_NAME);
    let mut w = std::io::BufWriter::new(std::fs::File::create(&summary_path)?);
    writeln!(w, "{SUMMARY_HEADER}")?;
    for (eps, m, e_total) in &rows {
        let cells = [
            *eps,
            m.sup_h2_gap,
            m.sup_h5_gap,
            m.l2t_h2_sigma,
            e_total.unwrap_or(f64::NAN),
            slope_sigma,
            slope_gap,
            uniform_ratio,
        ]
        .iter()
        .map(|v| fmt_f64(*v))
        .collect::<Vec<_>>()
        .join(",");
        writeln!(w, "{cells}")?;
    }
    w.flush()?;
    drop(w);

    let manifest = RunManifest {
        schema: "ovlab-run/1".into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        experiment: cfg.experiment.to_string(),
        config: cfg.clone(),
        seed,
        start_unix_ms: start,
        end_unix_ms: manifest::now_ms(),
        exit_status: if failed.is_some() { "blow-up" } else { "ok" }.into(),
        blowup: failed.as_ref().map(|(_, b)| BlowupEntry {
            t: b.t,
            reason: b.reason.clone(),
        }),
        t_end: t_compare,
        epsilon: cfg.params.epsilon,
        snapshots: vec![],
        files: manifest::inventory(&out_dir)?,
    };
    manifest.write(&out_dir)?;

    println!("sweep summary written to {}", summary_path.display());
    if let Some((label, b)) = failed {
        return Err(CliError::BlowUp {
            t: b.t,
            reason: format!("member {label}: {}", b.reason),
        });
    }
    Ok(())
}

fn run_members(
    out_dir: &Path,
    specs: Vec<MemberSpec>,
    u0: &ovlab_core::fields::VelocityField,
    tau0: &ovlab_core::fields::SymTensorField,
    stepper: &StepperConfig,
    seed: Option<u64>,
    threads: usize,
) -> Result<Vec<MemberResult>> {
    let mut results: Vec<Option<Result<MemberResult>>> = Vec::new();
    results.resize_with(specs.len(), || None);
    let specs: Vec<_> = specs.into_iter().enumerate().collect();
    for wave in specs.chunks(threads) {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (idx, spec) in wave {
                handles.push(scope.spawn(move || {
                    (*idx, run_one_member(out_dir, spec, u0, tau0, stepper, seed))
                }));
            }
            for h in handles {
                let (idx, res) = h.join().expect("member thread panicked");
                results[idx] = Some(res);
            }
        });
    }
    results
        .into_iter()
        .map(|r| r.expect("all members ran"))
        .collect()
}

fn run_one_member(
    out_dir: &Path,
    spec: &MemberSpec,
    u0: &ovlab_core::fields::VelocityField,
    tau0: &ovlab_core::fields::SymTensorField,
    stepper: &StepperConfig,
    seed: Option<u64>,
) -> Result<MemberResult> {
    let dir = out_dir.join(&spec.label);
    std::fs::create_dir_all(&dir)?;
    let start = manifest::now_ms();
    let params = spec.config.model_params();
    let state = SimState::new(u0.clone(), tau0.clone(), params).map_err(CliError::from)?;
    let mut observer = DiskObserver::create(&dir, spec.config.snapshot_every)?;
    let outcome = run(spec.system, state, stepper, &spec.opts, &mut observer)
        .map_err(CliError::from)?;
    let snapshots = observer.finish(&outcome.final_state)?;
    let blowup = outcome.blowup.as_ref().map(|b| BlowupEntry {
        t: b.t,
        reason: b.reason.clone(),
    });
    let m = RunManifest {
        schema: "ovlab-run/1".into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        experiment: format!("sweep-member:{}", spec.label),
        config: spec.config.clone(),
        seed,
        start_unix_ms: start,
        end_unix_ms: manifest::now_ms(),
        exit_status: if blowup.is_some() { "blow-up" } else { "ok" }.into(),
        blowup,
        t_end: spec.opts.extend_to.unwrap_or(spec.opts.t_end),
        epsilon: params.epsilon,
        snapshots,
        files: manifest::inventory(&dir)?,
    };
    m.write(&dir)?;
    Ok(MemberResult {
        label: spec.label.clone(),
        eps: spec.eps,
        outcome,
    })
}
