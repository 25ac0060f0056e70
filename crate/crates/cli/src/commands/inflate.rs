//! `ovlab inflate`: norm-inflation ODE table.

use std::io::Write;

use ovlab_core::linear;

use crate::commands::{create_fresh_dir, load_config, resolve_output_dir, GlobalArgs};
use crate::config::Experiment;
use crate::csvio::fmt_f64;
use crate::manifest::{self, RunManifest};
use crate::{CliError, Result};

pub const TABLE_NAME: &str = "inflate.csv";

pub fn execute(args: &GlobalArgs) -> Result<()> {
    let cfg = load_config(args, Experiment::Inflate)?;
    let section = cfg.inflate.clone().unwrap_or_default();
    let out_dir = resolve_output_dir(&cfg, args);
    create_fresh_dir(&out_dir)?;
    let start = manifest::now_ms();

    let path = out_dir.join(TABLE_NAME);
    let file = std::fs::File::create(&path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "k,s,alpha_1,lower_bound,ratio")?;
    for &k in &section.k_list {
        let trace = linear::inflation_ode(k, section.s, section.dt).map_err(|e| {
            match e {
                ovlab_core::Error::Numerical(m) => CliError::Integrator(m),
                other => CliError::from(other),
            }
        })?;
        let alpha1_end = *trace.alpha_comparison.last().unwrap();
        let lower = trace.lower_bound();
        let ratio = trace.norm_proxy() / lower;
        let cells = [k as f64, section.s, alpha1_end, lower, ratio]
            .iter()
            .map(|v| fmt_f64(*v))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{cells}")?;
    }
    w.flush()?;
    drop(w);

    let m = RunManifest {
        schema: "ovlab-run/1".into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        experiment: cfg.experiment.to_string(),
        config: cfg.clone(),
        seed: args.seed.or(cfg.seed),
        start_unix_ms: start,
        end_unix_ms: manifest::now_ms(),
        exit_status: "ok".into(),
        blowup: None,
        t_end: 1.0,
        epsilon: cfg.params.epsilon,
        snapshots: vec![],
        files: manifest::inventory(&out_dir)?,
    };
    m.write(&out_dir)?;
    println!("inflation table written to {}", path.display());
    Ok(())
}
