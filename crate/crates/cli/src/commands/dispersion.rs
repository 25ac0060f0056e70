//! `ovlab dispersion`: tabulate λ±(k) with a linearized-stepper cross-check.

use std::io::Write;

use ovlab_core::linear;

use crate::commands::{create_fresh_dir, load_config, resolve_output_dir, GlobalArgs};
use crate::config::Experiment;
use crate::csvio::fmt_f64;
use crate::manifest::{self, RunManifest};
use crate::{CliError, Result};

pub const TABLE_NAME: &str = "dispersion.csv";

pub fn execute(args: &GlobalArgs) -> Result<()> {
    let cfg = load_config(args, Experiment::Dispersion)?;
    let section = cfg.dispersion.clone().unwrap_or_default();
    let out_dir = resolve_output_dir(&cfg, args);
    create_fresh_dir(&out_dir)?;
    let start = manifest::now_ms();

    let path = out_dir.join(TABLE_NAME);
    let file = std::fs::File::create(&path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(
        w,
        "k,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,slope,stepper_rate,rel_err"
    )?;
    for k in 1..=section.k_max {
        let d = linear::dispersion(k, section.a, section.b).map_err(CliError::from)?;
        let lp = d.lambda_plus;
        // Cross-check: eigen-initialized RK4 growth rate of the mode.
        let dt = (0.05 / lp.norm().max(1.0)).min(1e-2);
        let t_final = if lp.re > 0.1 { 2.0 / lp.re } else { 2.0 };
        let rate = linear::linearized_growth_rate(k, section.a, section.b, dt, t_final)
            .map_err(CliError::from)?;
        let rel_err = (rate - lp.re).abs() / lp.re.abs().max(1.0);
        let row = [
            k as f64,
            lp.re,
            lp.im,
            d.lambda_minus.re,
            d.lambda_minus.im,
            lp.re / k as f64,
            rate,
            rel_err,
        ];
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", cells.join(","))?;
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
        t_end: 0.0,
        epsilon: cfg.params.epsilon,
        snapshots: vec![],
        files: manifest::inventory(&out_dir)?,
    };
    m.write(&out_dir)?;
    println!("dispersion table written to {}", path.display());
    Ok(())
}
