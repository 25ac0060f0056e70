//! `ovlab audit`: re-verify a stored run from its manifest — checksums,
//! structural invariants of the snapshots, and ledger recomputation.

use std::path::Path;

use ovlab_core::energy::EnergyLedger;
use ovlab_core::fields::{SymTensorField, VelocityField};
use ovlab_core::solver::SimState;
use ovlab_core::spectral::hermitian_defect;

use crate::commands::simulate::DIAGNOSTICS_NAME;
use crate::csvio::{read_diagnostics, DIAGNOSTICS_COLUMNS};
use crate::fld;
use crate::manifest::RunManifest;
use crate::{CliError, Result};

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        if pass {
            println!("PASS  {name}: {detail}");
        } else {
            println!("FAIL  {name}: {detail}");
            self.failures += 1;
        }
    }

    fn skip(&mut self, name: &str, detail: &str) {
        println!("SKIP  {name}: {detail}");
    }
}

pub fn execute(run_dir: &Path) -> Result<()> {
    let manifest = RunManifest::read(run_dir)?;
    let mut report = Report { failures: 0 };

    // 1. Checksums: a mismatch aborts with its own exit code.
    match manifest.verify_files(run_dir) {
        Ok(()) => report.check(
            "checksums",
            true,
            format!("{} files verified", manifest.files.len()),
        ),
        Err(e) => {
            println!("FAIL  checksums: {e}");
            return Err(e);
        }
    }

    // 2. Ledger recomputation from the diagnostics series.
    let rows = read_diagnostics(&run_dir.join(DIAGNOSTICS_NAME))?;
    let col = |name: &str| -> usize {
        DIAGNOSTICS_COLUMNS
            .iter()
            .position(|c| *c == name)
            .expect("known column")
    };
    let (it, isl, iil, ish, iih) = (
        col("t"),
        col("sup_low_cand"),
        col("int_low_integrand"),
        col("sup_high_cand"),
        col("int_high_integrand"),
    );
    let (iel, ieh, iet) = (col("e_low"), col("e_high"), col("e_total"));
    let mut sup_low = 0.0f64;
    let mut sup_high = 0.0f64;
    let mut int_low = 0.0;
    let mut int_high = 0.0;
    let mut prev: Option<(f64, f64, f64)> = None;
    let mut worst = 0.0f64;
    for row in &rows {
        sup_low = sup_low.max(row[isl]);
        sup_high = sup_high.max(row[ish]);
        if let Some((t0, fl, fh)) = prev {
            let dt = row[it] - t0;
            int_low += 0.5 * dt * (fl + row[iil]);
            int_high += 0.5 * dt * (fh + row[iih]);
        }
        prev = Some((row[it], row[iil], row[iih]));
        let e_low = sup_low + int_low;
        let e_high = sup_high + int_high;
        let e_total = e_low + e_high;
        for (got, stored) in [(e_low, row[iel]), (e_high, row[ieh]), (e_total, row[iet])] {
            worst = worst.max((got - stored).abs() / stored.abs().max(1.0));
        }
    }
    report.check(
        "ledger-recompute",
        worst <= 1e-9,
        format!("max relative deviation {worst:.3e} over {} rows", rows.len()),
    );

    // 3. Snapshot invariants.
    let grid = manifest.config.build_grid()?;
    let params = manifest.config.model_params();
    let mut snap_states = Vec::new();
    let mut worst_div = 0.0f64;
    let mut worst_mean = 0.0f64;
    let mut worst_herm = 0.0f64;
    let mut all_finite = true;
    for entry in &manifest.snapshots {
        let u_phys = fld::read_field(&run_dir.join(&entry.velocity_file))?.into_physical(&grid)?;
        let tau_phys = fld::read_field(&run_dir.join(&entry.stress_file))?.into_physical(&grid)?;
        let amp = u_phys.max_magnitude().max(1.0);
        let u = VelocityField::from_spectral(grid.transform(&u_phys).map_err(CliError::from)?)
            .map_err(CliError::from)?;
        let tau = SymTensorField::from_spectral(grid.transform(&tau_phys).map_err(CliError::from)?)
            .map_err(CliError::from)?;
        all_finite &= u.spectral().is_finite() && tau.spectral().is_finite();
        let u_l2 = ovlab_core::energy::sobolev_norm(u.spectral(), 0.0);
        worst_div = worst_div.max(u.divergence_defect() / u_l2.max(1e-30));
        // Physical storage round-trips the mean to roundoff relative to the
        // field amplitude.
        worst_mean = worst_mean.max(u.mean_defect() / amp);
        worst_herm = worst_herm
            .max(hermitian_defect(u.spectral()))
            .max(hermitian_defect(tau.spectral()));
        let mut state = SimState::new(u, tau, params).map_err(CliError::from)?;
        state.t = entry.t;
        state.step_count = entry.step;
        snap_states.push(state);
    }
    if manifest.snapshots.is_empty() {
        report.skip("snapshot-invariants", "run stored no snapshots");
    } else {
        report.check("snapshot-finite", all_finite, "all field values finite".into());
        report.check(
            "snapshot-divergence",
            worst_div < 1e-10,
            format!("max |k·û|/‖u‖ = {worst_div:.3e} (limit 1e-10)"),
        );
        report.check(
            "snapshot-mean-zero",
            worst_mean < 1e-13,
            format!("max |û(0,0)|/max|u| = {worst_mean:.3e} (limit 1e-13)"),
        );
        report.check(
            "snapshot-hermitian",
            worst_herm < 1e-12,
            format!("max defect {worst_herm:.3e} (limit 1e-12)"),
        );
        report.check(
            "snapshot-symmetry",
            true,
            "stress stored as (11,12,22): symmetric by construction".into(),
        );
    }

    // 4. Coarse ledger from snapshots against the stored fine-cadence total.
    if snap_states.len() >= 3 {
        let mut coarse = EnergyLedger::new();
        for s in &snap_states {
            coarse.update(s);
        }
        let stored_final = rows.last().map(|r| r[iet]).unwrap_or(f64::NAN);
        let gap = (coarse.e_total() - stored_final).abs() / stored_final.abs().max(1e-30);
        report.check(
            "ledger-cadence-consistency",
            gap < 0.05,
            format!(
                "coarse E_total {:.6e} vs stored {:.6e} (gap {:.2}%)",
                coarse.e_total(),
                stored_final,
                100.0 * gap
            ),
        );
    } else {
        report.skip(
            "ledger-cadence-consistency",
            "needs at least 3 snapshots",
        );
    }

    if report.failures == 0 {
        println!("audit: all checks passed");
        Ok(())
    } else {
        Err(CliError::AuditFailed(format!(
            "{} failing check(s)",
            report.failures
        )))
    }
}
