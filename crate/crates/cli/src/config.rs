//! TOML run configuration. Unknown keys are rejected so typos in experiment
//! definitions fail fast.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ovlab_core::fields::{ModelParams, SymTensorField, VelocityField};
use ovlab_core::initial;
use ovlab_core::solver::{Scheme, StepperConfig};
use ovlab_core::spectral::Grid;

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Dispersion,
    Inflate,
    Simulate,
    Sweep,
    Audit,
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Experiment::Dispersion => "dispersion",
            Experiment::Inflate => "inflate",
            Experiment::Simulate => "simulate",
            Experiment::Sweep => "sweep",
            Experiment::Audit => "audit",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { nx: 64, ny: 64 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default = "minus_one")]
    pub b: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub voigt: bool,
    #[serde(default = "half")]
    pub nu_limit: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig {
            epsilon: 1.0,
            b: -1.0,
            a: 0.0,
            voigt: false,
            nu_limit: 0.5,
        }
    }
}

fn one() -> f64 {
    1.0
}
fn minus_one() -> f64 {
    -1.0
}
fn half() -> f64 {
    0.5
}
fn default_true() -> bool {
    true
}
fn default_cfl() -> f64 {
    0.5
}
fn default_dt() -> f64 {
    1e-2
}
fn default_cap() -> f64 {
    10.0
}
fn default_amp() -> f64 {
    1.0
}
fn default_kcut() -> i64 {
    4
}
fn default_amp_limit() -> f64 {
    1e6
}
fn default_sample_count() -> usize {
    80
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    /// "explicit-rk4" or "expint-imex"; defaults to the system's scheme.
    #[serde(default)]
    pub scheme: Option<String>,
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default = "default_cap")]
    pub eps_dt_cap_factor: f64,
}

impl Default for StepperSection {
    fn default() -> Self {
        StepperSection {
            dt: default_dt(),
            cfl_safety: default_cfl(),
            scheme: None,
            dealias: true,
            eps_dt_cap_factor: default_cap(),
        }
    }
}

/// Either a fixed horizon or the auto rule `t_end = ε^{−2/3}`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default)]
    pub t_end: Option<f64>,
    /// The only supported value is the literal string "eps^(-2/3)".
    #[serde(default)]
    pub auto: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// "taylor-green", "random-smooth", or "mode-probe".
    pub velocity: String,
    #[serde(default = "default_amp")]
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_kcut")]
    pub k_cut: i64,
    /// Probe wavenumber for "mode-probe".
    #[serde(default)]
    pub mode_k: Option<i64>,
    /// "well-prepared" (default), "zero", "background", "random-smooth".
    /// "mode-probe" velocities carry their own matched stress.
    #[serde(default)]
    pub stress: Option<String>,
    #[serde(default = "default_amp")]
    pub stress_amplitude: f64,
    #[serde(default)]
    pub stress_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSection {
    #[serde(default = "minus_two")]
    pub a: f64,
    #[serde(default = "minus_one")]
    pub b: f64,
    #[serde(default = "default_kmax")]
    pub k_max: i64,
}

fn minus_two() -> f64 {
    -2.0
}
fn default_kmax() -> i64 {
    64
}

impl Default for DispersionSection {
    fn default() -> Self {
        DispersionSection {
            a: -2.0,
            b: -1.0,
            k_max: 64,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InflateSection {
    #[serde(default = "default_klist")]
    pub k_list: Vec<i64>,
    #[serde(default = "three")]
    pub s: f64,
    #[serde(default = "default_ode_dt")]
    pub dt: f64,
}

fn default_klist() -> Vec<i64> {
    vec![2, 4, 8, 16]
}
fn three() -> f64 {
    3.0
}
fn default_ode_dt() -> f64 {
    1e-4
}

impl Default for InflateSection {
    fn default() -> Self {
        InflateSection {
            k_list: default_klist(),
            s: 3.0,
            dt: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Relaxation parameters, sorted descending.
    pub eps_list: Vec<f64>,
    /// Common comparison horizon for the limit metrics; each member still
    /// runs to at least ε^{−2/3} for the uniform-bound check.
    #[serde(default)]
    pub t_compare: Option<f64>,
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub stepper: StepperSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub initial_condition: Option<InitialSection>,
    /// Snapshot cadence in steps; 0 disables snapshots.
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default = "default_diag_every")]
    pub diagnostics_every: usize,
    #[serde(default = "default_amp_limit")]
    pub amp_limit: f64,
    #[serde(default)]
    pub dispersion: Option<DispersionSection>,
    #[serde(default)]
    pub inflate: Option<InflateSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

fn default_diag_every() -> usize {
    1
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.model_params().validate().map_err(CliError::from)?;
        if self.diagnostics_every == 0 {
            return Err(CliError::config("diagnostics_every must be >= 1"));
        }
        if self.snapshot_every > 0 && self.snapshot_every % self.diagnostics_every != 0 {
            return Err(CliError::config(
                "snapshot_every must be a multiple of diagnostics_every",
            ));
        }
        if let (Some(_), Some(_)) = (self.time.t_end, self.time.auto.as_deref()) {
            return Err(CliError::config("set either time.t_end or time.auto, not both"));
        }
        if let Some(auto) = self.time.auto.as_deref() {
            if auto != "eps^(-2/3)" {
                return Err(CliError::config(format!(
                    "unknown time.auto rule {auto:?}; supported: \"eps^(-2/3)\""
                )));
            }
        }
        if let Some(ic) = &self.initial_condition {
            match ic.velocity.as_str() {
                "taylor-green" | "random-smooth" | "zero" => {}
                "mode-probe" => {
                    if ic.mode_k.is_none() {
                        return Err(CliError::config("mode-probe requires initial_condition.mode_k"));
                    }
                }
                other => {
                    return Err(CliError::config(format!(
                        "unknown velocity generator {other:?}"
                    )))
                }
            }
            if let Some(stress) = ic.stress.as_deref() {
                match stress {
                    "well-prepared" | "zero" | "background" | "random-smooth" => {}
                    other => {
                        return Err(CliError::config(format!(
                            "unknown stress generator {other:?}"
                        )))
                    }
                }
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.eps_list.is_empty() {
                return Err(CliError::config("sweep.eps_list must not be empty"));
            }
            if sw.eps_list.iter().any(|&e| e <= 0.0) {
                return Err(CliError::config("sweep.eps_list entries must be positive"));
            }
            if sw.eps_list.windows(2).any(|w| w[0] <= w[1]) {
                return Err(CliError::config("sweep.eps_list must be sorted descending"));
            }
            if sw.sample_count == 0 {
                return Err(CliError::config("sweep.sample_count must be >= 1"));
            }
        }
        if let Some(d) = &self.dispersion {
            if d.k_max < 1 {
                return Err(CliError::config("dispersion.k_max must be >= 1"));
            }
        }
        if let Some(i) = &self.inflate {
            if i.k_list.is_empty() {
                return Err(CliError::config("inflate.k_list must not be empty"));
            }
        }
        Ok(())
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            epsilon: self.params.epsilon,
            b: self.params.b,
            a: self.params.a,
            voigt: self.params.voigt,
            nu_limit: self.params.nu_limit,
        }
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.nx, self.grid.ny).map_err(CliError::from)
    }

    /// Stepper with the scheme bound to the system being integrated.
    pub fn stepper_config(&self) -> Result<StepperConfig> {
        let scheme = match self.stepper.scheme.as_deref() {
            None => {
                if self.params.voigt {
                    Scheme::ExpintImex
                } else {
                    Scheme::ExplicitRk4
                }
            }
            Some("explicit-rk4") => Scheme::ExplicitRk4,
            Some("expint-imex") => Scheme::ExpintImex,
            Some(other) => {
                return Err(CliError::config(format!("unknown scheme {other:?}")));
            }
        };
        if self.params.voigt && scheme != Scheme::ExpintImex {
            return Err(CliError::config(
                "the Voigt system is stepped by the expint-imex scheme",
            ));
        }
        if !self.params.voigt && scheme != Scheme::ExplicitRk4 {
            return Err(CliError::config(
                "the unregularized system is stepped by explicit-rk4",
            ));
        }
        let cfg = StepperConfig {
            dt: self.stepper.dt,
            cfl_safety: self.stepper.cfl_safety,
            scheme,
            dealias: self.stepper.dealias,
            eps_dt_cap_factor: self.stepper.eps_dt_cap_factor,
            ..Default::default()
        };
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }

    /// Resolve the horizon, applying the `eps^(-2/3)` auto rule.
    pub fn resolve_t_end(&self) -> Result<f64> {
        match (self.time.t_end, self.time.auto.as_deref()) {
            (Some(t), None) => {
                if t < 0.0 {
                    Err(CliError::config("time.t_end must be nonnegative"))
                } else {
                    Ok(t)
                }
            }
            (None, Some("eps^(-2/3)")) => Ok(self.params.epsilon.powf(-2.0 / 3.0)),
            (None, None) => Err(CliError::config(
                "simulate/sweep needs time.t_end or time.auto",
            )),
            _ => unreachable!("validated"),
        }
    }

    /// Build the initial `(u, τ)` pair, applying seed overrides.
    pub fn build_initial(
        &self,
        grid: &Grid,
        seed_override: Option<u64>,
    ) -> Result<(VelocityField, SymTensorField)> {
        let ic = self
            .initial_condition
            .as_ref()
            .ok_or_else(|| CliError::config("missing [initial_condition]"))?;
        let seed = seed_override.or(self.seed).unwrap_or(ic.seed);
        let p = self.model_params();
        let u = match ic.velocity.as_str() {
            "zero" => VelocityField::zeros(grid),
            "taylor-green" => initial::taylor_green(grid, ic.amplitude)?,
            "random-smooth" => initial::random_smooth_velocity(grid, seed, ic.amplitude, ic.k_cut)?,
            "mode-probe" => {
                let k = ic.mode_k.expect("validated");
                let (u, tau) =
                    initial::mode_probe(grid, k, p.a, p.b, p.epsilon, p.voigt, ic.amplitude)?;
                if let Some(other) = ic.stress.as_deref() {
                    if other != "background" {
                        return Err(CliError::config(
                            "mode-probe pairs its own stress; stress must be omitted or \"background\"",
                        ));
                    }
                }
                return Ok((u, tau));
            }
            _ => unreachable!("validated"),
        };
        let tau = match ic.stress.as_deref().unwrap_or("well-prepared") {
            "well-prepared" => initial::well_prepared_stress(&u),
            "zero" => SymTensorField::zeros(grid),
            "background" => SymTensorField::isotropic(grid, p.a),
            "random-smooth" => initial::random_smooth_stress(
                grid,
                ic.stress_seed.wrapping_add(seed),
                ic.stress_amplitude,
                ic.k_cut,
            )?,
            _ => unreachable!("validated"),
        };
        Ok((u, tau))
    }
}
