//! Time integration of the three nonlinear systems.
//!
//! - Euler-Oldroyd-B: classical explicit RK4 on `(û, τ̂)`; blow-up is the
//!   expected outcome in the unstable regime and is reported, not raised.
//! - Voigt-Oldroyd-B: the stiff relaxation `−τ/ε²` becomes, after Helmholtz
//!   inversion, a diagonal decay with per-mode rate `r_k = 1/(ε²(1+|k|²))`.
//!   The stress is advanced by a 2nd-order exponential rule (exact
//!   integrating factor `e^{−r_k dt}` on the linear part, explicit treatment
//!   of advection, Q and `D(u)/ε²`); the momentum equation by Heun.
//! - Navier-Stokes (the ε → 0 limit, ν = 1/2): RK4 with integrating-factor
//!   treatment of the viscous term.
//!
//! Pressure is never formed: the momentum right-hand side is Leray-projected
//! and its mean mode zeroed after every evaluation.

use rustfft::num_complex::Complex64;

use crate::energy::EnergyLedger;
use crate::fields::{advect, q_form, sym_gradient, ModelParams, SymTensorField, VelocityField};
use crate::fit;
use crate::spectral::{dealias, leray_project, SpectralField};
use crate::{energy::TrajectoryRecord, Error, Result};

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Classical explicit 4th order (Euler-Oldroyd-B).
    ExplicitRk4,
    /// Exponential-IMEX rule for the Voigt stress equation.
    ExpintImex,
}

/// Stepper configuration shared by all systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    /// CFL factor in (0, 1]: the step obeys `dt ≤ cfl_safety · h / max|u|`.
    pub cfl_safety: f64,
    pub scheme: Scheme,
    /// Always true in production; nonlinear products are 2/3-truncated.
    pub dealias: bool,
    /// Accuracy cap `dt ≤ factor · ε²` for the explicit relaxation coupling
    /// in the Voigt stepper. Set to `f64::INFINITY` to disable.
    pub eps_dt_cap_factor: f64,
    /// Retry budget when the CFL bound rejects a step.
    pub max_halvings: u32,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt: 1e-2,
            cfl_safety: 0.5,
            scheme: Scheme::ExpintImex,
            dealias: true,
            eps_dt_cap_factor: 10.0,
            max_halvings: 20,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::config(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !self.dealias {
            return Err(Error::config(
                "dealias = false is not supported: production runs truncate every product",
            ));
        }
        if !(self.eps_dt_cap_factor > 0.0) {
            return Err(Error::config("eps_dt_cap_factor must be positive"));
        }
        Ok(())
    }
}

/// Which system a run integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    EulerOldroydB,
    VoigtOldroydB,
    NavierStokes,
}

/// Instantaneous solver state.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u: VelocityField,
    pub tau: SymTensorField,
    pub params: ModelParams,
    pub step_count: u64,
}

impl SimState {
    pub fn new(u: VelocityField, tau: SymTensorField, params: ModelParams) -> Result<SimState> {
        params.validate()?;
        if u.grid() != tau.grid() {
            return Err(Error::config("velocity and stress live on different grids"));
        }
        Ok(SimState {
            t: 0.0,
            u,
            tau,
            params,
            step_count: 0,
        })
    }

    fn check_finite(&self) -> Result<()> {
        if self.u.spectral().is_finite() && self.tau.spectral().is_finite() {
            Ok(())
        } else {
            Err(Error::BlowUp { t: self.t })
        }
    }
}

/// `∇·τ` as a 2-component field: `(∂x τ₁₁ + ∂y τ₁₂, ∂x τ₁₂ + ∂y τ₂₂)`.
fn div_tensor(tau: &SymTensorField) -> SpectralField {
    let g = tau.grid().clone();
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = SpectralField::zeros(g.clone(), 2);
    let (t11, t12, t22) = (
        tau.spectral().comp(0),
        tau.spectral().comp(1),
        tau.spectral().comp(2),
    );
    let n = g.len();
    let (c0, c1) = out.data_mut().split_at_mut(n);
    for j in 0..ny {
        let iky = Complex64::new(0.0, g.dky(j));
        for i in 0..nx {
            let ikx = Complex64::new(0.0, g.dkx(i));
            let p = j * nx + i;
            c0[p] = ikx * t11[p] + iky * t12[p];
            c1[p] = ikx * t12[p] + iky * t22[p];
        }
    }
    out
}

/// Leray-projected momentum right-hand side `P[−u·∇u + ∇·τ]`, mean-zeroed.
fn momentum_rhs(u: &VelocityField, tau: &SymTensorField) -> SpectralField {
    let mut rhs = advect(u, u.spectral());
    rhs.scale(-1.0);
    rhs.scaled_add(1.0, &div_tensor(tau));
    let mut projected = leray_project(&rhs);
    projected.zero_mean();
    projected
}

/// Full Euler-Oldroyd-B right-hand side.
fn euler_rhs(u: &VelocityField, tau: &SymTensorField, p: &ModelParams) -> (SpectralField, SpectralField) {
    let du = momentum_rhs(u, tau);
    let inv_eps2 = 1.0 / (p.epsilon * p.epsilon);
    let mut dtau = advect(u, tau.spectral());
    dtau.scale(-1.0);
    dtau.scaled_add(-1.0, q_form(tau, u, p.b).spectral());
    dtau.scaled_add(inv_eps2, sym_gradient(u).spectral());
    dtau.scaled_add(-inv_eps2, tau.spectral());
    (du, dtau)
}

/// Nonstiff part of the Voigt stress equation after Helmholtz inversion:
/// `[−u·∇τ − Q(τ,∇u) + D(u)/ε²] / (1 + |k|²)`.
fn voigt_nonstiff(u: &VelocityField, tau: &SymTensorField, p: &ModelParams) -> SpectralField {
    let inv_eps2 = 1.0 / (p.epsilon * p.epsilon);
    let mut g = advect(u, tau.spectral());
    g.scale(-1.0);
    g.scaled_add(-1.0, q_form(tau, u, p.b).spectral());
    g.scaled_add(inv_eps2, sym_gradient(u).spectral());
    crate::spectral::inverse_helmholtz(&g)
}

fn restore_invariants(state: &mut SimState, cfg: &StepperConfig) {
    state.u.project_in_place();
    if cfg.dealias {
        dealias(state.u.spectral_mut());
        dealias(state.tau.spectral_mut());
    }
}

/// Largest admissible step at the current state; `Err` when the CFL bound
/// would force more than `max_halvings` halvings of the configured dt.
fn admissible_dt(
    state: &SimState,
    cfg: &StepperConfig,
    system: SystemKind,
    max_speed: f64,
) -> Result<f64> {
    let mut dt = cfg.dt;
    if system == SystemKind::VoigtOldroydB {
        let cap = cfg.eps_dt_cap_factor * state.params.epsilon * state.params.epsilon;
        dt = dt.min(cap);
    }
    if max_speed > 0.0 {
        let limit = cfg.cfl_safety * state.u.grid().h_min() / max_speed;
        let mut halvings = 0;
        while dt > limit {
            dt *= 0.5;
            halvings += 1;
            if halvings > cfg.max_halvings {
                return Err(Error::CflExhausted { t: state.t, dt });
            }
        }
    }
    Ok(dt)
}

/// One RK4 step of the Euler-Oldroyd-B system with an explicit step size.
fn euler_ob_step_dt(state: &SimState, cfg: &StepperConfig, dt: f64) -> Result<SimState> {
    let p = &state.params;
    let wrap = |u: SpectralField, tau: SpectralField| -> (VelocityField, SymTensorField) {
        (VelocityField(u), SymTensorField(tau))
    };
    let stage = |cu: f64, ku: &SpectralField, ct: f64, kt: &SpectralField| {
        let mut su = state.u.spectral().clone();
        su.scaled_add(cu, ku);
        let mut st = state.tau.spectral().clone();
        st.scaled_add(ct, kt);
        wrap(su, st)
    };

    let (k1u, k1t) = euler_rhs(&state.u, &state.tau, p);
    let (s2u, s2t) = stage(dt / 2.0, &k1u, dt / 2.0, &k1t);
    let (k2u, k2t) = euler_rhs(&s2u, &s2t, p);
    let (s3u, s3t) = stage(dt / 2.0, &k2u, dt / 2.0, &k2t);
    let (k3u, k3t) = euler_rhs(&s3u, &s3t, p);
    let (s4u, s4t) = stage(dt, &k3u, dt, &k3t);
    let (k4u, k4t) = euler_rhs(&s4u, &s4t, p);

    let mut u_new = state.u.spectral().clone();
    let mut tau_new = state.tau.spectral().clone();
    for (c, ku, kt) in [
        (dt / 6.0, &k1u, &k1t),
        (dt / 3.0, &k2u, &k2t),
        (dt / 3.0, &k3u, &k3t),
        (dt / 6.0, &k4u, &k4t),
    ] {
        u_new.scaled_add(c, ku);
        tau_new.scaled_add(c, kt);
    }

    let mut out = SimState {
        t: state.t + dt,
        u: VelocityField(u_new),
        tau: SymTensorField(tau_new),
        params: *p,
        step_count: state.step_count + 1,
    };
    restore_invariants(&mut out, cfg);
    out.check_finite()?;
    Ok(out)
}

/// One exponential-IMEX step of the Voigt-Oldroyd-B system.
///
/// Stress: ETD2RK on `∂t τ̂ = −r_k τ̂ + g(û, τ̂)` with the exact factor
/// `e^{−r_k dt}`; exact on the decoupled relaxation problem. Momentum: Heun.
fn voigt_ob_step_dt(state: &SimState, cfg: &StepperConfig, dt: f64) -> Result<SimState> {
    let p = &state.params;
    let grid = state.u.grid().clone();
    let (nx, ny) = (grid.nx(), grid.ny());
    let n = grid.len();

    // Per-mode integrating factor and φ-functions of z = −r_k dt.
    let mut fac_e = vec![0.0f64; n];
    let mut fac_p1 = vec![0.0f64; n];
    let mut fac_p2 = vec![0.0f64; n];
    let inv_eps2 = 1.0 / (p.epsilon * p.epsilon);
    for j in 0..ny {
        let ky = grid.dky(j);
        for i in 0..nx {
            let kx = grid.dkx(i);
            let r = inv_eps2 / (1.0 + kx * kx + ky * ky);
            let z = -r * dt;
            let e = z.exp();
            fac_e[j * nx + i] = e;
            fac_p1[j * nx + i] = if z.abs() < 1e-5 {
                1.0 + z / 2.0 + z * z / 6.0
            } else {
                (e - 1.0) / z
            };
            fac_p2[j * nx + i] = if z.abs() < 1e-3 {
                0.5 + z / 6.0 + z * z / 24.0
            } else {
                (e - 1.0 - z) / (z * z)
            };
        }
    }
    let apply = |tau: &SpectralField, fac: &[f64], scale: f64| -> SpectralField {
        let mut out = tau.clone();
        for c in 0..out.ncomp() {
            let comp = out.comp_mut(c);
            for (v, f) in comp.iter_mut().zip(fac) {
                *v *= f * scale;
            }
        }
        out
    };

    let f1 = momentum_rhs(&state.u, &state.tau);
    let g1 = voigt_nonstiff(&state.u, &state.tau, p);

    // Predictor.
    let mut u_p = state.u.spectral().clone();
    u_p.scaled_add(dt, &f1);
    let mut tau_p = apply(state.tau.spectral(), &fac_e, 1.0);
    tau_p.scaled_add(1.0, &apply(&g1, &fac_p1, dt));
    let (u_p, tau_p) = (VelocityField(u_p), SymTensorField(tau_p));

    let f2 = momentum_rhs(&u_p, &tau_p);
    let g2 = voigt_nonstiff(&u_p, &tau_p, p);

    // Corrector.
    let mut u_new = state.u.spectral().clone();
    u_new.scaled_add(dt / 2.0, &f1);
    u_new.scaled_add(dt / 2.0, &f2);
    let mut tau_new = tau_p.0;
    let gdiff = &g2 - &g1;
    tau_new.scaled_add(1.0, &apply(&gdiff, &fac_p2, dt));

    let mut out = SimState {
        t: state.t + dt,
        u: VelocityField(u_new),
        tau: SymTensorField(tau_new),
        params: *p,
        step_count: state.step_count + 1,
    };
    restore_invariants(&mut out, cfg);
    out.check_finite()?;
    Ok(out)
}

/// One integrating-factor RK4 step of the limit Navier-Stokes equations
/// (`ν = 1/2`); the stress field is carried along unchanged.
fn ns_step_dt(state: &SimState, cfg: &StepperConfig, dt: f64) -> Result<SimState> {
    let grid = state.u.grid().clone();
    let (nx, ny) = (grid.nx(), grid.ny());
    let n = grid.len();
    let nu = state.params.nu_limit;
    let mut half = vec![0.0f64; n];
    for j in 0..ny {
        let ky = grid.dky(j);
        for i in 0..nx {
            let kx = grid.dkx(i);
            half[j * nx + i] = (-nu * (kx * kx + ky * ky) * dt / 2.0).exp();
        }
    }
    let apply = |f: &SpectralField, fac: &[f64], squared: bool| -> SpectralField {
        let mut out = f.clone();
        for c in 0..out.ncomp() {
            for (v, e) in out.comp_mut(c).iter_mut().zip(fac) {
                *v *= if squared { e * e } else { *e };
            }
        }
        out
    };
    let nl = |u: &SpectralField| -> SpectralField {
        let v = VelocityField(u.clone());
        let mut rhs = advect(&v, v.spectral());
        rhs.scale(-1.0);
        let mut projected = leray_project(&rhs);
        projected.zero_mean();
        projected
    };

    let v = state.u.spectral();
    let a = nl(v);
    let mut vb = v.clone();
    vb.scaled_add(dt / 2.0, &a);
    let b = nl(&apply(&vb, &half, false));
    let mut vc = apply(v, &half, false);
    vc.scaled_add(dt / 2.0, &b);
    let c = nl(&vc);
    let mut vd = apply(v, &half, true);
    vd.scaled_add(dt, &apply(&c, &half, false));
    let d = nl(&vd);

    let mut v_new = apply(v, &half, true);
    v_new.scaled_add(dt / 6.0, &apply(&a, &half, true));
    let mut bc = b.clone();
    bc.scaled_add(1.0, &c);
    v_new.scaled_add(dt / 3.0, &apply(&bc, &half, false));
    v_new.scaled_add(dt / 6.0, &d);

    let mut out = SimState {
        t: state.t + dt,
        u: VelocityField(v_new),
        tau: state.tau.clone(),
        params: state.params,
        step_count: state.step_count + 1,
    };
    restore_invariants(&mut out, cfg);
    out.check_finite()?;
    Ok(out)
}

fn step_with_dt(
    system: SystemKind,
    state: &SimState,
    cfg: &StepperConfig,
    dt: f64,
) -> Result<SimState> {
    match system {
        SystemKind::EulerOldroydB => euler_ob_step_dt(state, cfg, dt),
        SystemKind::VoigtOldroydB => voigt_ob_step_dt(state, cfg, dt),
        SystemKind::NavierStokes => ns_step_dt(state, cfg, dt),
    }
}

/// Advance the Euler-Oldroyd-B system by one (possibly CFL-halved) step.
pub fn euler_ob_step(state: &SimState, cfg: &StepperConfig) -> Result<SimState> {
    cfg.validate()?;
    let dt = admissible_dt(state, cfg, SystemKind::EulerOldroydB, state.u.max_speed())?;
    euler_ob_step_dt(state, cfg, dt)
}

/// Advance the Voigt-Oldroyd-B system by one (possibly CFL-halved) step.
pub fn voigt_ob_step(state: &SimState, cfg: &StepperConfig) -> Result<SimState> {
    cfg.validate()?;
    let dt = admissible_dt(state, cfg, SystemKind::VoigtOldroydB, state.u.max_speed())?;
    voigt_ob_step_dt(state, cfg, dt)
}

/// Advance the limit Navier-Stokes equations by one step.
pub fn ns_step(state: &SimState, cfg: &StepperConfig) -> Result<SimState> {
    cfg.validate()?;
    let dt = admissible_dt(state, cfg, SystemKind::NavierStokes, state.u.max_speed())?;
    ns_step_dt(state, cfg, dt)
}

/// Halt report for runs that left the computable regime.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupReport {
    pub t: f64,
    pub reason: String,
}

/// Options for a driven run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    /// Ledger/observer cadence in steps (≥ 1).
    pub diagnostics_every: usize,
    /// Store velocity snapshots at `sample_count` evenly spaced times (the
    /// stepping lands on those times exactly, so sweep members share them).
    pub store_velocity: bool,
    pub sample_count: usize,
    /// Treat `max|u|` beyond this as blow-up.
    pub amp_limit: f64,
    /// Keep stepping (ledger still accumulating, no trajectory samples)
    /// until this time after the sampled window ends.
    pub extend_to: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            t_end: 1.0,
            diagnostics_every: 1,
            store_velocity: false,
            sample_count: 64,
            amp_limit: 1e6,
            extend_to: None,
        }
    }
}

/// Callback surface for diagnostics sinks. Samples arrive in time order,
/// from a single producer.
pub trait RunObserver {
    fn on_sample(&mut self, state: &SimState, ledger: &EnergyLedger) -> Result<()>;
}

/// Observer that ignores everything.
pub struct NullObserver;

impl RunObserver for NullObserver {
    fn on_sample(&mut self, _: &SimState, _: &EnergyLedger) -> Result<()> {
        Ok(())
    }
}

/// Result of a driven run; on blow-up the partial ledger and trajectory are
/// preserved and `blowup` is set.
#[derive(Debug)]
pub struct RunOutcome {
    pub final_state: SimState,
    pub ledger: EnergyLedger,
    pub trajectory: TrajectoryRecord,
    pub blowup: Option<BlowupReport>,
}

/// Drive a system to `t_end`, sampling diagnostics at the configured cadence.
pub fn run(
    system: SystemKind,
    initial: SimState,
    cfg: &StepperConfig,
    opts: &RunOptions,
    observer: &mut dyn RunObserver,
) -> Result<RunOutcome> {
    cfg.validate()?;
    initial.params.validate()?;
    if opts.t_end < initial.t {
        return Err(Error::config("t_end lies before the initial time"));
    }
    if opts.diagnostics_every == 0 {
        return Err(Error::config("diagnostics_every must be >= 1"));
    }
    if opts.store_velocity && opts.sample_count == 0 {
        return Err(Error::config("sample_count must be >= 1 when storing velocity"));
    }

    let mut state = initial;
    let mut ledger = EnergyLedger::new();
    let mut trajectory = TrajectoryRecord::default();
    ledger.update(&state);
    observer.on_sample(&state, &ledger)?;
    if opts.store_velocity {
        push_velocity_sample(&mut trajectory, &state);
        push_sigma_sample(&mut trajectory, &ledger);
    }

    let t0 = state.t;
    let span = opts.t_end - t0;
    let mut boundaries: Vec<(f64, bool)> = if span <= 0.0 {
        Vec::new()
    } else if opts.store_velocity {
        (1..=opts.sample_count)
            .map(|i| (t0 + span * i as f64 / opts.sample_count as f64, true))
            .collect()
    } else {
        vec![(opts.t_end, false)]
    };
    if let Some(te) = opts.extend_to {
        if te > opts.t_end {
            boundaries.push((te, false));
        }
    }

    let mut blowup = None;
    'outer: for &(tb, sample_velocity) in &boundaries {
        loop {
            let remaining = tb - state.t;
            if remaining <= 1e-12 * tb.abs().max(1.0) {
                break;
            }
            let max_speed = state.u.max_speed();
            if max_speed > opts.amp_limit {
                blowup = Some(BlowupReport {
                    t: state.t,
                    reason: format!(
                        "amplitude {max_speed:.3e} exceeded limit {:.3e}",
                        opts.amp_limit
                    ),
                });
                break 'outer;
            }
            let allowed = match admissible_dt(&state, cfg, system, max_speed) {
                Ok(dt) => dt,
                Err(Error::CflExhausted { t, dt }) => {
                    blowup = Some(BlowupReport {
                        t,
                        reason: format!("CFL retries exhausted (dt = {dt:.3e})"),
                    });
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            let nsub = (remaining / allowed).ceil().max(1.0);
            let dt = remaining / nsub;
            state = match step_with_dt(system, &state, cfg, dt) {
                Ok(s) => s,
                Err(Error::BlowUp { t }) => {
                    blowup = Some(BlowupReport {
                        t,
                        reason: "non-finite field values".into(),
                    });
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            let at_boundary = (tb - state.t) <= 1e-12 * tb.abs().max(1.0);
            if at_boundary || state.step_count % opts.diagnostics_every as u64 == 0 {
                ledger.update(&state);
                observer.on_sample(&state, &ledger)?;
                if opts.store_velocity {
                    push_sigma_sample(&mut trajectory, &ledger);
                }
                if at_boundary && sample_velocity {
                    push_velocity_sample(&mut trajectory, &state);
                }
            }
            if at_boundary {
                break;
            }
        }
    }

    Ok(RunOutcome {
        final_state: state,
        ledger,
        trajectory,
        blowup,
    })
}

fn push_velocity_sample(traj: &mut TrajectoryRecord, state: &SimState) {
    traj.times.push(state.t);
    traj.velocity.push(state.u.clone());
}

fn push_sigma_sample(traj: &mut TrajectoryRecord, ledger: &EnergyLedger) {
    if let Some(s) = ledger.samples().last() {
        traj.sigma_series.push((s.t, s.sigma_h2));
    }
}

/// Early-time growth rate of the probed mode `û₂(k, 0)`.
///
/// Steps the system over `[0, t_window]` and reads the linear coefficient of
/// a quadratic fit to `log |û₂|(t)`, which removes the first-order bias from
/// the slow decay of the stress background.
pub fn measure_mode_growth(
    system: SystemKind,
    initial: &SimState,
    cfg: &StepperConfig,
    k: i64,
    t_window: f64,
) -> Result<f64> {
    cfg.validate()?;
    let mut state = initial.clone();
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    let record = |s: &SimState, ts: &mut Vec<f64>, logs: &mut Vec<f64>| {
        let amp = s.u.spectral().coeff(1, k, 0).norm();
        if amp > 0.0 {
            ts.push(s.t);
            logs.push(amp.ln());
        }
    };
    record(&state, &mut ts, &mut logs);
    let t_end = initial.t + t_window;
    while state.t < t_end - 1e-12 {
        let max_speed = state.u.max_speed();
        let allowed = admissible_dt(&state, cfg, system, max_speed)?;
        let remaining = t_end - state.t;
        let nsub = (remaining / allowed).ceil().max(1.0);
        state = step_with_dt(system, &state, cfg, remaining / nsub)?;
        record(&state, &mut ts, &mut logs);
    }
    if ts.len() < 8 {
        return Err(Error::numerical("too few growth samples for the rate fit"));
    }
    Ok(fit::quadratic_fit_linear_coef(&ts, &logs))
}
