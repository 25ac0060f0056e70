//! Spectral Sobolev norms, the two-tier energy ledger, decay fits, and
//! relaxation-limit metrics.
//!
//! Norm conventions:
//!
//! - `‖f‖_{H^s}² = (2π)² Σ_k (1+|k|²)^s Σ_c w_c |f̂_k|²` (Bessel multiplier
//!   on true wavenumbers, Parseval constant so `s = 0` is the integral L²
//!   norm). Symmetric-tensor components carry Frobenius weights.
//! - Norms of lists like `‖u, σ, ∇σ‖²` are sums of the squared norms of the
//!   listed objects.

use crate::fields::{tightened_sigma, VelocityField};
use crate::fit;
use crate::solver::SimState;
use crate::spectral::SpectralField;
use crate::{Error, Result};

const TWO_PI_SQ: f64 = (2.0 * std::f64::consts::PI) * (2.0 * std::f64::consts::PI);
const PARSEVAL: f64 = TWO_PI_SQ;

/// Sobolev index with the Bessel-multiplier convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSpec {
    pub s: f64,
}

impl SobolevSpec {
    pub fn new(s: f64) -> Self {
        assert!(s >= 0.0, "Sobolev index must be nonnegative");
        SobolevSpec { s }
    }

    pub fn norm(&self, f: &SpectralField) -> f64 {
        sobolev_norm(f, self.s)
    }
}

/// `‖f‖_{H^s}`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    sobolev_norm_sq(f, s).sqrt()
}

/// `‖f‖_{H^s}²`.
pub fn sobolev_norm_sq(f: &SpectralField, s: f64) -> f64 {
    weighted_sum(f, |k2| (1.0 + k2).powf(s))
}

/// `‖∇f‖_{H^s}²  = Σ_k |k|² (1+|k|²)^s …` — the gradient adds one |k| factor
/// to every component.
pub fn grad_sobolev_norm_sq(f: &SpectralField, s: f64) -> f64 {
    weighted_sum(f, |k2| k2 * (1.0 + k2).powf(s))
}

fn weighted_sum(f: &SpectralField, mult: impl Fn(f64) -> f64) -> f64 {
    let g = f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut total = 0.0;
    for c in 0..f.ncomp() {
        let w = f.weights()[c];
        let comp = f.comp(c);
        let mut acc = 0.0;
        for j in 0..ny {
            let ky = g.ky(j);
            for i in 0..nx {
                let kx = g.kx(i);
                let k2 = kx * kx + ky * ky;
                acc += mult(k2) * comp[j * nx + i].norm_sqr();
            }
        }
        total += w * acc;
    }
    PARSEVAL * total
}

/// L² inner product `⟨f, g⟩ = (2π)² Σ_k Σ_c w_c Re(f̂ ĝ*)`.
pub fn l2_inner(f: &SpectralField, g: &SpectralField) -> f64 {
    assert_eq!(f.grid(), g.grid());
    assert_eq!(f.ncomp(), g.ncomp());
    let mut total = 0.0;
    let n = f.grid().len();
    for c in 0..f.ncomp() {
        let w = f.weights()[c];
        let (a, b) = (f.comp(c), g.comp(c));
        let mut acc = 0.0;
        for p in 0..n {
            acc += (a[p] * b[p].conj()).re;
        }
        total += w * acc;
    }
    PARSEVAL * total
}

/// One diagnostics sample: instantaneous norms plus the running energies at
/// that time. All values needed to rebuild the ledger live here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerSample {
    pub t: f64,
    /// `‖u‖_{H^1}` … `‖u‖_{H^6}`.
    pub u_h: [f64; 6],
    pub tau_h2: f64,
    pub tau_h6: f64,
    pub sigma_h2: f64,
    /// Candidate for the low-norm sup: `‖u, σ, ∇σ‖²_{H²}`.
    pub sup_low_cand: f64,
    /// Integrand of the low-norm integral: `‖∇u, σ/ε‖²_{H²}`.
    pub int_low_integrand: f64,
    /// Candidate for the high-norm sup: `‖u, ετ, ε∇τ‖²_{H⁶}`.
    pub sup_high_cand: f64,
    /// Integrand of the high-norm integral: `‖τ‖²_{H⁶}`.
    pub int_high_integrand: f64,
    pub e_low: f64,
    pub e_high: f64,
    pub e_total: f64,
}

/// Running suprema and time-integrals composing the two-tier energy.
///
/// Integral terms accumulate by the trapezoid rule at the sampling cadence;
/// sup terms are running maxima over the sampled times. A ledger belongs to
/// one run.
#[derive(Debug, Clone, Default)]
pub struct EnergyLedger {
    sup_low: f64,
    int_low: f64,
    sup_high: f64,
    int_high: f64,
    prev: Option<(f64, f64, f64)>, // (t, int_low integrand, int_high integrand)
    samples: Vec<LedgerSample>,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record the state at time `state.t`. Samples must arrive in time order.
    pub fn update(&mut self, state: &SimState) {
        let eps = state.params.epsilon;
        let u = &state.u;
        let tau = &state.tau;
        let sigma = tightened_sigma(u, tau);

        let u_h = [
            sobolev_norm(u.spectral(), 1.0),
            sobolev_norm(u.spectral(), 2.0),
            sobolev_norm(u.spectral(), 3.0),
            sobolev_norm(u.spectral(), 4.0),
            sobolev_norm(u.spectral(), 5.0),
            sobolev_norm(u.spectral(), 6.0),
        ];
        let tau_h2 = sobolev_norm(tau.spectral(), 2.0);
        let tau_h6_sq = sobolev_norm_sq(tau.spectral(), 6.0);
        let sigma_h2_sq = sobolev_norm_sq(sigma.spectral(), 2.0);

        let sup_low_cand = u_h[1] * u_h[1]
            + sigma_h2_sq
            + grad_sobolev_norm_sq(sigma.spectral(), 2.0);
        let int_low_integrand =
            grad_sobolev_norm_sq(u.spectral(), 2.0) + sigma_h2_sq / (eps * eps);
        let sup_high_cand = u_h[5] * u_h[5]
            + eps * eps * (tau_h6_sq + grad_sobolev_norm_sq(tau.spectral(), 6.0));
        let int_high_integrand = tau_h6_sq;

        self.sup_low = self.sup_low.max(sup_low_cand);
        self.sup_high = self.sup_high.max(sup_high_cand);
        if let Some((t0, f_low, f_high)) = self.prev {
            let dt = state.t - t0;
            self.int_low += 0.5 * dt * (f_low + int_low_integrand);
            self.int_high += 0.5 * dt * (f_high + int_high_integrand);
        }
        self.prev = Some((state.t, int_low_integrand, int_high_integrand));

        self.samples.push(LedgerSample {
            t: state.t,
            u_h,
            tau_h2,
            tau_h6: tau_h6_sq.sqrt(),
            sigma_h2: sigma_h2_sq.sqrt(),
            sup_low_cand,
            int_low_integrand,
            sup_high_cand,
            int_high_integrand,
            e_low: self.e_low(),
            e_high: self.e_high(),
            e_total: self.e_total(),
        });
    }

    pub fn e_low(&self) -> f64 {
        self.sup_low + self.int_low
    }

    pub fn e_high(&self) -> f64 {
        self.sup_high + self.int_high
    }

    pub fn e_total(&self) -> f64 {
        self.e_low() + self.e_high()
    }

    pub fn samples(&self) -> &[LedgerSample] {
        &self.samples
    }

    /// E_total at the last sample with `t ≤ t_query`.
    pub fn e_total_at(&self, t_query: f64) -> Option<f64> {
        self.samples
            .iter()
            .take_while(|s| s.t <= t_query + 1e-12)
            .last()
            .map(|s| s.e_total)
    }
}

/// Result of fitting an exponential decay with a floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Estimated decay rate of `‖u(t)‖²_{H¹}` (zero when flagged).
    pub rate: f64,
    /// Late-time plateau estimate.
    pub floor: f64,
    /// Set when the series does not decay.
    pub no_decay: bool,
}

/// Fit `y(t) ≈ C e^{−rate·t} + floor` to a sampled series.
///
/// The floor is the median of the last fifth of the samples; the rate is the
/// least-squares slope of `log(y − floor)` over the early window where the
/// decaying part still dominates.
pub fn decay_fit(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < 10 {
        return Err(Error::domain(format!(
            "decay_fit needs at least 10 samples, got {}",
            samples.len()
        )));
    }
    let tail_start = samples.len() - (samples.len() / 5).max(3);
    let mut tail: Vec<f64> = samples[tail_start..].iter().map(|&(_, y)| y).collect();
    tail.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let floor = tail[tail.len() / 2];

    let z0 = samples[0].1 - floor;
    if z0 <= 0.0 {
        return Ok(DecayFit {
            rate: 0.0,
            floor,
            no_decay: true,
        });
    }
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for &(t, y) in samples {
        let z = y - floor;
        if z < 0.05 * z0 {
            break;
        }
        ts.push(t);
        logs.push(z.ln());
    }
    if ts.len() < 5 {
        return Ok(DecayFit {
            rate: 0.0,
            floor,
            no_decay: true,
        });
    }
    let (slope, _) = fit::linear_fit(&ts, &logs);
    if slope >= -1e-12 {
        return Ok(DecayFit {
            rate: 0.0,
            floor,
            no_decay: true,
        });
    }
    Ok(DecayFit {
        rate: -slope,
        floor,
        no_decay: false,
    })
}

/// Sampled trajectory of one run: shared sample times, stored velocity
/// fields, and the stress-deviation norm series.
///
/// The σ series is kept at the (fine) diagnostics cadence, not the velocity
/// cadence: with an initial layer of duration `O(ε²)` the `L²`-in-time
/// quadrature needs the layer resolved.
#[derive(Debug, Clone, Default)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub velocity: Vec<VelocityField>,
    /// `(t, ‖σ(t)‖_{H²})` at every diagnostics sample.
    pub sigma_series: Vec<(f64, f64)>,
}

/// Gap metrics between a relaxation run and its Navier-Stokes reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitMetrics {
    /// `sup_t ‖u_ε(t) − v(t)‖_{H²}` over the shared samples.
    pub sup_h2_gap: f64,
    /// Same gap in H⁵ (reported; desk-scale thresholds attach to H²).
    pub sup_h5_gap: f64,
    /// `‖τ_ε − D(u_ε)‖_{L²(0,T;H²)}` from the ε-run's own deviation series.
    pub l2t_h2_sigma: f64,
}

/// Compare a Voigt run against a Navier-Stokes reference on identical grids
/// and shared sample times.
pub fn limit_metrics(
    run_eps: &TrajectoryRecord,
    run_ns: &TrajectoryRecord,
) -> Result<LimitMetrics> {
    if run_eps.times.len() != run_ns.times.len() || run_eps.times.is_empty() {
        return Err(Error::config(format!(
            "limit_metrics: sample counts differ ({} vs {})",
            run_eps.times.len(),
            run_ns.times.len()
        )));
    }
    for (a, b) in run_eps.times.iter().zip(&run_ns.times) {
        if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
            return Err(Error::config(format!(
                "limit_metrics: sample times differ ({a} vs {b})"
            )));
        }
    }
    if run_eps.velocity.len() != run_eps.times.len()
        || run_ns.velocity.len() != run_ns.times.len()
    {
        return Err(Error::config("limit_metrics: runs did not store velocity samples"));
    }
    if run_eps.velocity[0].grid() != run_ns.velocity[0].grid() {
        return Err(Error::config("limit_metrics: grids differ"));
    }
    if run_eps.sigma_series.is_empty() {
        return Err(Error::config("limit_metrics: ε-run lacks the σ series"));
    }

    let mut sup_h2 = 0.0f64;
    let mut sup_h5 = 0.0f64;
    for (ue, un) in run_eps.velocity.iter().zip(&run_ns.velocity) {
        let diff = ue.spectral() - un.spectral();
        sup_h2 = sup_h2.max(sobolev_norm(&diff, 2.0));
        sup_h5 = sup_h5.max(sobolev_norm(&diff, 5.0));
    }
    // Trapezoid of the squared fine series over the shared window.
    let t_last = *run_eps.times.last().unwrap();
    let mut int = 0.0;
    for w in run_eps.sigma_series.windows(2) {
        let ((t0, a), (t1, b)) = (w[0], w[1]);
        if t0 > t_last + 1e-12 {
            break;
        }
        let hi = t1.min(t_last);
        int += 0.5 * (hi - t0) * (a * a + b * b);
    }
    Ok(LimitMetrics {
        sup_h2_gap: sup_h2,
        sup_h5_gap: sup_h5,
        l2t_h2_sigma: int.sqrt(),
    })
}
