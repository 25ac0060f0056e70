//! Linear analysis around the constant stress state `(u, τ) = (0, a·Id)`.
//!
//! The plane-wave ansatz `u = (0,1)ᵀ e^{λt} e^{ikx}` reduces the linearized
//! system to the quadratic `λ² + λ + c k² = 0` with `c = (1 − 2ab)/2`
//! (for `b = −1` this is the printed coefficient `a + 1/2`). Unstable
//! regimes have `c < 0` and `Re λ₊(k)` growing linearly in `k` — the
//! Hadamard signature. The Voigt regularization multiplies `λ²` by
//! `1 + k²`, which saturates the growth rate.

use rustfft::num_complex::Complex64;

use crate::fit;
use crate::{Error, Result};

/// Eigenstructure of one Fourier mode of the linearized system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionResult {
    pub k: i64,
    pub a: f64,
    pub b: f64,
    /// Root of larger real part (ties broken by larger imaginary part).
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    /// Stress eigenmode Σ: diagonal entries vanish, Σ₁₂ = Σ₂₁ = −iλ₊/k.
    pub sigma_11: Complex64,
    pub sigma_12: Complex64,
    pub sigma_22: Complex64,
    /// Pressure amplitude (zero for this ansatz).
    pub pressure_amp: Complex64,
}

/// Quadratic coefficient `c = (1 − 2ab)/2` of the dispersion relation.
pub fn dispersion_coefficient(a: f64, b: f64) -> f64 {
    (1.0 - 2.0 * a * b) / 2.0
}

/// Roots of `m λ² + λ/ε² + k² (1 − 2 a b ε²)/(2ε²) = 0`, the general-ε
/// dispersion relation; `m = 1 + k²` with the Voigt term, `m = 1` without.
/// Returns `(λ₊, λ₋)` ordered by real part, ties by imaginary part.
pub fn eigenvalues(k: f64, a: f64, b: f64, epsilon: f64, voigt: bool) -> (Complex64, Complex64) {
    let m = if voigt { 1.0 + k * k } else { 1.0 };
    let inv_eps2 = 1.0 / (epsilon * epsilon);
    let lin = inv_eps2;
    let con = k * k * (inv_eps2 - 2.0 * a * b) / 2.0;
    // m λ² + lin λ + con = 0, lin > 0. Real branch uses the q-method so the
    // small root comes from the product, free of cancellation.
    let disc = lin * lin - 4.0 * m * con;
    let (p, q) = if disc >= 0.0 {
        let q = -(lin + disc.sqrt()) / 2.0;
        (Complex64::new(q / m, 0.0), Complex64::new(con / q, 0.0))
    } else {
        let im = (-disc).sqrt() / (2.0 * m);
        let re = -lin / (2.0 * m);
        (Complex64::new(re, im), Complex64::new(re, -im))
    };
    order_roots(p, q)
}

fn order_roots(p: Complex64, q: Complex64) -> (Complex64, Complex64) {
    if p.re > q.re || (p.re == q.re && p.im >= q.im) {
        (p, q)
    } else {
        (q, p)
    }
}

/// Dispersion relation of the unregularized system (ε = 1 normalization).
///
/// Fails for `k = 0`, where the plane-wave ansatz degenerates.
pub fn dispersion(k: i64, a: f64, b: f64) -> Result<DispersionResult> {
    if k == 0 {
        return Err(Error::domain("dispersion: ansatz degenerate at k = 0"));
    }
    let (lp, lm) = eigenvalues(k as f64, a, b, 1.0, false);
    let sigma_12 = Complex64::new(0.0, -1.0) * lp / (k as f64);
    Ok(DispersionResult {
        k,
        a,
        b,
        lambda_plus: lp,
        lambda_minus: lm,
        sigma_11: Complex64::default(),
        sigma_12,
        sigma_22: Complex64::default(),
        pressure_amp: Complex64::default(),
    })
}

/// Asymptotic growth slope `Re λ₊(k_max) / k_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSlope {
    pub slope: f64,
    /// Set when `c ≥ 0`; the slope is reported as zero.
    pub stable: bool,
}

/// Slope of the Hadamard growth rate; tends to `√(−2c)/…` — for
/// `a = −2, b = −1` the limit is `√6/2 ≈ 1.2247`.
pub fn growth_slope(a: f64, b: f64, k_max: i64) -> Result<GrowthSlope> {
    if k_max < 1 {
        return Err(Error::domain("growth_slope: k_max must be >= 1"));
    }
    let c = dispersion_coefficient(a, b);
    if c >= 0.0 {
        return Ok(GrowthSlope {
            slope: 0.0,
            stable: true,
        });
    }
    let d = dispersion(k_max, a, b)?;
    Ok(GrowthSlope {
        slope: d.lambda_plus.re / k_max as f64,
        stable: false,
    })
}

/// State of one Fourier mode of the linearized system, plus the spatially
/// uniform stress component `η̄(t) = (e^{−t} − 1) τ_a` carried alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModeState {
    /// Vertical velocity amplitude û₂.
    pub u2: Complex64,
    /// Off-diagonal stress amplitude η̂₁₂ (= η̂₂₁).
    pub eta12: Complex64,
    /// Diagonal stress amplitude η̂₁₁; decoupled, decays like e^{−t}.
    pub eta11: Complex64,
    /// Scalar multiplying Id in the uniform component.
    pub eta_bar: f64,
}

impl LinearModeState {
    /// Initialize on the λ₊ eigenvector with the given velocity amplitude.
    pub fn eigen(k: i64, a: f64, b: f64, amplitude: Complex64) -> Result<Self> {
        let d = dispersion(k, a, b)?;
        Ok(LinearModeState {
            u2: amplitude,
            eta12: d.sigma_12 * amplitude,
            eta11: Complex64::default(),
            eta_bar: 0.0,
        })
    }
}

/// One classical 4th-order step of the linearized mode system
///
/// ```text
/// û₂' = ik η̂₁₂,   η̂₁₂' = (1 − 2ab)(ik û₂)/2 − η̂₁₂,   η̂₁₁' = −η̂₁₁,
/// η̄'  = −η̄ − a.
/// ```
pub fn linearized_step(state: LinearModeState, k: i64, a: f64, b: f64, dt: f64) -> LinearModeState {
    let rhs = |s: &LinearModeState| -> LinearModeState {
        let ik = Complex64::new(0.0, k as f64);
        LinearModeState {
            u2: ik * s.eta12,
            eta12: (1.0 - 2.0 * a * b) * (ik * s.u2) * 0.5 - s.eta12,
            eta11: -s.eta11,
            eta_bar: -s.eta_bar - a,
        }
    };
    let add = |s: &LinearModeState, c: f64, d: &LinearModeState| LinearModeState {
        u2: s.u2 + c * d.u2,
        eta12: s.eta12 + c * d.eta12,
        eta11: s.eta11 + c * d.eta11,
        eta_bar: s.eta_bar + c * d.eta_bar,
    };
    let k1 = rhs(&state);
    let k2 = rhs(&add(&state, dt / 2.0, &k1));
    let k3 = rhs(&add(&state, dt / 2.0, &k2));
    let k4 = rhs(&add(&state, dt, &k3));
    let mut out = state;
    out.u2 += dt / 6.0 * (k1.u2 + 2.0 * k2.u2 + 2.0 * k3.u2 + k4.u2);
    out.eta12 += dt / 6.0 * (k1.eta12 + 2.0 * k2.eta12 + 2.0 * k3.eta12 + k4.eta12);
    out.eta11 += dt / 6.0 * (k1.eta11 + 2.0 * k2.eta11 + 2.0 * k3.eta11 + k4.eta11);
    out.eta_bar += dt / 6.0 * (k1.eta_bar + 2.0 * k2.eta_bar + 2.0 * k3.eta_bar + k4.eta_bar);
    out
}

/// Measure the growth rate of the eigen-initialized mode by the
/// least-squares slope of `log |û₂|` over `[0, t_final]`.
pub fn linearized_growth_rate(k: i64, a: f64, b: f64, dt: f64, t_final: f64) -> Result<f64> {
    let mut state = LinearModeState::eigen(k, a, b, Complex64::new(1.0, 0.0))?;
    let steps = (t_final / dt).round().max(1.0) as usize;
    let mut ts = Vec::with_capacity(steps + 1);
    let mut logs = Vec::with_capacity(steps + 1);
    ts.push(0.0);
    logs.push(state.u2.norm().ln());
    for n in 1..=steps {
        state = linearized_step(state, k, a, b, dt);
        ts.push(n as f64 * dt);
        logs.push(state.u2.norm().ln());
    }
    Ok(fit::linear_fit(&ts, &logs).0)
}

/// Trajectories of the norm-inflation ODE together with its closed-form
/// comparison solution.
#[derive(Debug, Clone)]
pub struct InflationTrace {
    pub k: i64,
    pub s: f64,
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// `α₁(t) = k^{−s} e^{λ₊(k) t}` with `λ² + λ − (3/2)k² = 0`.
    pub alpha_comparison: Vec<f64>,
    /// `β₁(t) = λ₊(k) k^{−s−1} e^{λ₊(k) t}`.
    pub beta_comparison: Vec<f64>,
    pub lambda_plus: f64,
}

impl InflationTrace {
    /// H^s-norm proxy `kˢ α(1)`; bounded below by `e^{λ₊(k)}`.
    pub fn norm_proxy(&self) -> f64 {
        (self.k as f64).powf(self.s) * *self.alpha.last().unwrap()
    }

    /// Comparison lower bound `e^{λ₊(k)}`.
    pub fn lower_bound(&self) -> f64 {
        self.lambda_plus.exp()
    }
}

/// Integrate the norm-inflation system on `[0, 1]`,
///
/// ```text
/// α' = kβ,   β' + β = k (2e^{1−t} − 1/2) α,
/// α(0) = 2k^{−s},   β(0) = 2 λ₊(k) k^{−s−1},
/// ```
///
/// by classical 4th-order steps of size `dt`.
pub fn inflation_ode(k: i64, s: f64, dt: f64) -> Result<InflationTrace> {
    if k <= 1 {
        return Err(Error::domain("inflation_ode: requires k > 1"));
    }
    if s < 3.0 {
        return Err(Error::domain("inflation_ode: requires s >= 3"));
    }
    if !(dt > 0.0 && dt <= 0.1) {
        return Err(Error::domain("inflation_ode: dt must lie in (0, 0.1]"));
    }
    let kf = k as f64;
    let lambda_plus = dispersion(k, -2.0, -1.0)?.lambda_plus.re;
    let mut alpha = 2.0 * kf.powf(-s);
    let mut beta = 2.0 * lambda_plus * kf.powf(-s - 1.0);

    let steps = (1.0 / dt).ceil() as usize;
    let h = 1.0 / steps as f64;
    let rhs = |t: f64, a: f64, b: f64| -> (f64, f64) {
        let coef = kf * (2.0 * (1.0 - t).exp() - 0.5);
        (kf * b, coef * a - b)
    };

    let mut trace = InflationTrace {
        k,
        s,
        times: Vec::with_capacity(steps + 1),
        alpha: Vec::with_capacity(steps + 1),
        beta: Vec::with_capacity(steps + 1),
        alpha_comparison: Vec::with_capacity(steps + 1),
        beta_comparison: Vec::with_capacity(steps + 1),
        lambda_plus,
    };
    let push = |t: f64, a: f64, b: f64, trace: &mut InflationTrace| -> Result<()> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::numerical(format!(
                "inflation trajectory non-positive at t = {t}: alpha = {a}, beta = {b}"
            )));
        }
        trace.times.push(t);
        trace.alpha.push(a);
        trace.beta.push(b);
        let grow = (lambda_plus * t).exp();
        trace.alpha_comparison.push(kf.powf(-s) * grow);
        trace
            .beta_comparison
            .push(lambda_plus * kf.powf(-s - 1.0) * grow);
        Ok(())
    };
    push(0.0, alpha, beta, &mut trace)?;
    for n in 0..steps {
        let t = n as f64 * h;
        let (ka1, kb1) = rhs(t, alpha, beta);
        let (ka2, kb2) = rhs(t + h / 2.0, alpha + h / 2.0 * ka1, beta + h / 2.0 * kb1);
        let (ka3, kb3) = rhs(t + h / 2.0, alpha + h / 2.0 * ka2, beta + h / 2.0 * kb2);
        let (ka4, kb4) = rhs(t + h, alpha + h * ka3, beta + h * kb3);
        alpha += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        beta += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        push((n + 1) as f64 * h, alpha, beta, &mut trace)?;
    }
    Ok(trace)
}
