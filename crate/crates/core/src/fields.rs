//! Typed fields and the tensor calculus of the model.
//!
//! Gradient convention: `(∇u)_{ij} = ∂_j u_i`, so for `u = (0,1)ᵀ e^{ikx}`
//! the matrix `∇u` has `ik` in entry (2,1). Symmetric tensors store the
//! components (11, 12, 22); the off-diagonal carries quadrature weight 2 so
//! spectral norms match the full-matrix Frobenius norm.

use rustfft::num_complex::Complex64;

use crate::spectral::{dealias, derivative, divergence, leray_project, Axis, Grid, SpectralField};
use crate::{Error, Result};

/// Viscosity of the limiting Navier-Stokes equations, `∇·D(v) = ½Δv`.
pub const NU_LIMIT: f64 = 0.5;

/// Model parameters shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Relaxation parameter; the relaxation time scale is `ε²`.
    pub epsilon: f64,
    /// Coefficient of the symmetric part of the rotation correction Q.
    pub b: f64,
    /// Background stress amplitude `τ_a = a·Id` for instability studies.
    pub a: f64,
    /// Time-step the Voigt-regularized stress equation instead of the
    /// unregularized one.
    pub voigt: bool,
    /// Viscosity of the limit equations; must stay at [`NU_LIMIT`].
    pub nu_limit: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            epsilon: 1.0,
            b: -1.0,
            a: 0.0,
            voigt: false,
            nu_limit: NU_LIMIT,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.nu_limit != NU_LIMIT {
            return Err(Error::config(format!(
                "nu_limit is fixed at {NU_LIMIT} by the limit equation, got {}",
                self.nu_limit
            )));
        }
        Ok(())
    }
}

/// Scalar field (e.g. vorticity) in spectral representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField(pub(crate) SpectralField);

/// Divergence-free, mean-zero velocity field.
///
/// The invariants are maintained by the solvers (projection after every
/// step); this type does not re-check them on every operation.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField(pub(crate) SpectralField);

/// Symmetric 2×2 tensor field storing components (11, 12, 22).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField(pub(crate) SpectralField);

/// Antisymmetric 2×2 tensor field; stores the single component W₁₂
/// (`W₂₁ = −W₁₂`, zero diagonal) with Frobenius weight 2.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewTensorField(pub(crate) SpectralField);

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        ScalarField(SpectralField::zeros(grid.clone(), 1))
    }

    pub fn from_spectral(f: SpectralField) -> Result<Self> {
        if f.ncomp() != 1 {
            return Err(Error::config("scalar field needs exactly 1 component"));
        }
        Ok(ScalarField(f))
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Ok(ScalarField(SpectralField::from_fn(grid, |x, y| [f(x, y)])?))
    }

    pub fn spectral(&self) -> &SpectralField {
        &self.0
    }
}

impl VelocityField {
    pub fn zeros(grid: &Grid) -> Self {
        VelocityField(SpectralField::zeros(grid.clone(), 2))
    }

    pub fn from_spectral(f: SpectralField) -> Result<Self> {
        if f.ncomp() != 2 {
            return Err(Error::config("velocity field needs exactly 2 components"));
        }
        Ok(VelocityField(f))
    }

    /// Sample `(u₁, u₂)` on the grid, transform, project and dealias.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> [f64; 2]) -> Result<Self> {
        let mut spec = SpectralField::from_fn(grid, f)?;
        dealias(&mut spec);
        let mut u = VelocityField(leray_project(&spec));
        u.0.zero_mean();
        Ok(u)
    }

    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }

    pub fn spectral(&self) -> &SpectralField {
        &self.0
    }

    pub fn spectral_mut(&mut self) -> &mut SpectralField {
        &mut self.0
    }

    /// Restore the divergence-free and mean-zero invariants.
    pub fn project_in_place(&mut self) {
        self.0 = leray_project(&self.0);
        self.0.zero_mean();
    }

    /// Largest spectral divergence coefficient, `max_k |k·û_k|`.
    pub fn divergence_defect(&self) -> f64 {
        divergence(&self.0).max_coeff()
    }

    /// Magnitude of the mean mode.
    pub fn mean_defect(&self) -> f64 {
        self.0.coeff(0, 0, 0).norm().max(self.0.coeff(1, 0, 0).norm())
    }

    /// Largest pointwise speed on the grid.
    pub fn max_speed(&self) -> f64 {
        self.0.to_physical().max_magnitude()
    }
}

impl SymTensorField {
    pub fn zeros(grid: &Grid) -> Self {
        let mut f = SpectralField::zeros(grid.clone(), 3);
        f.set_weights(vec![1.0, 2.0, 1.0]);
        SymTensorField(f)
    }

    pub fn from_spectral(mut f: SpectralField) -> Result<Self> {
        if f.ncomp() != 3 {
            return Err(Error::config(
                "symmetric tensor field needs exactly 3 components (11, 12, 22)",
            ));
        }
        f.set_weights(vec![1.0, 2.0, 1.0]);
        Ok(SymTensorField(f))
    }

    /// Sample `(τ₁₁, τ₁₂, τ₂₂)` on the grid.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> [f64; 3]) -> Result<Self> {
        Self::from_spectral(SpectralField::from_fn(grid, f)?)
    }

    /// Uniform isotropic state `a·Id`.
    pub fn isotropic(grid: &Grid, a: f64) -> Self {
        let mut t = Self::zeros(grid);
        t.0.set_coeff(0, 0, 0, Complex64::new(a, 0.0));
        t.0.set_coeff(2, 0, 0, Complex64::new(a, 0.0));
        t
    }

    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }

    pub fn spectral(&self) -> &SpectralField {
        &self.0
    }

    pub fn spectral_mut(&mut self) -> &mut SpectralField {
        &mut self.0
    }
}

impl SkewTensorField {
    pub fn from_spectral(mut f: SpectralField) -> Result<Self> {
        if f.ncomp() != 1 {
            return Err(Error::config(
                "antisymmetric tensor field stores exactly 1 component (12)",
            ));
        }
        f.set_weights(vec![2.0]);
        Ok(SkewTensorField(f))
    }

    pub fn spectral(&self) -> &SpectralField {
        &self.0
    }

    /// Entry (1,2); entry (2,1) is its negative.
    pub fn w12(&self) -> &SpectralField {
        &self.0
    }
}

/// Symmetric gradient `D(u) = (∇u + ∇uᵀ)/2`.
pub fn sym_gradient(u: &VelocityField) -> SymTensorField {
    let du1dx = derivative(&comp_view(&u.0, 0), Axis::X, 1);
    let du1dy = derivative(&comp_view(&u.0, 0), Axis::Y, 1);
    let du2dx = derivative(&comp_view(&u.0, 1), Axis::X, 1);
    let du2dy = derivative(&comp_view(&u.0, 1), Axis::Y, 1);
    let mut d = SymTensorField::zeros(u.grid());
    d.0.comp_mut(0).copy_from_slice(du1dx.comp(0));
    for (dst, (a, b)) in d
        .0
        .comp_mut(1)
        .iter_mut()
        .zip(du1dy.comp(0).iter().zip(du2dx.comp(0)))
    {
        *dst = 0.5 * (a + b);
    }
    d.0.comp_mut(2).copy_from_slice(du2dy.comp(0));
    d
}

/// Antisymmetric gradient `W(u) = (∇u − ∇uᵀ)/2`; `W₁₂ = (∂_y u₁ − ∂_x u₂)/2`.
pub fn skew_gradient(u: &VelocityField) -> SkewTensorField {
    let du1dy = derivative(&comp_view(&u.0, 0), Axis::Y, 1);
    let du2dx = derivative(&comp_view(&u.0, 1), Axis::X, 1);
    let mut w = SpectralField::zeros(u.grid().clone(), 1);
    for (dst, (a, b)) in w
        .comp_mut(0)
        .iter_mut()
        .zip(du1dy.comp(0).iter().zip(du2dx.comp(0)))
    {
        *dst = 0.5 * (a - b);
    }
    SkewTensorField::from_spectral(w).expect("1 component by construction")
}

/// Vorticity `ω = ∂_x u₂ − ∂_y u₁`.
pub fn vorticity(u: &VelocityField) -> ScalarField {
    let du2dx = derivative(&comp_view(&u.0, 1), Axis::X, 1);
    let du1dy = derivative(&comp_view(&u.0, 0), Axis::Y, 1);
    ScalarField::from_spectral(&du2dx - &du1dy).expect("1 component by construction")
}

/// Rotation correction `Q(τ, ∇u) = τW − Wτ + b(τD + Dτ)`.
///
/// Computed pointwise in physical space from the stored symmetric and
/// antisymmetric parts, then dealiased. Bilinear in `(τ, ∇u)`; the output is
/// symmetric because a symmetric/antisymmetric commutator and a symmetric
/// anticommutator both are.
pub fn q_form(tau: &SymTensorField, u: &VelocityField, b: f64) -> SymTensorField {
    let grid = u.grid().clone();
    assert_eq!(tau.grid(), &grid, "q_form: shared grid required");
    let d = sym_gradient(u);
    let w = skew_gradient(u);
    let tp = tau.0.to_physical();
    let dp = d.0.to_physical();
    let wp = w.0.to_physical();

    let n = grid.len();
    let mut q = crate::spectral::PhysicalField::zeros(grid.clone(), 3);
    {
        let (t11, t12, t22) = (tp.comp(0), tp.comp(1), tp.comp(2));
        let (d11, d12, d22) = (dp.comp(0), dp.comp(1), dp.comp(2));
        let w12 = wp.comp(0);
        for p in 0..n {
            let (t11, t12, t22) = (t11[p], t12[p], t22[p]);
            let (d11, d12, d22) = (d11[p], d12[p], d22[p]);
            let w = w12[p];
            q.comp_mut(0)[p] = -2.0 * w * t12 + 2.0 * b * (t11 * d11 + t12 * d12);
            q.comp_mut(1)[p] =
                w * (t11 - t22) + b * (t11 * d12 + t12 * d22 + d11 * t12 + d12 * t22);
            q.comp_mut(2)[p] = 2.0 * w * t12 + 2.0 * b * (t12 * d12 + t22 * d22);
        }
    }
    let mut spec = grid.transform(&q).expect("grid matches by construction");
    dealias(&mut spec);
    SymTensorField::from_spectral(spec).expect("3 components by construction")
}

/// Advection `u·∇f`, computed pointwise in physical space and dealiased.
///
/// Works on any component count; the output keeps the layout of `f`.
pub fn advect(u: &VelocityField, f: &SpectralField) -> SpectralField {
    let grid = u.grid().clone();
    assert_eq!(f.grid(), &grid, "advect: shared grid required");
    let up = u.0.to_physical();
    let n = grid.len();
    let mut out_phys = crate::spectral::PhysicalField::zeros(grid.clone(), f.ncomp());
    for c in 0..f.ncomp() {
        let fx = derivative(&comp_view(f, c), Axis::X, 1).to_physical();
        let fy = derivative(&comp_view(f, c), Axis::Y, 1).to_physical();
        let dst = out_phys.comp_mut(c);
        for p in 0..n {
            dst[p] = up.comp(0)[p] * fx.comp(0)[p] + up.comp(1)[p] * fy.comp(0)[p];
        }
    }
    let mut spec = grid.transform(&out_phys).expect("grid matches");
    spec.set_weights(f.weights().to_vec());
    dealias(&mut spec);
    spec
}

/// Tightened variable `σ = τ − D(u)`, an exact spectral subtraction.
pub fn tightened_sigma(u: &VelocityField, tau: &SymTensorField) -> SymTensorField {
    let d = sym_gradient(u);
    SymTensorField::from_spectral(&tau.0 - &d.0).expect("3 components by construction")
}

/// Single-component view used to feed scalar operators.
fn comp_view(f: &SpectralField, c: usize) -> SpectralField {
    let mut out = SpectralField::zeros(f.grid().clone(), 1);
    out.comp_mut(0).copy_from_slice(f.comp(c));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::l2_inner;
    use approx::assert_relative_eq;

    fn grid() -> Grid {
        Grid::new(32, 32).unwrap()
    }

    fn taylor_green(g: &Grid) -> VelocityField {
        VelocityField::from_fn(g, |x, y| [x.sin() * y.cos(), -(x.cos()) * y.sin()]).unwrap()
    }

    fn assert_phys_eq(f: &SpectralField, comp: usize, expect: impl Fn(f64, f64) -> f64, tol: f64) {
        let g = f.grid().clone();
        let p = f.to_physical();
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let (x, y) = g.point(i, j);
                let got = p.comp(comp)[j * g.nx() + i];
                let want = expect(x, y);
                assert!(
                    (got - want).abs() < tol,
                    "comp {comp} at ({x:.3},{y:.3}): got {got:e}, want {want:e}"
                );
            }
        }
    }

    #[test]
    fn sym_gradient_shear() {
        let g = grid();
        let u = VelocityField::from_fn(&g, |_, y| [y.sin(), 0.0]).unwrap();
        let d = sym_gradient(&u);
        assert_phys_eq(&d.0, 0, |_, _| 0.0, 1e-12);
        assert_phys_eq(&d.0, 1, |_, y| y.cos() / 2.0, 1e-12);
        assert_phys_eq(&d.0, 2, |_, _| 0.0, 1e-12);
    }

    #[test]
    fn sym_gradient_zero_velocity() {
        let g = grid();
        let d = sym_gradient(&VelocityField::zeros(&g));
        assert_eq!(d.0.max_coeff(), 0.0);
    }

    #[test]
    fn sym_gradient_taylor_green() {
        let g = grid();
        let d = sym_gradient(&taylor_green(&g));
        assert_phys_eq(&d.0, 0, |x, y| x.cos() * y.cos(), 1e-12);
        assert_phys_eq(&d.0, 1, |_, _| 0.0, 1e-12);
        assert_phys_eq(&d.0, 2, |x, y| -(x.cos() * y.cos()), 1e-12);
    }

    #[test]
    fn sym_gradient_trace_is_divergence() {
        let g = grid();
        let d = sym_gradient(&taylor_green(&g));
        let trace = &comp_view(&d.0, 0) + &comp_view(&d.0, 2);
        assert!(trace.max_coeff() < 1e-12);
    }

    #[test]
    fn skew_gradient_shear_and_vorticity_identity() {
        let g = grid();
        let u = VelocityField::from_fn(&g, |_, y| [y.sin(), 0.0]).unwrap();
        let w = skew_gradient(&u);
        assert_phys_eq(&w.0, 0, |_, y| y.cos() / 2.0, 1e-12);
        // W₁₂ = −ω/2 with ω = ∂x u₂ − ∂y u₁ = −cos y.
        let om = vorticity(&u);
        assert_phys_eq(&om.0, 0, |_, y| -y.cos(), 1e-12);
        let half_neg_omega = {
            let mut f = om.0.clone();
            f.scale(-0.5);
            f
        };
        assert!((&w.0 - &half_neg_omega).max_coeff() < 1e-13);
    }

    #[test]
    fn skew_gradient_of_gradient_field_vanishes() {
        let g = grid();
        // (sin x, 0) = ∇(−cos x) is curl-free. Built raw: no projection here.
        let spec = SpectralField::from_fn(&g, |x, _| [x.sin(), 0.0]).unwrap();
        let u = VelocityField::from_spectral(spec).unwrap();
        let w = skew_gradient(&u);
        assert!(w.0.max_coeff() < 1e-13);
        assert!(vorticity(&u).0.max_coeff() < 1e-13);
    }

    #[test]
    fn vorticity_taylor_green() {
        let g = grid();
        let om = vorticity(&taylor_green(&g));
        assert_phys_eq(&om.0, 0, |x, y| 2.0 * x.sin() * y.sin(), 1e-12);
    }

    #[test]
    fn q_form_isotropic_background_is_2ab_d() {
        let g = grid();
        let u = taylor_green(&g);
        let a = -2.0;
        let b = -1.0;
        let tau = SymTensorField::isotropic(&g, a);
        let q = q_form(&tau, &u, b);
        let mut expect = sym_gradient(&u).0;
        expect.scale(2.0 * a * b);
        assert!((&q.0 - &expect).max_coeff() < 1e-12);
    }

    #[test]
    fn q_form_zero_velocity() {
        let g = grid();
        let tau = SymTensorField::from_fn(&g, |x, y| [x.sin(), (x + y).cos(), y.sin()]).unwrap();
        let q = q_form(&tau, &VelocityField::zeros(&g), -1.0);
        assert!(q.0.max_coeff() < 1e-14);
    }

    /// Brute-force shadow oracle: full 2×2 matrix products at every grid
    /// point, keeping all four entries.
    fn q_shadow(tau: &SymTensorField, u: &VelocityField, b: f64) -> (Vec<[f64; 4]>, f64) {
        let g = u.grid().clone();
        let tp = tau.0.to_physical();
        let dp = sym_gradient(u).0.to_physical();
        let wp = skew_gradient(u).0.to_physical();
        let n = g.len();
        let mut out = Vec::with_capacity(n);
        let mut asym: f64 = 0.0;
        for p in 0..n {
            let t = [
                [tp.comp(0)[p], tp.comp(1)[p]],
                [tp.comp(1)[p], tp.comp(2)[p]],
            ];
            let d = [
                [dp.comp(0)[p], dp.comp(1)[p]],
                [dp.comp(1)[p], dp.comp(2)[p]],
            ];
            let w = [[0.0, wp.comp(0)[p]], [-wp.comp(0)[p], 0.0]];
            let mm = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
                let mut c = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            c[i][j] += a[i][k] * b[k][j];
                        }
                    }
                }
                c
            };
            let (tw, wt, td, dt) = (mm(t, w), mm(w, t), mm(t, d), mm(d, t));
            let mut q = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    q[i][j] = tw[i][j] - wt[i][j] + b * (td[i][j] + dt[i][j]);
                }
            }
            asym = asym.max((q[0][1] - q[1][0]).abs());
            out.push([q[0][0], q[0][1], q[1][0], q[1][1]]);
        }
        (out, asym)
    }

    #[test]
    fn q_form_matches_full_matrix_shadow() {
        let g = Grid::new(16, 16).unwrap();
        let u = VelocityField::from_fn(&g, |x, y| {
            [x.sin() * (2.0 * y).cos() + y.sin(), -(x.cos()) * y.sin()]
        })
        .unwrap();
        let tau =
            SymTensorField::from_fn(&g, |x, y| [1.0 + x.sin(), (x - y).cos(), y.cos()]).unwrap();
        for &b in &[-1.0, 1.0, 0.3] {
            let q = q_form(&tau, &u, b);
            let qp = q.0.to_physical();
            let (shadow, asym) = q_shadow(&tau, &u, b);
            assert!(asym < 1e-12, "shadow Q not symmetric: {asym:e}");
            // Compare in spectral space after identical dealiasing.
            let mut shadow_phys = crate::spectral::PhysicalField::zeros(g.clone(), 3);
            for (p, s) in shadow.iter().enumerate() {
                shadow_phys.comp_mut(0)[p] = s[0];
                shadow_phys.comp_mut(1)[p] = s[1];
                shadow_phys.comp_mut(2)[p] = s[3];
            }
            let mut shadow_spec = g.transform(&shadow_phys).unwrap();
            dealias(&mut shadow_spec);
            let scale = q.0.max_coeff().max(1.0);
            assert!(
                (&q.0 - &shadow_spec).max_coeff() < 1e-12 * scale,
                "q_form deviates from shadow at b = {b}"
            );
            let _ = qp;
        }
    }

    #[test]
    fn q_form_example_by_hand() {
        // τ = [[1,0],[0,0]], u = (sin y, 0), b = −1: the commutator cancels
        // the anticommutator exactly, so Q ≡ 0; with b = +1 they add.
        let g = grid();
        let u = VelocityField::from_fn(&g, |_, y| [y.sin(), 0.0]).unwrap();
        let tau = SymTensorField::from_fn(&g, |_, _| [1.0, 0.0, 0.0]).unwrap();
        let q_m = q_form(&tau, &u, -1.0);
        assert!(q_m.0.max_coeff() < 1e-13);
        let q_p = q_form(&tau, &u, 1.0);
        assert_phys_eq(&q_p.0, 0, |_, _| 0.0, 1e-12);
        assert_phys_eq(&q_p.0, 1, |_, y| y.cos(), 1e-12);
        assert_phys_eq(&q_p.0, 2, |_, _| 0.0, 1e-12);
    }

    #[test]
    fn q_form_bilinearity() {
        let g = Grid::new(16, 16).unwrap();
        let u = taylor_green(&g);
        let t1 = SymTensorField::from_fn(&g, |x, _| [x.sin(), x.cos(), 0.0]).unwrap();
        let t2 = SymTensorField::from_fn(&g, |_, y| [0.5, y.sin(), y.cos()]).unwrap();
        let (al, be) = (0.7, -1.3);
        let combo = SymTensorField::from_spectral({
            let mut f = t1.0.clone();
            f.scale(al);
            f.scaled_add(be, &t2.0);
            f
        })
        .unwrap();
        let lhs = q_form(&combo, &u, -1.0);
        let mut rhs = q_form(&t1, &u, -1.0).0;
        rhs.scale(al);
        rhs.scaled_add(be, &q_form(&t2, &u, -1.0).0);
        let scale = lhs.0.max_coeff().max(1.0);
        assert!((&lhs.0 - &rhs).max_coeff() < 1e-12 * scale);
    }

    #[test]
    fn advect_trivial_cases() {
        let g = grid();
        let u = taylor_green(&g);
        let constant = ScalarField::from_fn(&g, |_, _| 3.0).unwrap();
        assert!(advect(&u, &constant.0).max_coeff() < 1e-13);
        let f = ScalarField::from_fn(&g, |x, _| x.sin()).unwrap();
        assert!(advect(&VelocityField::zeros(&g), &f.0).max_coeff() < 1e-14);
    }

    #[test]
    fn advect_shear_by_hand() {
        let g = grid();
        let u = VelocityField::from_fn(&g, |_, y| [y.sin(), 0.0]).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| x.sin()).unwrap();
        let a = advect(&u, &f.0);
        assert_phys_eq(&a, 0, |x, y| y.sin() * x.cos(), 1e-12);
    }

    #[test]
    fn advect_skew_symmetry() {
        let g = grid();
        let u = taylor_green(&g);
        let f = ScalarField::from_fn(&g, |x, y| (2.0 * x).sin() * y.cos() + x.cos()).unwrap();
        let adv = advect(&u, &f.0);
        let ip = l2_inner(&adv, &f.0);
        let u_l2 = crate::energy::sobolev_norm(&u.0, 0.0);
        let f_l2 = crate::energy::sobolev_norm(&f.0, 0.0);
        assert!(
            ip.abs() < 1e-10 * u_l2 * f_l2 * f_l2,
            "⟨u·∇f, f⟩ = {ip:e} too large"
        );
    }

    #[test]
    fn tightened_sigma_cases() {
        let g = grid();
        let u = taylor_green(&g);
        let d = sym_gradient(&u);
        let sigma = tightened_sigma(&u, &d);
        assert!(sigma.0.max_coeff() < 1e-14, "τ = D(u) must give σ = 0");

        let tau = SymTensorField::from_fn(&g, |x, _| [x.cos(), 0.0, x.sin()]).unwrap();
        let sigma2 = tightened_sigma(&VelocityField::zeros(&g), &tau);
        assert!((&sigma2.0 - &tau.0).max_coeff() < 1e-14, "u = 0 must give σ = τ");

        let sigma3 = tightened_sigma(&u, &SymTensorField::zeros(&g));
        let mut neg_d = d.0.clone();
        neg_d.scale(-1.0);
        assert!((&sigma3.0 - &neg_d).max_coeff() < 1e-14);
    }

    #[test]
    fn grad_norm_equals_vorticity_norm_for_solenoidal_fields() {
        use crate::energy::sobolev_norm;
        let g = grid();
        let u = taylor_green(&g);
        let grad_sq: f64 = {
            let d1x = derivative(&comp_view(&u.0, 0), Axis::X, 1);
            let d1y = derivative(&comp_view(&u.0, 0), Axis::Y, 1);
            let d2x = derivative(&comp_view(&u.0, 1), Axis::X, 1);
            let d2y = derivative(&comp_view(&u.0, 1), Axis::Y, 1);
            [d1x, d1y, d2x, d2y]
                .iter()
                .map(|f| sobolev_norm(f, 0.0).powi(2))
                .sum()
        };
        let om = vorticity(&u);
        let om_sq = sobolev_norm(&om.0, 0.0).powi(2);
        assert_relative_eq!(grad_sq, om_sq, max_relative = 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::default().validate().is_ok());
        let bad = ModelParams {
            epsilon: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad_nu = ModelParams {
            nu_limit: 1.0,
            ..Default::default()
        };
        assert!(bad_nu.validate().is_err());
    }
}
