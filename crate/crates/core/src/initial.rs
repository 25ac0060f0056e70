//! Named initial-condition generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::energy::sobolev_norm;
use crate::fields::{sym_gradient, SymTensorField, VelocityField};
use crate::linear::eigenvalues;
use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

/// Taylor-Green vortex `u = amp (sin x cos y, −cos x sin y)`.
pub fn taylor_green(grid: &Grid, amplitude: f64) -> Result<VelocityField> {
    VelocityField::from_fn(grid, move |x, y| {
        [
            amplitude * x.sin() * y.cos(),
            -amplitude * x.cos() * y.sin(),
        ]
    })
}

/// Seeded random velocity with spectrum cutoff `max(|k₁|,|k₂|) ≤ k_cut`,
/// built from a random streamfunction (hence divergence-free and mean-zero)
/// and normalized to the requested H⁶ size.
pub fn random_smooth_velocity(
    grid: &Grid,
    seed: u64,
    amplitude: f64,
    k_cut: i64,
) -> Result<VelocityField> {
    let (cx, cy) = grid.dealias_cut();
    if k_cut < 1 || k_cut > cx.min(cy) as i64 {
        return Err(Error::config(format!(
            "random-smooth cutoff {k_cut} outside the dealiased band"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = SpectralField::zeros(grid.clone(), 2);
    for ky in 0..=k_cut {
        for kx in -k_cut..=k_cut {
            // Half-space walk; the mirror mode carries the conjugate.
            if ky == 0 && kx <= 0 {
                continue;
            }
            let psi = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let (kxf, kyf) = (kx as f64, ky as f64);
            // u = (−∂_y ψ, ∂_x ψ)
            let u1 = Complex64::new(0.0, -kyf) * psi;
            let u2 = Complex64::new(0.0, kxf) * psi;
            u.set_coeff(0, kx, ky, u1);
            u.set_coeff(1, kx, ky, u2);
            u.set_coeff(0, -kx, -ky, u1.conj());
            u.set_coeff(1, -kx, -ky, u2.conj());
        }
    }
    let norm = sobolev_norm(&u, 6.0);
    if norm == 0.0 {
        return Err(Error::numerical("random velocity drew all-zero coefficients"));
    }
    u.scale(amplitude / norm);
    VelocityField::from_spectral(u)
}

/// Seeded random symmetric stress with the same cutoff, normalized in H⁶.
pub fn random_smooth_stress(
    grid: &Grid,
    seed: u64,
    amplitude: f64,
    k_cut: i64,
) -> Result<SymTensorField> {
    let (cx, cy) = grid.dealias_cut();
    if k_cut < 1 || k_cut > cx.min(cy) as i64 {
        return Err(Error::config(format!(
            "random-smooth cutoff {k_cut} outside the dealiased band"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = SpectralField::zeros(grid.clone(), 3);
    for c in 0..3 {
        for ky in 0..=k_cut {
            for kx in -k_cut..=k_cut {
                if ky == 0 && kx <= 0 {
                    continue;
                }
                let v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                t.set_coeff(c, kx, ky, v);
                t.set_coeff(c, -kx, -ky, v.conj());
            }
        }
    }
    let mut tau = SymTensorField::from_spectral(t)?;
    let norm = sobolev_norm(tau.spectral(), 6.0);
    if norm == 0.0 {
        return Err(Error::numerical("random stress drew all-zero coefficients"));
    }
    tau.spectral_mut().scale(amplitude / norm);
    Ok(tau)
}

/// Well-prepared stress `τ₀ = D(u₀)`, so the tightened variable starts at
/// zero and no initial layer forms.
pub fn well_prepared_stress(u: &VelocityField) -> SymTensorField {
    sym_gradient(u)
}

/// Single-`k` perturbation on the constant background `τ_a = a·Id`.
///
/// The velocity mode `u₂ = amp·sin(kx)` is paired with the matched stress
/// component of the λ₊ eigenvector (`η̂₁₂ = −iλ₊/k · û₂`, Voigt-aware), so
/// the early-time evolution isolates a single growth rate instead of mixing
/// the λ₋ transient in.
pub fn mode_probe(
    grid: &Grid,
    k: i64,
    a: f64,
    b: f64,
    epsilon: f64,
    voigt: bool,
    amplitude: f64,
) -> Result<(VelocityField, SymTensorField)> {
    let (cx, _) = grid.dealias_cut();
    if k < 1 || k > cx as i64 {
        return Err(Error::config(format!(
            "probe wavenumber {k} outside the dealiased band (max {cx})"
        )));
    }
    let (lambda_plus, _) = eigenvalues(k as f64, a, b, epsilon, voigt);
    let u2_k = Complex64::new(0.0, -amplitude / 2.0); // amp·sin(kx)
    let sigma12_over_u2 = Complex64::new(0.0, -1.0) * lambda_plus / k as f64;
    let eta12_k = sigma12_over_u2 * u2_k;

    let mut u = SpectralField::zeros(grid.clone(), 2);
    u.set_coeff(1, k, 0, u2_k);
    u.set_coeff(1, -k, 0, u2_k.conj());

    let mut tau = SymTensorField::isotropic(grid, a);
    tau.spectral_mut().set_coeff(1, k, 0, eta12_k);
    tau.spectral_mut().set_coeff(1, -k, 0, eta12_k.conj());

    Ok((VelocityField::from_spectral(u)?, tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::sobolev_norm;
    use approx::assert_relative_eq;

    #[test]
    fn taylor_green_is_solenoidal_and_mean_zero() {
        let g = Grid::new(32, 32).unwrap();
        let u = taylor_green(&g, 1.3).unwrap();
        assert!(u.divergence_defect() < 1e-13);
        assert!(u.mean_defect() < 1e-15);
        // Single mode pair: ‖u‖²_{L²} = 2·(2π)²·(amp/4)²·4 = amp²·2π².
        assert_relative_eq!(
            sobolev_norm(u.spectral(), 0.0).powi(2),
            1.3 * 1.3 * 2.0 * std::f64::consts::PI.powi(2),
            max_relative = 1e-12
        );
    }

    #[test]
    fn random_velocity_is_reproducible_and_normalized() {
        let g = Grid::new(32, 32).unwrap();
        let u1 = random_smooth_velocity(&g, 7, 0.5, 4).unwrap();
        let u2 = random_smooth_velocity(&g, 7, 0.5, 4).unwrap();
        assert_eq!(u1.spectral().data(), u2.spectral().data());
        assert!(u1.divergence_defect() < 1e-13);
        assert!(u1.mean_defect() == 0.0);
        assert_relative_eq!(sobolev_norm(u1.spectral(), 6.0), 0.5, max_relative = 1e-12);
        let u3 = random_smooth_velocity(&g, 8, 0.5, 4).unwrap();
        assert_ne!(u1.spectral().data(), u3.spectral().data());
    }

    #[test]
    fn random_velocity_respects_cutoff() {
        let g = Grid::new(32, 32).unwrap();
        let u = random_smooth_velocity(&g, 3, 1.0, 4).unwrap();
        for c in 0..2 {
            for ky in -(g.ny() as i64) / 2 + 1..=(g.ny() as i64) / 2 - 1 {
                for kx in -(g.nx() as i64) / 2 + 1..=(g.nx() as i64) / 2 - 1 {
                    if kx.abs().max(ky.abs()) > 4 {
                        assert_eq!(u.spectral().coeff(c, kx, ky).norm(), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn random_stress_normalized_in_h6() {
        let g = Grid::new(32, 32).unwrap();
        let t = random_smooth_stress(&g, 11, 2.0, 4).unwrap();
        assert_relative_eq!(sobolev_norm(t.spectral(), 6.0), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn mode_probe_structure() {
        let g = Grid::new(64, 64).unwrap();
        let (u, tau) = mode_probe(&g, 2, -2.0, -1.0, 1.0, false, 1e-6).unwrap();
        assert!(u.divergence_defect() < 1e-20);
        // Background present.
        assert_relative_eq!(tau.spectral().coeff(0, 0, 0).re, -2.0);
        assert_relative_eq!(tau.spectral().coeff(2, 0, 0).re, -2.0);
        // λ₊(2) = 2 at a = −2: η̂₁₂(k) = (−i·2/2)·(−i amp/2) = −amp/2.
        let eta = tau.spectral().coeff(1, 2, 0);
        assert_relative_eq!(eta.re, -0.5e-6, max_relative = 1e-12);
        assert!(eta.im.abs() < 1e-20);
        assert!(mode_probe(&g, 0, -2.0, -1.0, 1.0, false, 1e-6).is_err());
        assert!(mode_probe(&g, 22, -2.0, -1.0, 1.0, false, 1e-6).is_err());
    }
}
