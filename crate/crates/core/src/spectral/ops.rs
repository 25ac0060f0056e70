use rustfft::num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Axis;

/// Spectral derivative: multiplies the coefficient at `k` by `(i k_axis)^order`.
///
/// Nyquist wavenumbers are treated as zero.
pub fn derivative(f: &SpectralField, axis: Axis, order: u32) -> SpectralField {
    assert!(order >= 1, "derivative order must be >= 1");
    let g = f.grid().clone();
    let mut out = f.clone();
    let (nx, ny) = (g.nx(), g.ny());
    for c in 0..out.ncomp() {
        let comp = out.comp_mut(c);
        for j in 0..ny {
            for i in 0..nx {
                let k = match axis {
                    Axis::X => g.dkx(i),
                    Axis::Y => g.dky(j),
                };
                let m = Complex64::new(0.0, k).powu(order);
                comp[j * nx + i] *= m;
            }
        }
    }
    out
}

/// Divergence of a 2-component field: `∂x f₀ + ∂y f₁`.
pub fn divergence(f: &SpectralField) -> SpectralField {
    assert_eq!(f.ncomp(), 2, "divergence expects a 2-component field");
    let g = f.grid().clone();
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = SpectralField::zeros(g.clone(), 1);
    let (fx, fy) = (f.comp(0), f.comp(1));
    let dst = out.comp_mut(0);
    for j in 0..ny {
        for i in 0..nx {
            let p = j * nx + i;
            dst[p] = Complex64::new(0.0, g.dkx(i)) * fx[p] + Complex64::new(0.0, g.dky(j)) * fy[p];
        }
    }
    out
}

/// Leray projection onto divergence-free fields: `û − k (k·û)/|k|²` per mode.
///
/// The mean mode passes through unchanged; the projection is idempotent.
pub fn leray_project(u: &SpectralField) -> SpectralField {
    assert_eq!(u.ncomp(), 2, "leray_project expects a 2-component field");
    let g = u.grid().clone();
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = u.clone();
    let n = g.len();
    let (head, tail) = out.data_mut().split_at_mut(n);
    for j in 0..ny {
        let ky = g.dky(j);
        for i in 0..nx {
            let kx = g.dkx(i);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            let p = j * nx + i;
            let dot = (kx * head[p] + ky * tail[p]) / k2;
            head[p] -= kx * dot;
            tail[p] -= ky * dot;
        }
    }
    out
}

/// Invert `(I − Δ)`: divides the coefficient at `k` by `1 + |k|²`.
///
/// Uses the same Nyquist-zeroed wavenumbers as the derivative operators, so
/// it is the exact inverse of the discrete `I − Δ` on any field.
pub fn inverse_helmholtz(f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    let mut out = f.clone();
    out.multiply_modes(|i, j| {
        let (kx, ky) = (g.dkx(i), g.dky(j));
        1.0 / (1.0 + kx * kx + ky * ky)
    });
    out
}

/// 2/3-rule truncation: zero all coefficients with `|k₁| > nx/3` or
/// `|k₂| > ny/3`. Applied after every pointwise product.
pub fn dealias(f: &mut SpectralField) {
    let g = f.grid().clone();
    let (cut_x, cut_y) = g.dealias_cut();
    let (cx, cy) = (cut_x as f64, cut_y as f64);
    f.multiply_modes(|i, j| {
        if g.kx(i).abs() > cx || g.ky(j).abs() > cy {
            0.0
        } else {
            1.0
        }
    });
}

/// Largest violation of Hermitian symmetry, `max_k |f̂(−k) − conj(f̂(k))|`.
///
/// Diagnostic used by tests; zero (to roundoff) for transforms of real data.
pub fn hermitian_defect(f: &SpectralField) -> f64 {
    let g = f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut worst = 0.0f64;
    for c in 0..f.ncomp() {
        let comp = f.comp(c);
        for j in 0..ny {
            let jm = (ny - j) % ny;
            for i in 0..nx {
                let im = (nx - i) % nx;
                let d = (comp[jm * nx + im] - comp[j * nx + i].conj()).norm();
                worst = worst.max(d);
            }
        }
    }
    worst
}
