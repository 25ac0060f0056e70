use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{PhysicalField, SpectralField};
use crate::{Error, Result};

/// Spatial axis of the 2-D grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

struct Plans {
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    /// Signed integer wavenumber per x index (FFT ordering, Nyquist kept).
    kx: Vec<f64>,
    ky: Vec<f64>,
    /// Wavenumbers used by differential operators: Nyquist zeroed.
    dkx: Vec<f64>,
    dky: Vec<f64>,
}

/// Periodic grid on `[0, 2π)²` with cached transform plans.
///
/// Cloning is cheap (plans are shared); two grids are equal when their mode
/// counts agree. All operations are safe to call concurrently on distinct
/// fields.
#[derive(Clone)]
pub struct Grid {
    nx: usize,
    ny: usize,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({}x{})", self.nx, self.ny)
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny
    }
}
impl Eq for Grid {}

fn wavenumbers(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut full = vec![0.0; n];
    let mut deriv = vec![0.0; n];
    for (i, (f, d)) in full.iter_mut().zip(deriv.iter_mut()).enumerate() {
        let k = if i <= n / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        };
        *f = k;
        *d = if i == n / 2 { 0.0 } else { k };
    }
    (full, deriv)
}

impl Grid {
    /// Create a grid with `nx × ny` modes. Both counts must be even and ≥ 8.
    pub fn new(nx: usize, ny: usize) -> Result<Grid> {
        if nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::config(format!(
                "grid sizes must be even and >= 8, got {nx}x{ny}"
            )));
        }
        let mut planner = FftPlanner::new();
        let (kx, dkx) = wavenumbers(nx);
        let (ky, dky) = wavenumbers(ny);
        let plans = Plans {
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
            kx,
            ky,
            dkx,
            dky,
        };
        Ok(Grid {
            nx,
            ny,
            plans: Arc::new(plans),
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Number of grid points (= number of retained modes).
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Smallest grid spacing, `2π / max(nx, ny)`.
    pub fn h_min(&self) -> f64 {
        std::f64::consts::TAU / self.nx.max(self.ny) as f64
    }

    /// Physical coordinates of grid point `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        let tau = std::f64::consts::TAU;
        (tau * i as f64 / self.nx as f64, tau * j as f64 / self.ny as f64)
    }

    /// Signed wavenumber along x for coefficient index `i` (Nyquist kept).
    pub fn kx(&self, i: usize) -> f64 {
        self.plans.kx[i]
    }

    pub fn ky(&self, j: usize) -> f64 {
        self.plans.ky[j]
    }

    /// Wavenumber used by differential operators (Nyquist zeroed).
    pub fn dkx(&self, i: usize) -> f64 {
        self.plans.dkx[i]
    }

    pub fn dky(&self, j: usize) -> f64 {
        self.plans.dky[j]
    }

    /// Coefficient index for a signed wavenumber pair.
    ///
    /// Panics when `|k| > n/2`.
    pub fn index_of(&self, kx: i64, ky: i64) -> (usize, usize) {
        let wrap = |k: i64, n: usize| -> usize {
            let half = (n / 2) as i64;
            assert!(k.abs() <= half, "wavenumber {k} out of range for n = {n}");
            if k >= 0 {
                k as usize
            } else {
                (n as i64 + k) as usize
            }
        };
        (wrap(kx, self.nx), wrap(ky, self.ny))
    }

    /// Largest retained wavenumber under the 2/3 rule, per axis.
    pub fn dealias_cut(&self) -> (usize, usize) {
        (self.nx / 3, self.ny / 3)
    }

    /// Transform physical values into spectral coefficients.
    ///
    /// Fails when the field was laid out for a different grid.
    pub fn transform(&self, phys: &PhysicalField) -> Result<SpectralField> {
        if phys.nx() != self.nx || phys.ny() != self.ny {
            return Err(Error::config(format!(
                "transform size mismatch: field is {}x{}, grid is {}x{}",
                phys.nx(),
                phys.ny(),
                self.nx,
                self.ny
            )));
        }
        let ncomp = phys.ncomp();
        let mut out = SpectralField::zeros(self.clone(), ncomp);
        out.set_weights(phys.weights().to_vec());
        let scale = 1.0 / self.len() as f64;
        let mut scratch = vec![Complex64::default(); self.len()];
        for c in 0..ncomp {
            let dst = out.comp_mut(c);
            for (d, v) in dst.iter_mut().zip(phys.comp(c)) {
                *d = Complex64::new(*v, 0.0);
            }
            self.fft2d(dst, &mut scratch, true);
            for d in dst.iter_mut() {
                *d *= scale;
            }
        }
        Ok(out)
    }

    /// Transform spectral coefficients back to physical values.
    ///
    /// The imaginary residue of the inverse FFT (roundoff for Hermitian
    /// input) is discarded.
    pub fn inverse_transform(&self, f: &SpectralField) -> PhysicalField {
        assert_eq!(f.grid(), self, "inverse_transform: grid mismatch");
        let mut out = PhysicalField::zeros(self.clone(), f.ncomp());
        out.set_weights(f.weights().to_vec());
        let mut buf = vec![Complex64::default(); self.len()];
        let mut scratch = vec![Complex64::default(); self.len()];
        for c in 0..f.ncomp() {
            buf.copy_from_slice(f.comp(c));
            self.fft2d(&mut buf, &mut scratch, false);
            for (d, v) in out.comp_mut(c).iter_mut().zip(buf.iter()) {
                *d = v.re;
            }
        }
        out
    }

    /// In-place 2-D FFT of one component, rows then columns via transpose.
    fn fft2d(&self, data: &mut [Complex64], scratch: &mut [Complex64], forward: bool) {
        let (nx, ny) = (self.nx, self.ny);
        let (fx, fy) = if forward {
            (&self.plans.fwd_x, &self.plans.fwd_y)
        } else {
            (&self.plans.inv_x, &self.plans.inv_y)
        };
        for row in data.chunks_exact_mut(nx) {
            fx.process(row);
        }
        transpose(data, scratch, nx, ny);
        for col in scratch.chunks_exact_mut(ny) {
            fy.process(col);
        }
        transpose(scratch, data, ny, nx);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], ncols: usize, nrows: usize) {
    for r in 0..nrows {
        for c in 0..ncols {
            dst[c * nrows + r] = src[r * ncols + c];
        }
    }
}
