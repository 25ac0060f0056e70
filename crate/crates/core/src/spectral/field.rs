use rustfft::num_complex::Complex64;

use super::grid::Grid;
use crate::Result;

/// Multi-component field of spectral coefficients, one `ny × nx` block per
/// component, indexed in FFT order.
///
/// Each component carries a quadrature weight used by L²/Sobolev reductions;
/// symmetric-tensor storage weights the off-diagonal component by 2 so norms
/// agree with the full-matrix Frobenius norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    ncomp: usize,
    weights: Vec<f64>,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, ncomp: usize) -> SpectralField {
        assert!(ncomp > 0);
        let n = grid.len() * ncomp;
        SpectralField {
            grid,
            ncomp,
            weights: vec![1.0; ncomp],
            data: vec![Complex64::default(); n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn set_weights(&mut self, w: Vec<f64>) {
        assert_eq!(w.len(), self.ncomp);
        self.weights = w;
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Coefficient of component `c` at signed wavenumber `(kx, ky)`.
    pub fn coeff(&self, c: usize, kx: i64, ky: i64) -> Complex64 {
        let (i, j) = self.grid.index_of(kx, ky);
        self.comp(c)[j * self.grid.nx() + i]
    }

    pub fn set_coeff(&mut self, c: usize, kx: i64, ky: i64, v: Complex64) {
        let (i, j) = self.grid.index_of(kx, ky);
        let nx = self.grid.nx();
        self.comp_mut(c)[j * nx + i] = v;
    }

    /// Zero the mean (k = 0) mode of every component.
    pub fn zero_mean(&mut self) {
        let n = self.grid.len();
        for c in 0..self.ncomp {
            self.data[c * n] = Complex64::default();
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// `self += s * rhs`.
    pub fn scaled_add(&mut self, s: f64, rhs: &SpectralField) {
        assert_eq!(self.grid, rhs.grid, "scaled_add: grid mismatch");
        assert_eq!(self.ncomp, rhs.ncomp, "scaled_add: component mismatch");
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += s * b;
        }
    }

    /// Per-mode multiply by a real factor `m(|k|-tables index)` shared by all
    /// components; the closure receives `(ix, iy)` coefficient indices.
    pub fn multiply_modes<F: Fn(usize, usize) -> f64>(&mut self, f: F) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        for c in 0..self.ncomp {
            let comp = self.comp_mut(c);
            for j in 0..ny {
                for i in 0..nx {
                    comp[j * nx + i] *= f(i, j);
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest coefficient magnitude over all components and modes.
    pub fn max_coeff(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_physical(&self) -> PhysicalField {
        self.grid.inverse_transform(self)
    }

    /// Build a field by sampling `f(x, y) -> [f64; N]` on the grid and
    /// transforming.
    pub fn from_fn<const N: usize>(
        grid: &Grid,
        f: impl Fn(f64, f64) -> [f64; N],
    ) -> Result<SpectralField> {
        let mut phys = PhysicalField::zeros(grid.clone(), N);
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let (x, y) = grid.point(i, j);
                let vals = f(x, y);
                for (c, v) in vals.iter().enumerate() {
                    phys.comp_mut(c)[j * grid.nx() + i] = *v;
                }
            }
        }
        grid.transform(&phys)
    }
}

impl std::ops::Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.scaled_add(1.0, rhs);
        out
    }
}

impl std::ops::Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.scaled_add(-1.0, rhs);
        out
    }
}

/// Multi-component field of physical-space values on the grid, row-major
/// with x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    ncomp: usize,
    weights: Vec<f64>,
    data: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(grid: Grid, ncomp: usize) -> PhysicalField {
        assert!(ncomp > 0);
        let n = grid.len() * ncomp;
        PhysicalField {
            grid,
            ncomp,
            weights: vec![1.0; ncomp],
            data: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nx(&self) -> usize {
        self.grid.nx()
    }

    pub fn ny(&self) -> usize {
        self.grid.ny()
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn set_weights(&mut self, w: Vec<f64>) {
        assert_eq!(w.len(), self.ncomp);
        self.weights = w;
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Largest pointwise Euclidean norm across components.
    pub fn max_magnitude(&self) -> f64 {
        let n = self.grid.len();
        let mut max = 0.0f64;
        for p in 0..n {
            let mut s = 0.0;
            for c in 0..self.ncomp {
                let v = self.data[c * n + p];
                s += v * v;
            }
            max = max.max(s);
        }
        max.sqrt()
    }
}
