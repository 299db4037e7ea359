//! Periodic pseudospectral infrastructure: grids, sampled fields, transforms,
//! differential operators, Helmholtz projection and mollification.
//!
//! All fields live on a cubic torus `[0, L)^d`, `d ∈ {1,2,3}`, sampled on a
//! uniform grid with the same number of points per axis. Storage is flat and
//! row-major (last axis contiguous).

mod fft;
pub mod interp;
pub mod io;
mod ops;

pub use ops::{
    dealias_two_thirds, divergence, divergence_potential, gradient, gradient_from_spectrum,
    helmholtz_split, laplacian, laplacian_from_spectrum, mollify_regularize, vector_laplacian,
};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("regularization width {eta} degenerate on grid with spacing {dx}")]
    DegenerateRegularization { eta: f64, dx: f64 },
    #[error("field i/o error: {0}")]
    Io(String),
}

/// A uniform periodic grid on the cube `[0, L)^dim` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    len: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, len: f64) -> Result<Self, FieldError> {
        if !(1..=3).contains(&dim) {
            return Err(FieldError::InvalidGrid(format!("dim {dim} not in 1..=3")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(FieldError::InvalidGrid(format!(
                "n = {n} must be a power of two >= 8"
            )));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(FieldError::InvalidGrid(format!("L = {len} must be positive")));
        }
        Ok(Self { dim, n, len })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    /// Grid spacing `L / n`.
    pub fn dx(&self) -> f64 {
        self.len / self.n as f64
    }

    /// Total number of sample points `n^dim`.
    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Volume of one cell, `(L/n)^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Volume of the box, `L^dim`.
    pub fn volume(&self) -> f64 {
        self.len.powi(self.dim as i32)
    }

    /// Signed integer frequency of mode index `i`, in `[-n/2, n/2)`.
    pub fn freq(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Physical wavenumber `2π/L * freq(i)`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * std::f64::consts::PI / self.len * self.freq(i) as f64
    }

    /// Decode a flat index into per-axis indices. Unused axes read 0.
    #[inline]
    pub fn decode(&self, idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rest = idx;
        for ax in (0..self.dim).rev() {
            out[ax] = rest % self.n;
            rest /= self.n;
        }
        out
    }

    /// Physical coordinates of the node with flat index `idx`.
    #[inline]
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let ij = self.decode(idx);
        let dx = self.dx();
        let mut x = [0.0; 3];
        for ax in 0..self.dim {
            x[ax] = ij[ax] as f64 * dx;
        }
        x
    }

    /// Coordinates of the box center.
    pub fn center(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for v in c.iter_mut().take(self.dim) {
            *v = 0.5 * self.len;
        }
        c
    }

    /// Shortest periodic distance between two points.
    pub fn periodic_distance(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for ax in 0..self.dim {
            let mut d = (a[ax] - b[ax]).abs() % self.len;
            if d > 0.5 * self.len {
                d = self.len - d;
            }
            s += d * d;
        }
        s.sqrt()
    }
}

/// A real scalar sample set on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![0.0; grid.points()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.points()],
        }
    }

    /// Sample a closure of the physical coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64; 3]) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.points());
        for idx in 0..grid.points() {
            data.push(f(&grid.coords(idx)));
        }
        Self { grid, data }
    }

    pub fn from_samples(grid: Grid, data: Vec<f64>) -> Result<Self, FieldError> {
        if data.len() != grid.points() {
            return Err(FieldError::GridMismatch);
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.data
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_spectral(&self) -> SpectralScalar {
        let coef = fft::forward(self.grid, &self.data);
        SpectralScalar {
            grid: self.grid,
            coef,
        }
    }

    /// Pointwise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// Box integral by the (spectrally exact) rectangle rule.
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// `L^p` norm over the box; `p = 2` is the discrete `L²` norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self.data.iter().map(|v| v.abs().powf(p)).sum();
        (s * self.grid.cell_volume()).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

/// A real vector sample set; one scalar component per spatial axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    comps: Vec<ScalarField>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            comps: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn from_components(comps: Vec<ScalarField>) -> Result<Self, FieldError> {
        let grid = comps
            .first()
            .map(|c| c.grid())
            .ok_or(FieldError::GridMismatch)?;
        if comps.len() != grid.dim() || comps.iter().any(|c| c.grid() != grid) {
            return Err(FieldError::GridMismatch);
        }
        Ok(Self { grid, comps })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64; 3]) -> [f64; 3]) -> Self {
        let mut comps = vec![Vec::with_capacity(grid.points()); grid.dim()];
        for idx in 0..grid.points() {
            let v = f(&grid.coords(idx));
            for (ax, comp) in comps.iter_mut().enumerate() {
                comp.push(v[ax]);
            }
        }
        Self {
            grid,
            comps: comps
                .into_iter()
                .map(|data| ScalarField { grid, data })
                .collect(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn comp(&self, ax: usize) -> &ScalarField {
        &self.comps[ax]
    }

    pub fn comp_mut(&mut self, ax: usize) -> &mut ScalarField {
        &mut self.comps[ax]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let mut out = ScalarField::zeros(self.grid);
        for i in 0..self.grid.points() {
            let mut s = 0.0;
            for c in &self.comps {
                s += c.data[i] * c.data[i];
            }
            out.data[i] = s.sqrt();
        }
        out
    }

    pub fn dot(&self, other: &Self) -> ScalarField {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let mut out = ScalarField::zeros(self.grid);
        for ax in 0..self.grid.dim() {
            for i in 0..self.grid.points() {
                out.data[i] += self.comps[ax].data[i] * other.comps[ax].data[i];
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self {
            grid: self.grid,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self {
            grid: self.grid,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            comps: self.comps.iter().map(|f| f.scale(c)).collect(),
        }
    }

    /// Scale each component pointwise by a scalar field.
    pub fn scale_by(&self, s: &ScalarField) -> Self {
        Self {
            grid: self.grid,
            comps: self.comps.iter().map(|f| f.mul(s)).collect(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.comps.iter().map(|c| c.l2_norm().powi(2)).sum();
        s.sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.magnitude().sup_norm()
    }
}

/// Fourier coefficients of a real scalar field (unnormalized forward DFT).
#[derive(Debug, Clone)]
pub struct SpectralScalar {
    grid: Grid,
    coef: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coef: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coef(&self) -> &[Complex64] {
        &self.coef
    }

    pub fn coef_mut(&mut self) -> &mut [Complex64] {
        &mut self.coef
    }

    pub fn from_coef(grid: Grid, coef: Vec<Complex64>) -> Result<Self, FieldError> {
        if coef.len() != grid.points() {
            return Err(FieldError::GridMismatch);
        }
        Ok(Self { grid, coef })
    }

    /// Inverse transform, discarding the (round-off level) imaginary part.
    pub fn to_physical(&self) -> ScalarField {
        let data = fft::inverse_real(self.grid, &self.coef);
        ScalarField {
            grid: self.grid,
            data,
        }
    }

    /// Weighted `l²` norm equal to the physical `L²` norm (Parseval).
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coef.iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.volume() / (self.grid.points() as f64).powi(2)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid::new(0, 16, 1.0).is_err());
        assert!(Grid::new(4, 16, 1.0).is_err());
        assert!(Grid::new(2, 12, 1.0).is_err());
        assert!(Grid::new(2, 4, 1.0).is_err());
        assert!(Grid::new(2, 16, -1.0).is_err());
        assert!(Grid::new(2, 16, 1.0).is_ok());
    }

    #[test]
    fn frequencies_cover_symmetric_range() {
        let g = Grid::new(1, 8, 2.0 * std::f64::consts::PI).unwrap();
        let freqs: Vec<i64> = (0..8).map(|i| g.freq(i)).collect();
        assert_eq!(freqs, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert!((g.wavenumber(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn integral_and_norms_match_closed_forms() {
        let g = Grid::new(2, 32, 2.0 * std::f64::consts::PI).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0].sin());
        // ∫ sin = 0, ‖sin‖² over the box = L²/2
        assert!(f.integral().abs() < 1e-12);
        let l2 = f.l2_norm();
        let expect = (g.volume() / 2.0).sqrt();
        assert!((l2 - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn periodic_distance_wraps() {
        let g = Grid::new(2, 16, 10.0).unwrap();
        let a = [0.5, 0.0, 0.0];
        let b = [9.5, 0.0, 0.0];
        assert!((g.periodic_distance(&a, &b) - 1.0).abs() < 1e-14);
    }
}
