//! Spectral differential operators, Helmholtz projection and mollification.

use super::{FieldError, Grid, ScalarField, SpectralScalar, VectorField};
use num_complex::Complex64;

/// Per-axis wavenumber table, with a flag marking the Nyquist index.
struct WaveTable {
    k: Vec<f64>,
    nyquist: usize,
}

fn wave_table(grid: Grid) -> WaveTable {
    let k = (0..grid.n()).map(|i| grid.wavenumber(i)).collect();
    WaveTable {
        k,
        nyquist: grid.n() / 2,
    }
}

/// Gradient of the trigonometric interpolant. The Nyquist mode carries no
/// usable sign for odd derivatives and is dropped.
pub fn gradient(f: &ScalarField) -> VectorField {
    gradient_from_spectrum(&f.to_spectral())
}

pub fn gradient_from_spectrum(spec: &SpectralScalar) -> VectorField {
    let grid = spec.grid();
    let wt = wave_table(grid);
    let mut comps = Vec::with_capacity(grid.dim());
    for axis in 0..grid.dim() {
        let mut c = SpectralScalar::zeros(grid);
        for (idx, out) in c.coef_mut().iter_mut().enumerate() {
            let ij = grid.decode(idx);
            let i = ij[axis];
            if i == wt.nyquist {
                continue;
            }
            *out = Complex64::new(0.0, wt.k[i]) * spec.coef()[idx];
        }
        comps.push(c.to_physical());
    }
    VectorField::from_components(comps).expect("components share the grid")
}

/// Spectral divergence of a vector field.
pub fn divergence(u: &VectorField) -> ScalarField {
    let grid = u.grid();
    let wt = wave_table(grid);
    let mut acc = SpectralScalar::zeros(grid);
    for axis in 0..grid.dim() {
        let spec = u.comp(axis).to_spectral();
        for (idx, out) in acc.coef_mut().iter_mut().enumerate() {
            let i = grid.decode(idx)[axis];
            if i == wt.nyquist {
                continue;
            }
            *out += Complex64::new(0.0, wt.k[i]) * spec.coef()[idx];
        }
    }
    acc.to_physical()
}

/// Spectral Laplacian (even symbol, Nyquist retained).
pub fn laplacian(f: &ScalarField) -> ScalarField {
    laplacian_from_spectrum(&f.to_spectral()).to_physical()
}

pub fn laplacian_from_spectrum(spec: &SpectralScalar) -> SpectralScalar {
    let grid = spec.grid();
    let wt = wave_table(grid);
    let mut out = SpectralScalar::zeros(grid);
    for (idx, o) in out.coef_mut().iter_mut().enumerate() {
        let ij = grid.decode(idx);
        let mut k2 = 0.0;
        for ax in 0..grid.dim() {
            let k = wt.k[ij[ax]];
            k2 += k * k;
        }
        *o = -k2 * spec.coef()[idx];
    }
    out
}

/// Componentwise Laplacian of a vector field.
pub fn vector_laplacian(u: &VectorField) -> VectorField {
    let comps = u
        .components()
        .iter()
        .map(|c| laplacian_from_spectrum(&c.to_spectral()).to_physical())
        .collect();
    VectorField::from_components(comps).expect("components share the grid")
}

/// Zero every mode with any axis frequency above `n/3` (2/3 rule).
pub fn dealias_two_thirds(spec: &mut SpectralScalar) {
    let grid = spec.grid();
    let cut = (grid.n() / 3) as i64;
    for (idx, c) in spec.coef_mut().iter_mut().enumerate() {
        let ij = grid.decode(idx);
        for ax in 0..grid.dim() {
            if grid.freq(ij[ax]).abs() > cut {
                *c = Complex64::new(0.0, 0.0);
                break;
            }
        }
    }
}

/// Orthogonal splitting `U = solenoidal + gradient` with the per-mode
/// projector `I - kkᵀ/|k|²`. The wavevector follows the first-derivative
/// convention (Nyquist axes contribute nothing), so the solenoidal part has
/// exactly zero spectral divergence; the `k = 0` mode stays solenoidal.
pub fn helmholtz_split(u: &VectorField) -> (VectorField, VectorField) {
    let grid = u.grid();
    let dim = grid.dim();
    let wt = wave_table(grid);
    let specs: Vec<SpectralScalar> = u.components().iter().map(|c| c.to_spectral()).collect();
    let mut grad_specs: Vec<SpectralScalar> =
        (0..dim).map(|_| SpectralScalar::zeros(grid)).collect();

    for idx in 0..grid.points() {
        let ij = grid.decode(idx);
        let mut k = [0.0f64; 3];
        let mut k2 = 0.0;
        for ax in 0..dim {
            if ij[ax] == wt.nyquist {
                continue;
            }
            k[ax] = wt.k[ij[ax]];
            k2 += k[ax] * k[ax];
        }
        if k2 == 0.0 {
            continue;
        }
        let mut k_dot_u = Complex64::new(0.0, 0.0);
        for ax in 0..dim {
            k_dot_u += k[ax] * specs[ax].coef()[idx];
        }
        for ax in 0..dim {
            grad_specs[ax].coef_mut()[idx] = k[ax] * k_dot_u / k2;
        }
    }

    let gradient_part = VectorField::from_components(
        grad_specs.iter().map(|s| s.to_physical()).collect(),
    )
    .expect("components share the grid");
    let solenoidal = u.sub(&gradient_part);
    (solenoidal, gradient_part)
}

/// Potential `φ = Δ⁻¹ div U` (zero mean); its gradient is the gradient part
/// of the Helmholtz splitting.
pub fn divergence_potential(u: &VectorField) -> ScalarField {
    let grid = u.grid();
    let wt = wave_table(grid);
    let mut acc = SpectralScalar::zeros(grid);
    for axis in 0..grid.dim() {
        let spec = u.comp(axis).to_spectral();
        for (idx, out) in acc.coef_mut().iter_mut().enumerate() {
            let i = grid.decode(idx)[axis];
            if i == wt.nyquist {
                continue;
            }
            *out += Complex64::new(0.0, wt.k[i]) * spec.coef()[idx];
        }
    }
    // invert the Laplacian under the same masked-wavevector convention, so
    // that the gradient of the result reproduces the Helmholtz gradient part
    for (idx, c) in acc.coef_mut().iter_mut().enumerate() {
        let ij = grid.decode(idx);
        let mut k2 = 0.0;
        for ax in 0..grid.dim() {
            if ij[ax] == wt.nyquist {
                continue;
            }
            let k = wt.k[ij[ax]];
            k2 += k * k;
        }
        if k2 == 0.0 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c /= -k2;
        }
    }
    acc.to_physical()
}

/// Quintic smoothstep ramp, C² at both ends: 1 at s=0, 0 at s=1.
fn ramp(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// Radial cutoff: 1 inside radius `r1 = 1/(2η)`, 0 beyond `r2 = 1/η`,
/// measured from the box center and clipped to the box.
pub(crate) fn cutoff_field(grid: Grid, eta: f64) -> ScalarField {
    let r1 = 1.0 / (2.0 * eta);
    let r2 = 1.0 / eta;
    let center = grid.center();
    ScalarField::from_fn(grid, |x| {
        let r = grid.periodic_distance(x, &center);
        ramp((r - r1) / (r2 - r1))
    })
}

/// Regularize `h ↦ χ_η * (ψ_η · h)`: smooth radial cutoff followed by a
/// normalized Gaussian kernel of width `η` applied spectrally.
pub fn mollify_regularize(h: &ScalarField, eta: f64) -> Result<ScalarField, FieldError> {
    let grid = h.grid();
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(FieldError::DegenerateRegularization {
            eta,
            dx: grid.dx(),
        });
    }
    let r2 = 1.0 / eta;
    if r2 <= 2.0 * grid.dx() {
        return Err(FieldError::DegenerateRegularization {
            eta,
            dx: grid.dx(),
        });
    }
    let cut = cutoff_field(grid, eta);
    let mut spec = h.mul(&cut).to_spectral();
    let wt = wave_table(grid);
    for (idx, c) in spec.coef_mut().iter_mut().enumerate() {
        let ij = grid.decode(idx);
        let mut k2 = 0.0;
        for ax in 0..grid.dim() {
            let k = wt.k[ij[ax]];
            k2 += k * k;
        }
        *c *= (-0.5 * eta * eta * k2).exp();
    }
    Ok(spec.to_physical())
}
