//! Synthesis of the default experiment data: compactly supported radial
//! bumps for the density and temperature deviations, and a solenoidal
//! vortex plus a gradient bump for the initial velocity, so that both
//! Helmholtz components and the acoustic channel are exercised.

use super::config::ExperimentConfig;
use crate::fields::{Grid, ScalarField, VectorField};

/// Gaussian bump `A exp(-|x-c|²/2σ²)` (numerically compact: below 1e-8
/// beyond `6σ`).
fn bump(grid: Grid, center: &[f64; 3], amp: f64, sigma: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x| {
        let r = grid.periodic_distance(x, center);
        amp * (-r * r / (2.0 * sigma * sigma)).exp()
    })
}

/// Analytic gradient of the Gaussian bump (periodic image-free inside the
/// guard radius; evaluated with the wrapped displacement).
fn bump_gradient(grid: Grid, center: &[f64; 3], amp: f64, sigma: f64) -> VectorField {
    VectorField::from_fn(grid, |x| {
        let mut d = [0.0; 3];
        for ax in 0..grid.dim() {
            let mut dx = x[ax] - center[ax];
            let l = grid.len();
            if dx > 0.5 * l {
                dx -= l;
            }
            if dx < -0.5 * l {
                dx += l;
            }
            d[ax] = dx;
        }
        let r2: f64 = d.iter().map(|v| v * v).sum();
        let g = amp * (-r2 / (2.0 * sigma * sigma)).exp() / (sigma * sigma);
        let mut out = [0.0; 3];
        for ax in 0..grid.dim() {
            out[ax] = -d[ax] * g;
        }
        out
    })
}

pub struct InitialData {
    pub rho1: ScalarField,
    pub theta1: ScalarField,
    pub u0: VectorField,
}

/// Build `(ρ⁽¹⁾₀, θ⁽¹⁾₀, u₀)` from the config amplitudes and widths. The
/// temperature bump is offset from the density bump so the two deviations
/// are independent; the velocity is a perpendicular-gradient vortex (2D/3D)
/// plus a gradient bump.
pub fn initial_data(cfg: &ExperimentConfig, grid: Grid) -> InitialData {
    let c = grid.center();
    let mut c_theta = c;
    c_theta[0] += 0.5;
    let mut c_grad = c;
    if grid.dim() > 1 {
        c_grad[1] -= 0.4;
    }

    let rho1 = bump(grid, &c, cfg.amp_rho, cfg.sigma_rho);
    let theta1 = bump(grid, &c_theta, cfg.amp_theta, cfg.sigma_theta);

    // solenoidal vortex: rotate the gradient of a stream bump
    let mut u0 = VectorField::zeros(grid);
    if grid.dim() >= 2 && cfg.amp_vortex != 0.0 {
        let gpsi = bump_gradient(grid, &c, cfg.amp_vortex, cfg.sigma_vortex);
        // (−∂_y ψ, ∂_x ψ, 0): divergence-free in 2D and 3D
        for idx in 0..grid.points() {
            u0.comp_mut(0).samples_mut()[idx] = -gpsi.comp(1).samples()[idx];
            u0.comp_mut(1).samples_mut()[idx] = gpsi.comp(0).samples()[idx];
        }
    }
    if cfg.amp_grad != 0.0 {
        let gphi = bump_gradient(grid, &c_grad, cfg.amp_grad, cfg.sigma_grad);
        for ax in 0..grid.dim() {
            u0.comp_mut(ax).axpy(1.0, gphi.comp(ax));
        }
    }
    InitialData { rho1, theta1, u0 }
}
