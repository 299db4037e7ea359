//! Incompressible Euler-Boussinesq target system: solenoidal velocity `v`
//! advanced by RK4 with a Leray projection at every stage, the pressure
//! multiplier recovered from its Poisson equation, and a passively
//! transported temperature deviation.

use crate::fields::{self, FieldError, ScalarField, SpectralScalar, VectorField};
use crate::transport::{self, TransportError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EulerError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("step dt = {dt} violates the advective CFL limit {limit}")]
    CflViolation { dt: f64, limit: f64 },
}

/// Solenoidal velocity, temperature deviation and diagnostic pressure at `t`.
#[derive(Debug, Clone)]
pub struct EulerBoussinesqState {
    pub v: VectorField,
    pub temp: ScalarField,
    pub pressure: ScalarField,
    pub t: f64,
}

impl EulerBoussinesqState {
    /// Project the velocity onto its solenoidal part and recover the
    /// pressure multiplier.
    pub fn new(v0: &VectorField, temp0: &ScalarField, t: f64) -> Result<Self, EulerError> {
        if v0.grid() != temp0.grid() {
            return Err(EulerError::Field(FieldError::GridMismatch));
        }
        let (v, _) = fields::helmholtz_split(v0);
        let pressure = pressure_multiplier(&v);
        Ok(Self {
            v,
            temp: temp0.clone(),
            pressure,
            t,
        })
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.v.dot(&self.v).integral()
    }

    /// 2D enstrophy `∫ (∂_x v_y − ∂_y v_x)²`; zero in 1D, unused in 3D.
    pub fn enstrophy(&self) -> f64 {
        if self.v.grid().dim() != 2 {
            return 0.0;
        }
        let dvy = fields::gradient(self.v.comp(1));
        let dvx = fields::gradient(self.v.comp(0));
        let vort = dvy.comp(0).sub(dvx.comp(1));
        vort.mul(&vort).integral()
    }
}

/// Convective tendency `-P[v·∇v]` with 2/3-rule de-aliasing; this is the
/// velocity tendency of the inviscid solenoidal flow.
pub fn velocity_tendency(v: &VectorField) -> VectorField {
    let grid = v.grid();
    let mut comps = Vec::with_capacity(grid.dim());
    let grads: Vec<VectorField> = v.components().iter().map(fields::gradient).collect();
    for ax in 0..grid.dim() {
        let mut acc = ScalarField::zeros(grid);
        for bx in 0..grid.dim() {
            let term = v.comp(bx).mul(grads[ax].comp(bx));
            acc.axpy(1.0, &term);
        }
        let mut spec = acc.scale(-1.0).to_spectral();
        fields::dealias_two_thirds(&mut spec);
        comps.push(spec.to_physical());
    }
    let tendency = VectorField::from_components(comps).expect("components share the grid");
    let (sol, _) = fields::helmholtz_split(&tendency);
    sol
}

/// Pressure multiplier from `ΔΠ = −div(v·∇v)` (zero mean).
pub fn pressure_multiplier(v: &VectorField) -> ScalarField {
    let grid = v.grid();
    let grads: Vec<VectorField> = v.components().iter().map(fields::gradient).collect();
    let mut conv_comps = Vec::with_capacity(grid.dim());
    for ax in 0..grid.dim() {
        let mut acc = ScalarField::zeros(grid);
        for bx in 0..grid.dim() {
            acc.axpy(1.0, &v.comp(bx).mul(grads[ax].comp(bx)));
        }
        let mut spec = acc.to_spectral();
        fields::dealias_two_thirds(&mut spec);
        conv_comps.push(spec.to_physical());
    }
    let conv = VectorField::from_components(conv_comps).expect("components share the grid");
    let rhs = fields::divergence(&conv).scale(-1.0);
    // invert the Laplacian spectrally
    let mut spec = rhs.to_spectral();
    let grid = rhs.grid();
    for (idx, c) in spec.coef_mut().iter_mut().enumerate() {
        let ij = grid.decode(idx);
        let mut k2 = 0.0;
        for axis in 0..grid.dim() {
            let k = grid.wavenumber(ij[axis]);
            k2 += k * k;
        }
        if k2 == 0.0 {
            *c = num_complex::Complex64::new(0.0, 0.0);
        } else {
            *c /= -k2;
        }
    }
    SpectralScalar::to_physical(&spec)
}

const CFL_MAX: f64 = 1.0;

/// One RK4 step of the velocity with Leray projection at each stage.
/// The temperature is not advanced here; see [`euler_boussinesq_step`].
pub fn euler_step(state: &EulerBoussinesqState, dt: f64) -> Result<EulerBoussinesqState, EulerError> {
    let grid = state.v.grid();
    let umax = state.v.sup_norm();
    let limit = CFL_MAX * grid.dx() / umax.max(1e-300);
    if dt > limit {
        return Err(EulerError::CflViolation { dt, limit });
    }
    let k1 = velocity_tendency(&state.v);
    let v2 = state.v.add(&k1.scale(0.5 * dt));
    let k2 = velocity_tendency(&v2);
    let v3 = state.v.add(&k2.scale(0.5 * dt));
    let k3 = velocity_tendency(&v3);
    let v4 = state.v.add(&k3.scale(dt));
    let k4 = velocity_tendency(&v4);
    let mut v = state.v.clone();
    for ax in 0..grid.dim() {
        let c = v.comp_mut(ax);
        c.axpy(dt / 6.0, k1.comp(ax));
        c.axpy(dt / 3.0, k2.comp(ax));
        c.axpy(dt / 3.0, k3.comp(ax));
        c.axpy(dt / 6.0, k4.comp(ax));
    }
    // final projection clears accumulated round-off divergence
    let (v, _) = fields::helmholtz_split(&v);
    let pressure = pressure_multiplier(&v);
    Ok(EulerBoussinesqState {
        v,
        temp: state.temp.clone(),
        pressure,
        t: state.t + dt,
    })
}

/// Advance velocity and temperature together: RK4 for `v`, a spectral RK4
/// transport step for `T` using the midpoint velocity.
pub fn euler_boussinesq_step(
    state: &EulerBoussinesqState,
    dt: f64,
) -> Result<EulerBoussinesqState, EulerError> {
    let mut next = euler_step(state, dt)?;
    let v_mid = state.v.add(&next.v).scale(0.5);
    next.temp = transport::limit_temperature_step(&state.temp, &v_mid, dt)?;
    Ok(next)
}

/// Run the system to `t_final`, returning the states at the requested sample
/// times (which must be multiples of `dt` in increasing order; `0` yields the
/// initial state).
pub fn euler_boussinesq_run(
    v0: &VectorField,
    temp0: &ScalarField,
    t_final: f64,
    dt: f64,
    sample_times: &[f64],
) -> Result<Vec<EulerBoussinesqState>, EulerError> {
    let mut state = EulerBoussinesqState::new(v0, temp0, 0.0)?;
    let steps = (t_final / dt).round() as usize;
    let mut out = Vec::new();
    let is_sampled = |t: f64| {
        sample_times
            .iter()
            .any(|&s| (s - t).abs() < 0.5 * dt)
    };
    if is_sampled(0.0) {
        out.push(state.clone());
    }
    for i in 0..steps {
        state = euler_boussinesq_step(&state, dt)?;
        let t = (i + 1) as f64 * dt;
        state.t = t;
        if is_sampled(t) {
            out.push(state.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    fn tau() -> f64 {
        2.0 * std::f64::consts::PI
    }

    fn vortex_pair(g: Grid) -> VectorField {
        let psi = ScalarField::from_fn(g, |x| (x[0]).sin() * (x[1]).sin());
        let gp = fields::gradient(&psi);
        VectorField::from_components(vec![gp.comp(1).scale(-1.0), gp.comp(0).clone()]).unwrap()
    }

    #[test]
    fn zero_velocity_is_stationary() {
        let g = Grid::new(2, 32, tau()).unwrap();
        let st = EulerBoussinesqState::new(&VectorField::zeros(g), &ScalarField::zeros(g), 0.0)
            .unwrap();
        let out = euler_step(&st, 1e-2).unwrap();
        assert!(out.v.l2_norm() == 0.0);
    }

    #[test]
    fn taylor_green_is_stationary() {
        // v = (sin x cos y, −cos x sin y): v·∇v is a pure gradient
        let g = Grid::new(2, 64, tau()).unwrap();
        let v0 = VectorField::from_fn(g, |x| {
            [x[0].sin() * x[1].cos(), -(x[0].cos()) * x[1].sin(), 0.0]
        });
        let mut st = EulerBoussinesqState::new(&v0, &ScalarField::zeros(g), 0.0).unwrap();
        let dt = 1e-3;
        for _ in 0..1000 {
            st = euler_step(&st, dt).unwrap();
        }
        let drift = st.v.sub(&v0).l2_norm() / v0.l2_norm();
        assert!(drift < 1e-6, "Taylor-Green drift {drift:e} per unit time");
    }

    #[test]
    fn single_mode_shear_is_exactly_steady() {
        let g = Grid::new(2, 32, tau()).unwrap();
        let v0 = VectorField::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]);
        let mut st = EulerBoussinesqState::new(&v0, &ScalarField::zeros(g), 0.0).unwrap();
        for _ in 0..100 {
            st = euler_step(&st, 5e-3).unwrap();
        }
        assert!(st.v.sub(&v0).sup_norm() < 1e-10);
    }

    #[test]
    fn divergence_stays_spectrally_zero() {
        let g = Grid::new(2, 64, tau()).unwrap();
        let v0 = vortex_pair(g);
        let mut st = EulerBoussinesqState::new(&v0, &ScalarField::zeros(g), 0.0).unwrap();
        for _ in 0..20 {
            st = euler_step(&st, 2e-3).unwrap();
            let div = fields::divergence(&st.v).l2_norm();
            assert!(div < 1e-10 * st.v.l2_norm().max(1.0));
        }
    }

    #[test]
    fn energy_and_enstrophy_conserved_in_2d() {
        let g = Grid::new(2, 128, tau()).unwrap();
        // non-stationary smooth field: two incommensurate vortex modes
        let psi = ScalarField::from_fn(g, |x| {
            (x[0]).sin() * (x[1]).sin() + 0.3 * (2.0 * x[0]).cos() * (x[1]).sin()
        });
        let gp = fields::gradient(&psi);
        let v0 = VectorField::from_components(vec![gp.comp(1).scale(-1.0), gp.comp(0).clone()])
            .unwrap();
        let mut st = EulerBoussinesqState::new(&v0, &ScalarField::zeros(g), 0.0).unwrap();
        let e0 = st.kinetic_energy();
        let z0 = st.enstrophy();
        let dt = 1e-3;
        for _ in 0..1000 {
            st = euler_step(&st, dt).unwrap();
        }
        assert!(
            (st.kinetic_energy() - e0).abs() < 1e-6 * e0,
            "energy drift {:e}",
            (st.kinetic_energy() - e0).abs() / e0
        );
        assert!(
            (st.enstrophy() - z0).abs() < 1e-6 * z0,
            "enstrophy drift {:e}",
            (st.enstrophy() - z0).abs() / z0
        );
    }

    #[test]
    fn pressure_solves_poisson_equation() {
        let g = Grid::new(2, 64, tau()).unwrap();
        let v = vortex_pair(g);
        let pi = pressure_multiplier(&v);
        // residual of ΔΠ + div(v·∇v) = 0 at de-aliased accuracy
        let lap = fields::laplacian(&pi);
        let grads: Vec<VectorField> = v.components().iter().map(fields::gradient).collect();
        let conv = VectorField::from_components(
            (0..2)
                .map(|ax| {
                    let mut acc = ScalarField::zeros(g);
                    for bx in 0..2 {
                        acc.axpy(1.0, &v.comp(bx).mul(grads[ax].comp(bx)));
                    }
                    let mut spec = acc.to_spectral();
                    fields::dealias_two_thirds(&mut spec);
                    spec.to_physical()
                })
                .collect(),
        )
        .unwrap();
        let res = lap.add(&fields::divergence(&conv));
        assert!(res.sup_norm() < 1e-10 * lap.sup_norm().max(1.0));
        assert!(pi.mean().abs() < 1e-12);
    }

    #[test]
    fn temperature_transport_in_the_run() {
        let g = Grid::new(2, 64, tau()).unwrap();
        let v0 = vortex_pair(g);
        // zero temperature stays zero
        let traj = euler_boussinesq_run(
            &v0,
            &ScalarField::zeros(g),
            0.2,
            2e-3,
            &[0.0, 0.1, 0.2],
        )
        .unwrap();
        assert_eq!(traj.len(), 3);
        for st in &traj {
            assert!(st.temp.sup_norm() == 0.0);
        }
        // ∫T and ∫T² conserved on a nontrivial profile
        let t0 = ScalarField::from_fn(g, |x| 0.2 + 0.6 * (x[0]).cos() * (x[1]).sin());
        let traj = euler_boussinesq_run(&v0, &t0, 1.0, 1e-3, &[0.0, 1.0]).unwrap();
        let (first, last) = (&traj[0], &traj[traj.len() - 1]);
        let m0 = first.temp.integral();
        let q0 = first.temp.mul(&first.temp).integral();
        assert!((last.temp.integral() - m0).abs() < 1e-10 * m0.abs().max(1.0));
        assert!(
            (last.temp.mul(&last.temp).integral() - q0).abs() < 1e-6 * q0,
            "T^2 drift {:e}",
            (last.temp.mul(&last.temp).integral() - q0).abs() / q0
        );
    }

    #[test]
    fn initial_projection_matches_helmholtz() {
        let g = Grid::new(2, 32, tau()).unwrap();
        // velocity with both components: vortex + gradient bump
        let psi = ScalarField::from_fn(g, |x| (x[0]).sin() * (x[1]).sin());
        let phi = ScalarField::from_fn(g, |x| 0.5 * (x[0]).cos() + 0.3 * (x[1]).sin());
        let gp = fields::gradient(&psi);
        let sol = VectorField::from_components(vec![gp.comp(1).scale(-1.0), gp.comp(0).clone()])
            .unwrap();
        let u0 = sol.add(&fields::gradient(&phi));
        let st = EulerBoussinesqState::new(&u0, &ScalarField::zeros(g), 0.0).unwrap();
        let (expect, _) = fields::helmholtz_split(&u0);
        assert!(st.v.sub(&expect).sup_norm() < 1e-12);
    }
}
