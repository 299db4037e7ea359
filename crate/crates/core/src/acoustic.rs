//! Linear acoustic system on the torus: exact Fourier-symbol propagation of
//! the potential Φ and the combination `Z = αR + βT`, its conserved quadratic
//! energy, dispersive-decay fitting, and the linear recombination back to the
//! individual deviations R, T.
//!
//! The system is `ε ∂_t Z + ω ΔΦ = 0`, `ε ∂_t ∇Φ + ∇Z = 0`; per Fourier mode
//! `k ≠ 0` the pair `(Φ̂, Ẑ)` rotates with angular rate `λ = √ω |k| / ε`,
//! which the propagator applies in closed form. No time-stepping error enters
//! the energy or decay measurements.

use crate::fields::{
    self, FieldError, Grid, ScalarField, SpectralScalar, VectorField,
};
use crate::thermo::ReferenceState;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AcousticError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("sample at t = {t} lies beyond the wrap-around time {t_wrap}")]
    BeyondWrap { t: f64, t_wrap: f64 },
    #[error("degenerate coefficient combination: beta^2 + alpha*delta = {0}")]
    DegenerateCoefficients(f64),
    #[error("nonpositive decay series entry at t = {0}")]
    NonPositiveEntry(f64),
}

/// Spectral state of the acoustic field at time `t`.
///
/// `Z` and `Φ` are stored as Fourier coefficients so that repeated
/// propagation is a pure per-mode rotation; physical samples are
/// materialized on demand.
#[derive(Debug, Clone)]
pub struct AcousticState {
    grid: Grid,
    eps: f64,
    ref_state: ReferenceState,
    t: f64,
    z_hat: Vec<Complex64>,
    phi_hat: Vec<Complex64>,
}

/// Output of [`acoustic_init`]: the propagating state plus the initial datum
/// `W₀ = δT₀ − βR₀` for the companion transport equation.
pub struct AcousticInit {
    pub state: AcousticState,
    pub initial_w: ScalarField,
}

/// Build the initial acoustic state from ill-prepared data deviations.
///
/// `R₀` and `T₀` are the regularized density/temperature deviations,
/// `Z₀ = αR₀ + βT₀`, and `Φ₀` is the regularized potential of the gradient
/// part of `u₀`. The `k = 0` mode of `Φ` is gauge and pinned to zero.
pub fn acoustic_init(
    rho1: &ScalarField,
    theta1: &ScalarField,
    u0: &VectorField,
    eta: f64,
    ref_state: &ReferenceState,
    eps: f64,
) -> Result<AcousticInit, AcousticError> {
    let grid = rho1.grid();
    if theta1.grid() != grid || u0.grid() != grid {
        return Err(AcousticError::Field(FieldError::GridMismatch));
    }
    let r0 = fields::mollify_regularize(rho1, eta)?;
    let t0 = fields::mollify_regularize(theta1, eta)?;
    let z0 = r0.scale(ref_state.alpha).add(&t0.scale(ref_state.beta));
    let w0 = t0.scale(ref_state.delta).sub(&r0.scale(ref_state.beta));
    let potential = fields::divergence_potential(u0);
    let phi0 = fields::mollify_regularize(&potential, eta)?;

    let z_hat = z0.to_spectral();
    let mut phi_hat = phi0.to_spectral();
    phi_hat.coef_mut()[0] = Complex64::new(0.0, 0.0);
    Ok(AcousticInit {
        state: AcousticState {
            grid,
            eps,
            ref_state: *ref_state,
            t: 0.0,
            z_hat: z_hat.coef().to_vec(),
            phi_hat: phi_hat.coef().to_vec(),
        },
        initial_w: w0,
    })
}

impl AcousticState {
    /// Construct directly from physical fields (used by tests and the
    /// decay study).
    pub fn from_fields(
        z0: &ScalarField,
        phi0: &ScalarField,
        ref_state: &ReferenceState,
        eps: f64,
    ) -> Result<Self, AcousticError> {
        if z0.grid() != phi0.grid() {
            return Err(AcousticError::Field(FieldError::GridMismatch));
        }
        let mut phi_hat = phi0.to_spectral();
        phi_hat.coef_mut()[0] = Complex64::new(0.0, 0.0);
        Ok(Self {
            grid: z0.grid(),
            eps,
            ref_state: *ref_state,
            t: 0.0,
            z_hat: z0.to_spectral().coef().to_vec(),
            phi_hat: phi_hat.coef().to_vec(),
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn ref_state(&self) -> &ReferenceState {
        &self.ref_state
    }

    /// Exact propagation to `t_target`: per mode `k ≠ 0`, with
    /// `λ = √ω |k| Δt / ε`,
    /// `Φ̂ ← Φ̂ cos λ − Ẑ sin λ / (√ω |k|)`,
    /// `Ẑ ← Ẑ cos λ + √ω |k| Φ̂_old sin λ`. The `k = 0` mode is constant.
    pub fn propagate(&self, t_target: f64) -> Self {
        let dt = t_target - self.t;
        let sqrt_omega = self.ref_state.omega.sqrt();
        let grid = self.grid;
        let mut out = self.clone();
        out.t = t_target;
        for idx in 1..grid.points() {
            let ij = grid.decode(idx);
            let mut k2 = 0.0;
            for ax in 0..grid.dim() {
                let k = grid.wavenumber(ij[ax]);
                k2 += k * k;
            }
            if k2 == 0.0 {
                continue;
            }
            let kn = k2.sqrt();
            let lam = sqrt_omega * kn * dt / self.eps;
            let (s, c) = lam.sin_cos();
            let phi = self.phi_hat[idx];
            let z = self.z_hat[idx];
            out.phi_hat[idx] = phi * c - z * (s / (sqrt_omega * kn));
            out.z_hat[idx] = z * c + phi * (sqrt_omega * kn * s);
        }
        out
    }

    pub fn z_field(&self) -> ScalarField {
        SpectralScalar::from_coef(self.grid, self.z_hat.clone())
            .expect("stored coefficients match the grid")
            .to_physical()
    }

    pub fn phi_field(&self) -> ScalarField {
        SpectralScalar::from_coef(self.grid, self.phi_hat.clone())
            .expect("stored coefficients match the grid")
            .to_physical()
    }

    pub fn grad_phi(&self) -> VectorField {
        let spec = SpectralScalar::from_coef(self.grid, self.phi_hat.clone())
            .expect("stored coefficients match the grid");
        fields::gradient_from_spectrum(&spec)
    }

    pub fn laplacian_phi(&self) -> ScalarField {
        let spec = SpectralScalar::from_coef(self.grid, self.phi_hat.clone())
            .expect("stored coefficients match the grid");
        fields::laplacian_from_spectrum(&spec).to_physical()
    }

    /// Conserved quadratic form at Sobolev index zero:
    /// `‖∇Φ‖²_{L²} + (δ/(β²+αδ)) ‖Z‖²_{L²}`, evaluated spectrally.
    pub fn energy(&self) -> f64 {
        let grid = self.grid;
        let gamma =
            self.ref_state.delta / (self.ref_state.beta.powi(2) + self.ref_state.alpha * self.ref_state.delta);
        let norm = grid.volume() / (grid.points() as f64).powi(2);
        let mut grad2 = 0.0;
        let mut z2 = 0.0;
        for idx in 0..grid.points() {
            let ij = grid.decode(idx);
            let mut k2 = 0.0;
            for ax in 0..grid.dim() {
                let k = grid.wavenumber(ij[ax]);
                k2 += k * k;
            }
            grad2 += k2 * self.phi_hat[idx].norm_sqr();
            z2 += self.z_hat[idx].norm_sqr();
        }
        norm * (grad2 + gamma * z2)
    }

    /// Sup norms of `Z` and `|∇Φ|` (materializes physical fields).
    pub fn sup_norms(&self) -> (f64, f64) {
        (self.z_field().sup_norm(), self.grad_phi().sup_norm())
    }
}

/// Least-squares slope of `log(sup_norm)` against `-log(1 + t/ε)`.
///
/// `t_wrap`, when finite, rejects samples contaminated by torus wrap-around.
pub fn decay_exponent_fit(
    series: &[(f64, f64)],
    eps: f64,
    t_wrap: f64,
) -> Result<f64, AcousticError> {
    if series.len() < 5 {
        return Err(AcousticError::TooFewSamples {
            need: 5,
            got: series.len(),
        });
    }
    let mut xs = Vec::with_capacity(series.len());
    let mut ys = Vec::with_capacity(series.len());
    for &(t, v) in series {
        if t > t_wrap {
            return Err(AcousticError::BeyondWrap { t, t_wrap });
        }
        if !(v > 0.0) {
            return Err(AcousticError::NonPositiveEntry(t));
        }
        xs.push(-(1.0 + t / eps).ln());
        ys.push(v.ln());
    }
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        cov += (x - xm) * (y - ym);
        var += (x - xm) * (x - xm);
    }
    if var == 0.0 {
        return Ok(0.0);
    }
    Ok(cov / var)
}

/// Invert the linear change of variables: given `Z = αR + βT` and
/// `W = δT − βR`, recover `T = (βZ + αW)/(β²+αδ)`, `R = (δZ − βW)/(β²+αδ)`.
pub fn recombine_rt(
    z: &ScalarField,
    w: &ScalarField,
    ref_state: &ReferenceState,
) -> Result<(ScalarField, ScalarField), AcousticError> {
    if z.grid() != w.grid() {
        return Err(AcousticError::Field(FieldError::GridMismatch));
    }
    let den = ref_state.beta.powi(2) + ref_state.alpha * ref_state.delta;
    if !(den.abs() > 1e-300) || !den.is_finite() {
        return Err(AcousticError::DegenerateCoefficients(den));
    }
    let t = z
        .scale(ref_state.beta / den)
        .add(&w.scale(ref_state.alpha / den));
    let r = z
        .scale(ref_state.delta / den)
        .sub(&w.scale(ref_state.beta / den));
    Ok((r, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::GasModel;

    fn tau() -> f64 {
        2.0 * std::f64::consts::PI
    }

    fn ref_state() -> ReferenceState {
        GasModel::default().linearization(1.0, 1.0).unwrap()
    }

    #[test]
    fn init_of_divergence_free_velocity_has_zero_potential() {
        let g = Grid::new(2, 32, tau()).unwrap();
        let psi = ScalarField::from_fn(g, |x| (x[0]).sin() * (x[1]).cos());
        let gp = fields::gradient(&psi);
        let u = VectorField::from_components(vec![gp.comp(1).scale(-1.0), gp.comp(0).clone()])
            .unwrap();
        let rs = ref_state();
        let init = acoustic_init(
            &ScalarField::zeros(g),
            &ScalarField::zeros(g),
            &u,
            0.05,
            &rs,
            0.1,
        )
        .unwrap();
        assert!(init.state.phi_field().sup_norm() < 1e-10);
        assert!(init.state.z_field().sup_norm() < 1e-12);
        assert!(init.initial_w.sup_norm() < 1e-12);
    }

    #[test]
    fn init_single_gradient_mode_matches_kernel_symbol() {
        // u0 = ∇cos(k·x): the potential of the gradient part is cos(k·x), so
        // Φ₀ is cos(k·x) attenuated by the Gaussian symbol at k (the cutoff
        // is 1 where the mode lives, up to the box clip).
        let g = Grid::new(2, 64, tau()).unwrap();
        let (ka, kb) = (3.0, 2.0);
        let phi_exact = ScalarField::from_fn(g, |x| (ka * x[0] + kb * x[1]).cos());
        let u = fields::gradient(&phi_exact);
        let rs = ref_state();
        let eta = 0.04; // cutoff plateau covers the box: 1/(2η) > L diameter
        let init = acoustic_init(
            &ScalarField::zeros(g),
            &ScalarField::zeros(g),
            &u,
            eta,
            &rs,
            1.0,
        )
        .unwrap();
        let k2 = ka * ka + kb * kb;
        let symbol = (-0.5 * eta * eta * k2).exp();
        let expected = phi_exact.scale(symbol);
        assert!(
            init.state.phi_field().sub(&expected).sup_norm() < 1e-10,
            "attenuation should equal the kernel symbol"
        );
    }

    #[test]
    fn zero_timestep_is_identity() {
        let g = Grid::new(2, 32, tau()).unwrap();
        let z0 = ScalarField::from_fn(g, |x| (x[0]).sin() + (2.0 * x[1]).cos());
        let phi0 = ScalarField::from_fn(g, |x| (x[1]).sin());
        let rs = ref_state();
        let st = AcousticState::from_fields(&z0, &phi0, &rs, 0.3).unwrap();
        let same = st.propagate(st.time());
        assert!(same.z_field().sub(&st.z_field()).sup_norm() < 1e-14);
        assert!(same.phi_field().sub(&st.phi_field()).sup_norm() < 1e-14);
    }

    /// RK4 oracle for the per-mode system ε Ż = ω k² Φ̂·(sign),
    /// ε Φ̇ = −Ẑ: integrates (Ẑ, Φ̂) for a single cosine mode.
    fn rk4_mode_oracle(omega: f64, eps: f64, k: f64, t: f64) -> (f64, f64) {
        // d/dt [z, phi] = [omega k^2 phi / eps, -z / eps]
        let mut z = 1.0f64;
        let mut phi = 0.0f64;
        let dt = 1e-4;
        let steps = (t / dt).round() as usize;
        let f = |z: f64, phi: f64| (omega * k * k * phi / eps, -z / eps);
        for _ in 0..steps {
            let (k1z, k1p) = f(z, phi);
            let (k2z, k2p) = f(z + 0.5 * dt * k1z, phi + 0.5 * dt * k1p);
            let (k3z, k3p) = f(z + 0.5 * dt * k2z, phi + 0.5 * dt * k2p);
            let (k4z, k4p) = f(z + dt * k3z, phi + dt * k3p);
            z += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            phi += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        }
        (z, phi)
    }

    #[test]
    fn single_mode_matches_closed_form_and_rk4_oracle() {
        let g = Grid::new(1, 32, tau()).unwrap();
        let rs = ref_state();
        let eps = 0.5;
        let kmode = 2.0;
        let z0 = ScalarField::from_fn(g, |x| (kmode * x[0]).cos());
        let phi0 = ScalarField::zeros(g);
        let st = AcousticState::from_fields(&z0, &phi0, &rs, eps).unwrap();
        let t = 0.37;
        let propagated = st.propagate(t);
        // closed form: Z(t) = cos(kx) cos(√ω k t / ε)
        let lam = rs.omega.sqrt() * kmode * t / eps;
        let expect = z0.scale(lam.cos());
        assert!(propagated.z_field().sub(&expect).sup_norm() < 1e-12);
        // RK4 oracle at dt = 1e-4 agrees to 1e-6
        let (z_oracle, phi_oracle) = rk4_mode_oracle(rs.omega, eps, kmode, t);
        assert!((lam.cos() - z_oracle).abs() < 1e-6);
        // and the phi amplitude: Φ(t) = -cos(kx) sin(λ)/(√ω k)
        let phi_amp = -lam.sin() / (rs.omega.sqrt() * kmode);
        assert!((phi_amp - phi_oracle).abs() < 1e-6);
        let phi_expect = z0.scale(phi_amp);
        assert!(propagated.phi_field().sub(&phi_expect).sup_norm() < 1e-12);
    }

    #[test]
    fn energy_properties() {
        let g = Grid::new(2, 32, tau()).unwrap();
        let rs = ref_state();
        // zero state
        let zero = AcousticState::from_fields(
            &ScalarField::zeros(g),
            &ScalarField::zeros(g),
            &rs,
            1.0,
        )
        .unwrap();
        assert_eq!(zero.energy(), 0.0);
        // quadratic form: doubling Z quadruples the Z-term
        let z0 = ScalarField::from_fn(g, |x| (x[0]).sin());
        let st1 = AcousticState::from_fields(&z0, &ScalarField::zeros(g), &rs, 1.0).unwrap();
        let st2 =
            AcousticState::from_fields(&z0.scale(2.0), &ScalarField::zeros(g), &rs, 1.0).unwrap();
        assert!((st2.energy() - 4.0 * st1.energy()).abs() < 1e-12 * st2.energy());
        // spectral energy equals the physical quadrature of the same form
        let phi0 = ScalarField::from_fn(g, |x| 0.3 * (x[1]).cos() + 0.1 * (2.0 * x[0]).sin());
        let st = AcousticState::from_fields(&z0, &phi0, &rs, 0.2).unwrap();
        let gamma = rs.delta / (rs.beta * rs.beta + rs.alpha * rs.delta);
        let phys = {
            let gp = st.grad_phi();
            gp.dot(&gp).integral() + gamma * z0.mul(&z0).integral()
        };
        assert!((st.energy() - phys).abs() < 1e-10 * phys);
        // invariance under propagation
        let e0 = st.energy();
        let e1 = st.propagate(1.7).energy();
        assert!((e1 - e0).abs() < 1e-12 * e0);
    }

    #[test]
    fn propagation_is_reversible_and_a_group() {
        let g = Grid::new(2, 32, tau()).unwrap();
        let rs = ref_state();
        let z0 = ScalarField::from_fn(g, |x| (x[0]).sin() * (x[1]).sin() + 0.2 * (x[0] * 2.0).cos());
        let phi0 = ScalarField::from_fn(g, |x| 0.5 * (x[1]).cos());
        let st = AcousticState::from_fields(&z0, &phi0, &rs, 0.1).unwrap();
        // group property: one jump = two jumps composed (exact symbols)
        let one = st.propagate(0.9);
        let two = st.propagate(0.4).propagate(0.9);
        assert!(one.z_field().sub(&two.z_field()).sup_norm() < 1e-12 * z0.sup_norm());
        // reversibility
        let back = one.propagate(0.0);
        assert!(back.z_field().sub(&z0).sup_norm() < 1e-10 * z0.sup_norm());
        assert!(back.phi_field().sub(&st.phi_field()).sup_norm() < 1e-10);
    }

    #[test]
    fn unitarity_over_many_composed_steps() {
        let g = Grid::new(2, 32, tau()).unwrap();
        let rs = ref_state();
        let z0 = ScalarField::from_fn(g, |x| (x[0]).sin() + 0.5 * (x[1] * 3.0).cos());
        let phi0 = ScalarField::from_fn(g, |x| 0.2 * (x[0] + x[1]).sin());
        let mut st = AcousticState::from_fields(&z0, &phi0, &rs, 0.2).unwrap();
        let e0 = st.energy();
        for i in 0..1000 {
            st = st.propagate(st.time() + 0.013 + 1e-5 * (i % 7) as f64);
        }
        assert!((st.energy() - e0).abs() < 1e-10 * e0);
    }

    #[test]
    fn recombination_round_trip() {
        let g = Grid::new(2, 16, tau()).unwrap();
        let rs = ref_state();
        let z = ScalarField::from_fn(g, |x| (x[0]).sin());
        let w = ScalarField::from_fn(g, |x| (x[1]).cos() * 0.7);
        let (r, t) = recombine_rt(&z, &w, &rs).unwrap();
        // linear-algebra inverse oracle: re-form (αR+βT, δT−βR)
        let z_back = r.scale(rs.alpha).add(&t.scale(rs.beta));
        let w_back = t.scale(rs.delta).sub(&r.scale(rs.beta));
        assert!(z_back.sub(&z).sup_norm() < 1e-13);
        assert!(w_back.sub(&w).sup_norm() < 1e-13);
        // symmetric case α=β=δ=1: T = (Z+W)/2, R = (Z−W)/2
        let sym = ReferenceState {
            rho_bar: 1.0,
            theta_bar: 1.0,
            alpha: 1.0,
            beta: 1.0,
            delta: 1.0,
            omega: 2.0,
        };
        let (r2, t2) = recombine_rt(&z, &w, &sym).unwrap();
        assert!(t2.sub(&z.add(&w).scale(0.5)).sup_norm() < 1e-14);
        assert!(r2.sub(&z.sub(&w).scale(0.5)).sup_norm() < 1e-14);
        // W = 0 reduction
        let (r3, t3) = recombine_rt(&z, &ScalarField::zeros(g), &rs).unwrap();
        let den = rs.beta * rs.beta + rs.alpha * rs.delta;
        assert!(t3.sub(&z.scale(rs.beta / den)).sup_norm() < 1e-14);
        assert!(r3.sub(&z.scale(rs.delta / den)).sup_norm() < 1e-14);
    }

    #[test]
    fn decay_fit_on_synthetic_series() {
        let eps = 0.5;
        let series: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let t = 0.2 + i as f64 * 0.3;
                (t, 1.0 / (1.0 + t / eps))
            })
            .collect();
        let sigma = decay_exponent_fit(&series, eps, f64::INFINITY).unwrap();
        assert!((sigma - 1.0).abs() < 1e-6);
        let flat: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.0)).collect();
        assert!(decay_exponent_fit(&flat, eps, f64::INFINITY).unwrap().abs() < 1e-12);
        // window violations and degenerate input
        assert!(matches!(
            decay_exponent_fit(&series, eps, 1.0),
            Err(AcousticError::BeyondWrap { .. })
        ));
        assert!(matches!(
            decay_exponent_fit(&series[..3], eps, f64::INFINITY),
            Err(AcousticError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn support_stays_inside_fattened_ball() {
        // compactly supported data propagate no faster than √ω/ε
        let g = Grid::new(2, 64, 20.0).unwrap();
        let rs = ref_state();
        let eps = 1.0;
        let c = g.center();
        let z0 = ScalarField::from_fn(g, |x| {
            let r2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
            (-r2 / (2.0 * 0.64)).exp()
        });
        let st = AcousticState::from_fields(&z0, &ScalarField::zeros(g), &rs, eps).unwrap();
        let t = 2.0;
        let moved = st.propagate(t);
        let r_support = 6.0 * 0.8; // Gaussian support at 1e-8 amplitude
        let fat = r_support + rs.omega.sqrt() * t / eps + 0.5;
        let z = moved.z_field();
        let mut outside_max = 0.0f64;
        for idx in 0..g.points() {
            let x = g.coords(idx);
            if g.periodic_distance(&x, &c) > fat {
                outside_max = outside_max.max(z.samples()[idx].abs());
            }
        }
        assert!(outside_max < 1e-8, "leakage {outside_max:e}");
    }
}
