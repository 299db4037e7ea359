//! Scaled compressible Navier-Stokes-Fourier solver in conservative
//! variables `(ρ, m, E)` with `E = ½|m|²/ρ + ε⁻² ρe`.
//!
//! The pressure gradient carries the stiff `ε⁻²` factor, viscosity enters at
//! `ε^a` and heat conduction at `ε^{b-2}`; the entropy balance is demoted to
//! a sign diagnostic. Time stepping is a Strang split: the constant
//! coefficient acoustic block (mass flux, linearized pressure force,
//! background enthalpy flux) is solved exactly per Fourier mode, everything
//! else — advection, viscous and heat fluxes, and the pressure nonlinearity
//! left over after linearization — is advanced by an explicit midpoint step.
//! Divergence-form fluxes make total mass, momentum and energy discrete
//! invariants up to round-off.

use crate::fields::{self, FieldError, Grid, ScalarField, SpectralScalar, VectorField};
use crate::scaling::{ScalingError, ScalingParams};
use crate::thermo::{GasModel, ReferenceState, ThermoError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NsfError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error("vacuum state: min(rho) = {0} <= 0")]
    Vacuum(f64),
    #[error("state corruption at t = {t}, field {field}: {reason}")]
    StateCorruption {
        t: f64,
        field: &'static str,
        reason: String,
    },
    #[error("step dt = {dt} violates the {kind} stability limit {limit}")]
    StepSize {
        dt: f64,
        limit: f64,
        kind: &'static str,
    },
    #[error("need at least {need} history samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
}

/// Conservative state of the compressible run.
#[derive(Debug, Clone)]
pub struct NsfState {
    pub rho: ScalarField,
    pub m: VectorField,
    pub e_total: ScalarField,
    pub t: f64,
    pub scaling: ScalingParams,
    pub gas: GasModel,
}

/// Pointwise primitive fields recovered from a conservative state.
pub struct Primitives {
    pub u: VectorField,
    pub theta: ScalarField,
    pub p: ScalarField,
    pub s: ScalarField,
    pub rho_e: ScalarField,
}

/// Tendencies of the conservative variables.
pub struct NsfRhs {
    pub d_rho: ScalarField,
    pub d_m: VectorField,
    pub d_e: ScalarField,
}

impl NsfState {
    pub fn grid(&self) -> Grid {
        self.rho.grid()
    }

    /// Recover `(u, θ, p, ρe)`; θ by safeguarded Newton on the strictly
    /// increasing map `θ ↦ ρe(ρ,θ)`.
    pub fn primitives(&self, theta_guess: f64) -> Result<Primitives, NsfError> {
        let grid = self.grid();
        let eps2 = self.scaling.eps * self.scaling.eps;
        let min_rho = self.rho.min();
        if !(min_rho > 0.0) {
            return Err(NsfError::Vacuum(min_rho));
        }
        let mut u = VectorField::zeros(grid);
        let mut rho_e = ScalarField::zeros(grid);
        let mut theta = ScalarField::zeros(grid);
        let mut p = ScalarField::zeros(grid);
        let mut s_field = ScalarField::zeros(grid);
        for idx in 0..grid.points() {
            let rho = self.rho.samples()[idx];
            let mut kin = 0.0;
            for ax in 0..grid.dim() {
                let mi = self.m.comp(ax).samples()[idx];
                u.comp_mut(ax).samples_mut()[idx] = mi / rho;
                kin += mi * mi;
            }
            kin *= 0.5 / rho;
            let re = eps2 * (self.e_total.samples()[idx] - kin);
            rho_e.samples_mut()[idx] = re;
            let th = recover_theta(&self.gas, rho, re, theta_guess).map_err(|reason| {
                NsfError::StateCorruption {
                    t: self.t,
                    field: "theta",
                    reason,
                }
            })?;
            theta.samples_mut()[idx] = th;
            let eos = self.gas.eval_eos(rho, th)?;
            p.samples_mut()[idx] = eos.p;
            s_field.samples_mut()[idx] = eos.s;
        }
        Ok(Primitives {
            u,
            theta,
            p,
            s: s_field,
            rho_e,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.rho.integral()
    }

    pub fn total_energy(&self) -> f64 {
        self.e_total.integral()
    }

    pub fn total_momentum(&self) -> Vec<f64> {
        self.m.components().iter().map(|c| c.integral()).collect()
    }
}

/// `ρe(ρ,θ) = (3/2) θ^{5/2} P(Z) + a θ⁴`, strictly increasing in θ.
fn rho_e_of(gas: &GasModel, rho: f64, theta: f64) -> Result<f64, ThermoError> {
    let z = rho * theta.powf(-1.5);
    let st = gas.structural(z)?;
    Ok(1.5 * theta.powf(2.5) * st.p + gas.a_rad * theta.powi(4))
}

/// `∂(ρe)/∂θ = (9/4) θ^{3/2} h(Z) + 4a θ³ > 0`.
fn rho_e_theta(gas: &GasModel, rho: f64, theta: f64) -> Result<f64, ThermoError> {
    let z = rho * theta.powf(-1.5);
    let h = gas.heat_combination(z)?;
    Ok(2.25 * theta.powf(1.5) * h + 4.0 * gas.a_rad * theta.powi(3))
}

/// Bisection-safeguarded Newton for θ with an expanding bracket.
fn recover_theta(
    gas: &GasModel,
    rho: f64,
    rho_e_target: f64,
    guess: f64,
) -> Result<f64, String> {
    if !(rho_e_target > 0.0) {
        return Err(format!("nonpositive internal energy {rho_e_target}"));
    }
    let eval = |th: f64| rho_e_of(gas, rho, th).map_err(|e| e.to_string());
    let (mut lo, mut hi) = (guess / 10.0, guess * 10.0);
    for _ in 0..8 {
        if eval(lo)? <= rho_e_target {
            break;
        }
        lo /= 10.0;
        if lo < 1e-12 {
            return Err(format!("no lower bracket for rho_e = {rho_e_target}"));
        }
    }
    for _ in 0..8 {
        if eval(hi)? >= rho_e_target {
            break;
        }
        hi *= 10.0;
        if hi > 1e12 {
            return Err(format!("no upper bracket for rho_e = {rho_e_target}"));
        }
    }
    let mut th = guess.clamp(lo, hi);
    for _ in 0..60 {
        let f = eval(th)? - rho_e_target;
        if f > 0.0 {
            hi = th;
        } else {
            lo = th;
        }
        let df = rho_e_theta(gas, rho, th).map_err(|e| e.to_string());
        let mut next = match df {
            Ok(d) if d > 0.0 => th - f / d,
            _ => 0.5 * (lo + hi),
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - th).abs() <= 1e-14 * th.abs() {
            return Ok(next);
        }
        th = next;
    }
    Ok(th)
}

/// Ill-prepared initial data `ρ = ρ̄ + ε ρ⁽¹⁾`, `θ = θ̄ + ε θ⁽¹⁾`,
/// `m = ρ u₀`, with the total energy assembled from the equation of state.
pub fn make_ill_prepared_data(
    rho1: &ScalarField,
    theta1: &ScalarField,
    u0: &VectorField,
    scaling: &ScalingParams,
    ref_state: &ReferenceState,
    gas: &GasModel,
) -> Result<NsfState, NsfError> {
    scaling.validate()?;
    let grid = rho1.grid();
    if theta1.grid() != grid || u0.grid() != grid {
        return Err(NsfError::Field(FieldError::GridMismatch));
    }
    let eps = scaling.eps;
    let rho = rho1.scale(eps).map(|v| v + ref_state.rho_bar);
    let theta = theta1.scale(eps).map(|v| v + ref_state.theta_bar);
    let min_rho = rho.min();
    if !(min_rho > 0.0) {
        return Err(NsfError::Vacuum(min_rho));
    }
    let min_theta = theta.min();
    if !(min_theta > 0.0) {
        return Err(NsfError::StateCorruption {
            t: 0.0,
            field: "theta",
            reason: format!("min(theta) = {min_theta} <= 0"),
        });
    }
    let m = u0.scale_by(&rho);
    let mut e_total = ScalarField::zeros(grid);
    let eps2 = eps * eps;
    for idx in 0..grid.points() {
        let r = rho.samples()[idx];
        let th = theta.samples()[idx];
        let e = gas.eval_eos(r, th)?.e;
        let mut kin = 0.0;
        for ax in 0..grid.dim() {
            let mi = m.comp(ax).samples()[idx];
            kin += mi * mi;
        }
        kin *= 0.5 / r;
        e_total.samples_mut()[idx] = kin + r * e / eps2;
    }
    Ok(NsfState {
        rho,
        m,
        e_total,
        t: 0.0,
        scaling: *scaling,
        gas: gas.clone(),
    })
}

/// Precomputed linearization and solver workspace for one configuration.
pub struct NsfSolver {
    pub gas: GasModel,
    pub scaling: ScalingParams,
    pub ref_state: ReferenceState,
    grid: Grid,
    /// `p_lin = p̄ + lin_rho (ρ−ρ̄) + ε² lin_e (E−Ē)`.
    lin_rho: f64,
    lin_e: f64,
    p_bar: f64,
    rho_e_bar: f64,
    /// background specific enthalpy `h̄ = ē + p̄/ρ̄`
    enthalpy_bar: f64,
    /// block wave speed squared; equals `ref_state.omega` up to round-off
    omega_block: f64,
}

impl NsfSolver {
    pub fn new(
        gas: &GasModel,
        scaling: &ScalingParams,
        ref_state: &ReferenceState,
        grid: Grid,
    ) -> Result<Self, NsfError> {
        scaling.validate()?;
        let (rb, tb) = (ref_state.rho_bar, ref_state.theta_bar);
        let eos = gas.eval_eos(rb, tb)?;
        let d = gas.derivatives(rb, tb)?;
        let cv = d.e_theta;
        let lin_e = d.p_theta / (rb * cv);
        let lin_rho = d.p_rho - lin_e * (eos.e + rb * d.e_rho);
        let enthalpy_bar = eos.e + eos.p / rb;
        let omega_block = lin_rho + lin_e * enthalpy_bar;
        Ok(Self {
            gas: gas.clone(),
            scaling: *scaling,
            ref_state: *ref_state,
            grid,
            lin_rho,
            lin_e,
            p_bar: eos.p,
            rho_e_bar: rb * eos.e,
            enthalpy_bar,
            omega_block,
        })
    }

    /// Squared acoustic speed of the implicit block; agrees with the
    /// reference state's `omega` by the thermodynamic identity
    /// `ω = p_ρ + θ̄ p_θ² / (ρ̄² c_v)`.
    pub fn omega_block(&self) -> f64 {
        self.omega_block
    }

    /// Full right-hand side of the conservative system (used directly by
    /// verification tests; the time stepper splits it).
    pub fn rhs(&self, state: &NsfState) -> Result<NsfRhs, NsfError> {
        let block = self.block_rhs(state)?;
        let rem = self.remainder_rhs(state)?;
        let grid = self.grid;
        let mut d_m = VectorField::zeros(grid);
        for ax in 0..grid.dim() {
            *d_m.comp_mut(ax) = block.d_m.comp(ax).add(rem.d_m.comp(ax));
        }
        Ok(NsfRhs {
            d_rho: block.d_rho.add(&rem.d_rho),
            d_m,
            d_e: block.d_e.add(&rem.d_e),
        })
    }

    /// The constant-coefficient acoustic block as a right-hand side:
    /// `∂_t ρ = −div m`, `∂_t m = −ε⁻² lin_rho ∇ρ − lin_e ∇E`,
    /// `∂_t E = −ε⁻² h̄ div m`.
    fn block_rhs(&self, state: &NsfState) -> Result<NsfRhs, NsfError> {
        let eps2 = self.scaling.eps * self.scaling.eps;
        let div_m = fields::divergence(&state.m);
        let grad_rho = fields::gradient(&state.rho);
        let grad_e = fields::gradient(&state.e_total);
        let grid = self.grid;
        let mut d_m = VectorField::zeros(grid);
        for ax in 0..grid.dim() {
            let mut c = grad_rho.comp(ax).scale(-self.lin_rho / eps2);
            c.axpy(-self.lin_e, grad_e.comp(ax));
            *d_m.comp_mut(ax) = c;
        }
        Ok(NsfRhs {
            d_rho: div_m.scale(-1.0),
            d_m,
            d_e: div_m.scale(-self.enthalpy_bar / eps2),
        })
    }

    /// Everything the block leaves over: advection, viscous stress, heat
    /// flux and the pressure nonlinearity `p − p_lin`.
    pub fn remainder_rhs(&self, state: &NsfState) -> Result<NsfRhs, NsfError> {
        let grid = self.grid;
        let dim = grid.dim();
        let eps = self.scaling.eps;
        let eps2 = eps * eps;
        let visc_scale = eps.powf(self.scaling.a_exp);
        let heat_scale = eps.powf(self.scaling.b_exp - 2.0);
        let prim = state.primitives(self.ref_state.theta_bar)?;

        // velocity gradients and shear tensor G = ∇u + ∇uᵀ − (2/3) div u I
        let grad_u: Vec<VectorField> = prim
            .u
            .components()
            .iter()
            .map(fields::gradient)
            .collect();
        let mut div_u = ScalarField::zeros(grid);
        for ax in 0..dim {
            div_u.axpy(1.0, grad_u[ax].comp(ax));
        }
        let mu = prim.theta.map(|th| self.gas.mu0 * (1.0 + th));
        let kappa = prim.theta.map(|th| self.gas.kappa0 * (1.0 + th * th * th));

        // stress rows S_ax = μ (∂_ax u_b + ∂_b u_ax − (2/3) δ div u)
        let mut stress = Vec::with_capacity(dim);
        for ax in 0..dim {
            let mut row = Vec::with_capacity(dim);
            for bx in 0..dim {
                let mut g = grad_u[ax].comp(bx).add(grad_u[bx].comp(ax));
                if ax == bx {
                    g.axpy(-2.0 / 3.0, &div_u);
                }
                row.push(g.mul(&mu));
            }
            stress.push(
                VectorField::from_components(row).expect("components share the grid"),
            );
        }

        // momentum: −div(m ⊗ u) − ε⁻²∇(p − p_lin) + ε^a div S
        let p_nl = {
            let mut f = ScalarField::zeros(grid);
            for idx in 0..grid.points() {
                let e_term = eps2 * state.e_total.samples()[idx] - self.rho_e_bar;
                let p_lin = self.p_bar
                    + self.lin_rho * (state.rho.samples()[idx] - self.ref_state.rho_bar)
                    + self.lin_e * e_term;
                f.samples_mut()[idx] = prim.p.samples()[idx] - p_lin;
            }
            f
        };
        let grad_pnl = fields::gradient(&p_nl);

        let mut d_m = VectorField::zeros(grid);
        for ax in 0..dim {
            let flux = VectorField::from_components(
                (0..dim)
                    .map(|bx| state.m.comp(ax).mul(prim.u.comp(bx)))
                    .collect(),
            )
            .expect("components share the grid");
            let mut c = divergence_dealiased(&flux).scale(-1.0);
            c.axpy(-1.0 / eps2, grad_pnl.comp(ax));
            c.axpy(visc_scale, &divergence_dealiased(&stress[ax]));
            *d_m.comp_mut(ax) = c;
        }

        // energy: −div[(E + ε⁻²p)u − ε⁻²h̄ m] + ε^a div(S·u) − ε^{b−2} div q
        let grad_theta = fields::gradient(&prim.theta);
        let q = grad_theta.scale_by(&kappa).scale(-1.0);
        let mut e_flux_comps = Vec::with_capacity(dim);
        let mut su_comps = Vec::with_capacity(dim);
        for bx in 0..dim {
            let mut f = ScalarField::zeros(grid);
            let mut su = ScalarField::zeros(grid);
            for idx in 0..grid.points() {
                let coef = state.e_total.samples()[idx] + prim.p.samples()[idx] / eps2;
                f.samples_mut()[idx] = coef * prim.u.comp(bx).samples()[idx]
                    - self.enthalpy_bar / eps2 * state.m.comp(bx).samples()[idx];
                let mut s = 0.0;
                for ax in 0..dim {
                    s += stress[ax].comp(bx).samples()[idx] * prim.u.comp(ax).samples()[idx];
                }
                su.samples_mut()[idx] = s;
            }
            e_flux_comps.push(f);
            su_comps.push(su);
        }
        let e_flux = VectorField::from_components(e_flux_comps).expect("same grid");
        let su = VectorField::from_components(su_comps).expect("same grid");
        let mut d_e = divergence_dealiased(&e_flux).scale(-1.0);
        d_e.axpy(visc_scale, &divergence_dealiased(&su));
        d_e.axpy(-heat_scale, &divergence_dealiased(&q));

        Ok(NsfRhs {
            d_rho: ScalarField::zeros(grid),
            d_m,
            d_e,
        })
    }

    /// Exact solution of the acoustic block over a time `h`, applied per
    /// Fourier mode. The `k = 0` modes are untouched, as are transverse
    /// momentum components and the entropy-wave invariant `Ê − ε⁻²h̄ρ̂`.
    fn block_exact(&self, state: &mut NsfState, h: f64) {
        let grid = self.grid;
        let dim = grid.dim();
        let eps = self.scaling.eps;
        let sqrt_omega = self.omega_block.sqrt();

        let mut rho_hat = state.rho.to_spectral();
        let mut e_hat = state.e_total.to_spectral();
        let mut m_hat: Vec<SpectralScalar> = state
            .m
            .components()
            .iter()
            .map(|c| c.to_spectral())
            .collect();

        let nyquist = grid.n() / 2;
        for idx in 1..grid.points() {
            let ij = grid.decode(idx);
            let mut k = [0.0f64; 3];
            let mut k2 = 0.0;
            // first-derivative convention: Nyquist axes contribute no
            // wavenumber, exactly as in the spectral gradient/divergence
            for ax in 0..dim {
                if ij[ax] == nyquist {
                    continue;
                }
                k[ax] = grid.wavenumber(ij[ax]);
                k2 += k[ax] * k[ax];
            }
            if k2 == 0.0 {
                continue;
            }
            let kn = k2.sqrt();
            let khat: Vec<f64> = (0..dim).map(|ax| k[ax] / kn).collect();
            let rho_c = rho_hat.coef()[idx];
            let e_c = e_hat.coef()[idx];
            let mut zeta = Complex64::new(0.0, 0.0);
            for ax in 0..dim {
                zeta += khat[ax] * m_hat[ax].coef()[idx];
            }
            let j_inv = e_c - self.enthalpy_bar / (eps * eps) * rho_c;
            let rho_shift = eps * eps * self.lin_e * j_inv / self.omega_block;
            let rho_tilde = rho_c + rho_shift;
            let lam = kn * sqrt_omega * h / eps;
            let (s, c) = lam.sin_cos();
            let i = Complex64::new(0.0, 1.0);
            let rho_tilde_new = rho_tilde * c - i * (eps / sqrt_omega) * zeta * s;
            let zeta_new = zeta * c - i * (sqrt_omega / eps) * rho_tilde * s;
            let rho_new = rho_tilde_new - rho_shift;
            let e_new = j_inv + self.enthalpy_bar / (eps * eps) * rho_new;
            rho_hat.coef_mut()[idx] = rho_new;
            e_hat.coef_mut()[idx] = e_new;
            let dz = zeta_new - zeta;
            for ax in 0..dim {
                let cur = m_hat[ax].coef()[idx];
                m_hat[ax].coef_mut()[idx] = cur + khat[ax] * dz;
            }
        }

        state.rho = rho_hat.to_physical();
        state.e_total = e_hat.to_physical();
        let comps: Vec<ScalarField> = m_hat.iter().map(|s| s.to_physical()).collect();
        state.m = VectorField::from_components(comps).expect("same grid");
    }

    /// One Strang-split step: exact acoustic block over `dt/2`, explicit
    /// midpoint step of the remainder over `dt`, exact block over `dt/2`.
    pub fn step_imex(&self, state: &NsfState, dt: f64) -> Result<NsfState, NsfError> {
        // advective CFL and explicit-diffusion limits
        let prim = state.primitives(self.ref_state.theta_bar)?;
        let umax = prim.u.sup_norm();
        let dx = self.grid.dx();
        let adv_limit = dx / umax.max(1e-300);
        if dt > adv_limit {
            return Err(NsfError::StepSize {
                dt,
                limit: adv_limit,
                kind: "advective CFL",
            });
        }
        let theta_max = prim.theta.max();
        let rho_min = state.rho.min();
        let eps = self.scaling.eps;
        let k2max = (std::f64::consts::PI / dx).powi(2) * self.grid.dim() as f64;
        let nu = eps.powf(self.scaling.a_exp) * self.gas.mu0 * (1.0 + theta_max) / rho_min;
        let cv_min = 1.0; // order-one lower bound for the default family
        let chi = eps.powf(self.scaling.b_exp) * self.gas.kappa0
            * (1.0 + theta_max.powi(3))
            / (rho_min * cv_min);
        let diff_limit = 2.0 / (nu.max(chi) * k2max).max(1e-300);
        if dt > diff_limit {
            return Err(NsfError::StepSize {
                dt,
                limit: diff_limit,
                kind: "explicit diffusion",
            });
        }

        let mut v = state.clone();
        self.block_exact(&mut v, 0.5 * dt);
        // explicit midpoint on the remainder
        let k1 = self.remainder_rhs(&v)?;
        let mut mid = v.clone();
        apply_rhs(&mut mid, &k1, 0.5 * dt);
        let k2 = self.remainder_rhs(&mid)?;
        apply_rhs(&mut v, &k2, dt);
        self.block_exact(&mut v, 0.5 * dt);
        v.t = state.t + dt;
        Ok(v)
    }
}

fn kinetic_at(state: &NsfState, idx: usize) -> f64 {
    let mut kin = 0.0;
    for ax in 0..state.grid().dim() {
        let mi = state.m.comp(ax).samples()[idx];
        kin += mi * mi;
    }
    0.5 * kin / state.rho.samples()[idx]
}

fn apply_rhs(state: &mut NsfState, rhs: &NsfRhs, dt: f64) {
    state.rho.axpy(dt, &rhs.d_rho);
    for ax in 0..state.m.grid().dim() {
        let d = rhs.d_m.comp(ax).clone();
        state.m.comp_mut(ax).axpy(dt, &d);
    }
    state.e_total.axpy(dt, &rhs.d_e);
}

/// Divergence with the 2/3-rule truncation applied to the flux spectrum.
fn divergence_dealiased(flux: &VectorField) -> ScalarField {
    let grid = flux.grid();
    let mut acc = SpectralScalar::zeros(grid);
    for axis in 0..grid.dim() {
        let mut spec = flux.comp(axis).to_spectral();
        fields::dealias_two_thirds(&mut spec);
        let nyq = grid.n() / 2;
        for (idx, out) in acc.coef_mut().iter_mut().enumerate() {
            let i = grid.decode(idx)[axis];
            if i == nyq {
                continue;
            }
            *out += Complex64::new(0.0, grid.wavenumber(i)) * spec.coef()[idx];
        }
    }
    acc.to_physical()
}

/// Pointwise entropy production rate
/// `σ = θ⁻¹ (ε^{2+a} S:∇u − ε^b q·∇θ/θ)`; nonnegative up to round-off.
pub fn entropy_production(state: &NsfState) -> Result<ScalarField, NsfError> {
    let prim = state.primitives(1.0)?;
    entropy_production_from(state, &prim)
}

/// As [`entropy_production`], reusing precomputed primitives.
pub fn entropy_production_from(
    state: &NsfState,
    prim: &Primitives,
) -> Result<ScalarField, NsfError> {
    let grid = state.grid();
    let dim = grid.dim();
    let eps = state.scaling.eps;
    let visc = eps.powf(2.0 + state.scaling.a_exp);
    let heat = eps.powf(state.scaling.b_exp);
    let grad_u: Vec<VectorField> = prim.u.components().iter().map(fields::gradient).collect();
    let mut div_u = ScalarField::zeros(grid);
    for ax in 0..dim {
        div_u.axpy(1.0, grad_u[ax].comp(ax));
    }
    let grad_theta = fields::gradient(&prim.theta);
    let mut out = ScalarField::zeros(grid);
    for idx in 0..grid.points() {
        let th = prim.theta.samples()[idx];
        let mu = state.gas.mu0 * (1.0 + th);
        let kappa = state.gas.kappa0 * (1.0 + th * th * th);
        // S:∇u with S = μ(∇u + ∇uᵀ − (2/3) div u I)
        let mut s_contract = 0.0;
        for ax in 0..dim {
            for bx in 0..dim {
                let mut g = grad_u[ax].comp(bx).samples()[idx] + grad_u[bx].comp(ax).samples()[idx];
                if ax == bx {
                    g -= 2.0 / 3.0 * div_u.samples()[idx];
                }
                s_contract += g * grad_u[ax].comp(bx).samples()[idx];
            }
        }
        let mut grad_th2 = 0.0;
        for ax in 0..dim {
            let gt = grad_theta.comp(ax).samples()[idx];
            grad_th2 += gt * gt;
        }
        out.samples_mut()[idx] =
            (visc * mu * s_contract + heat * kappa * grad_th2 / th) / th;
    }
    Ok(out)
}

/// Endpoint evaluation of the total dissipation balance.
#[derive(Debug, Clone)]
pub struct BalanceReport {
    /// energy functional at each sample time
    pub functional: Vec<f64>,
    /// running time integral of the θ̄-weighted dissipation
    pub dissipation: Vec<f64>,
    /// `functional(τ) + dissipation(τ) − functional(0)` at the final sample
    pub gap: f64,
    pub relative_gap: f64,
}

/// Energy functional of the dissipation balance:
/// `∫ ½ρ|u|² + ε⁻² (H_θ̄(ρ,θ) − ∂H/∂ρ(ρ̄,θ̄)(ρ−ρ̄) − H_θ̄(ρ̄,θ̄))`.
pub fn dissipation_functional(
    state: &NsfState,
    ref_state: &ReferenceState,
) -> Result<f64, NsfError> {
    let prim = state.primitives(ref_state.theta_bar)?;
    dissipation_functional_from(state, &prim, ref_state)
}

/// As [`dissipation_functional`], reusing precomputed primitives.
pub fn dissipation_functional_from(
    state: &NsfState,
    prim: &Primitives,
    ref_state: &ReferenceState,
) -> Result<f64, NsfError> {
    let grid = state.grid();
    let eps2 = state.scaling.eps * state.scaling.eps;
    let gas = &state.gas;
    let dh_ref = gas.ballistic_partial_rho(ref_state.rho_bar, ref_state.theta_bar)?;
    let h_ref =
        gas.ballistic_free_energy(ref_state.rho_bar, ref_state.theta_bar, ref_state.theta_bar)?;
    let mut total = 0.0;
    for idx in 0..grid.points() {
        let rho = state.rho.samples()[idx];
        let th = prim.theta.samples()[idx];
        let kin = kinetic_at(state, idx);
        let h = gas.ballistic_free_energy(rho, th, ref_state.theta_bar)?;
        total += kin + (h - dh_ref * (rho - ref_state.rho_bar) - h_ref) / eps2;
    }
    Ok(total * grid.cell_volume())
}

/// The θ̄-weighted dissipation rate
/// `θ̄ ∫ θ⁻¹ (ε^a S:∇u − ε^{b−2} q·∇θ/θ)`.
pub fn dissipation_rate(state: &NsfState, ref_state: &ReferenceState) -> Result<f64, NsfError> {
    // same integrand as entropy_production scaled by θ̄ ε⁻²
    let sigma = entropy_production(state)?;
    let eps2 = state.scaling.eps * state.scaling.eps;
    Ok(ref_state.theta_bar / eps2 * sigma.integral())
}

/// Evaluate the dissipation balance over a uniformly sampled history.
pub fn dissipation_balance(
    history: &[NsfState],
    ref_state: &ReferenceState,
) -> Result<BalanceReport, NsfError> {
    if history.len() < 2 {
        return Err(NsfError::TooFewSamples {
            need: 2,
            got: history.len(),
        });
    }
    let mut functional = Vec::with_capacity(history.len());
    let mut rates = Vec::with_capacity(history.len());
    for st in history {
        functional.push(dissipation_functional(st, ref_state)?);
        rates.push(dissipation_rate(st, ref_state)?);
    }
    let mut dissipation = vec![0.0];
    for i in 1..history.len() {
        let dt = history[i].t - history[i - 1].t;
        let prev = dissipation[i - 1];
        dissipation.push(prev + 0.5 * dt * (rates[i] + rates[i - 1]));
    }
    let gap = functional.last().unwrap() + dissipation.last().unwrap() - functional[0];
    let relative_gap = gap / functional[0].abs().max(1e-300);
    Ok(BalanceReport {
        functional,
        dissipation,
        gap,
        relative_gap,
    })
}
