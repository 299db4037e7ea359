//! Distance between a compressible run and the limit system: the relative
//! entropy functional, essential/residual decomposition, uniform-bound
//! norms, convergence metrics, and the residual of the relative entropy
//! inequality evaluated along the test-function ansatz
//! `r = ρ̄ + εR`, `Θ = θ̄ + εT`, `U = v + ∇Φ`.

use crate::acoustic::{self, AcousticState};
use crate::euler::{self, EulerBoussinesqState};
use crate::fields::{self, FieldError, ScalarField, VectorField};
use crate::nsf::{NsfError, NsfState, Primitives};
use crate::scaling::ScalingParams;
use crate::thermo::{GasModel, ReferenceState, ThermoError};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Nsf(#[from] NsfError),
    #[error(transparent)]
    Acoustic(#[from] acoustic::AcousticError),
    #[error("test functions lost positivity: min {field} = {min}; reduce eps or amplitude")]
    TestFunctionPositivity { field: &'static str, min: f64 },
    #[error("histories have mismatched lengths or grids")]
    HistoryMismatch,
}

/// Smooth test trio evaluated on the grid at one time, together with the
/// analytic time derivatives the inequality needs.
pub struct TrioState {
    pub t: f64,
    pub r: ScalarField,
    pub big_theta: ScalarField,
    pub u: VectorField,
    pub div_u: ScalarField,
    pub grad_u: Vec<VectorField>,
    pub du_dt: VectorField,
    pub dr_dt: ScalarField,
    pub d_theta_dt: ScalarField,
    pub grad_r: VectorField,
    pub grad_theta: VectorField,
}

/// Build the test trio from the auxiliary systems: `U = v + ∇Φ`,
/// `r, Θ` recombined from the acoustic combination `Z` and the transported
/// `W`, with time derivatives taken from the governing equations rather
/// than finite differences.
pub fn assemble_trio(
    acoustic_state: &AcousticState,
    w: &ScalarField,
    euler_state: &EulerBoussinesqState,
    ref_state: &ReferenceState,
) -> Result<TrioState, DiagnosticsError> {
    let eps = acoustic_state.eps();
    let z = acoustic_state.z_field();
    let grad_phi = acoustic_state.grad_phi();
    let lap_phi = acoustic_state.laplacian_phi();
    let (big_r, big_t) = acoustic::recombine_rt(&z, w, ref_state)?;

    let r = big_r.scale(eps).map(|v| v + ref_state.rho_bar);
    let big_theta = big_t.scale(eps).map(|v| v + ref_state.theta_bar);
    let min_r = r.min();
    if !(min_r > 0.0) {
        return Err(DiagnosticsError::TestFunctionPositivity {
            field: "r",
            min: min_r,
        });
    }
    let min_t = big_theta.min();
    if !(min_t > 0.0) {
        return Err(DiagnosticsError::TestFunctionPositivity {
            field: "Theta",
            min: min_t,
        });
    }

    let u = euler_state.v.add(&grad_phi);
    // div U = ΔΦ since div v = 0
    let div_u = lap_phi.clone();
    let grad_u: Vec<VectorField> = u.components().iter().map(fields::gradient).collect();

    // ∂_t Z = −(ω/ε) ΔΦ; ∂_t W = −U·∇W − W ΔΦ
    let dz_dt = lap_phi.scale(-ref_state.omega / eps);
    let grad_w = fields::gradient(w);
    let mut dw_dt = u.dot(&grad_w).scale(-1.0);
    dw_dt.axpy(-1.0, &w.mul(&lap_phi));
    let den = ref_state.beta * ref_state.beta + ref_state.alpha * ref_state.delta;
    let dt_big_t = dz_dt
        .scale(ref_state.beta / den)
        .add(&dw_dt.scale(ref_state.alpha / den));
    let dt_big_r = dz_dt
        .scale(ref_state.delta / den)
        .sub(&dw_dt.scale(ref_state.beta / den));
    let dr_dt = dt_big_r.scale(eps);
    let d_theta_dt = dt_big_t.scale(eps);

    // ∂_t U = ∂_t v + ∂_t ∇Φ with ε ∂_t ∇Φ = −∇Z
    let dv_dt = euler::velocity_tendency(&euler_state.v);
    let grad_z = fields::gradient(&z);
    let du_dt = dv_dt.add(&grad_z.scale(-1.0 / eps));

    let grad_r = fields::gradient(&r);
    let grad_theta = fields::gradient(&big_theta);

    Ok(TrioState {
        t: euler_state.t,
        r,
        big_theta,
        u,
        div_u,
        grad_u,
        du_dt,
        dr_dt,
        d_theta_dt,
        grad_r,
        grad_theta,
    })
}

/// Relative entropy between the compressible state and a test trio:
/// `∫ ½ρ|u−U|² + ε⁻² (H_Θ(ρ,θ) − ∂H_Θ/∂ρ(r,Θ)(ρ−r) − H_Θ(r,Θ))`.
pub fn relative_entropy(
    state: &NsfState,
    prim: &Primitives,
    r: &ScalarField,
    big_theta: &ScalarField,
    u_test: &VectorField,
) -> Result<f64, DiagnosticsError> {
    let grid = state.grid();
    if r.grid() != grid || big_theta.grid() != grid || u_test.grid() != grid {
        return Err(DiagnosticsError::Field(FieldError::GridMismatch));
    }
    let eps2 = state.scaling.eps * state.scaling.eps;
    let gas = &state.gas;
    let mut total = 0.0;
    for idx in 0..grid.points() {
        let rho = state.rho.samples()[idx];
        let theta = prim.theta.samples()[idx];
        let rr = r.samples()[idx];
        let tt = big_theta.samples()[idx];
        let mut kin = 0.0;
        for ax in 0..grid.dim() {
            let du = prim.u.comp(ax).samples()[idx] - u_test.comp(ax).samples()[idx];
            kin += du * du;
        }
        let breg = gas.relative_entropy_integrand(rho, theta, rr, tt)?;
        total += 0.5 * rho * kin + breg / eps2;
    }
    Ok(total * grid.cell_volume())
}

/// Essential mask: nodes with `ρ̄/2 < ρ < 2ρ̄` and `θ̄/2 < θ < 2θ̄`. The
/// residual mask is its complement.
pub fn ess_mask(state: &NsfState, prim: &Primitives, ref_state: &ReferenceState) -> Vec<bool> {
    let (rb, tb) = (ref_state.rho_bar, ref_state.theta_bar);
    state
        .rho
        .samples()
        .iter()
        .zip(prim.theta.samples())
        .map(|(&rho, &theta)| {
            rho > 0.5 * rb && rho < 2.0 * rb && theta > 0.5 * tb && theta < 2.0 * tb
        })
        .collect()
}

/// `L^p` norm of the masked part of a field.
pub fn masked_lp_norm(f: &ScalarField, mask: &[bool], keep: bool, p: f64) -> f64 {
    let mut s = 0.0;
    for (v, &m) in f.samples().iter().zip(mask) {
        if m == keep {
            s += v.abs().powf(p);
        }
    }
    (s * f.grid().cell_volume()).powf(1.0 / p)
}

/// Masked integral of a pointwise function of the field value.
fn masked_integral(f: &ScalarField, mask: &[bool], keep: bool, g: impl Fn(f64) -> f64) -> f64 {
    let mut s = 0.0;
    for (v, &m) in f.samples().iter().zip(mask) {
        if m == keep {
            s += g(*v);
        }
    }
    s * f.grid().cell_volume()
}

/// Streaming accumulator for the uniform-bound norms along a run.
pub struct UniformBoundsAccumulator {
    scaling: ScalingParams,
    ref_state: ReferenceState,
    b3_sup: f64,
    b4_rho_sup: f64,
    b4_theta_sup: f64,
    b5_sup: f64,
    b6_sq: f64,
    b7_theta_sq: f64,
    b7_log_sq: f64,
    prev: Option<(f64, f64, f64, f64)>, // t, u_h1², θ_h1², logθ_h1²
}

impl UniformBoundsAccumulator {
    pub fn new(scaling: ScalingParams, ref_state: ReferenceState) -> Self {
        Self {
            scaling,
            ref_state,
            b3_sup: 0.0,
            b4_rho_sup: 0.0,
            b4_theta_sup: 0.0,
            b5_sup: 0.0,
            b6_sq: 0.0,
            b7_theta_sq: 0.0,
            b7_log_sq: 0.0,
            prev: None,
        }
    }

    pub fn push(&mut self, state: &NsfState, prim: &Primitives) {
        let eps = self.scaling.eps;
        let rb = self.ref_state.rho_bar;
        let tb = self.ref_state.theta_bar;
        let mask = ess_mask(state, prim, &self.ref_state);

        // b3: sup ‖√ρ u‖
        let sqrt_rho_u = prim.u.scale_by(&state.rho.map(|v| v.sqrt()));
        self.b3_sup = self.b3_sup.max(sqrt_rho_u.l2_norm());

        // b4: essential-part scaled deviations
        let rho_dev = state.rho.map(|v| (v - rb) / eps);
        let theta_dev = prim.theta.map(|v| (v - tb) / eps);
        self.b4_rho_sup = self.b4_rho_sup.max(masked_lp_norm(&rho_dev, &mask, true, 2.0));
        self.b4_theta_sup = self
            .b4_theta_sup
            .max(masked_lp_norm(&theta_dev, &mask, true, 2.0));

        // b5: residual integrals with the ε² normalization
        let res_int = masked_integral(&state.rho, &mask, false, |r| r.powf(5.0 / 3.0))
            + masked_integral(&prim.theta, &mask, false, |t| t.powi(4))
            + masked_integral(&state.rho, &mask, false, |_| 1.0);
        self.b5_sup = self.b5_sup.max(res_int / (eps * eps));

        // b6, b7: time-integrated W^{1,2} norms by the trapezoid rule
        let u_h1 = {
            let mut s = prim.u.l2_norm().powi(2);
            for c in prim.u.components() {
                s += fields::gradient(c).l2_norm().powi(2);
            }
            s
        };
        let th_dev = prim.theta.map(|v| v - tb);
        let th_h1 = th_dev.l2_norm().powi(2) + fields::gradient(&th_dev).l2_norm().powi(2);
        let log_dev = prim.theta.map(|v| v.ln() - tb.ln());
        let log_h1 = log_dev.l2_norm().powi(2) + fields::gradient(&log_dev).l2_norm().powi(2);
        if let Some((t_prev, u_prev, th_prev, log_prev)) = self.prev {
            let dt = state.t - t_prev;
            self.b6_sq += 0.5 * dt * (u_prev + u_h1);
            self.b7_theta_sq += 0.5 * dt * (th_prev + th_h1);
            self.b7_log_sq += 0.5 * dt * (log_prev + log_h1);
        }
        self.prev = Some((state.t, u_h1, th_h1, log_h1));
    }

    pub fn finish(&self) -> BTreeMap<String, f64> {
        let eps = self.scaling.eps;
        let mut map = BTreeMap::new();
        map.insert("b3_momentum_l2_sup".into(), self.b3_sup);
        map.insert("b4_density_ess_l2_sup".into(), self.b4_rho_sup);
        map.insert("b4_temperature_ess_l2_sup".into(), self.b4_theta_sup);
        map.insert("b5_residual_over_eps2_sup".into(), self.b5_sup);
        map.insert(
            "b6_velocity_l2w12".into(),
            eps.powf(0.5 * self.scaling.a_exp) * self.b6_sq.sqrt(),
        );
        map.insert(
            "b7_temperature_l2w12".into(),
            eps.powf(0.5 * (self.scaling.b_exp - 2.0)) * self.b7_theta_sq.sqrt(),
        );
        map.insert(
            "b7_log_temperature_l2w12".into(),
            eps.powf(0.5 * (self.scaling.b_exp - 2.0)) * self.b7_log_sq.sqrt(),
        );
        map
    }
}

/// Uniform-bound norms over a sampled history.
pub fn uniform_bounds_report(
    history: &[NsfState],
    ref_state: &ReferenceState,
) -> Result<BTreeMap<String, f64>, DiagnosticsError> {
    let mut acc = match history.first() {
        Some(st) => UniformBoundsAccumulator::new(st.scaling, *ref_state),
        None => return Err(DiagnosticsError::HistoryMismatch),
    };
    for st in history {
        let prim = st.primitives(ref_state.theta_bar)?;
        acc.push(st, &prim);
    }
    Ok(acc.finish())
}

/// Ball subdomain for the local convergence metrics.
#[derive(Debug, Clone, Copy)]
pub struct Ball {
    pub center: [f64; 3],
    pub radius: f64,
}

impl Ball {
    fn mask(&self, grid: fields::Grid) -> Vec<bool> {
        (0..grid.points())
            .map(|idx| grid.periodic_distance(&grid.coords(idx), &self.center) <= self.radius)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvMetrics {
    /// `‖[ρ−ρ̄]_ess‖_{L²} + ‖[ρ−ρ̄]_res‖_{L^{5/3}}` over the box
    pub m3: f64,
    /// `‖√ρ u − √ρ̄ v‖_{L²(K)}`
    pub m4: f64,
    /// `‖(θ−θ̄)/ε − T‖_{L¹(K)}`
    pub m5_q1: f64,
    /// `‖(θ−θ̄)/ε − T‖_{L^{3/2}(K)}`
    pub m5_q32: f64,
}

/// Convergence metrics against the limit run at a common time.
pub fn convergence_metrics(
    state: &NsfState,
    prim: &Primitives,
    euler_state: &EulerBoussinesqState,
    ref_state: &ReferenceState,
    subdomain: &Ball,
) -> Result<ConvMetrics, DiagnosticsError> {
    let grid = state.grid();
    if euler_state.v.grid() != grid {
        return Err(DiagnosticsError::Field(FieldError::GridMismatch));
    }
    if (state.t - euler_state.t).abs() > 1e-9 * state.t.abs().max(1.0) {
        return Err(DiagnosticsError::HistoryMismatch);
    }
    let eps = state.scaling.eps;
    let mask = ess_mask(state, prim, ref_state);
    let rho_dev = state.rho.map(|v| v - ref_state.rho_bar);
    let m3 = masked_lp_norm(&rho_dev, &mask, true, 2.0)
        + masked_lp_norm(&rho_dev, &mask, false, 5.0 / 3.0);

    let in_k = subdomain.mask(grid);
    let sqrt_rb = ref_state.rho_bar.sqrt();
    let mut m4_sq = 0.0;
    let mut m5_1 = 0.0;
    let mut m5_32 = 0.0;
    for idx in 0..grid.points() {
        if !in_k[idx] {
            continue;
        }
        let rho = state.rho.samples()[idx];
        let mut dv2 = 0.0;
        for ax in 0..grid.dim() {
            let d = rho.sqrt() * prim.u.comp(ax).samples()[idx]
                - sqrt_rb * euler_state.v.comp(ax).samples()[idx];
            dv2 += d * d;
        }
        m4_sq += dv2;
        let dt = (prim.theta.samples()[idx] - ref_state.theta_bar) / eps
            - euler_state.temp.samples()[idx];
        m5_1 += dt.abs();
        m5_32 += dt.abs().powf(1.5);
    }
    let vol = grid.cell_volume();
    Ok(ConvMetrics {
        m3,
        m4: (m4_sq * vol).sqrt(),
        m5_q1: m5_1 * vol,
        m5_q32: (m5_32 * vol).powf(2.0 / 3.0),
    })
}

/// Instantaneous integrands of the relative entropy inequality.
#[derive(Debug, Clone, Copy)]
pub struct InequalitySample {
    pub t: f64,
    /// relative entropy against the trio
    pub e_rel: f64,
    /// Θ-weighted dissipation rate (left-hand side integrand)
    pub diss_rate: f64,
    /// the same dissipation weighted by the constant θ̄ (total
    /// dissipation balance channel)
    pub diss_rate_ref: f64,
    /// the four right-hand-side integrand groups
    pub rhs_rates: [f64; 4],
}

/// Evaluate all integrands of the inequality at one time.
pub fn inequality_sample(
    state: &NsfState,
    prim: &Primitives,
    trio: &TrioState,
    gas: &GasModel,
    theta_bar: f64,
) -> Result<InequalitySample, DiagnosticsError> {
    let grid = state.grid();
    let dim = grid.dim();
    let eps = state.scaling.eps;
    let eps2 = eps * eps;
    let visc = eps.powf(state.scaling.a_exp);
    let heat = eps.powf(state.scaling.b_exp - 2.0);
    let heat_b = eps.powf(state.scaling.b_exp);

    let e_rel = relative_entropy(state, prim, &trio.r, &trio.big_theta, &trio.u)?;

    // velocity gradients of the solution (for S:∇u and S:∇U)
    let grad_u_sol: Vec<VectorField> = prim.u.components().iter().map(fields::gradient).collect();
    let mut div_u_sol = ScalarField::zeros(grid);
    for ax in 0..dim {
        div_u_sol.axpy(1.0, grad_u_sol[ax].comp(ax));
    }
    let grad_theta_sol = fields::gradient(&prim.theta);

    let vol = grid.cell_volume();
    let mut diss = 0.0;
    let mut diss_ref = 0.0;
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    let mut r3 = 0.0;
    let mut r4 = 0.0;
    for idx in 0..grid.points() {
        let rho = state.rho.samples()[idx];
        let theta = prim.theta.samples()[idx];
        let r_t = trio.r.samples()[idx];
        let th_t = trio.big_theta.samples()[idx];
        let mu = gas.mu0 * (1.0 + theta);
        let kappa = gas.kappa0 * (1.0 + theta * theta * theta);

        // S:∇u and S:∇U
        let mut s_du = 0.0;
        let mut s_d_u_test = 0.0;
        for ax in 0..dim {
            for bx in 0..dim {
                let mut g = grad_u_sol[ax].comp(bx).samples()[idx]
                    + grad_u_sol[bx].comp(ax).samples()[idx];
                if ax == bx {
                    g -= 2.0 / 3.0 * div_u_sol.samples()[idx];
                }
                let s_entry = mu * g;
                s_du += s_entry * grad_u_sol[ax].comp(bx).samples()[idx];
                s_d_u_test += s_entry * trio.grad_u[ax].comp(bx).samples()[idx];
            }
        }
        let mut grad_th2 = 0.0;
        let mut q_dot_grad_theta_test = 0.0;
        for ax in 0..dim {
            let gt = grad_theta_sol.comp(ax).samples()[idx];
            grad_th2 += gt * gt;
            q_dot_grad_theta_test += -kappa * gt * trio.grad_theta.comp(ax).samples()[idx];
        }
        // dissipation with the Θ/θ weight
        let bracket = visc * s_du + heat * kappa * grad_th2 / theta;
        diss += (th_t / theta) * bracket;
        diss_ref += (theta_bar / theta) * bracket;

        // R1: ρ(∂_t U + u·∇U)·(U − u) + ε^a S:∇U
        let mut conv = 0.0;
        for ax in 0..dim {
            let mut mat = trio.du_dt.comp(ax).samples()[idx];
            for bx in 0..dim {
                mat += prim.u.comp(bx).samples()[idx] * trio.grad_u[ax].comp(bx).samples()[idx];
            }
            conv += mat * (trio.u.comp(ax).samples()[idx] - prim.u.comp(ax).samples()[idx]);
        }
        r1 += rho * conv + visc * s_d_u_test;

        // R2: ε⁻²[(p(r,Θ) − p) div U + (ρ/r)(U−u)·∇p(r,Θ)]
        let eos_t = gas.eval_eos(r_t, th_t)?;
        let d_t = gas.derivatives(r_t, th_t)?;
        let mut u_diff_dot_grad_p = 0.0;
        for ax in 0..dim {
            let gp = d_t.p_rho * trio.grad_r.comp(ax).samples()[idx]
                + d_t.p_theta * trio.grad_theta.comp(ax).samples()[idx];
            u_diff_dot_grad_p +=
                (trio.u.comp(ax).samples()[idx] - prim.u.comp(ax).samples()[idx]) * gp;
        }
        r2 += ((eos_t.p - prim.p.samples()[idx]) * trio.div_u.samples()[idx]
            + rho / r_t * u_diff_dot_grad_p)
            / eps2;

        // R3: −ε⁻²[ρ(s − s(r,Θ))(∂_tΘ + u·∇Θ) + ε^b (q/θ)·∇Θ]
        let s_sol = prim.s.samples()[idx];
        let mut mat_theta = trio.d_theta_dt.samples()[idx];
        for ax in 0..dim {
            mat_theta +=
                prim.u.comp(ax).samples()[idx] * trio.grad_theta.comp(ax).samples()[idx];
        }
        r3 -= (rho * (s_sol - eos_t.s) * mat_theta + heat_b * q_dot_grad_theta_test / theta)
            / eps2;

        // R4: ε⁻² (r−ρ)/r (∂_t p(r,Θ) + U·∇p(r,Θ))
        let dp_dt = d_t.p_rho * trio.dr_dt.samples()[idx]
            + d_t.p_theta * trio.d_theta_dt.samples()[idx];
        let mut u_dot_grad_p = 0.0;
        for ax in 0..dim {
            let gp = d_t.p_rho * trio.grad_r.comp(ax).samples()[idx]
                + d_t.p_theta * trio.grad_theta.comp(ax).samples()[idx];
            u_dot_grad_p += trio.u.comp(ax).samples()[idx] * gp;
        }
        r4 += (r_t - rho) / r_t * (dp_dt + u_dot_grad_p) / eps2;
    }

    Ok(InequalitySample {
        t: state.t,
        e_rel,
        diss_rate: diss * vol,
        diss_rate_ref: diss_ref * vol,
        rhs_rates: [r1 * vol, r2 * vol, r3 * vol, r4 * vol],
    })
}

/// Running trapezoid accumulator for the inequality gap along a run.
pub struct InequalityAccumulator {
    prev: Option<InequalitySample>,
    e0: Option<f64>,
    diss_acc: f64,
    rhs_acc: [f64; 4],
}

/// Signed gap and its magnitude scale at one time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InequalityGap {
    pub t: f64,
    /// `RHS(τ) − [E]₀^τ − dissipation(τ)`; nonnegative up to discretization
    pub gap: f64,
    /// scale used to normalize the gap tolerance
    pub scale: f64,
}

impl Default for InequalityAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl InequalityAccumulator {
    pub fn new() -> Self {
        Self {
            prev: None,
            e0: None,
            diss_acc: 0.0,
            rhs_acc: [0.0; 4],
        }
    }

    pub fn push(&mut self, sample: InequalitySample) -> InequalityGap {
        if self.e0.is_none() {
            self.e0 = Some(sample.e_rel);
        }
        if let Some(prev) = self.prev {
            let dt = sample.t - prev.t;
            self.diss_acc += 0.5 * dt * (prev.diss_rate + sample.diss_rate);
            for i in 0..4 {
                self.rhs_acc[i] += 0.5 * dt * (prev.rhs_rates[i] + sample.rhs_rates[i]);
            }
        }
        self.prev = Some(sample);
        let delta_e = sample.e_rel - self.e0.unwrap();
        let rhs: f64 = self.rhs_acc.iter().sum();
        let gap = rhs - delta_e - self.diss_acc;
        let scale = self.rhs_acc.iter().map(|v| v.abs()).sum::<f64>()
            + self.diss_acc.abs()
            + delta_e.abs();
        InequalityGap {
            t: sample.t,
            gap,
            scale,
        }
    }
}

/// Signed gap of the relative entropy inequality over snapshot histories
/// sampled at common times (positive means the inequality holds with slack).
pub fn r1_residual(
    nsf_history: &[NsfState],
    trio_history: &[TrioState],
    ref_state: &ReferenceState,
) -> Result<InequalityGap, DiagnosticsError> {
    if nsf_history.len() != trio_history.len() || nsf_history.len() < 2 {
        return Err(DiagnosticsError::HistoryMismatch);
    }
    let gas = nsf_history[0].gas.clone();
    let mut acc = InequalityAccumulator::new();
    let mut last = None;
    for (st, trio) in nsf_history.iter().zip(trio_history) {
        let prim = st.primitives(ref_state.theta_bar)?;
        let sample = inequality_sample(st, &prim, trio, &gas, ref_state.theta_bar)?;
        last = Some(acc.push(sample));
    }
    Ok(last.unwrap())
}

/// Per-run diagnostics written as JSON.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub eps: f64,
    pub t: Vec<f64>,
    pub rel_entropy: Vec<f64>,
    pub m3: Vec<f64>,
    pub m4: Vec<f64>,
    pub m5: Vec<f64>,
    pub m5_q32: Vec<f64>,
    pub r1_gap: Vec<f64>,
    pub r1_scale: Vec<f64>,
    pub bounds: BTreeMap<String, f64>,
    /// regularization kernel convention used for the run
    pub kernel: String,
}
