//! One experiment at one ε: co-evolve the compressible run, the acoustic
//! field, the transported combination `W` and the Euler-Boussinesq limit,
//! accumulate the inequality and balance integrals at every step, and emit
//! time series, diagnostics JSON and snapshots.

use super::config::{ConfigError, ExperimentConfig, SnapshotPolicy};
use super::data::{initial_data, InitialData};
use crate::acoustic::{self, AcousticError, AcousticState};
use crate::diagnostics::{
    self, assemble_trio, Ball, ConvMetrics, DiagnosticsError, DiagnosticsReport, InequalityGap,
};
use crate::euler::{self, EulerBoussinesqState, EulerError};
use crate::fields::{self, io as field_io, FieldError, ScalarField};
use crate::nsf::{self, NsfError, NsfSolver};
use crate::transport::{self, TransportError, TransportState};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Acoustic(#[from] AcousticError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Euler(#[from] EulerError),
    #[error(transparent)]
    Nsf(#[from] NsfError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("run failed at eps = {eps}, step {step} (t = {t}): {source}")]
    RunFailure {
        eps: f64,
        step: usize,
        t: f64,
        source: Box<HarnessError>,
    },
    #[error("harness i/o: {0}")]
    Io(String),
}

fn with_context(eps: f64, step: usize, t: f64) -> impl Fn(HarnessError) -> HarnessError {
    move |source| HarnessError::RunFailure {
        eps,
        step,
        t,
        source: Box::new(source),
    }
}

/// Everything one run produces, kept in memory for sweep-level analysis.
/// Files (CSV, JSON, snapshots) are written as a side effect when an output
/// directory is supplied.
pub struct RunArtifacts {
    pub eps: f64,
    pub times: Vec<f64>,
    pub rel_entropy: Vec<f64>,
    pub conv: Vec<ConvMetrics>,
    pub r1: Vec<InequalityGap>,
    pub v4_gap: Vec<f64>,
    pub a3_residual: Vec<f64>,
    pub bounds: BTreeMap<String, f64>,
    /// `(θ − θ̄)/ε` at sample times (for re-referencing against other seeds)
    pub theta_dev: Vec<ScalarField>,
    /// limit temperature at sample times
    pub limit_temp: Vec<ScalarField>,
}

impl RunArtifacts {
    pub fn sup_rel_entropy(&self) -> f64 {
        self.rel_entropy.iter().fold(0.0, |m, &v| m.max(v))
    }

    pub fn final_conv(&self) -> ConvMetrics {
        *self.conv.last().expect("run produced samples")
    }

    pub fn min_r1_gap(&self) -> f64 {
        self.r1
            .iter()
            .fold(f64::INFINITY, |m, g| m.min(g.gap))
    }

    /// Worst normalized violation `max(−gap/scale)`; negative means the
    /// inequality held with slack everywhere.
    pub fn max_r1_violation(&self) -> f64 {
        self.r1
            .iter()
            .filter(|g| g.scale > 0.0)
            .fold(f64::NEG_INFINITY, |m, g| m.max(-g.gap / g.scale))
    }
}

/// The subdomain used for the local convergence metrics.
pub fn metric_ball(cfg: &ExperimentConfig) -> Result<Ball, ConfigError> {
    let grid = cfg.grid()?;
    Ok(Ball {
        center: grid.center(),
        radius: cfg.k_radius,
    })
}

/// Run one ε. When `emit` is true, write artifacts under the config's
/// output directory.
pub fn run_single(
    cfg: &ExperimentConfig,
    eps: f64,
    emit: bool,
) -> Result<RunArtifacts, HarnessError> {
    let grid = cfg.grid()?;
    let gas = cfg.gas();
    let ref_state = cfg.reference()?;
    let scaling = cfg.scaling_for(eps)?;
    let ball = metric_ball(cfg)?;
    let data = initial_data(cfg, grid);

    // wrap-around guard for this ε
    {
        let travel =
            cfg.t_final * ref_state.omega.sqrt() / eps + cfg.data_support_radius() + 1.0;
        let budget = 0.5 * cfg.grid_len;
        if travel > budget {
            return Err(ConfigError::WrapAround { travel, budget }.into());
        }
    }

    let InitialData { rho1, theta1, u0 } = data;
    let solver = NsfSolver::new(&gas, &scaling, &ref_state, grid)?;
    let mut state = nsf::make_ill_prepared_data(&rho1, &theta1, &u0, &scaling, &ref_state, &gas)?;

    let init = acoustic::acoustic_init(&rho1, &theta1, &u0, cfg.eta, &ref_state, eps)?;
    let mut ac = init.state;
    let mut w = TransportState::new(init.initial_w.clone(), 0.0);

    // limit system: v₀ is the solenoidal projection of u₀; the temperature
    // seed is the adjusted combination W₀ scaled back to temperature units
    let norm = transport::limit_temperature_normalization(&ref_state);
    let temp0 = init.initial_w.scale(norm);
    let mut limit = EulerBoussinesqState::new(&u0, &temp0, 0.0)?;

    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let dt = cfg.dt;

    let mut ineq = diagnostics::InequalityAccumulator::new();
    let mut bounds = diagnostics::UniformBoundsAccumulator::new(scaling, ref_state);
    let w0_sq = w.w.mul(&w.w).integral();
    let mut a3_time_integral = 0.0;
    let mut a3_prev = ac.laplacian_phi().mul(&w.w).mul(&w.w).integral();
    let mut v4_diss = 0.0;
    let mut v4_prev_rate;
    let functional0;

    let mut art = RunArtifacts {
        eps,
        times: Vec::new(),
        rel_entropy: Vec::new(),
        conv: Vec::new(),
        r1: Vec::new(),
        v4_gap: Vec::new(),
        a3_residual: Vec::new(),
        bounds: BTreeMap::new(),
        theta_dev: Vec::new(),
        limit_temp: Vec::new(),
    };
    let mut nsf_rows = Vec::new();
    let mut acoustic_rows = Vec::new();
    let mut transport_rows = Vec::new();

    // initial sample
    {
        let prim = state.primitives(ref_state.theta_bar)?;
        let trio = assemble_trio(&ac, &w.w, &limit, &ref_state)?;
        let sample =
            diagnostics::inequality_sample(&state, &prim, &trio, &gas, ref_state.theta_bar)?;
        v4_prev_rate = sample.diss_rate_ref;
        functional0 = nsf::dissipation_functional_from(&state, &prim, &ref_state)?;
        let gap = ineq.push(sample);
        record_sample(
            cfg, &mut art, &mut nsf_rows, &mut acoustic_rows, &mut transport_rows, &state,
            &prim, &ac, &w, &limit, &ref_state, &ball, sample.e_rel, gap, 0.0, 0.0,
            functional0, w0_sq,
        )?;
        bounds.push(&state, &prim);
    }

    if emit {
        ensure_dir(&cfg.output_dir)?;
        if cfg.snapshots != SnapshotPolicy::None {
            write_snapshots(cfg, eps, &state, &ac, &w, &limit, "t0")?;
        }
    }

    for step in 0..steps {
        let ctx = with_context(eps, step, state.t);
        let t_mid = (step as f64 + 0.5) * dt;
        let t_next = (step as f64 + 1.0) * dt;

        // limit system
        let limit_next = euler::euler_step(&limit, dt).map_err(|e| ctx(e.into()))?;
        let v_mid = limit.v.add(&limit_next.v).scale(0.5);
        let temp_next = transport::limit_temperature_step(&limit.temp, &v_mid, dt)
            .map_err(|e| ctx(e.into()))?;

        // acoustic field, exactly propagated
        let ac_mid = ac.propagate(t_mid);
        let ac_next = ac.propagate(t_next);

        // transported combination, advected by the midpoint test velocity
        let u_mid = v_mid.add(&ac_mid.grad_phi());
        let div_mid = ac_mid.laplacian_phi();
        w = transport::transport_step(
            &w,
            &u_mid,
            &div_mid,
            dt,
            fields::interp::InterpOrder::Quintic,
        )
        .map_err(|e| ctx(e.into()))?;

        // compressible step
        state = solver.step_imex(&state, dt).map_err(|e| ctx(e.into()))?;

        limit = limit_next;
        limit.temp = temp_next;
        ac = ac_next;

        // streaming integrals
        let lap_next = ac.laplacian_phi();
        let a3_next = lap_next.mul(&w.w).mul(&w.w).integral();
        a3_time_integral += 0.5 * dt * (a3_prev + a3_next);
        a3_prev = a3_next;

        let prim = state.primitives(ref_state.theta_bar).map_err(|e| ctx(e.into()))?;
        let trio = assemble_trio(&ac, &w.w, &limit, &ref_state).map_err(|e| ctx(e.into()))?;
        let sample =
            diagnostics::inequality_sample(&state, &prim, &trio, &gas, ref_state.theta_bar)
                .map_err(|e| ctx(e.into()))?;
        v4_diss += 0.5 * dt * (v4_prev_rate + sample.diss_rate_ref);
        v4_prev_rate = sample.diss_rate_ref;
        let gap = ineq.push(sample);

        let last = step + 1 == steps;
        if (step + 1) % cfg.sample_stride == 0 || last {
            bounds.push(&state, &prim);
            record_sample(
                cfg, &mut art, &mut nsf_rows, &mut acoustic_rows, &mut transport_rows,
                &state, &prim, &ac, &w, &limit, &ref_state, &ball, sample.e_rel, gap,
                v4_diss, a3_time_integral, functional0, w0_sq,
            )
            .map_err(|e| ctx(e))?;
        }
    }

    art.bounds = bounds.finish();

    if emit {
        if cfg.snapshots != SnapshotPolicy::None {
            write_snapshots(cfg, eps, &state, &ac, &w, &limit, "final")?;
        }
        write_csv(
            &cfg.output_dir.join(format!("nsf_eps{eps}.csv")),
            "t,mass,energy,min_rho,min_theta,entropy_prod_min,v4_gap",
            &nsf_rows,
        )?;
        write_csv(
            &cfg.output_dir.join(format!("acoustic_eps{eps}.csv")),
            "t,eps,sup_norm_Z,sup_norm_gradPhi,energy_a1",
            &acoustic_rows,
        )?;
        write_csv(
            &cfg.output_dir.join(format!("transport_eps{eps}.csv")),
            "t,l2_W,linf_W,a3_residual",
            &transport_rows,
        )?;
        let report = DiagnosticsReport {
            eps,
            t: art.times.clone(),
            rel_entropy: art.rel_entropy.clone(),
            m3: art.conv.iter().map(|c| c.m3).collect(),
            m4: art.conv.iter().map(|c| c.m4).collect(),
            m5: art.conv.iter().map(|c| c.m5_q1).collect(),
            m5_q32: art.conv.iter().map(|c| c.m5_q32).collect(),
            r1_gap: art.r1.iter().map(|g| g.gap).collect(),
            r1_scale: art.r1.iter().map(|g| g.scale).collect(),
            bounds: art.bounds.clone(),
            kernel: format!(
                "gaussian(width = {eta}) after quintic radial ramp (1 inside {r1}, 0 beyond {r2})",
                eta = cfg.eta,
                r1 = 1.0 / (2.0 * cfg.eta),
                r2 = 1.0 / cfg.eta
            ),
        };
        let path = cfg.output_dir.join(format!("diagnostics_eps{eps}.json"));
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| HarnessError::Io(e.to_string()))?;
        std::fs::write(&path, json)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    }

    Ok(art)
}

#[allow(clippy::too_many_arguments)]
fn record_sample(
    cfg: &ExperimentConfig,
    art: &mut RunArtifacts,
    nsf_rows: &mut Vec<String>,
    acoustic_rows: &mut Vec<String>,
    transport_rows: &mut Vec<String>,
    state: &nsf::NsfState,
    prim: &nsf::Primitives,
    ac: &AcousticState,
    w: &TransportState,
    limit: &EulerBoussinesqState,
    ref_state: &crate::thermo::ReferenceState,
    ball: &Ball,
    e_rel: f64,
    gap: InequalityGap,
    v4_diss: f64,
    a3_time_integral: f64,
    functional0: f64,
    w0_sq: f64,
) -> Result<(), HarnessError> {
    let t = state.t;
    let conv = diagnostics::convergence_metrics(state, prim, limit, ref_state, ball)?;
    let sigma_min = nsf::entropy_production_from(state, prim)?.min();
    let functional = nsf::dissipation_functional_from(state, prim, ref_state)?;
    let v4_gap = functional + v4_diss - functional0;
    let w_sq = w.w.mul(&w.w).integral();
    let a3_res = ((w_sq - w0_sq) + a3_time_integral).abs() / w0_sq.max(1e-300);
    let (sup_z, sup_gp) = ac.sup_norms();

    art.times.push(t);
    art.rel_entropy.push(e_rel);
    art.conv.push(conv);
    art.r1.push(gap);
    art.v4_gap.push(v4_gap);
    art.a3_residual.push(a3_res);
    let eps = state.scaling.eps;
    let theta_dev = prim
        .theta
        .map(|v| (v - ref_state.theta_bar) / eps);
    art.theta_dev.push(theta_dev);
    art.limit_temp.push(limit.temp.clone());

    let mut row = String::new();
    let _ = write!(
        row,
        "{t:.9e},{:.15e},{:.15e},{:.9e},{:.9e},{:.6e},{:.9e}",
        state.total_mass(),
        state.total_energy(),
        state.rho.min(),
        prim.theta.min(),
        sigma_min,
        v4_gap
    );
    nsf_rows.push(row);
    acoustic_rows.push(format!(
        "{t:.9e},{eps},{sup_z:.9e},{sup_gp:.9e},{:.12e}",
        ac.energy()
    ));
    transport_rows.push(format!(
        "{t:.9e},{:.9e},{:.9e},{a3_res:.9e}",
        w.w.l2_norm(),
        w.w.sup_norm()
    ));
    let _ = cfg;
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), HarnessError> {
    let mut text = String::with_capacity(rows.len() * 80 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

fn write_snapshots(
    cfg: &ExperimentConfig,
    eps: f64,
    state: &nsf::NsfState,
    ac: &AcousticState,
    w: &TransportState,
    limit: &EulerBoussinesqState,
    tag: &str,
) -> Result<(), HarnessError> {
    let dir = &cfg.output_dir;
    ensure_dir(dir)?;
    let t = state.t;
    let p = |name: &str| dir.join(format!("{name}_eps{eps}_{tag}.field"));
    field_io::write_scalar_snapshot(p("rho"), "rho", t, &state.rho)?;
    field_io::write_vector_snapshot(p("momentum"), "momentum", t, &state.m)?;
    field_io::write_scalar_snapshot(p("energy"), "energy", t, &state.e_total)?;
    field_io::write_scalar_snapshot(p("acoustic_z"), "acoustic_z", t, &ac.z_field())?;
    field_io::write_scalar_snapshot(p("acoustic_phi"), "acoustic_phi", t, &ac.phi_field())?;
    field_io::write_scalar_snapshot(p("transport_w"), "transport_w", t, &w.w)?;
    field_io::write_vector_snapshot(p("limit_v"), "limit_v", t, &limit.v)?;
    field_io::write_scalar_snapshot(p("limit_temp"), "limit_temp", t, &limit.temp)?;
    Ok(())
}
