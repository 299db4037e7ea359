//! Experiment configuration: a plain-text key-value file with dotted
//! sections, e.g.
//!
//! ```text
//! grid.dim = 2
//! grid.n = 128
//! grid.len = 48
//! scaling.eps = 0.2, 0.1, 0.05
//! ```
//!
//! Unknown keys are rejected; parse → serialize → parse is the identity.

use crate::fields::Grid;
use crate::scaling::ScalingParams;
use crate::thermo::{GasModel, ReferenceState};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
    #[error("duplicate eps values in sweep list")]
    DuplicateEps,
    #[error("eps list must be strictly decreasing")]
    EpsOrder,
    #[error(
        "wrap-around guard violated: waves travel {travel:.2} but only {budget:.2} is available \
         (need t_final*sqrt(omega)/min(eps) + r_support + 1 <= L/2)"
    )]
    WrapAround { travel: f64, budget: f64 },
    #[error("config i/o: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotPolicy {
    None,
    Endpoints,
    All,
}

/// Full experiment description; every field has a default so a config file
/// only overrides what it needs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub grid_dim: usize,
    pub grid_n: usize,
    pub grid_len: f64,
    pub gas_p_infty: f64,
    pub gas_a_rad: f64,
    pub gas_mu0: f64,
    pub gas_kappa0: f64,
    pub gas_variant: String,
    pub ref_rho_bar: f64,
    pub ref_theta_bar: f64,
    pub eps_list: Vec<f64>,
    pub a_exp: f64,
    pub b_exp: f64,
    pub eta: f64,
    pub amp_rho: f64,
    pub amp_theta: f64,
    pub amp_vortex: f64,
    pub amp_grad: f64,
    pub sigma_rho: f64,
    pub sigma_theta: f64,
    pub sigma_vortex: f64,
    pub sigma_grad: f64,
    pub dt: f64,
    pub t_final: f64,
    pub sample_stride: usize,
    pub k_radius: f64,
    pub decay_t_over_eps_min: f64,
    pub decay_t_over_eps_max: f64,
    pub decay_samples: usize,
    pub output_dir: PathBuf,
    pub snapshots: SnapshotPolicy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid_dim: 2,
            grid_n: 128,
            grid_len: 48.0,
            gas_p_infty: 1.0,
            gas_a_rad: 0.1,
            gas_mu0: 0.1,
            gas_kappa0: 0.1,
            gas_variant: "fn-degenerate".into(),
            ref_rho_bar: 1.0,
            ref_theta_bar: 1.0,
            eps_list: vec![0.2, 0.1, 0.05],
            a_exp: 1.0,
            b_exp: 1.0,
            eta: 0.02,
            amp_rho: 0.4,
            amp_theta: 0.4,
            amp_vortex: 1.0,
            amp_grad: 1.0,
            sigma_rho: 0.8,
            sigma_theta: 0.9,
            sigma_vortex: 1.0,
            sigma_grad: 0.9,
            dt: 5e-4,
            t_final: 0.5,
            sample_stride: 20,
            k_radius: 6.0,
            decay_t_over_eps_min: 5.0,
            decay_t_over_eps_max: 20.0,
            decay_samples: 14,
            output_dir: PathBuf::from("out"),
            snapshots: SnapshotPolicy::Endpoints,
        }
    }
}

impl ExperimentConfig {
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: lineno + 1,
                text: raw.to_string(),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |k: &str, v: &str| ConfigError::BadValue {
            key: k.to_string(),
            value: v.to_string(),
        };
        macro_rules! num {
            ($field:expr) => {
                $field = value.parse().map_err(|_| bad(key, value))?
            };
        }
        match key {
            "grid.dim" => num!(self.grid_dim),
            "grid.n" => num!(self.grid_n),
            "grid.len" => num!(self.grid_len),
            "gas.p_infty" => num!(self.gas_p_infty),
            "gas.a_rad" => num!(self.gas_a_rad),
            "gas.mu0" => num!(self.gas_mu0),
            "gas.kappa0" => num!(self.gas_kappa0),
            "gas.variant" => {
                if value != "fn-degenerate" {
                    return Err(ConfigError::Invalid(format!(
                        "gas.variant `{value}` not supported in config files (custom gases are code-only)"
                    )));
                }
                self.gas_variant = value.to_string();
            }
            "ref.rho_bar" => num!(self.ref_rho_bar),
            "ref.theta_bar" => num!(self.ref_theta_bar),
            "scaling.eps" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    list.push(part.trim().parse().map_err(|_| bad(key, value))?);
                }
                self.eps_list = list;
            }
            "scaling.a_exp" => num!(self.a_exp),
            "scaling.b_exp" => num!(self.b_exp),
            "scaling.eta" => num!(self.eta),
            "data.amp_rho" => num!(self.amp_rho),
            "data.amp_theta" => num!(self.amp_theta),
            "data.amp_vortex" => num!(self.amp_vortex),
            "data.amp_grad" => num!(self.amp_grad),
            "data.sigma_rho" => num!(self.sigma_rho),
            "data.sigma_theta" => num!(self.sigma_theta),
            "data.sigma_vortex" => num!(self.sigma_vortex),
            "data.sigma_grad" => num!(self.sigma_grad),
            "time.dt" => num!(self.dt),
            "time.t_final" => num!(self.t_final),
            "time.sample_stride" => num!(self.sample_stride),
            "diag.k_radius" => num!(self.k_radius),
            "decay.t_over_eps_min" => num!(self.decay_t_over_eps_min),
            "decay.t_over_eps_max" => num!(self.decay_t_over_eps_max),
            "decay.samples" => num!(self.decay_samples),
            "output.dir" => self.output_dir = PathBuf::from(value),
            "output.snapshots" => {
                self.snapshots = match value {
                    "none" => SnapshotPolicy::None,
                    "endpoints" => SnapshotPolicy::Endpoints,
                    "all" => SnapshotPolicy::All,
                    _ => return Err(bad(key, value)),
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let eps = self
            .eps_list
            .iter()
            .map(|e| format!("{e}"))
            .collect::<Vec<_>>()
            .join(", ");
        let snaps = match self.snapshots {
            SnapshotPolicy::None => "none",
            SnapshotPolicy::Endpoints => "endpoints",
            SnapshotPolicy::All => "all",
        };
        let _ = write!(
            s,
            "grid.dim = {}\ngrid.n = {}\ngrid.len = {}\n\
             gas.p_infty = {}\ngas.a_rad = {}\ngas.mu0 = {}\ngas.kappa0 = {}\ngas.variant = {}\n\
             ref.rho_bar = {}\nref.theta_bar = {}\n\
             scaling.eps = {}\nscaling.a_exp = {}\nscaling.b_exp = {}\nscaling.eta = {}\n\
             data.amp_rho = {}\ndata.amp_theta = {}\ndata.amp_vortex = {}\ndata.amp_grad = {}\n\
             data.sigma_rho = {}\ndata.sigma_theta = {}\ndata.sigma_vortex = {}\ndata.sigma_grad = {}\n\
             time.dt = {}\ntime.t_final = {}\ntime.sample_stride = {}\n\
             diag.k_radius = {}\n\
             decay.t_over_eps_min = {}\ndecay.t_over_eps_max = {}\ndecay.samples = {}\n\
             output.dir = {}\noutput.snapshots = {}\n",
            self.grid_dim,
            self.grid_n,
            self.grid_len,
            self.gas_p_infty,
            self.gas_a_rad,
            self.gas_mu0,
            self.gas_kappa0,
            self.gas_variant,
            self.ref_rho_bar,
            self.ref_theta_bar,
            eps,
            self.a_exp,
            self.b_exp,
            self.eta,
            self.amp_rho,
            self.amp_theta,
            self.amp_vortex,
            self.amp_grad,
            self.sigma_rho,
            self.sigma_theta,
            self.sigma_vortex,
            self.sigma_grad,
            self.dt,
            self.t_final,
            self.sample_stride,
            self.k_radius,
            self.decay_t_over_eps_min,
            self.decay_t_over_eps_max,
            self.decay_samples,
            self.output_dir.display(),
            snaps,
        );
        s
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Grid::new(self.grid_dim, self.grid_n, self.grid_len)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn gas(&self) -> GasModel {
        GasModel::fn_degenerate(self.gas_p_infty, self.gas_a_rad, self.gas_mu0, self.gas_kappa0)
    }

    pub fn reference(&self) -> Result<ReferenceState, ConfigError> {
        self.gas()
            .linearization(self.ref_rho_bar, self.ref_theta_bar)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn scaling_for(&self, eps: f64) -> Result<ScalingParams, ConfigError> {
        ScalingParams::new(eps, self.a_exp, self.b_exp, self.eta)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Support radius of the synthesized data (Gaussian tails below 1e-8).
    pub fn data_support_radius(&self) -> f64 {
        let sigma_max = self
            .sigma_rho
            .max(self.sigma_theta)
            .max(self.sigma_vortex)
            .max(self.sigma_grad);
        6.0 * sigma_max + 0.6
    }

    /// Check grid, exponents, the ε list and the wrap-around guard.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid()?;
        if self.eps_list.is_empty() {
            return Err(ConfigError::Invalid("empty eps list".into()));
        }
        for w in self.eps_list.windows(2) {
            if w[1] == w[0] {
                return Err(ConfigError::DuplicateEps);
            }
            if w[1] > w[0] {
                return Err(ConfigError::EpsOrder);
            }
        }
        for &eps in &self.eps_list {
            self.scaling_for(eps)?;
        }
        if !(self.dt > 0.0) || !(self.t_final > 0.0) || self.sample_stride == 0 {
            return Err(ConfigError::Invalid(
                "time.dt, time.t_final must be positive; sample_stride nonzero".into(),
            ));
        }
        let rs = self.reference()?;
        let eps_min = self.eps_list.last().copied().unwrap();
        let travel =
            self.t_final * rs.omega.sqrt() / eps_min + self.data_support_radius() + 1.0;
        let budget = 0.5 * self.grid_len;
        if travel > budget {
            return Err(ConfigError::WrapAround { travel, budget });
        }
        Ok(())
    }

    /// Separate guard for the decay study window.
    pub fn validate_decay(&self, eps: f64) -> Result<(), ConfigError> {
        self.grid()?;
        let rs = self.reference()?;
        let t_max = self.decay_t_over_eps_max * eps;
        let travel = t_max * rs.omega.sqrt() / eps + self.data_support_radius() + 1.0;
        let budget = 0.5 * self.grid_len;
        if travel > budget {
            return Err(ConfigError::WrapAround { travel, budget });
        }
        Ok(())
    }
}
