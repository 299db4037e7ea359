//! # machlimit
//!
//! A desk-scale numerical laboratory for the singular limit of a compressible,
//! heat-conducting fluid at low Mach number and large Reynolds / Péclet numbers.
//!
//! The crate assembles four interacting solvers on a periodic box:
//!
//! - [`nsf`] — the scaled compressible Navier-Stokes-Fourier system in
//!   conservative variables, advanced by an IMEX split whose stiff acoustic
//!   block is solved exactly per Fourier mode;
//! - [`acoustic`] — the linear acoustic system for the wave potential and the
//!   pressure-like combination of density/temperature deviations, propagated
//!   by its exact Fourier symbol;
//! - [`transport`] — the auxiliary compressive transport equation closing the
//!   acoustic decomposition, plus the passive limit-temperature transport;
//! - [`euler`] — the incompressible Euler-Boussinesq target system.
//!
//! [`thermo`] supplies the constitutive laws (pressure, energy, entropy and
//! their linearizations) together with a numerical verifier of the structural
//! hypotheses they must satisfy. [`diagnostics`] measures the distance between
//! the compressible runs and the limit system through a relative-entropy
//! functional, uniform-bound norms and convergence metrics. [`harness`] wires
//! everything into reproducible single runs and ε-sweeps behind the
//! `machlimit` CLI.

pub mod acoustic;
pub mod diagnostics;
pub mod euler;
pub mod fields;
pub mod harness;
pub mod nsf;
pub mod scaling;
pub mod thermo;
pub mod transport;

pub use fields::{Grid, ScalarField, VectorField};
pub use scaling::ScalingParams;
pub use thermo::{GasModel, ReferenceState};
