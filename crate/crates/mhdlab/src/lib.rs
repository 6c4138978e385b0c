//! Verification laboratory for a catalogue of exact ideal-MHD flows.
//!
//! The crate provides closed-form plasma states (density, pressure,
//! velocity, magnetic field) on subsets of spacetime, together with the
//! machinery needed to interrogate them:
//!
//! * exact second-order derivative jets propagated through every field
//!   evaluation, so PDE residuals are computed without finite differences;
//! * the full ideal-MHD residual suite (mass, momentum, pressure transport,
//!   induction, solenoidality) plus derived quantities such as current
//!   density, vorticity, and the magnetic force split;
//! * a thirteen-generator algebra of point symmetries acting on solutions,
//!   with closed-form flows and pushforward fields;
//! * Lagrangian diagnostics: material loop advection, circulation budgets,
//!   field-line tracing, and a frozen-in flux proxy;
//! * numerically integrated equilibria for the families whose radial
//!   profiles solve ordinary differential equations rather than algebra.

pub mod diffcalc;
pub mod error;
pub mod families;
pub mod jet;
pub mod lagrangian;
pub mod ledger;
pub mod mhdcheck;
pub mod ode;
pub mod params;
pub mod reduced;
pub mod scalar;
pub mod specfun;
pub mod state;
pub mod symmetry;
pub mod vec3;

pub mod cli;

pub use error::MhdError;
pub use state::{CylComponents, MhdConfig, MhdState, SpacetimePoint};
pub use vec3::Vec3;
