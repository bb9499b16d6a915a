//! Periodic two-dimensional phase-field simulator for liquid-crystalline
//! emulsions: a Cahn-Hilliard concentration field coupled to an
//! Ericksen-Leslie polarization field with interfacial anchoring, optionally
//! advected by an incompressible flow.
//!
//! The crate is organised as
//!
//! - [`grid`]: periodic grids, fields and finite-difference operators,
//! - [`energy`]: the free energy, its variational derivatives and the
//!   energy-landscape lower bound,
//! - [`analysis`]: well-posedness constants and a-priori bounds,
//! - [`dynamics`]: the implicit theta-method stepper and equilibrium driver,
//! - [`flow`]: Leray projection, coupling force and the momentum step,
//! - [`verify`]: independent oracles and convergence studies,
//! - [`io`]: configuration, snapshots, diagnostics and images.

pub mod analysis;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod flow;
pub mod grid;
pub mod io;
mod spectral;
pub mod state;
pub mod verify;

pub use dynamics::{run_to_equilibrium, step_theta, NumParams, StepOutcome, Stepper, StopReason};
pub use energy::{free_energy, EnergyBreakdown, PhysParams, Potential};
pub use error::{Result, SimError};
pub use flow::FlowState;
pub use grid::{Grid2D, ScalarField, VectorField2};
pub use state::State;
