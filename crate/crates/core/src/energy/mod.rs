//! Potentials, the discrete free energy with its variational derivatives, and
//! the homogeneous energy landscape.

mod functional;
pub mod landscape;
mod params;
pub mod potential;

pub use functional::{
    chemical_potential, derivatives, energy_density, free_energy, free_energy_fields,
    molecular_field, EnergyBreakdown,
};
pub(crate) use functional::{energy_sums, variational_derivatives, Scratch};
pub use landscape::{
    energy_lower_bound_e0, find_landscape_minima, g_tilde_value, g_value, landscape_value,
    LowerBound, Region, StationaryKind, StationaryPoint,
};
pub use params::{AnchoringForm, PhysParams, Potential};
pub use potential::{potential_deriv, potential_value};
