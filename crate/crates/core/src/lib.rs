//! Reduced Poisson-Nernst-Planck-Stokes model of steady ion and fluid
//! transport through slender axisymmetric nanopores.
//!
//! Each axial slice carries a radial Poisson-Boltzmann-type problem for the
//! double-layer potential; the slices are coupled through one-dimensional
//! steady transport equations for the species factors `Q_alpha(z)` and a
//! lubrication-type Stokes solve. [`coupler::solve_steady`] runs the full
//! fixed-point iteration.

pub mod axial;
pub mod config;
pub mod coupler;
pub mod error;
pub mod geometry;
pub mod hydro;
pub mod mixture;
pub mod numerics;
pub mod observables;
pub mod presets;
pub mod radial;
pub mod units;

pub use config::{Case, CaseFile};
pub use coupler::{solve_steady, solve_steady_from, solve_steady_unchecked, Problem, SteadySolution};
pub use error::{Error, Result};
pub use geometry::{ChargeSpec, GeometrySpec, PoreGeometry};
pub use mixture::{MixtureSpec, SpeciesSpec, Variant};
pub use presets::{load_preset, Preset, PRESET_NAMES};
pub use units::{BoundaryConditions, DimensionlessGroups, ReferenceScales, SolverConfig};
