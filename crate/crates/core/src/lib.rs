//! Two-sector habit economy under lockdowns.
//!
//! Closed-form saddle paths for a linear-quadratic household with habit
//! formation, stitched across lockdown episodes whose end is unexpected,
//! known in advance, or exponentially distributed.

pub mod anticipated;
pub mod config;
pub mod equilibrium;
pub mod error;
pub mod labor_shift;
pub mod lockdown;
pub mod params;
pub mod quadrature;
pub mod runner;
pub mod spectral;

pub use error::{ModelError, Result};
pub use params::{Household, InitialState, LqUtility, Model, SectorRegime, Technology};
