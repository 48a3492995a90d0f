//! Time-periodic Lotka-Volterra competition-diffusion: periodic bistable
//! traveling fronts, their tail asymptotics, and entire solutions built from
//! sub- and supersolutions.

pub mod asymptotics;
pub mod entire;
pub mod error;
pub mod front;
pub mod kinetics;
pub mod pde;
pub mod periodic;
pub mod spectral;

pub use error::{Error, Result};
pub use front::{FrontOptions, FrontProfile, SpeedEstimate};
pub use kinetics::{
    check_assumptions, compute_orbits, orbit_residual, periodic_average, AssumptionReport, CoefficientSet, PeriodicFn,
    PeriodicOrbit, Rates, ReactionPack,
};
pub use pde::{BoundaryPolicy, Field, Grid1D, Stepper, System};
pub use spectral::{Regime, SpectralPack};
