//! Simulation and control-optimization toolkit for coupled transmon–resonator
//! systems across a hierarchy of Hamiltonian approximations.

pub mod error;
pub mod experiments;
pub mod landscape;
pub mod model;
mod ode;
pub mod propagator;
pub mod pulse;
pub mod spectra;
pub mod system;

pub use error::{Error, Result};
pub use model::{EnergyParams, HermitianOperator, ModelSpec, Variant};
pub use ode::SolverStats;
pub use propagator::{EvolutionRecord, Propagator, QuantumState, SolverConfig};
pub use pulse::{Drive, DriveComponent, Envelope, Shape};
