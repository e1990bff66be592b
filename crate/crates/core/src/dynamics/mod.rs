//! Time integration of the deterministic, stochastic and cut-off systems,
//! and the diagnostics recorded along trajectories.
//!
//! Every scheme treats the linear part exactly: hyperviscosity, extra
//! viscosity, the noise corrector and the constant drift by the mean are
//! diagonalised per mode. Convection and the transport noise enter through
//! one pseudo-spectral product per stage. The spatial mean is never touched.

mod config;
mod cutoff;
mod exponents;
mod init;
mod nonlinear;
mod propagator;
mod record;
mod simulate;

pub use config::{NoiseAssembly, Scheme, SimConfig, ThetaChoice, Viscosity};
pub use cutoff::{bump, cutoff_factor};
pub use exponents::{critical_exponents, rational_approximation, CriticalExponents};
pub use init::{random_field, InitialCondition, ModeSpec};
pub use nonlinear::{nonlinearity, nonlinearity_with};
pub use propagator::LinearPropagator;
pub use record::{
    regularity_functionals, RecordRow, RegularitySummary, TrajectoryRecord, TRAJECTORY_COLUMNS,
};
pub use simulate::{integrate, step_deterministic, step_stochastic, Mode, Observation, Simulation};
