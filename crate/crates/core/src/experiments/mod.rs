//! Scenario runners, result tables, output files and the command line.
//!
//! Every experiment writes `<outdir>/<kind>-<timestamp>.csv` plus a
//! `.meta.json` sidecar. CSV column orders:
//!
//! | kind | columns |
//! |---|---|
//! | simulate | `t, L2, Hr, Hgamma, Besov, energy_defect, cutoff_factor` |
//! | corrector-convergence | `n, j0, j1, j2, error` |
//! | energy-audit | `dt, sample, defect` |
//! | decay | `t, sample, ratio` |
//! | scaling-limit | `mu, n, sample, sup_distance, completed` |
//! | survival | `n, mu, sample, survived, stop_time` |
//!
//! The worker count is read from `HNSLAB_WORKERS`. Results do not depend on it.

mod cli;
mod output;
mod runners;
mod spec;
mod table;

pub use cli::{run_cli, EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION};
pub use output::{write_outputs, write_table, RunMeta};
pub use runners::{
    effective_config, effective_trajectory, orthogonal_amplitude, run_corrector_convergence,
    run_decay, run_energy_audit, run_experiment, run_scaling_limit, run_simulation, run_survival,
    stochastic_mode, workers_from_env, WORKERS_ENV,
};
pub use spec::{ExperimentSpec, Kind};
pub use table::{loglog_slope, wilson_interval, GroupStats, ResultTable, Summary};
