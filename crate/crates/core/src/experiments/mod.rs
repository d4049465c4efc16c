//! Configuration, orchestration and reporting.

pub mod config;
pub mod manifest;
pub mod output;
pub mod sweeps;

pub use config::{ExperimentConfig, InitMode};
pub use manifest::RunManifest;
pub use output::{write_outputs, Results};
pub use sweeps::{
    linearized_trajectory, run_critical_sweep, run_final, run_hydro_sweep, run_infer,
    run_meanfield, run_pde, run_simulation, CriticalSweep, FinalTable, HydroSweep, Linearized,
};
