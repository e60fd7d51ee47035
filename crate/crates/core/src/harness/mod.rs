//! Seeded Monte Carlo experiments. Each runner returns a [`Table`] (plus
//! per-instance detail where acceptance checks need it) and is fully
//! determined by its [`ExperimentConfig`].

mod config;
mod experiments;
mod offload;
mod table;

pub use config::{ExperimentConfig, Range, RB_BANDWIDTH_HZ};
pub use experiments::{
    run_coding_sweep, run_ergodic_sweep, run_gamma_validation, run_phase_bench, unit_grid, CodingSweep, PhaseBench,
    PhaseBenchDraw,
};
pub use offload::{run_offload_experiments, OffloadInstance, OffloadReport, Sweep};
pub use table::{emit_csv, format_real, Cell, Table};
