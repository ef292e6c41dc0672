//! Benchmark cases, simulation driver, convergence studies and refinement
//! marking.

pub mod cases;
pub mod convergence;
pub mod marking;
pub mod run;

pub use cases::{
    lid_cavity_case, single_vortex_case, taylor_green_case, zero_case, CaseId, VORTEX_RADIUS,
};
pub use convergence::{
    compute_errors, rate, run_convergence, ConvergenceConfig, ConvergenceRow, ConvergenceTable,
    FieldErrors,
};
pub use marking::{dorfler_mark, vorticity_indicator, MarkingResult};
pub use run::{
    run_simulation, run_simulation_from, MeshParams, MonitorSample, SimulationConfig,
    SimulationFailure, Trajectory,
};
