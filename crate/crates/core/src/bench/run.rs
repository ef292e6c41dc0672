use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gepup::{
    divergence_l2, CaseDefinition, GepupOperators, GepupState, IterationCounts, SolverTolerances,
};
use crate::imex::{courant_dt, Stepper, StepperConfig};

/// Mesh and element parameters; the domain comes from the case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshParams {
    pub base_cells: [usize; 2],
    pub level: u32,
    pub degree: usize,
}

impl MeshParams {
    /// Uniform `2^level × 2^level` mesh.
    pub fn square(level: u32, degree: usize) -> Self {
        Self {
            base_cells: [1, 1],
            level,
            degree,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub mesh: MeshParams,
    pub stepper: StepperConfig,
    pub tolerances: SolverTolerances,
    pub t0: f64,
    pub t_end: f64,
    /// Constant step instead of Courant control (the last step is still
    /// clipped to `t_end`).
    pub fixed_dt: Option<f64>,
}

/// One row of the monitor series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSample {
    pub step: usize,
    pub t: f64,
    /// Step that produced this sample; 0 for the initial sample.
    pub dt: f64,
    pub divergence_l2: f64,
    pub kinetic_energy: f64,
    pub iterations: IterationCounts,
}

impl MonitorSample {
    pub fn of(
        ops: &GepupOperators,
        state: &GepupState,
        step: usize,
        dt: f64,
        it: IterationCounts,
    ) -> Self {
        let w = [&state.w[0][..], &state.w[1][..]];
        Self {
            step,
            t: state.t,
            dt,
            divergence_l2: divergence_l2(ops.space(), w),
            kinetic_energy: ops.kinetic_energy(w),
            iterations: it,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub ops: GepupOperators,
    pub state: GepupState,
    pub monitors: Vec<MonitorSample>,
    pub steps: usize,
    /// Helmholtz operator builds (one per distinct step size).
    pub operator_builds: usize,
}

/// A run that stopped early. Keeps the last state that completed a step.
#[derive(Debug, Clone)]
pub struct SimulationFailure {
    pub error: Error,
    pub last_state: GepupState,
    pub monitors: Vec<MonitorSample>,
}

impl core::fmt::Display for SimulationFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{} (last valid state at t = {}, {} steps)",
            self.error,
            self.last_state.t,
            self.monitors.len().saturating_sub(1)
        )
    }
}

impl From<Box<SimulationFailure>> for Error {
    fn from(f: Box<SimulationFailure>) -> Self {
        f.error
    }
}

pub type RunResult = core::result::Result<Trajectory, Box<SimulationFailure>>;

fn validate(case: &CaseDefinition, cfg: &SimulationConfig) -> Result<()> {
    if !(cfg.t_end >= cfg.t0) || !cfg.t0.is_finite() || !cfg.t_end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "t_end ({}) must not precede t0 ({})",
            cfg.t_end, cfg.t0
        )));
    }
    if let Some(dt) = cfg.fixed_dt {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "fixed dt must be positive, got {dt}"
            )));
        }
    }
    if !(cfg.stepper.courant > 0.0)
        || !(cfg.stepper.dt_max > 0.0)
        || cfg.stepper.rebuild_interval == 0
    {
        return Err(Error::InvalidArgument(
            "Courant number, dt_max and rebuild interval must be positive".into(),
        ));
    }
    if !(case.nu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "viscosity must be positive, got {}",
            case.nu
        )));
    }
    Ok(())
}

/// Builds the operators, projects the initial data and integrates to `t_end`.
pub fn run_simulation(
    case: &CaseDefinition,
    cfg: &SimulationConfig,
    observer: &mut dyn FnMut(&MonitorSample, &GepupState, &GepupOperators),
) -> RunResult {
    let setup = || -> Result<(GepupOperators, GepupState)> {
        validate(case, cfg)?;
        let ops = GepupOperators::new(
            case.domain,
            cfg.mesh.base_cells,
            cfg.mesh.level,
            cfg.mesh.degree,
            cfg.tolerances,
        )?;
        case.check_compatibility(
            ops.space(),
            &[cfg.t0, 0.5 * (cfg.t0 + cfg.t_end), cfg.t_end],
        )?;
        let state = GepupState::initialize(&ops, case, cfg.t0)?;
        Ok((ops, state))
    };
    match setup() {
        Ok((ops, state)) => run_simulation_from(ops, case, cfg, state, observer),
        Err(error) => {
            let empty = GepupState::empty(cfg.t0);
            Err(Box::new(SimulationFailure {
                error,
                last_state: empty,
                monitors: Vec::new(),
            }))
        }
    }
}

/// Integrates a given initial state to `cfg.t_end` on prebuilt operators.
pub fn run_simulation_from(
    ops: GepupOperators,
    case: &CaseDefinition,
    cfg: &SimulationConfig,
    mut state: GepupState,
    observer: &mut dyn FnMut(&MonitorSample, &GepupState, &GepupOperators),
) -> RunResult {
    let mut monitors = Vec::new();
    let fail = |error: Error, state: GepupState, monitors: Vec<MonitorSample>| {
        Box::new(SimulationFailure {
            error,
            last_state: state,
            monitors,
        })
    };
    if let Err(e) = validate(case, cfg) {
        return Err(fail(e, state, monitors));
    }
    let mut stepper = match Stepper::new(cfg.stepper.tableau) {
        Ok(s) => s,
        Err(e) => return Err(fail(e, state, monitors)),
    };
    state.t = cfg.t0;
    let first = MonitorSample::of(&ops, &state, 0, 0.0, IterationCounts::default());
    observer(&first, &state, &ops);
    monitors.push(first);

    let t_end = cfg.t_end;
    let mut dt = 0.0;
    let mut step = 0;
    while state.t < t_end {
        if let Some(fixed) = cfg.fixed_dt {
            dt = fixed;
        } else if step % cfg.stepper.rebuild_interval == 0 {
            dt = courant_dt(
                ops.space(),
                [&state.u[0], &state.u[1]],
                cfg.stepper.courant,
                cfg.stepper.dt_max,
            );
        }
        let remaining = t_end - state.t;
        let last = remaining <= dt * (1.0 + 1e-10);
        let h = if last { remaining } else { dt };
        let stats = match stepper.advance(&ops, case, &mut state, h) {
            Ok(s) => s,
            Err(e) => return Err(fail(e, state, monitors)),
        };
        if last {
            state.t = t_end;
        }
        step += 1;
        let sample = MonitorSample::of(&ops, &state, step, h, stats.iterations);
        observer(&sample, &state, &ops);
        monitors.push(sample);
    }
    Ok(Trajectory {
        ops,
        state,
        monitors,
        steps: step,
        operator_builds: stepper.rebuilds(),
    })
}
