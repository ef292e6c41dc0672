use alloc::format;
use alloc::vec::Vec;

use super::run::{run_simulation, MeshParams, SimulationConfig};
use crate::error::{Error, Result};
use crate::fem::{error_norms, integrate, vector_error_norms, ErrorNorms, NormKind};
use crate::gepup::{CaseDefinition, ExactSolution, GepupOperators, GepupState, SolverTolerances};
use crate::imex::{StepperConfig, TableauId};
use crate::math::log2;

pub type FieldErrors = ErrorNorms;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub level: u32,
    pub steps: usize,
    pub velocity: FieldErrors,
    pub pressure: FieldErrors,
}

/// Rows ordered by decreasing `h`, each half the previous one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTable {
    rows: Vec<ConvergenceRow>,
}

/// `log₂(coarse / fine)`
pub fn rate(coarse: f64, fine: f64) -> f64 {
    log2(coarse / fine)
}

impl ConvergenceTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: ConvergenceRow) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if (row.h * 2.0 - last.h).abs() > 1e-12 * last.h {
                return Err(Error::InvalidInput(format!(
                    "convergence rows must halve h: {} after {}",
                    row.h, last.h
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rates between consecutive rows for the selected error; `None` on the
    /// first row.
    pub fn rates(&self, select: impl Fn(&ConvergenceRow) -> f64) -> Vec<Option<f64>> {
        let mut out = Vec::with_capacity(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            out.push(if i == 0 {
                None
            } else {
                Some(rate(select(&self.rows[i - 1]), select(r)))
            });
        }
        out
    }

    pub fn velocity_rates(&self, kind: NormKind) -> Vec<Option<f64>> {
        self.rates(|r| r.velocity.get(kind))
    }

    pub fn pressure_rates(&self, kind: NormKind) -> Vec<Option<f64>> {
        self.rates(|r| r.pressure.get(kind))
    }
}

/// Velocity and pressure errors of `state` against `exact` at `state.t`. The
/// exact pressure is shifted to zero mean, matching the computed gauge.
pub fn compute_errors(
    ops: &GepupOperators,
    state: &GepupState,
    exact: &ExactSolution,
) -> (FieldErrors, FieldErrors) {
    let t = state.t;
    let space = ops.space();
    let velocity = vector_error_norms::<2>(
        space,
        [&state.u[0], &state.u[1]],
        |p| (exact.velocity)(p, t),
        |p| (exact.velocity_gradient)(p, t),
    );
    let area = case_area(ops);
    let mean = integrate(space, |p| (exact.pressure)(p, t)) / area;
    let mut q = state.q.clone();
    let qmean = ops.mean(&q);
    q.iter_mut().for_each(|v| *v -= qmean);
    let pressure = error_norms(
        space,
        &q,
        |p| (exact.pressure)(p, t) - mean,
        |p| (exact.pressure_gradient)(p, t),
    );
    (velocity, pressure)
}

fn case_area(ops: &GepupOperators) -> f64 {
    ops.space().mesh().domain.area()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub degree: usize,
    pub tableau: TableauId,
    pub base_cells: [usize; 2],
    /// Refinement levels, consecutive and increasing.
    pub levels: Vec<u32>,
    pub courant: f64,
    pub t0: f64,
    pub t_end: f64,
    pub tolerances: SolverTolerances,
    pub rebuild_interval: usize,
}

impl ConvergenceConfig {
    pub fn simulation(&self, level: u32) -> SimulationConfig {
        SimulationConfig {
            mesh: MeshParams {
                base_cells: self.base_cells,
                level,
                degree: self.degree,
            },
            stepper: StepperConfig {
                tableau: self.tableau,
                courant: self.courant,
                rebuild_interval: self.rebuild_interval,
                ..StepperConfig::default()
            },
            tolerances: self.tolerances,
            t0: self.t0,
            t_end: self.t_end,
            fixed_dt: None,
        }
    }
}

/// Runs the case on each level and tabulates errors at `t_end`.
/// `progress` sees each row as it completes.
pub fn run_convergence(
    case: &CaseDefinition,
    cfg: &ConvergenceConfig,
    progress: &mut dyn FnMut(&ConvergenceRow),
) -> Result<ConvergenceTable> {
    let exact = case.exact.as_ref().ok_or_else(|| {
        Error::InvalidInput(format!("case '{}' has no exact solution", case.name))
    })?;
    if cfg.levels.len() < 2 {
        return Err(Error::InvalidArgument(
            "a convergence study needs at least two levels".into(),
        ));
    }
    if cfg.levels.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::InvalidArgument(format!(
            "levels must be consecutive and increasing, got {:?}",
            cfg.levels
        )));
    }
    let mut table = ConvergenceTable::new();
    for &level in &cfg.levels {
        let tr = run_simulation(case, &cfg.simulation(level), &mut |_, _, _| {})?;
        let (velocity, pressure) = compute_errors(&tr.ops, &tr.state, exact);
        let row = ConvergenceRow {
            h: tr.ops.space().mesh().h(),
            level,
            steps: tr.steps,
            velocity,
            pressure,
        };
        progress(&row);
        table.push(row)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::cases::taylor_green_case;

    fn cfg(levels: Vec<u32>, t_end: f64) -> ConvergenceConfig {
        ConvergenceConfig {
            degree: 2,
            tableau: TableauId::Ark4,
            base_cells: [1, 1],
            levels,
            courant: 0.8,
            t0: 0.0,
            t_end,
            tolerances: SolverTolerances::default(),
            rebuild_interval: 50,
        }
    }

    #[test]
    fn zero_step_study_shows_projection_rates() {
        let case = taylor_green_case(100.0).unwrap();
        let table = run_convergence(&case, &cfg(vec![2, 3, 4], 0.0), &mut |_| {}).unwrap();
        assert_eq!(table.len(), 3);
        assert!(table.rows().iter().all(|r| r.steps == 0));
        let rates = table.velocity_rates(NormKind::L2);
        assert!(rates[0].is_none());
        for r in &rates[1..] {
            let r = r.unwrap();
            assert!(r > 2.6 && r < 3.5, "{rates:?}");
        }
        for r in &table.pressure_rates(NormKind::L2)[1..] {
            assert!(r.unwrap() > 2.5, "{:?}", table.pressure_rates(NormKind::L2));
        }
    }

    #[test]
    fn zero_step_study_matches_single_run() {
        let case = taylor_green_case(100.0).unwrap();
        let c = cfg(vec![2, 3], 0.0);
        let table = run_convergence(&case, &c, &mut |_| {}).unwrap();
        let tr = run_simulation(&case, &c.simulation(3), &mut |_, _, _| {}).unwrap();
        let (v, p) = compute_errors(&tr.ops, &tr.state, case.exact.as_ref().unwrap());
        assert_eq!(table.rows()[1].velocity, v);
        assert_eq!(table.rows()[1].pressure, p);
    }

    #[test]
    fn rates_are_scale_invariant() {
        let row = |h: f64, e: f64| ConvergenceRow {
            h,
            level: 0,
            steps: 0,
            velocity: ErrorNorms {
                l2: e,
                h1_semi: e,
                h1: e,
                linf: e,
            },
            pressure: ErrorNorms::default(),
        };
        let mut t = ConvergenceTable::new();
        t.push(row(0.5, 8e-6)).unwrap();
        t.push(row(0.25, 5e-7)).unwrap();
        assert!(t.push(row(0.2, 1e-8)).is_err());
        let r = t.velocity_rates(NormKind::L2)[1].unwrap();
        assert!((r - 4.0).abs() < 1e-12);
        let scaled = t.rates(|r| 37.0 * r.velocity.l2)[1].unwrap();
        assert!((scaled - r).abs() < 1e-12);
    }

    #[test]
    fn needs_two_levels_and_exact_solution() {
        let case = taylor_green_case(100.0).unwrap();
        assert!(run_convergence(&case, &cfg(vec![2], 0.0), &mut |_| {}).is_err());
        assert!(run_convergence(&case, &cfg(vec![2, 4], 0.0), &mut |_| {}).is_err());
        let vortex = crate::bench::cases::single_vortex_case(100.0).unwrap();
        assert!(run_convergence(&vortex, &cfg(vec![2, 3], 0.0), &mut |_| {}).is_err());
    }
}
