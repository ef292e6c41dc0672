//! One ERK-ESDIRK step of the GePUP system.
//!
//! Stage `s ≥ 2` solves the Helmholtz system
//! `(M + νΔtγA) W^(s) = M W^n + Δt Σ_j aᴱ_sj F^w_j − νΔt Σ_j aᴵ_sj A W^(j)`
//! with `W^(s) = g(t^n + c_s Δt)` imposed on boundary DoFs, then projects
//! `W^(s)` and recomputes the pressure. The explicit part is completed by
//! `W* = W^(last) + Δt M⁻¹ Σ_j (b_j − aᴱ_last,j) F^w_j`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::tableau::{load_tableau, validate_tableau, ButcherTableau, TableauId};
use crate::error::{Error, Result};
use crate::fem::space::element_max_magnitude;
use crate::fem::{CsrMatrix, FeSpace, FieldRole, FieldVector};
use crate::gepup::{
    compute_pressure, eval_fw_all, leray_project, require_converged, CaseDefinition,
    GepupOperators, GepupState, IterationCounts,
};
use crate::linsolve::{cg_solve, GmgPreconditioner};

#[derive(Debug, Clone, PartialEq)]
pub struct StepperConfig {
    pub tableau: TableauId,
    /// Courant number `Cr`.
    pub courant: f64,
    /// Upper bound on the step, used when the flow is at rest.
    pub dt_max: f64,
    /// Steps between Courant re-evaluations.
    pub rebuild_interval: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            tableau: TableauId::Ark4,
            courant: 0.8,
            dt_max: 0.1,
            rebuild_interval: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub t: f64,
    pub dt: f64,
    pub iterations: IterationCounts,
}

/// `Δt = Cr · h / (k · max|u|)`, or `dt_max` for a flow at rest.
pub fn courant_dt(space: &FeSpace, u: [&[f64]; 2], courant: f64, dt_max: f64) -> f64 {
    let umax = element_max_magnitude(space, u[0], u[1])
        .into_iter()
        .fold(0.0f64, f64::max);
    if umax < 1e-12 {
        return dt_max;
    }
    let h = space.mesh().h();
    (courant * h / (space.degree() as f64 * umax)).min(dt_max)
}

#[derive(Debug, Clone)]
struct Helmholtz {
    dt: f64,
    nu: f64,
    full: CsrMatrix,
    eliminated: CsrMatrix,
    precond: GmgPreconditioner,
}

/// Advances [`GepupState`]s; caches the Helmholtz operator for the last `Δt`.
#[derive(Debug, Clone)]
pub struct Stepper {
    tableau: ButcherTableau,
    helmholtz: Option<Helmholtz>,
    rebuilds: usize,
}

impl Stepper {
    pub fn new(id: TableauId) -> Result<Self> {
        Self::with_tableau(load_tableau(id)?)
    }

    /// Rejects tableaus that fail [`validate_tableau`] at `1e-12`.
    pub fn with_tableau(tableau: ButcherTableau) -> Result<Self> {
        let report = validate_tableau(&tableau, 1e-12);
        if !report.passed() {
            return Err(Error::Configuration(format!(
                "tableau {} is not a valid ERK-ESDIRK pair: {}",
                tableau.name,
                report.violations.join("; ")
            )));
        }
        Ok(Self {
            tableau,
            helmholtz: None,
            rebuilds: 0,
        })
    }

    pub fn tableau(&self) -> &ButcherTableau {
        &self.tableau
    }

    /// Number of Helmholtz operator (re)builds so far.
    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    fn helmholtz(&mut self, ops: &GepupOperators, nu: f64, dt: f64) -> Result<&Helmholtz> {
        let stale = self
            .helmholtz
            .as_ref()
            .map_or(true, |h| h.dt != dt || h.nu != nu);
        if stale {
            let beta = nu * dt * self.tableau.gamma();
            let full = ops.mass().linear_combination(1.0, ops.stiffness(), beta);
            let eliminated = full.eliminate_dofs(ops.space().is_boundary());
            let precond = GmgPreconditioner::new(&ops.multilevel, 1.0, beta, true, false, ops.gmg)?;
            self.helmholtz = Some(Helmholtz {
                dt,
                nu,
                full,
                eliminated,
                precond,
            });
            self.rebuilds += 1;
        }
        Ok(self.helmholtz.as_ref().expect("built above"))
    }

    /// Advances `state` by `dt`. On error `state` is left unchanged.
    pub fn advance(
        &mut self,
        ops: &GepupOperators,
        case: &CaseDefinition,
        state: &mut GepupState,
        dt: f64,
    ) -> Result<StepStats> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {dt}"
            )));
        }
        self.helmholtz(ops, case.nu, dt)?;
        let h = self.helmholtz.as_ref().expect("built above");
        step(&self.tableau, h, ops, case, state, dt)
    }
}

fn step(
    tab: &ButcherTableau,
    h: &Helmholtz,
    ops: &GepupOperators,
    case: &CaseDefinition,
    state: &mut GepupState,
    dt: f64,
) -> Result<StepStats> {
    let t0 = state.t;
    let fail = |reason: alloc::string::String| Error::StepFailure { time: t0, reason };
    let mut counts = IterationCounts::default();
    let ns = tab.stages;
    let nu = case.nu;
    let space = ops.space();
    let nd = space.n_dofs();
    let boundary = space.boundary_dofs();
    let points = space.support_points();

    let mut mwn = [vec![0.0; nd], vec![0.0; nd]];
    for d in 0..2 {
        ops.mass().matvec(&state.w[d], &mut mwn[d]);
    }

    // stage values
    let mut fw: Vec<[FieldVector; 2]> = Vec::with_capacity(ns);
    let mut aw: Vec<[Vec<f64>; 2]> = Vec::with_capacity(ns);
    let mut w_stage = [state.w[0].clone(), state.w[1].clone()];
    let mut phi = state.phi.clone();
    let mut q = state.q.clone();
    let mut u = [state.u[0].clone(), state.u[1].clone()];

    let push_aw = |w: &[FieldVector; 2], aw: &mut Vec<[Vec<f64>; 2]>| {
        let mut a = [vec![0.0; nd], vec![0.0; nd]];
        for d in 0..2 {
            ops.stiffness().matvec(&w[d], &mut a[d]);
        }
        aw.push(a);
    };

    fw.push(eval_fw_all(ops, [&u[0], &u[1]], &q, case, t0));
    push_aw(&w_stage, &mut aw);

    let mut rhs = vec![0.0; nd];
    let mut gvec = vec![0.0; nd];
    let mut hg = vec![0.0; nd];
    for s in 1..ns {
        let ts = t0 + tab.c[s] * dt;
        for d in 0..2 {
            rhs.copy_from_slice(&mwn[d]);
            for j in 0..s {
                let ae = tab.ae(s, j);
                let ai = tab.ai(s, j);
                if ae != 0.0 {
                    crate::math::axpy(dt * ae, &fw[j][d], &mut rhs);
                }
                if ai != 0.0 {
                    crate::math::axpy(-nu * dt * ai, &aw[j][d], &mut rhs);
                }
            }
            // symmetric elimination of the Dirichlet values
            gvec.iter_mut().for_each(|v| *v = 0.0);
            for &b in boundary {
                gvec[b] = (case.boundary)(points[b], ts)[d];
            }
            h.full.matvec(&gvec, &mut hg);
            for (r, v) in rhs.iter_mut().zip(&hg) {
                *r -= v;
            }
            for &b in boundary {
                rhs[b] = h.eliminated.get(b, b) * gvec[b];
            }
            for &b in boundary {
                w_stage[d][b] = gvec[b];
            }
            let rep = cg_solve(
                &h.eliminated,
                &rhs,
                &h.precond,
                &ops.tolerances.helmholtz,
                &mut w_stage[d],
            )
            .map_err(|e| fail(format!("stage {s} Helmholtz solve: {e}")))?;
            counts.helmholtz += require_converged("Helmholtz", rep)
                .map_err(|e| fail(format!("stage {s}: {e}")))?
                .iterations;
        }
        let (us, ph) = leray_project(
            ops,
            [&w_stage[0], &w_stage[1]],
            case,
            ts,
            Some(&phi),
            &mut counts,
        )
        .map_err(|e| fail(format!("stage {s} projection: {e}")))?;
        u = us;
        phi = ph;
        q = compute_pressure(ops, [&u[0], &u[1]], case, ts, Some(&q), &mut counts)
            .map_err(|e| fail(format!("stage {s} pressure: {e}")))?;
        fw.push(eval_fw_all(ops, [&u[0], &u[1]], &q, case, ts));
        if s + 1 < ns {
            push_aw(&w_stage, &mut aw);
        }
    }

    // explicit completion
    let t1 = t0 + dt;
    let mut load = vec![0.0; nd];
    let mut corr = vec![0.0; nd];
    for d in 0..2 {
        load.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..ns {
            let coef = tab.b[j] - tab.ae(ns - 1, j);
            if coef != 0.0 {
                crate::math::axpy(coef, &fw[j][d], &mut load);
            }
        }
        corr.iter_mut().for_each(|v| *v = 0.0);
        counts.mass += ops
            .mass_solve(&load, &mut corr)
            .map_err(|e| fail(format!("final mass solve: {e}")))?
            .iterations;
        crate::math::axpy(dt, &corr, &mut w_stage[d]);
    }
    let (u1, phi1) = leray_project(
        ops,
        [&w_stage[0], &w_stage[1]],
        case,
        t1,
        Some(&phi),
        &mut counts,
    )
    .map_err(|e| fail(format!("final projection: {e}")))?;
    let q1 = compute_pressure(ops, [&u1[0], &u1[1]], case, t1, Some(&q), &mut counts)
        .map_err(|e| fail(format!("final pressure: {e}")))?;

    let next = GepupState {
        t: t1,
        w: [
            FieldVector::new(FieldRole::VelocityComponent, u1[0].to_vec()),
            FieldVector::new(FieldRole::VelocityComponent, u1[1].to_vec()),
        ],
        u: u1,
        phi: phi1,
        q: q1,
    };
    if !next.is_finite() {
        return Err(fail("non-finite state after step".into()));
    }
    *state = next;
    Ok(StepStats {
        t: t1,
        dt,
        iterations: counts,
    })
}
