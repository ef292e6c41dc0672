//! The semi-discrete GePUP operator chain.
//!
//! The evolved velocity `w` is not solenoidal. From it, a Neumann solve for
//! the potential `φ` and a mass solve give the projected velocity
//! `u = w − ∇φ`, and a second Neumann solve extracts the pressure `q` from
//! `u`. Right-hand sides are assembled per component against the scalar
//! Lagrange basis `η_i`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::space::eval_at;
use crate::fem::{assemble_gradient, CsrMatrix, FeSpace, FieldRole, FieldVector};
use crate::linsolve::{
    cg_solve, neumann_solve, CgSettings, GmgPreconditioner, GmgSettings, JacobiPreconditioner,
    MultilevelSpaces, SolverReport,
};
use crate::math::{dot, sqrt};
use crate::mesh::{MeshHierarchy, RectDomain, FACE_NORMALS};

pub type VectorField = Arc<dyn Fn([f64; 2], f64) -> [f64; 2] + Send + Sync>;
pub type ScalarField = Arc<dyn Fn([f64; 2], f64) -> f64 + Send + Sync>;
/// `grad[d][j] = ∂u_d/∂x_j`
pub type VectorGradient = Arc<dyn Fn([f64; 2], f64) -> [[f64; 2]; 2] + Send + Sync>;
pub type ScalarGradient = Arc<dyn Fn([f64; 2], f64) -> [f64; 2] + Send + Sync>;

#[derive(Clone)]
pub struct ExactSolution {
    pub velocity: VectorField,
    pub velocity_gradient: VectorGradient,
    pub pressure: ScalarField,
    pub pressure_gradient: ScalarGradient,
}

/// A benchmark problem on a rectangle.
#[derive(Clone)]
pub struct CaseDefinition {
    pub name: String,
    pub domain: RectDomain,
    /// Kinematic viscosity.
    pub nu: f64,
    pub forcing: VectorField,
    /// Dirichlet velocity `g(x, t)`.
    pub boundary: VectorField,
    /// Analytic `∂g/∂t`.
    pub boundary_dt: VectorField,
    pub initial: Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>,
    pub exact: Option<ExactSolution>,
}

impl core::fmt::Debug for CaseDefinition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CaseDefinition")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("nu", &self.nu)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl CaseDefinition {
    /// Net boundary flux `∮ g·n` at time `t`, by face quadrature.
    pub fn boundary_flux(&self, space: &FeSpace, t: f64) -> f64 {
        let r = space.reference();
        let mut flux = 0.0;
        for face in space.mesh().boundary_faces() {
            let tab = &r.faces[face.local_face];
            for q in 0..tab.len() {
                let x = space.map_point(face.element, tab.points[q]);
                let g = (self.boundary)(x, t);
                flux +=
                    tab.weights[q] * face.length * (g[0] * face.normal[0] + g[1] * face.normal[1]);
            }
        }
        flux
    }

    /// Checks `|∮ g·n| ≤ 1e-10` at the given times.
    pub fn check_compatibility(&self, space: &FeSpace, times: &[f64]) -> Result<()> {
        for &t in times {
            let flux = self.boundary_flux(space, t);
            if !(flux.abs() <= 1e-10) {
                return Err(Error::InvalidInput(format!(
                    "case '{}': boundary data has net flux {flux:.3e} at t = {t}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Switches that remove terms from the operator chain; all on for the
/// Navier-Stokes equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorHooks {
    pub convection: bool,
    pub pressure: bool,
    pub projection: bool,
}

impl Default for OperatorHooks {
    fn default() -> Self {
        Self {
            convection: true,
            pressure: true,
            projection: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverTolerances {
    pub poisson: CgSettings,
    pub mass: CgSettings,
    pub helmholtz: CgSettings,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        Self {
            poisson: CgSettings::default(),
            mass: CgSettings::default(),
            helmholtz: CgSettings::default(),
        }
    }
}

impl SolverTolerances {
    pub fn uniform(rel_tol: f64) -> Self {
        let s = CgSettings {
            rel_tol,
            ..CgSettings::default()
        };
        Self {
            poisson: s,
            mass: s,
            helmholtz: s,
        }
    }
}

/// Solve statistics accumulated over operator calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IterationCounts {
    pub helmholtz: usize,
    pub potential: usize,
    pub mass: usize,
    pub pressure: usize,
}

impl IterationCounts {
    pub fn add(&mut self, other: &IterationCounts) {
        self.helmholtz += other.helmholtz;
        self.potential += other.potential;
        self.mass += other.mass;
        self.pressure += other.pressure;
    }
}

/// Matrices, preconditioners and solver settings for one space.
#[derive(Debug, Clone)]
pub struct GepupOperators {
    pub multilevel: MultilevelSpaces,
    /// `C_d`: `(C_d)_ij = (η_i, ∂η_j/∂x_d)`.
    pub gradient: [CsrMatrix; 2],
    /// `M · 1`
    pub mass_weights: Vec<f64>,
    pub poisson_preconditioner: GmgPreconditioner,
    pub mass_preconditioner: JacobiPreconditioner,
    pub tolerances: SolverTolerances,
    pub gmg: GmgSettings,
    pub hooks: OperatorHooks,
}

impl GepupOperators {
    pub fn new(
        domain: RectDomain,
        base_cells: [usize; 2],
        level: u32,
        k: usize,
        tolerances: SolverTolerances,
    ) -> Result<Self> {
        let hierarchy = MeshHierarchy::new(domain, base_cells, level)?;
        let multilevel = MultilevelSpaces::new(&hierarchy, k)?;
        Self::from_multilevel(multilevel, tolerances, GmgSettings::default())
    }

    pub fn from_multilevel(
        multilevel: MultilevelSpaces,
        tolerances: SolverTolerances,
        gmg: GmgSettings,
    ) -> Result<Self> {
        let space = multilevel.finest();
        let gradient = [assemble_gradient(space, 0), assemble_gradient(space, 1)];
        let mass = multilevel.mass.last().expect("non-empty");
        let mut mass_weights = vec![0.0; space.n_dofs()];
        mass.matvec(&vec![1.0; space.n_dofs()], &mut mass_weights);
        let poisson_preconditioner =
            GmgPreconditioner::new(&multilevel, 0.0, 1.0, false, true, gmg)?;
        let mass_preconditioner = JacobiPreconditioner::new(mass);
        Ok(Self {
            multilevel,
            gradient,
            mass_weights,
            poisson_preconditioner,
            mass_preconditioner,
            tolerances,
            gmg,
            hooks: OperatorHooks::default(),
        })
    }

    pub fn space(&self) -> &FeSpace {
        self.multilevel.finest()
    }

    pub fn mass(&self) -> &CsrMatrix {
        self.multilevel.mass.last().expect("non-empty")
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        self.multilevel.stiffness.last().expect("non-empty")
    }

    /// Mean-zero Poisson solve `A x = b`; `x` carries the initial guess.
    pub fn poisson_solve(&self, b: &[f64], x: &mut [f64]) -> Result<SolverReport> {
        let rep = neumann_solve(
            self.stiffness(),
            b,
            &self.mass_weights,
            &self.poisson_preconditioner,
            &self.tolerances.poisson,
            x,
        )?;
        require_converged("Poisson", rep)
    }

    /// `M x = b` with Jacobi-preconditioned CG.
    pub fn mass_solve(&self, b: &[f64], x: &mut [f64]) -> Result<SolverReport> {
        let rep = cg_solve(
            self.mass(),
            b,
            &self.mass_preconditioner,
            &self.tolerances.mass,
            x,
        )?;
        require_converged("mass", rep)
    }

    /// Discrete mean `Σ (M1)_j v_j / |Ω|`.
    pub fn mean(&self, v: &[f64]) -> f64 {
        dot(&self.mass_weights, v) / self.mass_weights.iter().sum::<f64>()
    }

    /// `½ Σ_d W_dᵀ M W_d`
    pub fn kinetic_energy(&self, w: [&[f64]; 2]) -> f64 {
        let mut tmp = vec![0.0; self.space().n_dofs()];
        let mut e = 0.0;
        for c in w {
            self.mass().matvec(c, &mut tmp);
            e += 0.5 * dot(c, &tmp);
        }
        e
    }
}

pub(crate) fn require_converged(solver: &'static str, rep: SolverReport) -> Result<SolverReport> {
    if rep.converged {
        Ok(rep)
    } else {
        Err(Error::NotConverged {
            solver,
            iterations: rep.iterations,
            residual: rep.relative_residual,
        })
    }
}

/// Velocity, projection potential and pressure at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct GepupState {
    pub t: f64,
    /// Non-solenoidal velocity `w_h`.
    pub w: [FieldVector; 2],
    /// Projected velocity `u_h`.
    pub u: [FieldVector; 2],
    pub phi: FieldVector,
    pub q: FieldVector,
}

impl GepupState {
    pub fn zeros(space: &FeSpace, t: f64) -> Self {
        let v = || space.zero_field(FieldRole::VelocityComponent);
        Self {
            t,
            w: [v(), v()],
            u: [v(), v()],
            phi: space.zero_field(FieldRole::ScalarPotential),
            q: space.zero_field(FieldRole::Pressure),
        }
    }

    /// Placeholder with no DoFs, for runs that fail before setup completes.
    pub fn empty(t: f64) -> Self {
        let v = || FieldVector::zeros(FieldRole::VelocityComponent, 0);
        Self {
            t,
            w: [v(), v()],
            u: [v(), v()],
            phi: FieldVector::zeros(FieldRole::ScalarPotential, 0),
            q: FieldVector::zeros(FieldRole::Pressure, 0),
        }
    }

    /// Starts from the discrete Leray projection of the interpolated initial
    /// velocity, so `w(t0) = u(t0)`. Cases with an exact solution start from
    /// its value at `t0`; otherwise `case.initial` is taken as the data at `t0`.
    pub fn initialize(ops: &GepupOperators, case: &CaseDefinition, t0: f64) -> Result<Self> {
        let space = ops.space();
        let at = |p: [f64; 2]| match &case.exact {
            Some(e) => (e.velocity)(p, t0),
            None => (case.initial)(p),
        };
        let w0 = [
            space.interpolate(FieldRole::VelocityComponent, |p| at(p)[0]),
            space.interpolate(FieldRole::VelocityComponent, |p| at(p)[1]),
        ];
        let mut s = Self::from_velocity(ops, case, t0, w0)?;
        s.w = s.u.clone();
        for c in s.w.iter_mut() {
            c.role = FieldRole::VelocityComponent;
        }
        Ok(s)
    }

    /// Starts from a given (not necessarily solenoidal) `w`.
    pub fn from_velocity(
        ops: &GepupOperators,
        case: &CaseDefinition,
        t0: f64,
        w: [FieldVector; 2],
    ) -> Result<Self> {
        let mut s = Self::zeros(ops.space(), t0);
        s.w = w;
        let mut counts = IterationCounts::default();
        let (u, phi) = leray_project(ops, [&s.w[0], &s.w[1]], case, t0, None, &mut counts)?;
        s.u = u;
        s.phi = phi;
        s.q = compute_pressure(ops, [&s.u[0], &s.u[1]], case, t0, None, &mut counts)?;
        Ok(s)
    }

    pub fn is_finite(&self) -> bool {
        self.w
            .iter()
            .chain(self.u.iter())
            .chain([&self.phi, &self.q])
            .all(|f| f.iter().all(|v| v.is_finite()))
    }
}

/// Boundary face quadrature: calls `visit(element, local_face, normal,
/// point, weight, q)` for each face quadrature point.
fn for_boundary_points(
    space: &FeSpace,
    mut visit: impl FnMut(usize, usize, [f64; 2], [f64; 2], f64, usize),
) {
    let r = space.reference();
    let [hx, hy] = space.mesh().cell_size();
    let [nx, ny] = space.mesh().cells;
    for f in 0..4 {
        let normal = FACE_NORMALS[f];
        let (count, length) = if f < 2 { (ny, hy) } else { (nx, hx) };
        for s in 0..count {
            let e = match f {
                0 => space.mesh().element_index(0, s),
                1 => space.mesh().element_index(nx - 1, s),
                2 => space.mesh().element_index(s, 0),
                _ => space.mesh().element_index(s, ny - 1),
            };
            let tab = &r.faces[f];
            for q in 0..tab.len() {
                let x = space.map_point(e, tab.points[q]);
                visit(e, f, normal, x, tab.weights[q] * length, q);
            }
        }
    }
}

/// Both components of `F^w_{d,i} = (f_d − u_h·∇u_{h,d} − ∂q_h/∂x_d, η_i)`.
pub fn eval_fw_all(
    ops: &GepupOperators,
    u: [&[f64]; 2],
    q: &[f64],
    case: &CaseDefinition,
    t: f64,
) -> [FieldVector; 2] {
    let space = ops.space();
    let r = space.reference();
    let n = r.n_local();
    let (jinv, det) = space.jacobian();
    let mut out = [
        space.zero_field(FieldRole::Load),
        space.zero_field(FieldRole::Load),
    ];
    let mut lx = vec![0.0; n];
    let mut ly = vec![0.0; n];
    let mut load = [vec![0.0; n], vec![0.0; n]];
    let convection = ops.hooks.convection;
    for e in 0..space.mesh().num_elements() {
        space.gather(e, u[0], &mut lx);
        space.gather(e, u[1], &mut ly);
        load[0].iter_mut().for_each(|v| *v = 0.0);
        load[1].iter_mut().for_each(|v| *v = 0.0);
        for qp in 0..r.volume.len() {
            let x = space.map_point(e, r.volume.points[qp]);
            let mut a = (case.forcing)(x, t);
            if convection {
                let (ux, gx) = eval_at(&r.volume, n, qp, &lx, jinv);
                let (uy, gy) = eval_at(&r.volume, n, qp, &ly, jinv);
                a[0] -= ux * gx[0] + uy * gx[1];
                a[1] -= ux * gy[0] + uy * gy[1];
            }
            let w = r.volume.weights[qp] * det;
            let vals = &r.volume.values[qp * n..(qp + 1) * n];
            for i in 0..n {
                load[0][i] += w * a[0] * vals[i];
                load[1][i] += w * a[1] * vals[i];
            }
        }
        for (i, &g) in space.element_dofs(e).iter().enumerate() {
            out[0][g] += load[0][i];
            out[1][g] += load[1][i];
        }
    }
    if ops.hooks.pressure {
        for d in 0..2 {
            ops.gradient[d].matvec_add(-1.0, q, &mut out[d]);
        }
    }
    out
}

/// Component `d` of [`eval_fw_all`].
pub fn eval_fw(
    ops: &GepupOperators,
    u: [&[f64]; 2],
    q: &[f64],
    case: &CaseDefinition,
    t: f64,
    d: usize,
) -> FieldVector {
    let [fx, fy] = eval_fw_all(ops, u, q, case, t);
    if d == 0 {
        fx
    } else {
        fy
    }
}

/// `F^φ_i = (w_h, ∇η_i) − (n·g, η_i)_∂Ω`
pub fn eval_fphi(
    ops: &GepupOperators,
    w: [&[f64]; 2],
    case: &CaseDefinition,
    t: f64,
) -> FieldVector {
    let space = ops.space();
    let mut out = space.zero_field(FieldRole::Load);
    let mut tmp = vec![0.0; space.n_dofs()];
    for d in 0..2 {
        ops.gradient[d].transpose_matvec(w[d], &mut tmp);
        for (o, v) in out.iter_mut().zip(&tmp) {
            *o += v;
        }
    }
    let r = space.reference();
    let n = r.n_local();
    for_boundary_points(space, |e, f, normal, x, wq, qp| {
        let g = (case.boundary)(x, t);
        let gn = g[0] * normal[0] + g[1] * normal[1];
        if gn == 0.0 {
            return;
        }
        let vals = &r.faces[f].values[qp * n..(qp + 1) * n];
        for (i, &dof) in space.element_dofs(e).iter().enumerate() {
            out[dof] -= wq * gn * vals[i];
        }
    });
    out
}

/// `F^q_i = (f − u_h·∇u_h, ∇η_i) + ν(∇×u_h, n×∇η_i)_∂Ω − (n·∂g/∂t, η_i)_∂Ω`.
///
/// In 2D the curl is the scalar `∂u_y/∂x − ∂u_x/∂y` and `n×∇η` is the
/// tangential derivative along `t = (−n_y, n_x)`.
pub fn eval_fq(ops: &GepupOperators, u: [&[f64]; 2], case: &CaseDefinition, t: f64) -> FieldVector {
    let space = ops.space();
    let r = space.reference();
    let n = r.n_local();
    let (jinv, det) = space.jacobian();
    let mut out = space.zero_field(FieldRole::Load);
    let mut lx = vec![0.0; n];
    let mut ly = vec![0.0; n];
    let mut load = vec![0.0; n];
    let convection = ops.hooks.convection;
    for e in 0..space.mesh().num_elements() {
        space.gather(e, u[0], &mut lx);
        space.gather(e, u[1], &mut ly);
        load.iter_mut().for_each(|v| *v = 0.0);
        for qp in 0..r.volume.len() {
            let x = space.map_point(e, r.volume.points[qp]);
            let mut a = (case.forcing)(x, t);
            if convection {
                let (ux, gx) = eval_at(&r.volume, n, qp, &lx, jinv);
                let (uy, gy) = eval_at(&r.volume, n, qp, &ly, jinv);
                a[0] -= ux * gx[0] + uy * gx[1];
                a[1] -= ux * gy[0] + uy * gy[1];
            }
            let w = r.volume.weights[qp] * det;
            let grads = &r.volume.grads[qp * n..(qp + 1) * n];
            let (ax, ay) = (w * a[0] * jinv[0], w * a[1] * jinv[1]);
            for i in 0..n {
                load[i] += ax * grads[i][0] + ay * grads[i][1];
            }
        }
        for (i, &g) in space.element_dofs(e).iter().enumerate() {
            out[g] += load[i];
        }
    }

    let nu = case.nu;
    for_boundary_points(space, |e, f, normal, x, wq, qp| {
        let tab = &r.faces[f];
        let vals = &tab.values[qp * n..(qp + 1) * n];
        let grads = &tab.grads[qp * n..(qp + 1) * n];
        let dofs = space.element_dofs(e);
        let mut curl = 0.0;
        for (i, &dof) in dofs.iter().enumerate() {
            curl += grads[i][0] * jinv[0] * u[1][dof] - grads[i][1] * jinv[1] * u[0][dof];
        }
        let dg = (case.boundary_dt)(x, t);
        let dgn = dg[0] * normal[0] + dg[1] * normal[1];
        let tangent = [-normal[1], normal[0]];
        for (i, &dof) in dofs.iter().enumerate() {
            let dt_eta = tangent[0] * grads[i][0] * jinv[0] + tangent[1] * grads[i][1] * jinv[1];
            out[dof] += wq * (nu * curl * dt_eta - dgn * vals[i]);
        }
    });
    out
}

/// Discrete Leray projection: `A Φ = F^φ(w, g)`, then `M U_d = M W_d − C_d Φ`.
/// `phi_guess` warm-starts the potential solve.
pub fn leray_project(
    ops: &GepupOperators,
    w: [&[f64]; 2],
    case: &CaseDefinition,
    t: f64,
    phi_guess: Option<&[f64]>,
    counts: &mut IterationCounts,
) -> Result<([FieldVector; 2], FieldVector)> {
    let space = ops.space();
    let nd = space.n_dofs();
    if !ops.hooks.projection {
        let u = [
            FieldVector::new(FieldRole::VelocityComponent, w[0].to_vec()),
            FieldVector::new(FieldRole::VelocityComponent, w[1].to_vec()),
        ];
        return Ok((u, space.zero_field(FieldRole::ScalarPotential)));
    }
    let rhs = eval_fphi(ops, w, case, t);
    let mut phi = FieldVector::new(
        FieldRole::ScalarPotential,
        phi_guess.map_or_else(|| vec![0.0; nd], |g| g.to_vec()),
    );
    counts.potential += ops.poisson_solve(&rhs, &mut phi)?.iterations;

    let mut u = [
        FieldVector::new(FieldRole::VelocityComponent, w[0].to_vec()),
        FieldVector::new(FieldRole::VelocityComponent, w[1].to_vec()),
    ];
    let mut load = vec![0.0; nd];
    let mut corr = vec![0.0; nd];
    for d in 0..2 {
        ops.gradient[d].matvec(&phi, &mut load);
        corr.iter_mut().for_each(|v| *v = 0.0);
        counts.mass += ops.mass_solve(&load, &mut corr)?.iterations;
        for (ui, ci) in u[d].iter_mut().zip(&corr) {
            *ui -= ci;
        }
    }
    Ok((u, phi))
}

/// `A Q = F^q(u, f, g)`, mean-zero. `q_guess` warm-starts the solve.
pub fn compute_pressure(
    ops: &GepupOperators,
    u: [&[f64]; 2],
    case: &CaseDefinition,
    t: f64,
    q_guess: Option<&[f64]>,
    counts: &mut IterationCounts,
) -> Result<FieldVector> {
    let space = ops.space();
    if !ops.hooks.pressure {
        return Ok(space.zero_field(FieldRole::Pressure));
    }
    let rhs = eval_fq(ops, u, case, t);
    let mut q = FieldVector::new(
        FieldRole::Pressure,
        q_guess.map_or_else(|| vec![0.0; space.n_dofs()], |g| g.to_vec()),
    );
    counts.pressure += ops.poisson_solve(&rhs, &mut q)?.iterations;
    Ok(q)
}

/// `‖∇·w_h‖_{L²(Ω)}` by element quadrature.
pub fn divergence_l2(space: &FeSpace, w: [&[f64]; 2]) -> f64 {
    let r = space.reference();
    let n = r.n_local();
    let (jinv, det) = space.jacobian();
    let mut lx = vec![0.0; n];
    let mut ly = vec![0.0; n];
    let mut s = 0.0;
    for e in 0..space.mesh().num_elements() {
        space.gather(e, w[0], &mut lx);
        space.gather(e, w[1], &mut ly);
        for q in 0..r.volume.len() {
            let (_, gx) = eval_at(&r.volume, n, q, &lx, jinv);
            let (_, gy) = eval_at(&r.volume, n, q, &ly, jinv);
            let div = gx[0] + gy[1];
            s += r.volume.weights[q] * det * div * div;
        }
    }
    sqrt(s)
}

/// Scalar curl `∂u_y/∂x − ∂u_x/∂y` sampled on element `e` at its quadrature
/// and support points.
pub fn element_curl_samples(space: &FeSpace, u: [&[f64]; 2], e: usize, out: &mut Vec<f64>) {
    let r = space.reference();
    let n = r.n_local();
    let (jinv, _) = space.jacobian();
    let mut lx = vec![0.0; n];
    let mut ly = vec![0.0; n];
    space.gather(e, u[0], &mut lx);
    space.gather(e, u[1], &mut ly);
    out.clear();
    for tab in [&r.volume, &r.nodal] {
        for q in 0..tab.len() {
            let (_, gx) = eval_at(tab, n, q, &lx, jinv);
            let (_, gy) = eval_at(tab, n, q, &ly, jinv);
            out.push(gy[0] - gx[1]);
        }
    }
}

/// Nodal averages of an element-wise quantity evaluated at each element's
/// support points (used for visualization of curl and divergence).
pub fn nodal_average(
    space: &FeSpace,
    u: [&[f64]; 2],
    quantity: impl Fn([f64; 2], [f64; 2]) -> f64,
) -> Vec<f64> {
    let r = space.reference();
    let n = r.n_local();
    let (jinv, _) = space.jacobian();
    let mut sum = vec![0.0; space.n_dofs()];
    let mut count = vec![0u32; space.n_dofs()];
    let mut lx = vec![0.0; n];
    let mut ly = vec![0.0; n];
    for e in 0..space.mesh().num_elements() {
        space.gather(e, u[0], &mut lx);
        space.gather(e, u[1], &mut ly);
        for (q, &dof) in space.element_dofs(e).iter().enumerate() {
            let (_, gx) = eval_at(&r.nodal, n, q, &lx, jinv);
            let (_, gy) = eval_at(&r.nodal, n, q, &ly, jinv);
            sum[dof] += quantity(gx, gy);
            count[dof] += 1;
        }
    }
    sum.iter().zip(&count).map(|(s, c)| s / *c as f64).collect()
}

/// Boxed constant vector field.
pub fn constant_field(v: [f64; 2]) -> VectorField {
    Arc::new(move |_, _| v)
}
