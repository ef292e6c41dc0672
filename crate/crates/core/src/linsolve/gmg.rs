//! Geometric multigrid V-cycle on nested structured meshes at fixed degree.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::cg::Preconditioner;
use super::dense::DenseCholesky;
use crate::error::{Error, Result};
use crate::fem::reference::lagrange_1d;
use crate::fem::{assemble_mass, assemble_stiffness, CsrMatrix, FeSpace};
use crate::mesh::MeshHierarchy;

/// Interpolation of a coarse-space function at the fine support points.
/// Requires the fine mesh to be the uniform refinement of the coarse one.
pub fn prolongation(coarse: &FeSpace, fine: &FeSpace) -> Result<CsrMatrix> {
    let (cm, fm) = (coarse.mesh(), fine.mesh());
    if coarse.degree() != fine.degree()
        || cm.domain != fm.domain
        || cm.cells[0] * 2 != fm.cells[0]
        || cm.cells[1] * 2 != fm.cells[1]
    {
        return Err(Error::Configuration(format!(
            "spaces are not nested: coarse {:?} k={}, fine {:?} k={}",
            cm.cells,
            coarse.degree(),
            fm.cells,
            fine.degree()
        )));
    }
    let nodes = &coarse.reference().nodes_1d;
    let [hx, hy] = cm.cell_size();
    let mut done = vec![false; fine.n_dofs()];
    let mut triplets = Vec::new();
    for e in 0..fm.num_elements() {
        let parent = fm.parent(e);
        let o = cm.element_origin(parent);
        let cdofs = coarse.element_dofs(parent);
        for &fd in fine.element_dofs(e) {
            if done[fd] {
                continue;
            }
            done[fd] = true;
            let p = fine.support_points()[fd];
            let xi = [(p[0] - o[0]) / hx, (p[1] - o[1]) / hy];
            let (vx, _) = lagrange_1d(nodes, xi[0]);
            let (vy, _) = lagrange_1d(nodes, xi[1]);
            let n = nodes.len();
            for b in 0..n {
                for a in 0..n {
                    let v = vx[a] * vy[b];
                    if v.abs() > 1e-15 {
                        triplets.push((fd, cdofs[a + n * b], v));
                    }
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(
        fine.n_dofs(),
        coarse.n_dofs(),
        &triplets,
    ))
}

/// The spaces of a mesh hierarchy with their mass and stiffness matrices and
/// the transfers between consecutive levels.
#[derive(Debug, Clone)]
pub struct MultilevelSpaces {
    pub spaces: Vec<FeSpace>,
    pub mass: Vec<CsrMatrix>,
    pub stiffness: Vec<CsrMatrix>,
    /// `prolongations[l]` maps level `l` to level `l + 1`.
    pub prolongations: Vec<CsrMatrix>,
}

impl MultilevelSpaces {
    pub fn new(hierarchy: &MeshHierarchy, k: usize) -> Result<Self> {
        let spaces = hierarchy
            .levels()
            .iter()
            .map(|m| FeSpace::new(m.clone(), k))
            .collect::<Result<Vec<_>>>()?;
        let mass = spaces.iter().map(assemble_mass).collect();
        let stiffness = spaces.iter().map(assemble_stiffness).collect();
        let prolongations = spaces
            .windows(2)
            .map(|w| prolongation(&w[0], &w[1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spaces,
            mass,
            stiffness,
            prolongations,
        })
    }

    pub fn finest(&self) -> &FeSpace {
        self.spaces.last().expect("non-empty hierarchy")
    }

    pub fn num_levels(&self) -> usize {
        self.spaces.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmgSettings {
    pub damping: f64,
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    /// Coarse levels up to this size are solved with dense Cholesky.
    pub max_direct_size: usize,
    pub coarse_sweeps: usize,
}

impl Default for GmgSettings {
    fn default() -> Self {
        Self {
            damping: 0.6,
            pre_sweeps: 3,
            post_sweeps: 3,
            max_direct_size: 2000,
            coarse_sweeps: 50,
        }
    }
}

#[derive(Debug, Clone)]
struct Level {
    op: CsrMatrix,
    inv_diag: Vec<f64>,
    /// Dirichlet-fixed DoFs; transfers are zeroed there.
    fixed: Option<Vec<bool>>,
}

#[derive(Debug, Clone)]
enum CoarseSolve {
    Direct(DenseCholesky),
    Smooth,
}

/// V-cycle preconditioner for `alpha M + beta A`, optionally with Dirichlet
/// rows eliminated, or with a constant nullspace (pure Neumann).
#[derive(Debug, Clone)]
pub struct GmgPreconditioner {
    levels: Vec<Level>,
    prolongations: Vec<CsrMatrix>,
    coarse: CoarseSolve,
    settings: GmgSettings,
}

impl GmgPreconditioner {
    /// `dirichlet`: eliminate boundary DoFs on every level.
    /// `singular`: the operator has the constants as nullspace.
    pub fn new(
        ml: &MultilevelSpaces,
        alpha: f64,
        beta: f64,
        dirichlet: bool,
        singular: bool,
        settings: GmgSettings,
    ) -> Result<Self> {
        let mut levels = Vec::with_capacity(ml.num_levels());
        for l in 0..ml.num_levels() {
            let mut op = ml.mass[l].linear_combination(alpha, &ml.stiffness[l], beta);
            let fixed = if dirichlet {
                let f = ml.spaces[l].is_boundary().to_vec();
                op = op.eliminate_dofs(&f);
                Some(f)
            } else {
                None
            };
            levels.push(Level::new(op, fixed));
        }
        Self::from_levels(levels, ml.prolongations.clone(), singular, settings)
    }

    /// Builds from explicit level operators (coarsest first) and transfers.
    pub fn from_operators(
        ops: Vec<CsrMatrix>,
        prolongations: Vec<CsrMatrix>,
        singular: bool,
        settings: GmgSettings,
    ) -> Result<Self> {
        let levels = ops.into_iter().map(|op| Level::new(op, None)).collect();
        Self::from_levels(levels, prolongations, singular, settings)
    }

    fn from_levels(
        levels: Vec<Level>,
        prolongations: Vec<CsrMatrix>,
        singular: bool,
        settings: GmgSettings,
    ) -> Result<Self> {
        if levels.is_empty() || prolongations.len() + 1 != levels.len() {
            return Err(Error::Configuration(format!(
                "{} levels need {} transfers, got {}",
                levels.len(),
                levels.len().saturating_sub(1),
                prolongations.len()
            )));
        }
        for (l, p) in prolongations.iter().enumerate() {
            if p.ncols() != levels[l].op.nrows() || p.nrows() != levels[l + 1].op.nrows() {
                return Err(Error::Configuration(format!(
                    "transfer {l} has shape {}x{}, levels have {} and {} DoFs",
                    p.nrows(),
                    p.ncols(),
                    levels[l].op.nrows(),
                    levels[l + 1].op.nrows()
                )));
            }
        }
        let c = &levels[0].op;
        let n = c.nrows();
        let coarse = if n <= settings.max_direct_size {
            let mut dense = c.to_dense();
            if singular {
                // rank-one shift on the constants; coarse right-hand sides are
                // orthogonal to them, so the solution is unaffected
                let s = c.diagonal().iter().sum::<f64>() / (n * n) as f64;
                dense.iter_mut().for_each(|v| *v += s);
            }
            CoarseSolve::Direct(DenseCholesky::factor(n, dense)?)
        } else {
            CoarseSolve::Smooth
        };
        Ok(Self {
            levels,
            prolongations,
            coarse,
            settings,
        })
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Finest-level operator.
    pub fn operator(&self) -> &CsrMatrix {
        &self.levels.last().expect("non-empty").op
    }

    fn smooth(&self, l: usize, r: &[f64], z: &mut [f64], sweeps: usize, scratch: &mut [f64]) {
        let lv = &self.levels[l];
        let w = self.settings.damping;
        for _ in 0..sweeps {
            lv.op.matvec(z, scratch);
            for i in 0..z.len() {
                z[i] += w * lv.inv_diag[i] * (r[i] - scratch[i]);
            }
        }
    }

    fn vcycle(&self, l: usize, r: &[f64], z: &mut [f64]) {
        let n = r.len();
        if l == 0 {
            match &self.coarse {
                CoarseSolve::Direct(chol) => chol.solve(r, z),
                CoarseSolve::Smooth => {
                    z.iter_mut().for_each(|v| *v = 0.0);
                    let mut scratch = vec![0.0; n];
                    self.smooth(0, r, z, self.settings.coarse_sweeps, &mut scratch);
                }
            }
            return;
        }
        let lv = &self.levels[l];
        let w = self.settings.damping;
        let mut scratch = vec![0.0; n];
        if self.settings.pre_sweeps > 0 {
            // first sweep from a zero guess needs no matvec
            for i in 0..n {
                z[i] = w * lv.inv_diag[i] * r[i];
            }
            self.smooth(l, r, z, self.settings.pre_sweeps - 1, &mut scratch);
        } else {
            z.iter_mut().for_each(|v| *v = 0.0);
        }

        // restrict the residual
        lv.op.matvec(z, &mut scratch);
        for i in 0..n {
            scratch[i] = r[i] - scratch[i];
        }
        if let Some(f) = &lv.fixed {
            mask(&mut scratch, f);
        }
        let p = &self.prolongations[l - 1];
        let nc = p.ncols();
        let mut rc = vec![0.0; nc];
        p.transpose_matvec(&scratch, &mut rc);
        let coarse = &self.levels[l - 1];
        if let Some(f) = &coarse.fixed {
            mask(&mut rc, f);
        }
        let mut zc = vec![0.0; nc];
        self.vcycle(l - 1, &rc, &mut zc);
        if let Some(f) = &coarse.fixed {
            mask(&mut zc, f);
        }
        p.matvec(&zc, &mut scratch);
        if let Some(f) = &lv.fixed {
            mask(&mut scratch, f);
        }
        for i in 0..n {
            z[i] += scratch[i];
        }
        self.smooth(l, r, z, self.settings.post_sweeps, &mut scratch);
    }
}

fn mask(v: &mut [f64], fixed: &[bool]) {
    for (x, f) in v.iter_mut().zip(fixed) {
        if *f {
            *x = 0.0;
        }
    }
}

impl Level {
    fn new(op: CsrMatrix, fixed: Option<Vec<bool>>) -> Self {
        let inv_diag = op
            .diagonal()
            .into_iter()
            .map(|d| if d != 0.0 { 1.0 / d } else { 0.0 })
            .collect();
        Self {
            op,
            inv_diag,
            fixed,
        }
    }
}

impl Preconditioner for GmgPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.vcycle(self.levels.len() - 1, r, z);
    }
}

/// One V-cycle `z = B r` (the `gmg_apply` operation).
pub fn gmg_apply(precond: &GmgPreconditioner, r: &[f64]) -> Result<Vec<f64>> {
    if r.len() != precond.operator().nrows() {
        return Err(Error::Configuration(format!(
            "residual has {} entries, finest level has {}",
            r.len(),
            precond.operator().nrows()
        )));
    }
    let mut z = vec![0.0; r.len()];
    precond.apply(r, &mut z);
    Ok(z)
}
