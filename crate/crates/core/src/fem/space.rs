use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

use super::reference::{check_degree, ReferenceElement, Tabulation};
use super::sparse::SparsityPattern;
use crate::error::Result;
use crate::math::{hypot, sqrt};
use crate::mesh::StructuredQuadMesh;

/// Continuous degree-`k` Lagrange space on a structured mesh.
///
/// Global DoFs sit on the `(k nx + 1) x (k ny + 1)` lattice of support points
/// and are numbered row-major, so shared edge and vertex nodes get a single
/// index.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: StructuredQuadMesh,
    reference: Arc<ReferenceElement>,
    dofs_per_axis: [usize; 2],
    element_dofs: Vec<usize>,
    support_points: Vec<[f64; 2]>,
    boundary_dofs: Vec<usize>,
    is_boundary: Vec<bool>,
    pattern: Arc<SparsityPattern>,
}

impl FeSpace {
    pub fn new(mesh: StructuredQuadMesh, k: usize) -> Result<Self> {
        check_degree(k)?;
        let reference = Arc::new(ReferenceElement::new(k)?);
        let [nx, ny] = mesh.cells;
        let dofs_per_axis = [k * nx + 1, k * ny + 1];
        let n_dofs = dofs_per_axis[0] * dofs_per_axis[1];
        let n_local = (k + 1) * (k + 1);

        let mut element_dofs = Vec::with_capacity(mesh.num_elements() * n_local);
        for e in 0..mesh.num_elements() {
            let (ex, ey) = mesh.element_coords(e);
            let base = k * ex + dofs_per_axis[0] * k * ey;
            for b in 0..=k {
                for a in 0..=k {
                    element_dofs.push(base + a + dofs_per_axis[0] * b);
                }
            }
        }

        let [hx, hy] = mesh.cell_size();
        let nodes = &reference.nodes_1d;
        let coord = |i: usize, h: f64, o: f64| {
            let (cell, local) = (i / k, i % k);
            o + (cell as f64 + nodes[local]) * h
        };
        let mut support_points = Vec::with_capacity(n_dofs);
        let mut is_boundary = vec![false; n_dofs];
        let mut boundary_dofs = Vec::new();
        for iy in 0..dofs_per_axis[1] {
            for ix in 0..dofs_per_axis[0] {
                let x = if ix == dofs_per_axis[0] - 1 {
                    mesh.domain.origin[0] + mesh.domain.extent[0]
                } else {
                    coord(ix, hx, mesh.domain.origin[0])
                };
                let y = if iy == dofs_per_axis[1] - 1 {
                    mesh.domain.origin[1] + mesh.domain.extent[1]
                } else {
                    coord(iy, hy, mesh.domain.origin[1])
                };
                support_points.push([x, y]);
                let i = ix + dofs_per_axis[0] * iy;
                if ix == 0 || iy == 0 || ix == dofs_per_axis[0] - 1 || iy == dofs_per_axis[1] - 1 {
                    is_boundary[i] = true;
                    boundary_dofs.push(i);
                }
            }
        }

        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n_dofs];
        for dofs in element_dofs.chunks_exact(n_local) {
            for &i in dofs {
                rows[i].extend(dofs.iter().map(|&j| j as u32));
            }
        }
        let pattern = Arc::new(SparsityPattern::from_rows(n_dofs, rows));

        Ok(Self {
            mesh,
            reference,
            dofs_per_axis,
            element_dofs,
            support_points,
            boundary_dofs,
            is_boundary,
            pattern,
        })
    }

    pub fn mesh(&self) -> &StructuredQuadMesh {
        &self.mesh
    }

    pub fn reference(&self) -> &ReferenceElement {
        &self.reference
    }

    pub fn degree(&self) -> usize {
        self.reference.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.support_points.len()
    }

    pub fn n_local(&self) -> usize {
        self.reference.n_local()
    }

    pub fn dofs_per_axis(&self) -> [usize; 2] {
        self.dofs_per_axis
    }

    pub fn element_dofs(&self, e: usize) -> &[usize] {
        let n = self.n_local();
        &self.element_dofs[e * n..(e + 1) * n]
    }

    pub fn support_points(&self) -> &[[f64; 2]] {
        &self.support_points
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn is_boundary(&self) -> &[bool] {
        &self.is_boundary
    }

    pub fn pattern(&self) -> &Arc<SparsityPattern> {
        &self.pattern
    }

    /// Inverse Jacobian diagonal `(1/hx, 1/hy)` and Jacobian determinant.
    pub fn jacobian(&self) -> ([f64; 2], f64) {
        let [hx, hy] = self.mesh.cell_size();
        ([1.0 / hx, 1.0 / hy], hx * hy)
    }

    pub fn map_point(&self, e: usize, xi: [f64; 2]) -> [f64; 2] {
        let o = self.mesh.element_origin(e);
        let [hx, hy] = self.mesh.cell_size();
        [o[0] + xi[0] * hx, o[1] + xi[1] * hy]
    }

    pub fn gather(&self, e: usize, field: &[f64], local: &mut [f64]) {
        for (l, &g) in local.iter_mut().zip(self.element_dofs(e)) {
            *l = field[g];
        }
    }

    pub fn zero_field(&self, role: FieldRole) -> FieldVector {
        FieldVector::zeros(role, self.n_dofs())
    }

    /// Nodal interpolant: coefficient `j` is `f` at support point `j`.
    pub fn interpolate(&self, role: FieldRole, f: impl Fn([f64; 2]) -> f64) -> FieldVector {
        FieldVector::new(role, self.support_points.iter().map(|p| f(*p)).collect())
    }
}

/// Value and physical gradient of a field at tabulated point `q` of element-local coefficients.
#[inline]
pub fn eval_at(
    tab: &Tabulation,
    n_local: usize,
    q: usize,
    local: &[f64],
    jinv: [f64; 2],
) -> (f64, [f64; 2]) {
    let vals = &tab.values[q * n_local..(q + 1) * n_local];
    let grads = &tab.grads[q * n_local..(q + 1) * n_local];
    let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
    for i in 0..n_local {
        v += vals[i] * local[i];
        gx += grads[i][0] * local[i];
        gy += grads[i][1] * local[i];
    }
    (v, [gx * jinv[0], gy * jinv[1]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldRole {
    VelocityComponent,
    ScalarPotential,
    Pressure,
    Load,
}

/// DoF coefficients of one scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    pub role: FieldRole,
    values: Vec<f64>,
}

impl FieldVector {
    pub fn new(role: FieldRole, values: Vec<f64>) -> Self {
        Self { role, values }
    }

    pub fn zeros(role: FieldRole, n: usize) -> Self {
        Self {
            role,
            values: vec![0.0; n],
        }
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl Deref for FieldVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl DerefMut for FieldVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    /// Full norm: L2 part plus gradient seminorm.
    H1,
    H1Semi,
    Linf,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
    pub h1: f64,
    pub linf: f64,
}

impl ErrorNorms {
    pub fn get(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::L2 => self.l2,
            NormKind::H1 => self.h1,
            NormKind::H1Semi => self.h1_semi,
            NormKind::Linf => self.linf,
        }
    }
}

/// Errors of a `D`-component field against an exact solution. L2 and H1 use
/// element quadrature; Linf is the largest Euclidean error over quadrature
/// and support points.
pub fn vector_error_norms<const D: usize>(
    space: &FeSpace,
    fields: [&[f64]; D],
    exact: impl Fn([f64; 2]) -> [f64; D],
    exact_grad: impl Fn([f64; 2]) -> [[f64; 2]; D],
) -> ErrorNorms {
    let r = space.reference();
    let n = r.n_local();
    let (jinv, det) = space.jacobian();
    let mut local = vec![vec![0.0; n]; D];
    let (mut l2, mut semi, mut linf) = (0.0, 0.0, 0.0f64);
    for e in 0..space.mesh().num_elements() {
        for d in 0..D {
            space.gather(e, fields[d], &mut local[d]);
        }
        for q in 0..r.volume.len() {
            let x = space.map_point(e, r.volume.points[q]);
            let ue = exact(x);
            let ge = exact_grad(x);
            let w = r.volume.weights[q] * det;
            let mut pt = 0.0;
            for d in 0..D {
                let (v, g) = eval_at(&r.volume, n, q, &local[d], jinv);
                let ev = v - ue[d];
                pt += ev * ev;
                let (a, b) = (g[0] - ge[d][0], g[1] - ge[d][1]);
                semi += w * (a * a + b * b);
            }
            l2 += w * pt;
            linf = linf.max(sqrt(pt));
        }
        for q in 0..r.nodal.len() {
            let x = space.map_point(e, r.nodal.points[q]);
            let ue = exact(x);
            let mut pt = 0.0;
            for d in 0..D {
                let ev = local[d][q] - ue[d];
                pt += ev * ev;
            }
            linf = linf.max(sqrt(pt));
        }
    }
    ErrorNorms {
        l2: sqrt(l2),
        h1_semi: sqrt(semi),
        h1: sqrt(l2 + semi),
        linf,
    }
}

pub fn error_norms(
    space: &FeSpace,
    field: &[f64],
    exact: impl Fn([f64; 2]) -> f64,
    exact_grad: impl Fn([f64; 2]) -> [f64; 2],
) -> ErrorNorms {
    vector_error_norms::<1>(space, [field], |x| [exact(x)], |x| [exact_grad(x)])
}

pub fn error_norm(
    space: &FeSpace,
    field: &FieldVector,
    exact: impl Fn([f64; 2]) -> f64,
    exact_grad: impl Fn([f64; 2]) -> [f64; 2],
    kind: NormKind,
) -> f64 {
    error_norms(space, field, exact, exact_grad).get(kind)
}

/// `∫_Ω f` by element quadrature.
pub fn integrate(space: &FeSpace, f: impl Fn([f64; 2]) -> f64) -> f64 {
    let r = space.reference();
    let (_, det) = space.jacobian();
    let mut s = 0.0;
    for e in 0..space.mesh().num_elements() {
        for q in 0..r.volume.len() {
            s += r.volume.weights[q] * det * f(space.map_point(e, r.volume.points[q]));
        }
    }
    s
}

/// Largest Euclidean magnitude of a vector field sampled at each element's
/// quadrature and support points, per element.
pub fn element_max_magnitude(space: &FeSpace, ux: &[f64], uy: &[f64]) -> Vec<f64> {
    let r = space.reference();
    let n = r.n_local();
    let (jinv, _) = space.jacobian();
    let mut lx = vec![0.0; n];
    let mut ly = vec![0.0; n];
    let mut out = Vec::with_capacity(space.mesh().num_elements());
    for e in 0..space.mesh().num_elements() {
        space.gather(e, ux, &mut lx);
        space.gather(e, uy, &mut ly);
        let mut m: f64 = 0.0;
        for q in 0..r.volume.len() {
            let (a, _) = eval_at(&r.volume, n, q, &lx, jinv);
            let (b, _) = eval_at(&r.volume, n, q, &ly, jinv);
            m = m.max(hypot(a, b));
        }
        for i in 0..n {
            m = m.max(hypot(lx[i], ly[i]));
        }
        out.push(m);
    }
    out
}
