//! Uniform quadrilateral meshes on axis-aligned rectangles and their nested
//! refinement hierarchies.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectDomain {
    pub origin: [f64; 2],
    pub extent: [f64; 2],
}

impl RectDomain {
    pub fn new(origin: [f64; 2], extent: [f64; 2]) -> Result<Self> {
        if !(extent[0] > 0.0 && extent[1] > 0.0) || !extent.iter().all(|e| e.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "domain extent must be positive, got {extent:?}"
            )));
        }
        Ok(Self { origin, extent })
    }

    pub fn unit_square() -> Self {
        Self {
            origin: [0.0, 0.0],
            extent: [1.0, 1.0],
        }
    }

    pub fn area(&self) -> f64 {
        self.extent[0] * self.extent[1]
    }
}

/// Local face numbering of a cell: left, right, bottom, top.
pub const FACE_NORMALS: [[f64; 2]; 4] = [[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFace {
    pub element: usize,
    pub local_face: usize,
    pub normal: [f64; 2],
    pub length: f64,
}

/// Elements are numbered row-major: `e = ex + nx * ey`; vertices likewise on
/// the `(nx + 1) x (ny + 1)` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredQuadMesh {
    pub domain: RectDomain,
    pub cells: [usize; 2],
    pub level: u32,
}

impl StructuredQuadMesh {
    pub fn new(domain: RectDomain, base_cells: [usize; 2], level: u32) -> Result<Self> {
        if base_cells[0] == 0 || base_cells[1] == 0 {
            return Err(Error::InvalidArgument(format!(
                "base cell counts must be at least 1, got {base_cells:?}"
            )));
        }
        let factor = 1usize
            .checked_shl(level)
            .filter(|f| *f > 0 && level < usize::BITS - 1)
            .ok_or_else(|| Error::InvalidArgument(format!("refinement level {level} too large")))?;
        let cells = [
            base_cells[0]
                .checked_mul(factor)
                .ok_or_else(|| Error::InvalidArgument("mesh too large".into()))?,
            base_cells[1]
                .checked_mul(factor)
                .ok_or_else(|| Error::InvalidArgument("mesh too large".into()))?,
        ];
        Ok(Self {
            domain,
            cells,
            level,
        })
    }

    pub fn nx(&self) -> usize {
        self.cells[0]
    }

    pub fn ny(&self) -> usize {
        self.cells[1]
    }

    pub fn num_elements(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn num_vertices(&self) -> usize {
        (self.cells[0] + 1) * (self.cells[1] + 1)
    }

    pub fn cell_size(&self) -> [f64; 2] {
        [
            self.domain.extent[0] / self.cells[0] as f64,
            self.domain.extent[1] / self.cells[1] as f64,
        ]
    }

    /// Element size used for Courant control: the longer side.
    pub fn h(&self) -> f64 {
        let [hx, hy] = self.cell_size();
        hx.max(hy)
    }

    pub fn element_index(&self, ex: usize, ey: usize) -> usize {
        ex + self.cells[0] * ey
    }

    pub fn element_coords(&self, e: usize) -> (usize, usize) {
        (e % self.cells[0], e / self.cells[0])
    }

    /// Lower-left corner of element `e`.
    pub fn element_origin(&self, e: usize) -> [f64; 2] {
        let (ex, ey) = self.element_coords(e);
        let [hx, hy] = self.cell_size();
        [
            self.domain.origin[0] + ex as f64 * hx,
            self.domain.origin[1] + ey as f64 * hy,
        ]
    }

    pub fn element_area(&self) -> f64 {
        let [hx, hy] = self.cell_size();
        hx * hy
    }

    pub fn vertex(&self, v: usize) -> [f64; 2] {
        let n = self.cells[0] + 1;
        let (ix, iy) = (v % n, v / n);
        let [hx, hy] = self.cell_size();
        [
            self.domain.origin[0] + ix as f64 * hx,
            self.domain.origin[1] + iy as f64 * hy,
        ]
    }

    /// Vertices of element `e` in counterclockwise order from the lower left.
    pub fn element_vertices(&self, e: usize) -> [usize; 4] {
        let (ex, ey) = self.element_coords(e);
        let n = self.cells[0] + 1;
        let v0 = ex + n * ey;
        [v0, v0 + 1, v0 + 1 + n, v0 + n]
    }

    /// Parent element on the next coarser level of a nested hierarchy.
    pub fn parent(&self, e: usize) -> usize {
        let (ex, ey) = self.element_coords(e);
        ex / 2 + (self.cells[0] / 2) * (ey / 2)
    }

    /// The four children of coarse element `e` on the next finer level.
    pub fn children(&self, e: usize) -> [usize; 4] {
        let (ex, ey) = self.element_coords(e);
        let fnx = 2 * self.cells[0];
        let (fx, fy) = (2 * ex, 2 * ey);
        [
            fx + fnx * fy,
            fx + 1 + fnx * fy,
            fx + fnx * (fy + 1),
            fx + 1 + fnx * (fy + 1),
        ]
    }

    /// Boundary faces ordered: left column bottom-up, right column bottom-up,
    /// bottom row left-right, top row left-right.
    pub fn boundary_faces(&self) -> Vec<BoundaryFace> {
        let [nx, ny] = self.cells;
        let [hx, hy] = self.cell_size();
        let mut faces = Vec::with_capacity(2 * (nx + ny));
        for ey in 0..ny {
            faces.push(BoundaryFace {
                element: self.element_index(0, ey),
                local_face: 0,
                normal: FACE_NORMALS[0],
                length: hy,
            });
        }
        for ey in 0..ny {
            faces.push(BoundaryFace {
                element: self.element_index(nx - 1, ey),
                local_face: 1,
                normal: FACE_NORMALS[1],
                length: hy,
            });
        }
        for ex in 0..nx {
            faces.push(BoundaryFace {
                element: self.element_index(ex, 0),
                local_face: 2,
                normal: FACE_NORMALS[2],
                length: hx,
            });
        }
        for ex in 0..nx {
            faces.push(BoundaryFace {
                element: self.element_index(ex, ny - 1),
                local_face: 3,
                normal: FACE_NORMALS[3],
                length: hx,
            });
        }
        faces
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshHierarchy {
    levels: Vec<StructuredQuadMesh>,
}

impl MeshHierarchy {
    pub fn new(domain: RectDomain, base_cells: [usize; 2], finest_level: u32) -> Result<Self> {
        let levels = (0..=finest_level)
            .map(|l| StructuredQuadMesh::new(domain, base_cells, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { levels })
    }

    /// Coarsest first.
    pub fn levels(&self) -> &[StructuredQuadMesh] {
        &self.levels
    }

    pub fn finest(&self) -> &StructuredQuadMesh {
        self.levels
            .last()
            .expect("hierarchy has at least one level")
    }

    pub fn coarsest(&self) -> &StructuredQuadMesh {
        &self.levels[0]
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(level: u32) -> StructuredQuadMesh {
        StructuredQuadMesh::new(RectDomain::unit_square(), [1, 1], level).unwrap()
    }

    #[test]
    fn refinement_counts() {
        let m = unit(3);
        assert_eq!(m.cells, [8, 8]);
        assert_eq!(m.num_elements(), 64);
        assert_eq!(m.num_vertices(), 81);
        assert_eq!(m.h(), 0.125);

        let m0 = unit(0);
        assert_eq!(m0.num_elements(), 1);

        assert_eq!(unit(6).h(), 1.0 / 64.0);
    }

    #[test]
    fn rejects_zero_cells_and_bad_domains() {
        assert!(StructuredQuadMesh::new(RectDomain::unit_square(), [0, 1], 2).is_err());
        assert!(RectDomain::new([0.0, 0.0], [1.0, 0.0]).is_err());
        assert!(RectDomain::new([0.0, 0.0], [-1.0, 1.0]).is_err());
    }

    #[test]
    fn hierarchy_levels() {
        let h = MeshHierarchy::new(RectDomain::unit_square(), [1, 1], 2).unwrap();
        let counts: Vec<_> = h.levels().iter().map(|m| m.num_elements()).collect();
        assert_eq!(counts, [1, 4, 16]);
        assert_eq!(*h.finest(), unit(2));

        let single = MeshHierarchy::new(RectDomain::unit_square(), [1, 1], 0).unwrap();
        assert_eq!(single.num_levels(), 1);

        let deep = MeshHierarchy::new(RectDomain::unit_square(), [1, 1], 6).unwrap();
        assert_eq!(deep.finest().h(), 1.0 / 64.0);
        for pair in deep.levels().windows(2) {
            assert_eq!(pair[0].cells[0] * 2, pair[1].cells[0]);
            assert_eq!(pair[0].cells[1] * 2, pair[1].cells[1]);
            assert_eq!(pair[0].domain, pair[1].domain);
        }
    }

    #[test]
    fn boundary_faces_single_cell() {
        let faces = unit(0).boundary_faces();
        let normals: Vec<_> = faces.iter().map(|f| f.normal).collect();
        assert_eq!(normals, FACE_NORMALS.to_vec());
    }

    #[test]
    fn boundary_faces_close_the_domain() {
        let m =
            StructuredQuadMesh::new(RectDomain::new([0.5, -1.0], [2.0, 3.0]).unwrap(), [1, 1], 3)
                .unwrap();
        let faces = m.boundary_faces();
        assert_eq!(faces.len(), 32);
        let mut sum = [0.0; 2];
        for f in &faces {
            sum[0] += f.length * f.normal[0];
            sum[1] += f.length * f.normal[1];
        }
        assert!(sum[0].abs() < 1e-14 && sum[1].abs() < 1e-14);
        let mut seen: Vec<_> = faces.iter().map(|f| (f.element, f.local_face)).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 32);
    }

    #[test]
    fn areas_sum_to_domain() {
        let m =
            StructuredQuadMesh::new(RectDomain::new([0.0, 0.0], [3.0, 0.7]).unwrap(), [3, 2], 2)
                .unwrap();
        let total: f64 = (0..m.num_elements()).map(|_| m.element_area()).sum();
        assert!((total - 2.1).abs() < 1e-13);
    }

    #[test]
    fn coarse_cells_are_unions_of_four_children() {
        let coarse = StructuredQuadMesh::new(RectDomain::unit_square(), [2, 3], 1).unwrap();
        let fine = StructuredQuadMesh::new(RectDomain::unit_square(), [2, 3], 2).unwrap();
        let mut owner = vec![usize::MAX; fine.num_elements()];
        for c in 0..coarse.num_elements() {
            for child in coarse.children(c) {
                assert_eq!(owner[child], usize::MAX);
                owner[child] = c;
                assert_eq!(fine.parent(child), c);
                let o = fine.element_origin(child);
                let co = coarse.element_origin(c);
                let [hx, hy] = coarse.cell_size();
                assert!(o[0] >= co[0] - 1e-15 && o[0] < co[0] + hx);
                assert!(o[1] >= co[1] - 1e-15 && o[1] < co[1] + hy);
            }
        }
        assert!(owner.iter().all(|&o| o != usize::MAX));
    }

    #[test]
    fn deterministic_layout() {
        let a = unit(4);
        let b = unit(4);
        assert_eq!(a, b);
        assert_eq!(a.element_vertices(17), b.element_vertices(17));
        assert_eq!(a.element_vertices(0), [0, 1, 18, 17]);
    }
}
