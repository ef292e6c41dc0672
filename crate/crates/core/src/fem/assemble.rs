//! Global matrices by element quadrature.
//!
//! Every cell of a structured mesh has the same shape, so each local matrix
//! is integrated once and scattered into all elements.

use alloc::vec;
use alloc::vec::Vec;

use super::space::FeSpace;
use super::sparse::CsrMatrix;

fn scatter(space: &FeSpace, local: &[f64]) -> CsrMatrix {
    let n = space.n_local();
    let mut m = CsrMatrix::zeros(space.pattern().clone());
    for e in 0..space.mesh().num_elements() {
        let dofs = space.element_dofs(e);
        for i in 0..n {
            for j in 0..n {
                m.add(dofs[i], dofs[j], local[i * n + j]);
            }
        }
    }
    m
}

/// Local matrix `∫_K a(φ_i, φ_j)` with `a` given pointwise in terms of the
/// shape values and physical gradients.
fn local_matrix(space: &FeSpace, kernel: impl Fn(f64, [f64; 2], f64, [f64; 2]) -> f64) -> Vec<f64> {
    let r = space.reference();
    let n = r.n_local();
    let (jinv, det) = space.jacobian();
    let tab = &r.volume;
    let mut local = vec![0.0; n * n];
    for q in 0..tab.len() {
        let w = tab.weights[q] * det;
        let vals = &tab.values[q * n..(q + 1) * n];
        let grads = &tab.grads[q * n..(q + 1) * n];
        for i in 0..n {
            let gi = [grads[i][0] * jinv[0], grads[i][1] * jinv[1]];
            for j in 0..n {
                let gj = [grads[j][0] * jinv[0], grads[j][1] * jinv[1]];
                local[i * n + j] += w * kernel(vals[i], gi, vals[j], gj);
            }
        }
    }
    local
}

/// `m_ij = (η_i, η_j)`
pub fn assemble_mass(space: &FeSpace) -> CsrMatrix {
    scatter(space, &local_matrix(space, |vi, _, vj, _| vi * vj))
}

/// `a_ij = (∇η_i, ∇η_j)`
pub fn assemble_stiffness(space: &FeSpace) -> CsrMatrix {
    scatter(
        space,
        &local_matrix(space, |_, gi, _, gj| gi[0] * gj[0] + gi[1] * gj[1]),
    )
}

/// `c_ij = (η_i, ∂η_j/∂x_d)`: row `i` of `C_d v` is the load of `∂v/∂x_d`
/// against `η_i`.
pub fn assemble_gradient(space: &FeSpace, d: usize) -> CsrMatrix {
    scatter(space, &local_matrix(space, |vi, _, _, gj| vi * gj[d]))
}
