use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::CsrMatrix;
use crate::math::{axpy, dot, norm2};

/// A symmetric positive (semi)definite approximate inverse.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

#[derive(Debug, Clone)]
pub struct JacobiPreconditioner {
    inv_diag: Vec<f64>,
}

impl JacobiPreconditioner {
    pub fn new(a: &CsrMatrix) -> Self {
        let inv_diag = a
            .diagonal()
            .into_iter()
            .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        Self { inv_diag }
    }
}

impl Preconditioner for JacobiPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
    }
}

/// Removes the Euclidean mean from the inner preconditioner's output, keeping
/// iterates of a Neumann problem in the complement of the constants.
pub struct MeanFreePreconditioner<'a, P: ?Sized>(pub &'a P);

impl<P: Preconditioner + ?Sized> Preconditioner for MeanFreePreconditioner<'_, P> {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.0.apply(r, z);
        remove_mean(z);
    }
}

pub fn remove_mean(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgSettings {
    pub rel_tol: f64,
    /// Absolute residual floor.
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for CgSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    /// `‖b − Ax‖ / ‖b‖` (0 when `b = 0`).
    pub relative_residual: f64,
    pub converged: bool,
}

/// Preconditioned conjugate gradients. `x` holds the initial guess on entry
/// and the best iterate on return; non-convergence is reported, not an error.
pub fn cg_solve(
    a: &CsrMatrix,
    b: &[f64],
    precond: &(impl Preconditioner + ?Sized),
    settings: &CgSettings,
    x: &mut [f64],
) -> Result<SolverReport> {
    let n = b.len();
    if a.nrows() != n || a.ncols() != n || x.len() != n {
        return Err(Error::InvalidInput("dimension mismatch in cg_solve".into()));
    }
    if !a.is_finite() || !b.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput(
            "non-finite matrix or right-hand side".into(),
        ));
    }
    if !x.iter().all(|v| v.is_finite()) {
        x.iter_mut().for_each(|v| *v = 0.0);
    }
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolverReport {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        });
    }
    let target = (settings.rel_tol * bnorm).max(settings.abs_tol);

    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut rnorm = norm2(&r);
    if rnorm <= target {
        return Ok(SolverReport {
            iterations: 0,
            relative_residual: rnorm / bnorm,
            converged: true,
        });
    }

    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);

    for it in 1..=settings.max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NumericalBreakdown {
                solver: "conjugate gradient",
                iteration: it,
            });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        rnorm = norm2(&r);
        if rnorm <= target {
            return Ok(SolverReport {
                iterations: it,
                relative_residual: rnorm / bnorm,
                converged: true,
            });
        }
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Ok(SolverReport {
        iterations: settings.max_iter,
        relative_residual: rnorm / bnorm,
        converged: false,
    })
}

/// Solves a pure-Neumann problem `A x = b` whose nullspace is the constants.
///
/// `b` is first made compatible (Euclidean mean removed), CG runs in the
/// complement of the constants, and the result is shifted so that
/// `Σ_j mass_weights_j x_j = 0` with `mass_weights = M · 1`.
pub fn neumann_solve(
    a: &CsrMatrix,
    b: &[f64],
    mass_weights: &[f64],
    precond: &(impl Preconditioner + ?Sized),
    settings: &CgSettings,
    x: &mut [f64],
) -> Result<SolverReport> {
    let mut rhs = b.to_vec();
    remove_mean(&mut rhs);
    let report = cg_solve(a, &rhs, &MeanFreePreconditioner(precond), settings, x)?;
    remove_weighted_mean(x, mass_weights);
    Ok(report)
}

/// Shifts `x` by a constant so that `Σ w_j x_j = 0`.
pub fn remove_weighted_mean(x: &mut [f64], weights: &[f64]) {
    let wsum: f64 = weights.iter().sum();
    if wsum == 0.0 {
        return;
    }
    let shift = dot(weights, x) / wsum;
    x.iter_mut().for_each(|v| *v -= shift);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    /// Gaussian elimination with partial pivoting.
    fn dense_solve(n: usize, mut a: Vec<f64>, mut b: Vec<f64>) -> Vec<f64> {
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
                .unwrap();
            for k in 0..n {
                a.swap(c * n + k, p * n + k);
            }
            b.swap(c, p);
            for r in (c + 1)..n {
                let f = a[r * n + c] / a[c * n + c];
                for k in c..n {
                    a[r * n + k] -= f * a[c * n + k];
                }
                b[r] -= f * b[c];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = ((r + 1)..n).map(|k| a[r * n + k] * x[k]).sum();
            x[r] = (b[r] - s) / a[r * n + r];
        }
        x
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = CsrMatrix::identity(5);
        let b = [1.0, -2.0, 3.0, 0.5, 7.0];
        let mut x = [0.0; 5];
        let rep = cg_solve(
            &a,
            &b,
            &IdentityPreconditioner,
            &CgSettings::default(),
            &mut x,
        )
        .unwrap();
        assert!(rep.converged && rep.iterations <= 1);
        assert_eq!(x, b);
    }

    #[test]
    fn small_tridiagonal_matches_direct_solve() {
        let a = tridiag(3);
        let b = [1.0, 0.0, 0.0];
        let expect = dense_solve(3, a.to_dense(), b.to_vec());
        let mut x = [0.0; 3];
        cg_solve(
            &a,
            &b,
            &IdentityPreconditioner,
            &CgSettings::default(),
            &mut x,
        )
        .unwrap();
        for i in 0..3 {
            assert!((x[i] - expect[i]).abs() < 1e-14);
        }
        assert!(
            (x[0] - 0.75).abs() < 1e-14
                && (x[1] - 0.5).abs() < 1e-14
                && (x[2] - 0.25).abs() < 1e-14
        );
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let a = tridiag(4);
        let mut x = [1.0; 4];
        let rep = cg_solve(
            &a,
            &[0.0; 4],
            &IdentityPreconditioner,
            &CgSettings::default(),
            &mut x,
        )
        .unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(x, [0.0; 4]);
    }

    #[test]
    fn rejects_non_finite() {
        let a = tridiag(2);
        let mut x = [0.0; 2];
        let err = cg_solve(
            &a,
            &[f64::NAN, 1.0],
            &IdentityPreconditioner,
            &CgSettings::default(),
            &mut x,
        );
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn indefinite_matrix_breaks_down() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        let mut x = [0.0; 2];
        let err = cg_solve(
            &a,
            &[0.0, 1.0],
            &IdentityPreconditioner,
            &CgSettings::default(),
            &mut x,
        );
        assert!(matches!(err, Err(Error::NumericalBreakdown { .. })));
    }

    #[test]
    fn finite_termination_on_small_spd() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for n in 2..=10 {
            // B^T B + I
            let bm: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut t = Vec::new();
            let mut dense = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = if i == j { 1.0 } else { 0.0 };
                    for k in 0..n {
                        s += bm[k * n + i] * bm[k * n + j];
                    }
                    dense[i * n + j] = s;
                    t.push((i, j, s));
                }
            }
            let a = CsrMatrix::from_triplets(n, n, &t);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut x = vec![0.0; n];
            let settings = CgSettings {
                rel_tol: 1e-10,
                abs_tol: 0.0,
                max_iter: n,
            };
            let rep = cg_solve(&a, &b, &IdentityPreconditioner, &settings, &mut x).unwrap();
            assert!(rep.converged, "n={n}: {rep:?}");
            let expect = dense_solve(n, dense, b);
            for i in 0..n {
                assert!((x[i] - expect[i]).abs() < 1e-8);
            }
        }
    }

    fn path_laplacian() -> CsrMatrix {
        CsrMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, 1.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 1, 2.0),
                (1, 2, -1.0),
                (2, 1, -1.0),
                (2, 2, 1.0),
            ],
        )
    }

    /// Pseudoinverse of a singular symmetric matrix with constant nullspace:
    /// `A^+ = (A + J/n)^{-1} − J/n` where `J` is the all-ones matrix.
    fn pinv_apply(a: &CsrMatrix, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut d = a.to_dense();
        d.iter_mut().for_each(|v| *v += 1.0 / n as f64);
        let mut x = dense_solve(n, d, b.to_vec());
        let s: f64 = b.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|v| *v -= s);
        x
    }

    #[test]
    fn neumann_path_graph_matches_pseudoinverse() {
        let a = path_laplacian();
        let b = [1.0, 0.0, -1.0];
        let expect = pinv_apply(&a, &b);
        let mut x = [0.0; 3];
        let w = [1.0; 3];
        let rep = neumann_solve(
            &a,
            &b,
            &w,
            &IdentityPreconditioner,
            &CgSettings::default(),
            &mut x,
        )
        .unwrap();
        assert!(rep.converged);
        for i in 0..3 {
            assert!((x[i] - expect[i]).abs() < 1e-13);
        }
        assert!((x[0] - 1.0).abs() < 1e-13 && x[1].abs() < 1e-13 && (x[2] + 1.0).abs() < 1e-13);
    }

    #[test]
    fn neumann_constant_rhs_gives_zero() {
        let a = path_laplacian();
        let mut x = [0.3; 3];
        neumann_solve(
            &a,
            &[2.0; 3],
            &[1.0; 3],
            &IdentityPreconditioner,
            &CgSettings::default(),
            &mut x,
        )
        .unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn neumann_shift_invariance_and_weighted_mean() {
        let a = tridiag(6).linear_combination(1.0, &tridiag(6), 0.0);
        // turn it into a Neumann Laplacian
        let mut t = Vec::new();
        for i in 0..6 {
            for (j, v) in a.row_entries(i) {
                t.push((i, j, v));
            }
        }
        t.push((0, 0, -1.0));
        t.push((5, 5, -1.0));
        let a = CsrMatrix::from_triplets(6, 6, &t);
        let w = [0.5, 1.0, 1.0, 1.0, 1.0, 0.5];
        let b = [1.0, 2.0, -0.5, 0.0, -1.0, 0.25];
        let mut x1 = [0.0; 6];
        neumann_solve(
            &a,
            &b,
            &w,
            &JacobiPreconditioner::new(&a),
            &CgSettings::default(),
            &mut x1,
        )
        .unwrap();
        let b2: Vec<f64> = b.iter().map(|v| v + 3.7).collect();
        let mut x2 = [0.0; 6];
        neumann_solve(
            &a,
            &b2,
            &w,
            &JacobiPreconditioner::new(&a),
            &CgSettings::default(),
            &mut x2,
        )
        .unwrap();
        for i in 0..6 {
            assert!((x1[i] - x2[i]).abs() < 1e-12);
        }
        let wm: f64 = w.iter().zip(&x1).map(|(a, b)| a * b).sum();
        let xn = x1.iter().map(|v| v * v).sum::<f64>().sqrt();
        let wn = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(wm.abs() <= 1e-10 * xn * wn);
    }
}
