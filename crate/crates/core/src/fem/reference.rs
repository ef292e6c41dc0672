//! Tensor-product Lagrange elements on the unit reference square.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{cos, sqrt, PI};

pub const MAX_DEGREE: usize = 4;

pub fn check_degree(k: usize) -> Result<()> {
    if (1..=MAX_DEGREE).contains(&k) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "polynomial degree must be in 1..={MAX_DEGREE}, got {k}"
        )))
    }
}

/// Gauss-Lobatto points on [0, 1] for degree `k`.
pub fn lobatto_nodes(k: usize) -> Result<Vec<f64>> {
    check_degree(k)?;
    Ok(match k {
        1 => vec![0.0, 1.0],
        2 => vec![0.0, 0.5, 1.0],
        3 => {
            let s = 0.5 / sqrt(5.0);
            vec![0.0, 0.5 - s, 0.5 + s, 1.0]
        }
        _ => {
            let s = 0.5 * sqrt(3.0 / 7.0);
            vec![0.0, 0.5 - s, 0.5, 0.5 + s, 1.0]
        }
    })
}

/// Legendre polynomial `P_n(x)` and its derivative on [-1, 1].
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 2..=n {
        let m = m as f64;
        let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule mapped to [0, 1]; weights sum to 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        // ascending order on [0, 1]
        let j = n - 1 - i;
        points[j] = 0.5 * (x + 1.0);
        weights[j] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (points, weights)
}

/// Values and first derivatives of the 1D Lagrange basis on `nodes` at `x`.
pub fn lagrange_1d(nodes: &[f64], x: f64) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let mut val = vec![0.0; n];
    let mut der = vec![0.0; n];
    for a in 0..n {
        let mut v = 1.0;
        for b in 0..n {
            if b != a {
                v *= (x - nodes[b]) / (nodes[a] - nodes[b]);
            }
        }
        val[a] = v;
        let mut d = 0.0;
        for m in 0..n {
            if m == a {
                continue;
            }
            let mut t = 1.0 / (nodes[a] - nodes[m]);
            for b in 0..n {
                if b != a && b != m {
                    t *= (x - nodes[b]) / (nodes[a] - nodes[b]);
                }
            }
            d += t;
        }
        der[a] = d;
    }
    (val, der)
}

/// Values and reference gradients of the `(k+1)^2` tensor-product basis at a
/// point of the reference square. Local index `i = a + (k + 1) * b`.
pub fn shape_eval(k: usize, point: [f64; 2]) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
    let nodes = lobatto_nodes(k)?;
    Ok(tensor_eval(&nodes, point))
}

fn tensor_eval(nodes: &[f64], point: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let n = nodes.len();
    let (vx, dx) = lagrange_1d(nodes, point[0]);
    let (vy, dy) = lagrange_1d(nodes, point[1]);
    let mut values = Vec::with_capacity(n * n);
    let mut grads = Vec::with_capacity(n * n);
    for b in 0..n {
        for a in 0..n {
            values.push(vx[a] * vy[b]);
            grads.push([dx[a] * vy[b], vx[a] * dy[b]]);
        }
    }
    (values, grads)
}

/// Shape values and reference gradients tabulated at a fixed point set.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// `values[q * n_local + i]`
    pub values: Vec<f64>,
    /// `grads[q * n_local + i]`, reference coordinates
    pub grads: Vec<[f64; 2]>,
}

impl Tabulation {
    fn new(nodes: &[f64], points: Vec<[f64; 2]>, weights: Vec<f64>) -> Self {
        let mut values = Vec::new();
        let mut grads = Vec::new();
        for p in &points {
            let (v, g) = tensor_eval(nodes, *p);
            values.extend(v);
            grads.extend(g);
        }
        Self {
            points,
            weights,
            values,
            grads,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub degree: usize,
    pub nodes_1d: Vec<f64>,
    pub quad_points_1d: Vec<f64>,
    pub quad_weights_1d: Vec<f64>,
    /// Tensor Gauss rule with `(k + 2)^2` points.
    pub volume: Tabulation,
    /// Per local face (left, right, bottom, top): `k + 2` Gauss points along
    /// the face, weights summing to 1.
    pub faces: [Tabulation; 4],
    /// Tabulation at the element's own support points.
    pub nodal: Tabulation,
}

impl ReferenceElement {
    pub fn new(k: usize) -> Result<Self> {
        let nodes = lobatto_nodes(k)?;
        let (qp, qw) = gauss_legendre(k + 2);

        let mut vol_pts = Vec::new();
        let mut vol_w = Vec::new();
        for (j, y) in qp.iter().enumerate() {
            for (i, x) in qp.iter().enumerate() {
                vol_pts.push([*x, *y]);
                vol_w.push(qw[i] * qw[j]);
            }
        }
        let volume = Tabulation::new(&nodes, vol_pts, vol_w);

        let face = |f: usize| {
            let pts = qp
                .iter()
                .map(|&s| match f {
                    0 => [0.0, s],
                    1 => [1.0, s],
                    2 => [s, 0.0],
                    _ => [s, 1.0],
                })
                .collect();
            Tabulation::new(&nodes, pts, qw.clone())
        };
        let faces = [face(0), face(1), face(2), face(3)];

        let mut node_pts = Vec::new();
        for y in &nodes {
            for x in &nodes {
                node_pts.push([*x, *y]);
            }
        }
        let nodal = Tabulation::new(&nodes, node_pts, vec![0.0; (k + 1) * (k + 1)]);

        Ok(Self {
            degree: k,
            nodes_1d: nodes,
            quad_points_1d: qp,
            quad_weights_1d: qw,
            volume,
            faces,
            nodal,
        })
    }

    pub fn n_local(&self) -> usize {
        (self.degree + 1) * (self.degree + 1)
    }

    /// Local indices of the `k + 1` nodes lying on local face `f`.
    pub fn face_nodes(&self, f: usize) -> Vec<usize> {
        let n = self.degree + 1;
        (0..n)
            .map(|s| match f {
                0 => s * n,
                1 => (n - 1) + s * n,
                2 => s,
                _ => s + n * (n - 1),
            })
            .collect()
    }
}
