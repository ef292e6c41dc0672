//! Compressed sparse row storage. Matrices assembled on the same space share
//! one [`SparsityPattern`], so linear combinations are elementwise on values.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityPattern {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
}

impl SparsityPattern {
    /// Builds a pattern from per-row column lists (sorted and deduplicated here).
    pub fn from_rows(ncols: usize, mut rows: Vec<Vec<u32>>) -> Self {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::new();
        for r in rows.iter_mut() {
            r.sort_unstable();
            r.dedup();
            col_indices.extend_from_slice(r);
            row_offsets.push(col_indices.len());
        }
        Self {
            nrows: rows.len(),
            ncols,
            row_offsets,
            col_indices,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_indices
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.col_indices[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    /// Position of `(i, j)` in the value array.
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let row = self.row(i);
        row.binary_search(&(j as u32))
            .ok()
            .map(|p| self.row_offsets[i] + p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pattern: Arc<SparsityPattern>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(pattern: Arc<SparsityPattern>) -> Self {
        let values = vec![0.0; pattern.nnz()];
        Self { pattern, values }
    }

    pub fn from_parts(pattern: Arc<SparsityPattern>, values: Vec<f64>) -> Self {
        assert_eq!(pattern.nnz(), values.len());
        Self { pattern, values }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![i as u32]).collect();
        let pattern = Arc::new(SparsityPattern::from_rows(n, rows));
        Self {
            pattern,
            values: vec![1.0; n],
        }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); nrows];
        for &(i, j, _) in triplets {
            rows[i].push(j as u32);
        }
        let pattern = Arc::new(SparsityPattern::from_rows(ncols, rows));
        let mut m = Self::zeros(pattern);
        for &(i, j, v) in triplets {
            m.add(i, j, v);
        }
        m
    }

    pub fn pattern(&self) -> &Arc<SparsityPattern> {
        &self.pattern
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn nrows(&self) -> usize {
        self.pattern.nrows
    }

    pub fn ncols(&self) -> usize {
        self.pattern.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern.find(i, j).map_or(0.0, |p| self.values[p])
    }

    /// Panics if `(i, j)` is outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self
            .pattern
            .find(i, j)
            .expect("entry outside sparsity pattern");
        self.values[p] += v;
    }

    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.pattern.row_offsets[i], self.pattern.row_offsets[i + 1]);
        self.pattern.col_indices[s..e]
            .iter()
            .zip(&self.values[s..e])
            .map(|(c, v)| (*c as usize, *v))
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols());
        debug_assert_eq!(y.len(), self.nrows());
        let offs = &self.pattern.row_offsets;
        let cols = &self.pattern.col_indices;
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (offs[i], offs[i + 1]);
            let mut acc = 0.0;
            for (c, v) in cols[s..e].iter().zip(&self.values[s..e]) {
                acc += v * x[*c as usize];
            }
            *yi = acc;
        }
    }

    /// `y += alpha * A x`
    pub fn matvec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        let offs = &self.pattern.row_offsets;
        let cols = &self.pattern.col_indices;
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (offs[i], offs[i + 1]);
            let mut acc = 0.0;
            for (c, v) in cols[s..e].iter().zip(&self.values[s..e]) {
                acc += v * x[*c as usize];
            }
            *yi += alpha * acc;
        }
    }

    /// `y = A^T x`
    pub fn transpose_matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows());
        debug_assert_eq!(y.len(), self.ncols());
        y.iter_mut().for_each(|v| *v = 0.0);
        let offs = &self.pattern.row_offsets;
        let cols = &self.pattern.col_indices;
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            for p in offs[i]..offs[i + 1] {
                y[cols[p] as usize] += self.values[p] * xi;
            }
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows()).map(|i| self.get(i, i)).collect()
    }

    /// `alpha * self + beta * other`; both must share one pattern.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> CsrMatrix {
        assert!(
            Arc::ptr_eq(&self.pattern, &other.pattern) || self.pattern == other.pattern,
            "linear combination needs identical sparsity patterns"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        CsrMatrix {
            pattern: self.pattern.clone(),
            values,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest `|a_ij - a_ji|` over the pattern.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows() {
            for (j, v) in self.row_entries(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Dense row-major copy; only for small matrices.
    pub fn to_dense(&self) -> Vec<f64> {
        let (n, m) = (self.nrows(), self.ncols());
        let mut d = vec![0.0; n * m];
        for i in 0..n {
            for (j, v) in self.row_entries(i) {
                d[i * m + j] = v;
            }
        }
        d
    }

    /// Symmetric Dirichlet elimination: rows and columns of `fixed` DoFs are
    /// zeroed and their diagonal entries kept.
    pub fn eliminate_dofs(&self, is_fixed: &[bool]) -> CsrMatrix {
        let mut out = self.clone();
        let offs = &self.pattern.row_offsets;
        let cols = &self.pattern.col_indices;
        for i in 0..self.nrows() {
            for p in offs[i]..offs[i + 1] {
                let j = cols[p] as usize;
                if (is_fixed[i] || is_fixed[j]) && i != j {
                    out.values[p] = 0.0;
                }
            }
        }
        out
    }
}
