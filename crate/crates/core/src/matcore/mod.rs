//! Symmetric matrices, random ensembles and deterministic transforms.

mod ensemble;
mod io;

pub use ensemble::{
    generate, generate_diag_dominant, positive_off_diagonal_fraction, DensityMode,
    DiagDominantSpec, Distribution, EnsembleSpec, RowScale, INVERSE_N_REFERENCE_DIM,
};
pub use io::{parse_matrix, read_matrix, write_matrix};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Matrices above this dimension are always stored sparse, and the dense
/// eigen-oracle refuses them.
pub const DENSE_DIM_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("invalid ensemble: {0}")]
    InvalidSpec(String),
    #[error("degenerate ensemble: off-diagonal graph splits into {components} components")]
    DegenerateEnsemble { components: usize },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: malformed entry: {reason}")]
    MalformedEntry { line: usize, reason: String },
    #[error("line {line}: index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange {
        line: usize,
        row: usize,
        col: usize,
        dim: usize,
    },
    #[error("line {line}: duplicate entry ({row}, {col})")]
    DuplicateEntry { line: usize, row: usize, col: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MatrixError {
    fn from(e: std::io::Error) -> Self {
        MatrixError::Io(e.to_string())
    }
}

/// One stored element of a sparse matrix, always with `row >= col`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    /// Packed lower triangle, row-major: element `(i, j)` with `i >= j` sits
    /// at `i * (i + 1) / 2 + j`.
    Dense(Vec<f64>),
    /// Lower-triangle coordinates sorted by `(row, col)`, no duplicates and
    /// no explicit zeros.
    Sparse(Vec<Entry>),
}

/// Real symmetric matrix. Only the lower triangle is stored.
///
/// Values are immutable once built; every transform returns a new matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    storage: Storage,
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    debug_assert!(i >= j);
    i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Result<Self, MatrixError> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            storage: Storage::Dense(vec![0.0; dim * (dim + 1) / 2]),
        })
    }

    /// Builds a dense matrix from its packed lower triangle.
    pub fn from_packed_lower(dim: usize, values: Vec<f64>) -> Result<Self, MatrixError> {
        check_dim(dim)?;
        if values.len() != dim * (dim + 1) / 2 {
            return Err(MatrixError::InvalidSpec(format!(
                "packed lower triangle of dimension {dim} needs {} values, got {}",
                dim * (dim + 1) / 2,
                values.len()
            )));
        }
        Ok(Self {
            dim,
            storage: Storage::Dense(values),
        })
    }

    /// Builds a dense matrix from row-major full storage; only the lower
    /// triangle is read.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut packed = Vec::with_capacity(dim * (dim + 1) / 2);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(MatrixError::InvalidSpec(format!(
                    "row {i} has {} columns, expected {dim}",
                    row.len()
                )));
            }
            packed.extend_from_slice(&row[..=i]);
        }
        Self::from_packed_lower(dim, packed)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self, MatrixError> {
        let mut m = Self::zeros(diag.len())?;
        if let Storage::Dense(v) = &mut m.storage {
            for (i, &d) in diag.iter().enumerate() {
                v[packed_index(i, i)] = d;
            }
        }
        Ok(m)
    }

    /// Builds a sparse matrix from coordinates in either triangle. Entries
    /// addressing the same element are summed; zeros are dropped.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, MatrixError> {
        check_dim(dim)?;
        let mut entries = Vec::new();
        for (r, c, value) in triplets {
            let (row, col) = if r >= c { (r, c) } else { (c, r) };
            if row >= dim {
                return Err(MatrixError::IndexOutOfRange {
                    line: 0,
                    row,
                    col,
                    dim,
                });
            }
            entries.push(Entry { row, col, value });
        }
        entries.sort_by_key(|e| (e.row, e.col));
        let mut merged: Vec<Entry> = Vec::with_capacity(entries.len());
        for e in entries {
            match merged.last_mut() {
                Some(last) if last.row == e.row && last.col == e.col => last.value += e.value,
                _ => merged.push(e),
            }
        }
        merged.retain(|e| e.value != 0.0);
        Ok(Self {
            dim,
            storage: Storage::Sparse(merged),
        })
    }

    /// Sparse construction from entries already sorted, unique and nonzero.
    pub(crate) fn from_sorted_entries(dim: usize, entries: Vec<Entry>) -> Self {
        debug_assert!(entries
            .windows(2)
            .all(|w| (w[0].row, w[0].col) < (w[1].row, w[1].col)));
        debug_assert!(entries.iter().all(|e| e.value != 0.0 && e.row >= e.col));
        Self {
            dim,
            storage: Storage::Sparse(entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Number of stored lower-triangle elements.
    pub fn stored_len(&self) -> usize {
        match &self.storage {
            Storage::Dense(v) => v.len(),
            Storage::Sparse(e) => e.len(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.dim && j < self.dim, "index out of bounds");
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        match &self.storage {
            Storage::Dense(v) => v[packed_index(r, c)],
            Storage::Sparse(entries) => entries
                .binary_search_by_key(&(r, c), |e| (e.row, e.col))
                .map(|k| entries[k].value)
                .unwrap_or(0.0),
        }
    }

    /// Visits every stored lower-triangle element as `(row, col, value)`,
    /// in row-major order. Dense storage also yields zeros.
    pub fn for_each_lower(&self, mut f: impl FnMut(usize, usize, f64)) {
        match &self.storage {
            Storage::Dense(v) => {
                let mut k = 0;
                for i in 0..self.dim {
                    for j in 0..=i {
                        f(i, j, v[k]);
                        k += 1;
                    }
                }
            }
            Storage::Sparse(entries) => {
                for e in entries {
                    f(e.row, e.col, e.value);
                }
            }
        }
    }

    /// Element-wise map over stored values, keeping the storage pattern.
    /// Zeros produced in sparse storage are dropped.
    fn map_lower(&self, f: impl Fn(usize, usize, f64) -> f64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(v) => {
                let mut out = Vec::with_capacity(v.len());
                let mut k = 0;
                for i in 0..self.dim {
                    for j in 0..=i {
                        out.push(f(i, j, v[k]));
                        k += 1;
                    }
                }
                Storage::Dense(out)
            }
            Storage::Sparse(entries) => Storage::Sparse(
                entries
                    .iter()
                    .map(|e| Entry {
                        value: f(e.row, e.col, e.value),
                        ..*e
                    })
                    .filter(|e| e.value != 0.0)
                    .collect(),
            ),
        };
        Self {
            dim: self.dim,
            storage,
        }
    }

    /// `y = H x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.fill(0.0);
        match &self.storage {
            Storage::Dense(v) => {
                let mut k = 0;
                for i in 0..self.dim {
                    let row = &v[k..k + i + 1];
                    let xi = x[i];
                    let mut acc = 0.0;
                    for (j, &a) in row[..i].iter().enumerate() {
                        acc += a * x[j];
                        y[j] += a * xi;
                    }
                    y[i] += acc + row[i] * xi;
                    k += i + 1;
                }
            }
            Storage::Sparse(entries) => {
                for e in entries {
                    y[e.row] += e.value * x[e.col];
                    if e.row != e.col {
                        y[e.col] += e.value * x[e.row];
                    }
                }
            }
        }
    }

    /// Raw row sums `S_i = Σ_j H_ij`, diagonal included.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dim];
        self.for_each_lower(|i, j, v| {
            s[i] += v;
            if i != j {
                s[j] += v;
            }
        });
        s
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        self.for_each_lower(|i, j, v| {
            if i == j {
                d[i] = v;
            }
        });
        d
    }

    /// Adds `d` to every diagonal element.
    pub fn shift_diagonal(&self, d: f64) -> Self {
        if d == 0.0 {
            return self.clone();
        }
        match &self.storage {
            Storage::Dense(_) => self.map_lower(|i, j, v| if i == j { v + d } else { v }),
            Storage::Sparse(entries) => {
                // Diagonal elements may be absent; merge them in row order.
                let mut out = Vec::with_capacity(entries.len() + self.dim);
                let mut it = entries.iter().peekable();
                for i in 0..self.dim {
                    let mut diag = 0.0;
                    while let Some(e) = it.next_if(|e| e.row == i) {
                        if e.col == i {
                            diag = e.value;
                        } else {
                            out.push(*e);
                        }
                    }
                    let value = diag + d;
                    if value != 0.0 {
                        out.push(Entry {
                            row: i,
                            col: i,
                            value,
                        });
                    }
                }
                Self::from_sorted_entries(self.dim, out)
            }
        }
    }

    /// Multiplies every element by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        self.map_lower(|_, _, v| c * v)
    }

    /// Multiplies row `r` and column `r` by `f`; element `(r, r)` is scaled
    /// once. Applying several rows multiplies element `(r1, r2)` by `f1·f2`.
    pub fn scale_rows(&self, scales: &[RowScale]) -> Result<Self, MatrixError> {
        let mut factor = vec![1.0; self.dim];
        for s in scales {
            if s.row >= self.dim {
                return Err(MatrixError::InvalidSpec(format!(
                    "row scale index {} out of range for dimension {}",
                    s.row, self.dim
                )));
            }
            factor[s.row] *= s.factor;
        }
        Ok(self.map_lower(|i, j, v| {
            if i == j {
                v * factor[i]
            } else {
                v * factor[i] * factor[j]
            }
        }))
    }

    /// Simultaneous row/column permutation: element `(i, j)` of the result
    /// is element `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, MatrixError> {
        if perm.len() != self.dim {
            return Err(MatrixError::InvalidSpec(
                "permutation length mismatch".into(),
            ));
        }
        let mut inverse = vec![usize::MAX; self.dim];
        for (new, &old) in perm.iter().enumerate() {
            if old >= self.dim || inverse[old] != usize::MAX {
                return Err(MatrixError::InvalidSpec("not a permutation".into()));
            }
            inverse[old] = new;
        }
        match &self.storage {
            Storage::Dense(_) => {
                let mut packed = Vec::with_capacity(self.dim * (self.dim + 1) / 2);
                for i in 0..self.dim {
                    for j in 0..=i {
                        packed.push(self.get(perm[i], perm[j]));
                    }
                }
                Self::from_packed_lower(self.dim, packed)
            }
            Storage::Sparse(entries) => Self::from_triplets(
                self.dim,
                entries
                    .iter()
                    .map(|e| (inverse[e.row], inverse[e.col], e.value)),
            ),
        }
    }

    /// Same matrix in the other storage layout.
    pub fn to_sparse(&self) -> Self {
        match &self.storage {
            Storage::Sparse(_) => self.clone(),
            Storage::Dense(_) => {
                let mut entries = Vec::new();
                self.for_each_lower(|row, col, value| {
                    if value != 0.0 {
                        entries.push(Entry { row, col, value });
                    }
                });
                Self::from_sorted_entries(self.dim, entries)
            }
        }
    }

    pub fn to_dense(&self) -> Self {
        match &self.storage {
            Storage::Dense(_) => self.clone(),
            Storage::Sparse(entries) => {
                let mut packed = vec![0.0; self.dim * (self.dim + 1) / 2];
                for e in entries {
                    packed[packed_index(e.row, e.col)] = e.value;
                }
                Self {
                    dim: self.dim,
                    storage: Storage::Dense(packed),
                }
            }
        }
    }

    /// Full row-major copy.
    pub fn to_full(&self) -> Vec<f64> {
        let n = self.dim;
        let mut full = vec![0.0; n * n];
        self.for_each_lower(|i, j, v| {
            full[i * n + j] = v;
            full[j * n + i] = v;
        });
        full
    }

    /// True when both matrices hold the same values, whatever the layout.
    pub fn same_values(&self, other: &Self) -> bool {
        self.dim == other.dim && self.to_dense().storage == other.to_dense().storage
    }

    /// Largest off-diagonal element, or `None` when all off-diagonals are zero.
    pub fn max_off_diagonal(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        self.for_each_lower(|i, j, v| {
            if i != j && v != 0.0 {
                best = Some(best.map_or(v, |b| b.max(v)));
            }
        });
        best
    }

    /// Connected components of the graph whose edges are the nonzero
    /// off-diagonal elements.
    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::<usize>::new(self.dim);
        let mut components = self.dim;
        self.for_each_lower(|i, j, v| {
            if i != j && v != 0.0 && uf.union(i, j) {
                components -= 1;
            }
        });
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        self.for_each_lower(|i, j, v| acc += if i == j { v * v } else { 2.0 * v * v });
        acc.sqrt()
    }
}

fn check_dim(dim: usize) -> Result<(), MatrixError> {
    if dim < 2 {
        Err(MatrixError::DimensionTooSmall(dim))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> SymMatrix {
        SymMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap()
    }

    #[test]
    fn row_sums_of_small_matrices() {
        assert_eq!(pair().row_sums(), vec![-1.0, -1.0]);
        let d = SymMatrix::from_diagonal(&[1.5, -2.0, 3.0]).unwrap();
        assert_eq!(d.row_sums(), vec![1.5, -2.0, 3.0]);
    }

    #[test]
    fn shift_zero_matrix_gives_scaled_identity() {
        let z = SymMatrix::zeros(3).unwrap().shift_diagonal(5.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(z.get(i, j), if i == j { 5.0 } else { 0.0 });
            }
        }
        let s = pair().to_sparse().shift_diagonal(5.0);
        assert!(s.is_sparse());
        assert_eq!(s.get(1, 1), 5.0);
        assert_eq!(s.get(1, 0), -1.0);
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let m = pair();
        assert_eq!(m.shift_diagonal(0.0), m);
    }

    #[test]
    fn sparse_shift_drops_cancelled_diagonal() {
        let m = SymMatrix::from_triplets(3, [(0, 0, 2.0), (1, 0, -1.0), (2, 1, -1.0)]).unwrap();
        let s = m.shift_diagonal(-2.0);
        assert_eq!(s.stored_len(), 4);
        assert_eq!(s.get(0, 0), 0.0);
        assert_eq!(s.get(2, 2), -2.0);
        assert!(s.shift_diagonal(2.0).same_values(&m));
    }

    #[test]
    fn row_scaling_scales_row_and_column() {
        let m = SymMatrix::from_rows(&[
            vec![-1.0, -2.0, -3.0],
            vec![-2.0, -4.0, -5.0],
            vec![-3.0, -5.0, -6.0],
        ])
        .unwrap();
        let s = m.scale_rows(&[RowScale::new(1, 10.0)]).unwrap();
        assert_eq!(s.get(1, 0), -20.0);
        assert_eq!(s.get(0, 1), -20.0);
        assert_eq!(s.get(1, 1), -40.0);
        assert_eq!(s.get(2, 1), -50.0);
        assert_eq!(s.get(2, 0), -3.0);
        assert!(m.scale_rows(&[RowScale::new(3, 2.0)]).is_err());
    }

    #[test]
    fn components_and_connectivity() {
        assert!(pair().is_connected());
        let d = SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d.component_count(), 3);
        let chain =
            SymMatrix::from_triplets(4, [(1, 0, -1.0), (3, 2, -1.0), (2, 1, -0.5)]).unwrap();
        assert!(chain.is_connected());
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = SymMatrix::from_triplets(3, [(0, 1, -1.0), (1, 0, -1.0), (2, 2, 0.0)]).unwrap();
        assert_eq!(m.stored_len(), 1);
        assert_eq!(m.get(0, 1), -2.0);
        assert!(SymMatrix::from_triplets(2, [(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn permutation_relabels_elements() {
        let m = SymMatrix::from_rows(&[
            vec![1.0, -2.0, -3.0],
            vec![-2.0, 4.0, -5.0],
            vec![-3.0, -5.0, 6.0],
        ])
        .unwrap();
        let perm = [2, 0, 1];
        for p in [
            m.permuted(&perm).unwrap(),
            m.to_sparse().permuted(&perm).unwrap(),
        ] {
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(p.get(i, j), m.get(perm[i], perm[j]));
                }
            }
        }
        assert!(m.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn rejects_tiny_dimensions() {
        assert_eq!(SymMatrix::zeros(1), Err(MatrixError::DimensionTooSmall(1)));
    }
}
