//! Chain state: column edge patterns and the sparse precision matrix with
//! its dense inverse.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, full_index};

/// Edge pattern of one column: a bit vector over the `p - 1` other
/// variables, indexed in reduced coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnModel {
    len: usize,
    size: usize,
    bits: Vec<u64>,
}

impl ColumnModel {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            size: 0,
            bits: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self> {
        let mut z = Self::empty(len);
        for &k in indices {
            if k >= len {
                return Err(Error::Index { index: k, dim: len });
            }
            z.set(k, true);
        }
        Ok(z)
    }

    /// Model whose bit `k` is bit `k` of `mask`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "mask models hold at most 64 coordinates");
        let mut z = Self::empty(len);
        if len > 0 {
            let keep = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            z.bits[0] = mask & keep;
            z.size = z.bits[0].count_ones() as usize;
        }
        z
    }

    pub fn to_mask(&self) -> u64 {
        assert!(self.len <= 64, "mask models hold at most 64 coordinates");
        self.bits.first().copied().unwrap_or(0)
    }

    /// Number of coordinates (`p - 1`).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Number of included edges `|z|₀`.
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn contains(&self, k: usize) -> bool {
        k < self.len && (self.bits[k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn set(&mut self, k: usize, on: bool) {
        assert!(k < self.len, "coordinate {k} out of range {}", self.len);
        let was = self.contains(k);
        let mask = 1u64 << (k % 64);
        if on {
            self.bits[k / 64] |= mask;
        } else {
            self.bits[k / 64] &= !mask;
        }
        match (was, on) {
            (false, true) => self.size += 1,
            (true, false) => self.size -= 1,
            _ => {}
        }
    }

    pub fn with(&self, k: usize, on: bool) -> Self {
        let mut z = self.clone();
        z.set(k, on);
        z
    }

    pub fn toggled(&self, k: usize) -> Self {
        self.with(k, !self.contains(k))
    }

    /// Included coordinates in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(64 * w + b)
                }
            })
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Excluded coordinates in ascending order.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.len).filter(|&k| !self.contains(k)).collect()
    }

    /// Coordinates removed from and added to `self` to reach `other`.
    pub fn diff(&self, other: &ColumnModel) -> (Vec<usize>, Vec<usize>) {
        let mut removed = Vec::new();
        let mut added = Vec::new();
        for (w, (&a, &b)) in self.bits.iter().zip(&other.bits).enumerate() {
            let mut gone = a & !b;
            while gone != 0 {
                removed.push(64 * w + gone.trailing_zeros() as usize);
                gone &= gone - 1;
            }
            let mut new = b & !a;
            while new != 0 {
                added.push(64 * w + new.trailing_zeros() as usize);
                new &= new - 1;
            }
        }
        (removed, added)
    }

    pub fn hamming(&self, other: &ColumnModel) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }
}

impl fmt::Debug for ColumnModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColumnModel({}; {:?})", self.len, self.indices())
    }
}

/// Current precision matrix `Ω` (sparse symmetric, dense diagonal), its
/// dense inverse `Σ`, and the edge pattern `Z` given by the sparsity of `Ω`.
#[derive(Clone, Debug)]
pub struct PrecisionState {
    p: usize,
    dbar: usize,
    diag: Vec<f64>,
    // cols[j]: off-diagonal nonzeros (row, value) of column j, ascending row
    cols: Vec<Vec<(usize, f64)>>,
    sigma: DMatrix<f64>,
}

impl PrecisionState {
    pub fn identity(p: usize, dbar: usize) -> Self {
        Self {
            p,
            dbar,
            diag: vec![1.0; p],
            cols: vec![Vec::new(); p],
            sigma: DMatrix::identity(p, p),
        }
    }

    /// Builds the state from a dense symmetric positive-definite matrix.
    /// Exact zeros off the diagonal are structural zeros.
    pub fn from_dense(omega: &DMatrix<f64>, dbar: usize) -> Result<Self> {
        let p = omega.nrows();
        if !omega.is_square() || p < 2 {
            return Err(Error::Initialization(format!(
                "initial matrix must be square with p >= 2, got {}x{}",
                omega.nrows(),
                omega.ncols()
            )));
        }
        let scale = omega.abs().max().max(1.0);
        for i in 0..p {
            for j in 0..i {
                if (omega[(i, j)] - omega[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Initialization(format!(
                        "initial matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        linalg::chol_factor(omega)
            .map_err(|e| Error::Initialization(format!("initial matrix is not positive definite: {e}")))?;
        let diag = (0..p).map(|i| omega[(i, i)]).collect();
        let cols: Vec<Vec<(usize, f64)>> = (0..p)
            .map(|j| {
                (0..p)
                    .filter(|&i| i != j && omega[(i, j)] != 0.0)
                    .map(|i| (i, omega[(i, j)]))
                    .collect()
            })
            .collect();
        if let Some((j, c)) = cols.iter().enumerate().find(|(_, c)| c.len() > dbar) {
            return Err(Error::Initialization(format!(
                "node {j} has degree {} above the cap {dbar}",
                c.len()
            )));
        }
        let mut state = Self {
            p,
            dbar,
            diag,
            cols,
            sigma: DMatrix::zeros(p, p),
        };
        state.sigma = linalg::spd_inverse(&state.omega_dense())
            .map_err(|e| Error::Initialization(format!("cannot invert initial matrix: {e}")))?;
        Ok(state)
    }

    /// Random diagonally dominant start: each admissible pair becomes an
    /// edge with probability one half, with weight uniform on (-1, 1), and
    /// each diagonal exceeds its absolute row sum by a uniform (0.5, 1.5).
    pub fn random_diagonally_dominant<R: Rng + ?Sized>(p: usize, dbar: usize, rng: &mut R) -> Self {
        let mut omega = DMatrix::zeros(p, p);
        let mut degree = vec![0usize; p];
        for j in 0..p {
            for i in 0..j {
                let v: f64 = rng.random_range(-1.0..1.0);
                if rng.random::<f64>() < 0.5 && degree[i] < dbar && degree[j] < dbar && v != 0.0 {
                    omega[(i, j)] = v;
                    omega[(j, i)] = v;
                    degree[i] += 1;
                    degree[j] += 1;
                }
            }
        }
        for i in 0..p {
            let row: f64 = (0..p).filter(|&k| k != i).map(|k| omega[(i, k)].abs()).sum();
            omega[(i, i)] = row + rng.random_range(0.5..1.5);
        }
        Self::from_dense(&omega, dbar).expect("diagonally dominant matrices are positive definite")
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn dbar(&self) -> usize {
        self.dbar
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn diag(&self, j: usize) -> f64 {
        self.diag[j]
    }

    /// Off-diagonal nonzeros of column `j` as `(row, value)`, ascending.
    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    pub fn degree(&self, j: usize) -> usize {
        self.cols[j].len()
    }

    pub fn max_degree(&self) -> usize {
        self.cols.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[j];
        }
        match self.cols[j].binary_search_by_key(&i, |&(r, _)| r) {
            Ok(pos) => self.cols[j][pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn edge(&self, i: usize, j: usize) -> bool {
        i != j && self.cols[j].binary_search_by_key(&i, |&(r, _)| r).is_ok()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.cols.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in column-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().take_while(move |&&(i, _)| i < j).map(move |&(i, _)| (i, j)))
    }

    /// Edge pattern of column `j` in reduced coordinates.
    pub fn column_model(&self, j: usize) -> ColumnModel {
        let mut z = ColumnModel::empty(self.p - 1);
        for &(i, _) in &self.cols[j] {
            z.set(if i < j { i } else { i - 1 }, true);
        }
        z
    }

    /// Symmetric 0/1 edge matrix.
    pub fn z_matrix(&self) -> DMatrix<u8> {
        let mut z = DMatrix::zeros(self.p, self.p);
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, _) in c {
                z[(i, j)] = 1;
            }
        }
        z
    }

    pub fn omega_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag));
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Replaces column (and row) `j` of `Ω` with the reduced-coordinate
    /// sparse column `col` and diagonal `diag`, and updates `Σ` by the
    /// one-rank inverse identity. On error the state is unchanged.
    pub fn replace_column(&mut self, j: usize, col: &[(usize, f64)], diag: f64) -> Result<()> {
        if j >= self.p {
            return Err(Error::Index { index: j, dim: self.p });
        }
        if col.len() > self.dbar {
            return Err(Error::Numerical(format!(
                "column {j} would have degree {} above the cap {}",
                col.len(),
                self.dbar
            )));
        }
        linalg::replace_column_inverse_in_place(&mut self.sigma, j, col, diag)?;
        let old = std::mem::take(&mut self.cols[j]);
        for &(i, _) in &old {
            let other = &mut self.cols[i];
            if let Ok(pos) = other.binary_search_by_key(&j, |&(r, _)| r) {
                other.remove(pos);
            }
        }
        let new: Vec<(usize, f64)> = col.iter().map(|&(r, v)| (full_index(j, r), v)).collect();
        for &(i, v) in &new {
            let other = &mut self.cols[i];
            match other.binary_search_by_key(&j, |&(r, _)| r) {
                Ok(pos) => other[pos].1 = v,
                Err(pos) => other.insert(pos, (j, v)),
            }
        }
        self.cols[j] = new;
        self.diag[j] = diag;
        Ok(())
    }

    /// Recomputes `Σ` from a fresh factorization of `Ω`; returns the largest
    /// absolute change in any entry of `Σ`.
    pub fn refresh(&mut self) -> Result<f64> {
        let fresh = linalg::spd_inverse(&self.omega_dense())?;
        let drift = (&fresh - &self.sigma).abs().max();
        self.sigma = fresh;
        Ok(drift)
    }

    /// `max |(ΩΣ - I)_ij|`, using the sparsity of `Ω`.
    pub fn inverse_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.p {
            for c in 0..self.p {
                let mut v = self.diag[i] * self.sigma[(i, c)];
                for &(k, w) in &self.cols[i] {
                    v += w * self.sigma[(k, c)];
                }
                if i == c {
                    v -= 1.0;
                }
                worst = worst.max(v.abs());
            }
        }
        worst
    }
}
