//! Dense Cholesky factors with O(k²) append/remove, and the low-rank
//! inverse identities used to keep `Σ = Ω⁻¹` current column by column.
//!
//! Factors are stored as packed lower-triangular rows: row `i` holds
//! `L[i][0..=i]` starting at offset `i(i+1)/2`, so appending a bordered
//! row is a push and removing one is a compaction plus a plane-rotation
//! repair of the trailing block.

#![allow(clippy::needless_range_loop)]

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Pivots at or below `PIVOT_TOL · max diagonal` are rejected.
pub const PIVOT_TOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CholFactor {
    k: usize,
    data: Vec<f64>,
    // largest diagonal entry of the factored matrix seen so far
    scale: f64,
}

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl CholFactor {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_capacity(k: usize) -> Self {
        Self {
            k: 0,
            data: Vec::with_capacity(row_start(k)),
            scale: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    /// Row `i` of `L`, entries `0..=i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let s = row_start(i);
        &self.data[s..s + i + 1]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.data[row_start(i) + j]
        }
    }

    /// Factors the symmetric `k × k` matrix whose entries are `a(i, j)`;
    /// only `j <= i` is queried.
    pub fn factor_with(k: usize, mut a: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut out = Self::with_capacity(k);
        out.scale = (0..k).map(|i| a(i, i)).fold(0.0, f64::max);
        for i in 0..k {
            let start = out.data.len();
            for j in 0..=i {
                let cur = &out.data[start..start + j];
                let prev = if j == i {
                    cur
                } else {
                    &out.data[row_start(j)..row_start(j) + j]
                };
                let v = a(i, j) - dot(cur, prev);
                if i == j {
                    if !(v > PIVOT_TOL * out.scale) || !v.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: v });
                    }
                    out.data.push(v.sqrt());
                } else {
                    let d = out.data[row_start(j) + j];
                    out.data.push(v / d);
                }
            }
            out.k = i + 1;
        }
        Ok(out)
    }

    /// Lower-triangular `L` as a dense matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.k, self.k, |i, j| self.get(i, j))
    }

    /// `L Lᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let l = self.to_dense();
        &l * l.transpose()
    }

    /// In-place bordering: the factor of `[[A, c], [cᵀ, d]]`.
    pub fn append(&mut self, col: &[f64], diag: f64) -> Result<()> {
        if col.len() != self.k {
            return Err(Error::Dimension(format!(
                "append column has length {}, factor has dimension {}",
                col.len(),
                self.k
            )));
        }
        let k = self.k;
        let start = self.data.len();
        self.data.reserve(k + 1);
        for i in 0..k {
            let r = row_start(i);
            let partial = dot(&self.data[r..r + i], &self.data[start..start + i]);
            let v = (col[i] - partial) / self.data[r + i];
            self.data.push(v);
        }
        let schur = diag - self.data[start..].iter().map(|v| v * v).sum::<f64>();
        let scale = self.scale.max(diag);
        if !(schur > PIVOT_TOL * scale) || !schur.is_finite() {
            self.data.truncate(start);
            return Err(Error::NotPositiveDefinite { pivot: k, value: schur });
        }
        self.data.push(schur.sqrt());
        self.k += 1;
        self.scale = scale;
        Ok(())
    }

    /// In-place deletion of row/column `idx` of the factored matrix.
    pub fn remove(&mut self, idx: usize) -> Result<()> {
        let k = self.k;
        if idx >= k {
            return Err(Error::Index { index: idx, dim: k });
        }
        // column idx below the diagonal feeds the rank-1 repair
        let mut v: Vec<f64> = (idx + 1..k).map(|i| self.data[row_start(i) + idx]).collect();
        let mut out = Vec::with_capacity(row_start(k - 1));
        out.extend_from_slice(&self.data[..row_start(idx)]);
        for i in idx + 1..k {
            let r = row_start(i);
            out.extend_from_slice(&self.data[r..r + idx]);
            out.extend_from_slice(&self.data[r + idx + 1..r + i + 1]);
        }
        self.data = out;
        self.k = k - 1;
        // trailing block: L33' L33'ᵀ = L33 L33ᵀ + v vᵀ via plane rotations
        let m = v.len();
        for jj in 0..m {
            let t = idx + jj;
            let dpos = row_start(t) + t;
            let ljj = self.data[dpos];
            let vj = v[jj];
            let r = ljj.hypot(vj);
            let c = r / ljj;
            let s = vj / ljj;
            self.data[dpos] = r;
            for ii in jj + 1..m {
                let pos = row_start(idx + ii) + t;
                let l = (self.data[pos] + s * v[ii]) / c;
                self.data[pos] = l;
                v[ii] = c * v[ii] - s * l;
            }
        }
        Ok(())
    }

    /// Solves `L y = b`.
    pub fn forward_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.check_len(b.len())?;
        let mut y = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let row = self.row(i);
            let v = (b[i] - dot(&row[..i], &y[..i])) / row[i];
            y.push(v);
        }
        Ok(y)
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward_solve_in_place(&self, y: &mut [f64]) -> Result<()> {
        self.check_len(y.len())?;
        for i in (0..self.k).rev() {
            y[i] /= self.data[row_start(i) + i];
            let yi = y[i];
            let r = row_start(i);
            for j in 0..i {
                y[j] -= self.data[r + j] * yi;
            }
        }
        Ok(())
    }

    /// Solves `L Lᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.forward_solve(b)?;
        self.backward_solve_in_place(&mut y)?;
        Ok(y)
    }

    /// `log |L Lᵀ| = 2 Σ log L_ii`.
    pub fn logdet(&self) -> f64 {
        2.0 * (0..self.k).map(|i| self.data[row_start(i) + i].ln()).sum::<f64>()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.k {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "vector has length {len}, factor has dimension {}",
                self.k
            )))
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Factors a dense symmetric matrix (lower triangle is read).
pub fn chol_factor(a: &DMatrix<f64>) -> Result<CholFactor> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("matrix is {}x{}", a.nrows(), a.ncols())));
    }
    CholFactor::factor_with(a.nrows(), |i, j| a[(i, j)])
}

pub fn chol_append(l: &CholFactor, col: &[f64], diag: f64) -> Result<CholFactor> {
    let mut out = l.clone();
    out.append(col, diag)?;
    Ok(out)
}

pub fn chol_remove(l: &CholFactor, idx: usize) -> Result<CholFactor> {
    let mut out = l.clone();
    out.remove(idx)?;
    Ok(out)
}

pub fn chol_solve(l: &CholFactor, b: &[f64]) -> Result<Vec<f64>> {
    l.solve(b)
}

pub fn logdet(l: &CholFactor) -> f64 {
    l.logdet()
}

/// Position of reduced index `r` (0..p-1, column `j` removed) in the full matrix.
#[inline]
pub fn full_index(j: usize, r: usize) -> usize {
    if r < j {
        r
    } else {
        r + 1
    }
}

/// `(Ω_{-j-j})⁻¹ = Σ_{-j-j} - Σ_{-j,j} Σ_{-j,j}ᵀ / Σ_jj`, in O(p²).
pub fn inverse_drop_rowcol(sigma: &DMatrix<f64>, j: usize) -> Result<DMatrix<f64>> {
    let p = sigma.nrows();
    if j >= p {
        return Err(Error::Index { index: j, dim: p });
    }
    let sjj = sigma[(j, j)];
    if !(sjj > 0.0) {
        return Err(Error::Numerical(format!("Σ_jj = {sjj} is not positive")));
    }
    Ok(DMatrix::from_fn(p - 1, p - 1, |r, c| {
        let (a, b) = (full_index(j, r), full_index(j, c));
        sigma[(a, b)] - sigma[(a, j)] * sigma[(b, j)] / sjj
    }))
}

/// Rebuilds `Σ* = (Ω*)⁻¹` after column `j` of `Ω` is replaced by
/// `(omega_col, omega_diag)`, given `ainv = (Ω_{-j-j})⁻¹`:
/// `v = ainv ω`, `γ = ω_jj - vᵀω`, `Σ*_{-j-j} = ainv + v vᵀ/γ`,
/// `Σ*_{-j,j} = -v/γ`, `Σ*_jj = 1/γ`.
pub fn inverse_after_column_replace(
    ainv: &DMatrix<f64>,
    omega_col: &[f64],
    omega_diag: f64,
    j: usize,
) -> Result<DMatrix<f64>> {
    let m = ainv.nrows();
    if omega_col.len() != m || !ainv.is_square() {
        return Err(Error::Dimension(format!(
            "column of length {} for a {}x{} block",
            omega_col.len(),
            ainv.nrows(),
            ainv.ncols()
        )));
    }
    if j > m {
        return Err(Error::Index { index: j, dim: m + 1 });
    }
    let v: Vec<f64> = (0..m)
        .map(|r| (0..m).map(|c| ainv[(r, c)] * omega_col[c]).sum())
        .collect();
    let gamma = omega_diag - dot(&v, omega_col);
    if !(gamma > 0.0) {
        return Err(Error::NotPositiveDefinite { pivot: j, value: gamma });
    }
    let p = m + 1;
    let mut out = DMatrix::zeros(p, p);
    for r in 0..m {
        for c in 0..m {
            out[(full_index(j, r), full_index(j, c))] = ainv[(r, c)] + v[r] * v[c] / gamma;
        }
        out[(full_index(j, r), j)] = -v[r] / gamma;
        out[(j, full_index(j, r))] = -v[r] / gamma;
    }
    out[(j, j)] = 1.0 / gamma;
    Ok(out)
}

/// Entries of `(Ω_{-j-j})⁻¹` read lazily from the current `Σ`, indexed in
/// reduced coordinates.
#[derive(Clone, Copy, Debug)]
pub struct DroppedInverse<'a> {
    sigma: &'a DMatrix<f64>,
    j: usize,
    inv_sjj: f64,
}

impl<'a> DroppedInverse<'a> {
    pub fn new(sigma: &'a DMatrix<f64>, j: usize) -> Result<Self> {
        let p = sigma.nrows();
        if j >= p {
            return Err(Error::Index { index: j, dim: p });
        }
        let sjj = sigma[(j, j)];
        if !(sjj > 0.0) {
            return Err(Error::Numerical(format!("Σ_jj = {sjj} is not positive")));
        }
        Ok(Self {
            sigma,
            j,
            inv_sjj: 1.0 / sjj,
        })
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows() - 1
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (a, b) = (full_index(self.j, r), full_index(self.j, c));
        let s = self.sigma;
        s[(a, b)] - s[(a, self.j)] * s[(b, self.j)] * self.inv_sjj
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |r, c| self.get(r, c))
    }
}

/// In-place form of [`inverse_after_column_replace`] for a sparse new
/// column given as `(reduced index, value)` pairs. `(Ω_{-j-j})⁻¹` is read
/// from `sigma` itself, so the whole update is one fused rank-2 pass.
/// Returns `γ`.
pub fn replace_column_inverse_in_place(
    sigma: &mut DMatrix<f64>,
    j: usize,
    omega_col: &[(usize, f64)],
    omega_diag: f64,
) -> Result<f64> {
    let p = sigma.nrows();
    let ainv = DroppedInverse::new(sigma, j)?;
    // v in full coordinates, with v[j] = 0
    let mut v = vec![0.0; p];
    for r in 0..p - 1 {
        let mut acc = 0.0;
        for &(c, w) in omega_col {
            acc += ainv.get(r, c) * w;
        }
        v[full_index(j, r)] = acc;
    }
    let vw: f64 = omega_col.iter().map(|&(c, w)| v[full_index(j, c)] * w).sum();
    let gamma = omega_diag - vw;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::NotPositiveDefinite { pivot: j, value: gamma });
    }
    let sjj = sigma[(j, j)];
    let inv_sqrt_sjj = 1.0 / sjj.sqrt();
    let a: Vec<f64> = (0..p).map(|i| sigma[(i, j)] * inv_sqrt_sjj).collect();
    let inv_sqrt_gamma = 1.0 / gamma.sqrt();
    let w: Vec<f64> = v.iter().map(|x| x * inv_sqrt_gamma).collect();
    // Σ += w wᵀ - a aᵀ over the whole matrix, then overwrite row/column j
    let data = sigma.as_mut_slice();
    for c in 0..p {
        let (wc, ac) = (w[c], a[c]);
        let col = &mut data[c * p..(c + 1) * p];
        for ((x, &wr), &ar) in col.iter_mut().zip(&w).zip(&a) {
            *x += wr * wc - ar * ac;
        }
    }
    for i in 0..p {
        let val = -v[i] / gamma;
        sigma[(i, j)] = val;
        sigma[(j, i)] = val;
    }
    sigma[(j, j)] = 1.0 / gamma;
    Ok(gamma)
}

/// Dense inverse of a symmetric positive-definite matrix, symmetrized.
pub fn spd_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = nalgebra::Cholesky::new(a.clone()).ok_or(Error::NotPositiveDefinite {
        pivot: 0,
        value: f64::NAN,
    })?;
    let mut inv = chol.inverse();
    symmetrize(&mut inv);
    Ok(inv)
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let p = m.nrows();
    for i in 0..p {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_spd(k: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(k, k + 2, |_, _| rng.random_range(-1.0..1.0));
        &b * b.transpose() + DMatrix::identity(k, k) * 0.5
    }

    fn submatrix(a: &DMatrix<f64>, keep: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(keep.len(), keep.len(), |i, j| a[(keep[i], keep[j])])
    }

    #[test]
    fn factor_identity_and_small_example() {
        let l = chol_factor(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(l.to_dense(), DMatrix::identity(3, 3));
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 5.0]);
        let l = chol_factor(&a).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 1.0, 2.0]);
        assert!((l.to_dense() - expect).abs().max() < 1e-15);
        assert!((l.reconstruct() - a).abs().max() < 1e-14);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match chol_factor(&a) {
            Err(Error::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn append_matches_refactorization() {
        let l = chol_factor(&DMatrix::identity(2, 2)).unwrap();
        let l3 = chol_append(&l, &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(l3.to_dense(), DMatrix::identity(3, 3));

        let a = random_spd(6, 1);
        let head = submatrix(&a, &[0, 1, 2, 3, 4]);
        let l = chol_factor(&head).unwrap();
        let col: Vec<f64> = (0..5).map(|i| a[(i, 5)]).collect();
        let appended = chol_append(&l, &col, a[(5, 5)]).unwrap();
        let fresh = chol_factor(&a).unwrap();
        assert!((appended.to_dense() - fresh.to_dense()).abs().max() < 1e-10);
    }

    #[test]
    fn append_rejects_small_schur_complement() {
        let l = chol_factor(&DMatrix::identity(2, 2)).unwrap();
        let mut l2 = l.clone();
        assert!(matches!(
            l2.append(&[1.0, 0.0], 1.0),
            Err(Error::NotPositiveDefinite { pivot: 2, .. })
        ));
        // failed append leaves the factor untouched
        assert_eq!(l2, l);
        assert!(l2.append(&[1.0], 3.0).is_err());
    }

    #[test]
    fn remove_matches_refactorization() {
        let l = chol_factor(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(chol_remove(&l, 1).unwrap().to_dense(), DMatrix::identity(2, 2));

        let a = random_spd(6, 2);
        let l = chol_factor(&a).unwrap();
        for idx in 0..6 {
            let keep: Vec<usize> = (0..6).filter(|&i| i != idx).collect();
            let removed = chol_remove(&l, idx).unwrap();
            let fresh = chol_factor(&submatrix(&a, &keep)).unwrap();
            assert!((removed.to_dense() - fresh.to_dense()).abs().max() < 1e-10, "idx {idx}");
        }

        let one = chol_factor(&DMatrix::from_element(1, 1, 2.0)).unwrap();
        let empty = chol_remove(&one, 0).unwrap();
        assert_eq!(empty.dim(), 0);
        assert_eq!(empty.logdet(), 0.0);
        assert!(matches!(chol_remove(&one, 1), Err(Error::Index { .. })));
    }

    #[test]
    fn solve_examples() {
        let l = chol_factor(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(chol_solve(&l, &[1.0, -2.0, 3.5]).unwrap(), vec![1.0, -2.0, 3.5]);
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 5.0]);
        let l = chol_factor(&a).unwrap();
        let x = chol_solve(&l, &[2.0, 3.0]).unwrap();
        // A⁻¹ = [[5, -2], [-2, 4]] / 16
        assert!((x[0] - (10.0 - 6.0) / 16.0).abs() < 1e-15);
        assert!((x[1] - (-4.0 + 12.0) / 16.0).abs() < 1e-15);
        assert!(chol_solve(&l, &[1.0]).is_err());
    }

    #[test]
    fn logdet_examples() {
        assert_eq!(logdet(&chol_factor(&DMatrix::identity(4, 4)).unwrap()), 0.0);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0]));
        assert!((logdet(&chol_factor(&d).unwrap()) - 6f64.ln()).abs() < 1e-15);
        let a = random_spd(4, 3);
        let eig = a.clone().symmetric_eigen().eigenvalues;
        let expect: f64 = eig.iter().map(|v| v.ln()).sum();
        assert!((logdet(&chol_factor(&a).unwrap()) - expect).abs() < 1e-9);
    }

    #[test]
    fn drop_rowcol_examples() {
        let i3 = DMatrix::<f64>::identity(3, 3);
        assert_eq!(inverse_drop_rowcol(&i3, 1).unwrap(), DMatrix::identity(2, 2));

        let omega = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 4.0, 5.0]));
        let sigma = omega.clone().try_inverse().unwrap();
        let got = inverse_drop_rowcol(&sigma, 1).unwrap();
        assert!((got[(0, 0)] - 0.5).abs() < 1e-15 && (got[(1, 1)] - 0.2).abs() < 1e-15);
        assert!(got[(0, 1)].abs() < 1e-15);

        // tridiag(2, 0.9) at p = 4, last column
        let omega = DMatrix::from_fn(4, 4, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => 0.9,
            _ => 0.0,
        });
        let sigma = omega.clone().try_inverse().unwrap();
        let got = inverse_drop_rowcol(&sigma, 3).unwrap();
        let expect = omega.view((0, 0), (3, 3)).clone_owned().try_inverse().unwrap();
        assert!((got - &expect).abs().max() <= 1e-6 * expect.abs().max());

        let mut bad = i3.clone();
        bad[(2, 2)] = 0.0;
        assert!(matches!(inverse_drop_rowcol(&bad, 2), Err(Error::Numerical(_))));
    }

    #[test]
    fn column_replace_examples() {
        let ainv = DMatrix::identity(2, 2);
        let out = inverse_after_column_replace(&ainv, &[0.0, 0.0], 1.0, 0).unwrap();
        assert_eq!(out, DMatrix::identity(3, 3));
        // gamma = 1 - 1 = 0
        assert!(matches!(
            inverse_after_column_replace(&ainv, &[1.0, 0.0], 1.0, 2),
            Err(Error::NotPositiveDefinite { .. })
        ));

        let omega = random_spd(5, 4);
        for j in 0..5 {
            let sigma = omega.clone().try_inverse().unwrap();
            let ainv = inverse_drop_rowcol(&sigma, j).unwrap();
            let mut new = omega.clone();
            let col: Vec<f64> = (0..4).map(|r| 0.1 * (r as f64 - 1.5)).collect();
            for r in 0..4 {
                new[(full_index(j, r), j)] = col[r];
                new[(j, full_index(j, r))] = col[r];
            }
            new[(j, j)] = omega[(j, j)] + 1.0;
            let got = inverse_after_column_replace(&ainv, &col, new[(j, j)], j).unwrap();
            let expect = new.try_inverse().unwrap();
            assert!((got - &expect).abs().max() <= 1e-8 * expect.abs().max());
        }
    }

    #[test]
    fn in_place_replace_matches_dense_route() {
        let omega = random_spd(6, 5);
        let sigma = spd_inverse(&omega).unwrap();
        let j = 2;
        let sparse = [(0usize, -0.3), (3usize, 0.2)];
        let mut col = vec![0.0; 5];
        for &(r, v) in &sparse {
            col[r] = v;
        }
        let diag = omega[(j, j)] + 0.7;
        let ainv = inverse_drop_rowcol(&sigma, j).unwrap();
        let dense = inverse_after_column_replace(&ainv, &col, diag, j).unwrap();
        let mut inplace = sigma.clone();
        replace_column_inverse_in_place(&mut inplace, j, &sparse, diag).unwrap();
        assert!((dense - inplace).abs().max() < 1e-12);
    }
}
