//! Observation matrices and their Gram matrix.

use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// An `n × p` data matrix together with `S = YᵀY`.
#[derive(Clone, Debug)]
pub struct Dataset {
    y: DMatrix<f64>,
    s: DMatrix<f64>,
}

impl Dataset {
    /// Wraps `y` as-is (no centering or scaling).
    pub fn new(y: DMatrix<f64>) -> Result<Self> {
        check_shape(&y, 1)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("data contains non-finite values".into()));
        }
        let s = gram(&y);
        Ok(Self { y, s })
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn p(&self) -> usize {
        self.y.ncols()
    }

    /// Hex SHA-256 of the dimensions and the little-endian bytes of `Y`.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n() as u64).to_le_bytes());
        h.update((self.p() as u64).to_le_bytes());
        for v in self.y.iter() {
            h.update(v.to_le_bytes());
        }
        hex(&h.finalize())
    }
}

/// Centers every column and scales it to unit sample variance, then builds
/// the Gram matrix of the standardized data.
pub fn standardize(y: &DMatrix<f64>) -> Result<Dataset> {
    check_shape(y, 2)?;
    let n = y.nrows() as f64;
    let mut out = y.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
        let var = col.norm_squared() / (n - 1.0);
        if !(var > 0.0) || !var.is_finite() {
            return Err(Error::DegenerateColumn { column: j });
        }
        col /= var.sqrt();
    }
    Dataset::new(out)
}

/// Reads a headerless CSV of decimal numbers; rows are observations.
pub fn read_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let mut text = String::new();
    std::fs::File::open(path.as_ref())?.read_to_string(&mut text)?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut ncols = None;
    let mut nrows = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        match ncols {
            None => ncols = Some(rec.len()),
            Some(c) if c != rec.len() => {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, expected {}",
                    i + 1,
                    rec.len(),
                    c
                )))
            }
            _ => {}
        }
        for field in rec.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: cannot parse `{field}`", i + 1)))?;
            values.push(v);
        }
        nrows += 1;
    }
    let ncols = ncols.ok_or_else(|| Error::Parse("empty data file".into()))?;
    Ok(DMatrix::from_row_slice(nrows, ncols, &values))
}

fn check_shape(y: &DMatrix<f64>, min_n: usize) -> Result<()> {
    if y.ncols() < 2 {
        return Err(Error::Dimension(format!("p >= 2 required, got p = {}", y.ncols())));
    }
    if y.nrows() < min_n {
        return Err(Error::Dimension(format!(
            "n >= {min_n} required, got n = {}",
            y.nrows()
        )));
    }
    Ok(())
}

fn gram(y: &DMatrix<f64>) -> DMatrix<f64> {
    let mut s = y.tr_mul(y);
    // exact symmetry
    let p = s.nrows();
    for i in 0..p {
        for j in 0..i {
            let v = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column_is_rejected() {
        let y = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        assert!(matches!(standardize(&y), Err(Error::Dimension(_))));
    }

    #[test]
    fn constant_column_names_the_column() {
        let y = DMatrix::from_row_slice(3, 2, &[1.0, 5.0, 2.0, 5.0, 4.0, 5.0]);
        match standardize(&y) {
            Err(Error::DegenerateColumn { column }) => assert_eq!(column, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn standardized_columns_have_unit_variance() {
        let y = DMatrix::from_fn(7, 3, |i, j| {
            ((i * 7 + j * 3) % 5) as f64 * (j + 1) as f64 + 0.1 * i as f64
        });
        let d = standardize(&y).unwrap();
        for col in d.y().column_iter() {
            let mean = col.sum() / 7.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 6.0;
            assert!(mean.abs() <= 1e-12);
            assert!((var - 1.0).abs() <= 1e-10);
        }
        let s = d.y().transpose() * d.y();
        assert!((s - d.gram()).abs().max() <= 1e-10 * d.gram().abs().max());
    }

    #[test]
    fn csv_parsing() {
        let m = parse_csv("1, 2.5\n-3e-1,4\n").unwrap();
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(m[(1, 0)], -0.3);
        assert!(parse_csv("1,2\n3\n").is_err());
        assert!(parse_csv("1,x\n").is_err());
    }
}
