//! Serde adapters that write dense matrices as arrays of rows.

use nalgebra::{DMatrix, Scalar};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn to_rows<T: Scalar + Copy>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn from_rows<T: Scalar + Copy>(rows: &[Vec<T>]) -> Result<DMatrix<T>, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(format!("row {i} has {} entries, expected {ncols}", rows[i].len()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn serialize<T, S>(m: &DMatrix<T>, s: S) -> Result<S::Ok, S::Error>
where
    T: Scalar + Copy + Serialize,
    S: Serializer,
{
    to_rows(m).serialize(s)
}

pub fn deserialize<'de, T, D>(d: D) -> Result<DMatrix<T>, D::Error>
where
    T: Scalar + Copy + Deserialize<'de>,
    D: Deserializer<'de>,
{
    let rows = Vec::<Vec<T>>::deserialize(d)?;
    from_rows(&rows).map_err(D::Error::custom)
}

pub mod option {
    use super::*;

    pub fn serialize<T, S>(m: &Option<DMatrix<T>>, s: S) -> Result<S::Ok, S::Error>
    where
        T: Scalar + Copy + Serialize,
        S: Serializer,
    {
        m.as_ref().map(to_rows).serialize(s)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Option<DMatrix<T>>, D::Error>
    where
        T: Scalar + Copy + Deserialize<'de>,
        D: Deserializer<'de>,
    {
        match Option::<Vec<Vec<T>>>::deserialize(d)? {
            Some(rows) => from_rows(&rows).map(Some).map_err(D::Error::custom),
            None => Ok(None),
        }
    }
}
