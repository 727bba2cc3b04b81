//! Ground-truth graphs, precision matrices and Gaussian data for simulation
//! studies.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg;

/// Attempts allowed when redrawing a precision matrix until it is positive
/// definite.
pub const MAX_PD_ATTEMPTS: usize = 10_000;

/// Grid of partial-correlation magnitudes used for off-diagonal entries.
pub const RHO_GRID: [f64; 10] = [-0.5, -0.4, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.4, 0.5];

/// Graph family of a simulation scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Scenario {
    /// Each pair is an edge independently with probability `q`.
    Random { q: f64 },
    /// Edges between consecutive variables.
    Tridiagonal,
    /// Disjoint cliques of size `b`.
    Block { b: usize },
    /// Fixed Toeplitz band with entries 1.5, 0.9, 0.5, 0.35.
    IllConditioned,
}

impl Scenario {
    pub fn validate(&self, p: usize) -> Result<()> {
        if p < 2 {
            return Err(Error::Generation(format!("p >= 2 required, got {p}")));
        }
        match *self {
            Scenario::Random { q } if !(q > 0.0 && q < 1.0) => Err(Error::Generation(format!(
                "edge probability must lie in (0, 1), got {q}"
            ))),
            Scenario::Block { b } if b < 2 || !p.is_multiple_of(b) => Err(Error::Generation(format!(
                "block size {b} must be at least 2 and divide p = {p}"
            ))),
            Scenario::IllConditioned if p < 4 => {
                Err(Error::Generation(format!("the banded scenario needs p >= 4, got {p}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Random { q } => write!(f, "random:{q}"),
            Scenario::Tridiagonal => f.write_str("tridiagonal"),
            Scenario::Block { b } => write!(f, "block:{b}"),
            Scenario::IllConditioned => f.write_str("ill_conditioned"),
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    /// Accepts `random:<q>`, `tridiagonal`, `block:<b>` and
    /// `ill_conditioned`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = |what: &str| Error::Parse(format!("invalid {what} in scenario `{s}`"));
        match (name.to_ascii_lowercase().as_str(), arg) {
            ("random", Some(a)) => Ok(Scenario::Random {
                q: a.parse().map_err(|_| bad("edge probability"))?,
            }),
            ("tridiagonal", None) => Ok(Scenario::Tridiagonal),
            ("block", Some(a)) => Ok(Scenario::Block {
                b: a.parse().map_err(|_| bad("block size"))?,
            }),
            ("ill_conditioned" | "ill-conditioned", None) => Ok(Scenario::IllConditioned),
            _ => Err(Error::Parse(format!("unknown scenario `{s}`"))),
        }
    }
}

/// Known graph and precision matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub scenario: Scenario,
    #[serde(with = "crate::rows")]
    pub z0: DMatrix<u8>,
    #[serde(with = "crate::rows")]
    pub omega0: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub max_degree: usize,
}

impl GroundTruth {
    pub fn from_precision(scenario: Scenario, omega0: DMatrix<f64>) -> Result<Self> {
        let p = omega0.nrows();
        linalg::chol_factor(&omega0)
            .map_err(|e| Error::Generation(format!("precision matrix is not positive definite: {e}")))?;
        let z0 = pattern(&omega0);
        let eig = omega0.clone().symmetric_eigen().eigenvalues;
        let max_degree = (0..p)
            .map(|j| (0..p).filter(|&i| z0[(i, j)] == 1).count())
            .max()
            .unwrap_or(0);
        Ok(Self {
            scenario,
            z0,
            min_eigenvalue: eig.min(),
            max_eigenvalue: eig.max(),
            omega0,
            max_degree,
        })
    }

    pub fn p(&self) -> usize {
        self.omega0.nrows()
    }

    /// True edges `(i, j)` with `i < j`, row-major.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        edge_list(&self.z0)
    }
}

/// Off-diagonal nonzero pattern of a matrix.
pub fn pattern(m: &DMatrix<f64>) -> DMatrix<u8> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| u8::from(i != j && m[(i, j)] != 0.0))
}

/// Pairs `(i, j)`, `i < j`, with `z[(i, j)] != 0`, row-major.
pub fn edge_list(z: &DMatrix<u8>) -> Vec<(usize, usize)> {
    let p = z.nrows();
    let mut out = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if z[(i, j)] != 0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Symmetric 0/1 edge matrix for the scenario.
pub fn gen_graph<R: Rng + ?Sized>(sc: &Scenario, p: usize, rng: &mut R) -> Result<DMatrix<u8>> {
    sc.validate(p)?;
    let mut z = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i + 1..p {
            let on = match *sc {
                Scenario::Random { q } => rng.random::<f64>() < q,
                Scenario::Tridiagonal => j - i == 1,
                Scenario::Block { b } => i / b == j / b,
                Scenario::IllConditioned => j - i <= 3,
            };
            if on {
                z[(i, j)] = 1;
                z[(j, i)] = 1;
            }
        }
    }
    Ok(z)
}

/// Precision matrix supported on `z0`: `Ω_jj ~ Gamma(3, 1)` and
/// `Ω_jk = ρ_jk √Ω_jj √Ω_kk` with `ρ_jk` uniform on [`RHO_GRID`]. All entries
/// are redrawn together until the matrix is positive definite.
pub fn gen_precision<R: Rng + ?Sized>(z0: &DMatrix<u8>, rng: &mut R) -> Result<DMatrix<f64>> {
    let p = z0.nrows();
    let gamma = Gamma::new(3.0, 1.0).expect("valid shape and scale");
    for _ in 0..MAX_PD_ATTEMPTS {
        let diag: Vec<f64> = (0..p).map(|_| gamma.sample(rng)).collect();
        let mut omega = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag.clone()));
        for i in 0..p {
            for j in i + 1..p {
                if z0[(i, j)] != 0 {
                    let rho = RHO_GRID[rng.random_range(0..RHO_GRID.len())];
                    let v = rho * diag[i].sqrt() * diag[j].sqrt();
                    omega[(i, j)] = v;
                    omega[(j, i)] = v;
                }
            }
        }
        if linalg::chol_factor(&omega).is_ok() {
            return Ok(omega);
        }
    }
    Err(Error::Generation(format!(
        "no positive-definite draw in {MAX_PD_ATTEMPTS} attempts; try a sparser scenario"
    )))
}

/// The banded Toeplitz matrix with diagonal 1.5 and bands 0.9, 0.5, 0.35.
pub fn gen_ill_conditioned(p: usize) -> Result<DMatrix<f64>> {
    Scenario::IllConditioned.validate(p)?;
    let omega = DMatrix::from_fn(p, p, |i, j| match i.abs_diff(j) {
        0 => 1.5,
        1 => 0.9,
        2 => 0.5,
        3 => 0.35,
        _ => 0.0,
    });
    linalg::chol_factor(&omega)
        .map_err(|e| Error::Generation(format!("banded matrix is not positive definite at p = {p}: {e}")))?;
    Ok(omega)
}

/// Graph and precision matrix for a scenario.
pub fn generate_truth<R: Rng + ?Sized>(sc: &Scenario, p: usize, rng: &mut R) -> Result<GroundTruth> {
    let omega = match sc {
        Scenario::IllConditioned => gen_ill_conditioned(p)?,
        _ => gen_precision(&gen_graph(sc, p, rng)?, rng)?,
    };
    GroundTruth::from_precision(*sc, omega)
}

/// `n` independent rows `y = L⁻ᵀ ε` with `Ω0 = L Lᵀ` and standard normal `ε`,
/// so that `y ~ N(0, Ω0⁻¹)`.
pub fn gen_data<R: Rng + ?Sized>(omega0: &DMatrix<f64>, n: usize, rng: &mut R) -> Result<Dataset> {
    let p = omega0.nrows();
    let l = linalg::chol_factor(omega0)?;
    let mut y = DMatrix::zeros(n, p);
    let mut row = vec![0.0; p];
    for i in 0..n {
        for v in row.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        l.backward_solve_in_place(&mut row)?;
        for (k, &v) in row.iter().enumerate() {
            y[(i, k)] = v;
        }
    }
    Dataset::new(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn graph_examples() {
        let mut rng = seeded(1);
        let z = gen_graph(&Scenario::Tridiagonal, 4, &mut rng).unwrap();
        assert_eq!(edge_list(&z), vec![(0, 1), (1, 2), (2, 3)]);
        let z = gen_graph(&Scenario::Block { b: 4 }, 8, &mut rng).unwrap();
        assert_eq!(edge_list(&z).len(), 12);
        assert!(gen_graph(&Scenario::Block { b: 4 }, 10, &mut rng).is_err());
    }

    #[test]
    fn random_graph_edge_rate() {
        let p = 20;
        let q = 1.0 / p as f64;
        let mut rng = seeded(2);
        let mut edges = 0usize;
        let draws = 200;
        for _ in 0..draws {
            edges += edge_list(&gen_graph(&Scenario::Random { q }, p, &mut rng).unwrap()).len();
        }
        let trials = (draws * p * (p - 1) / 2) as f64;
        let se = (q * (1.0 - q) / trials).sqrt();
        assert!((edges as f64 / trials - q).abs() < 3.0 * se);
    }

    #[test]
    fn precision_examples() {
        let mut rng = seeded(3);
        let empty = DMatrix::zeros(5, 5);
        let omega = gen_precision(&empty, &mut rng).unwrap();
        assert_eq!(pattern(&omega), empty);
        let z = gen_graph(&Scenario::Tridiagonal, 10, &mut rng).unwrap();
        for _ in 0..100 {
            let omega = gen_precision(&z, &mut rng).unwrap();
            assert_eq!(pattern(&omega), z);
            for i in 0..9 {
                let rho = omega[(i, i + 1)] / (omega[(i, i)] * omega[(i + 1, i + 1)]).sqrt();
                assert!(RHO_GRID.iter().any(|g| (g - rho).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn ill_conditioned_examples() {
        let m = gen_ill_conditioned(4).unwrap();
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.5, 0.9, 0.5, 0.35, 0.9, 1.5, 0.9, 0.5, 0.5, 0.9, 1.5, 0.9, 0.35, 0.5, 0.9, 1.5,
            ],
        );
        assert_eq!(m, expect);
        let big = gen_ill_conditioned(50).unwrap();
        let min = big.symmetric_eigen().eigenvalues.min();
        assert!(min > 0.0 && min < 0.05);
        assert!(gen_ill_conditioned(3).is_err());
    }

    #[test]
    fn data_is_reproducible() {
        let omega = gen_ill_conditioned(5).unwrap();
        let a = gen_data(&omega, 30, &mut seeded(4)).unwrap();
        let b = gen_data(&omega, 30, &mut seeded(4)).unwrap();
        assert_eq!(a.y(), b.y());
        assert!(a.y().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn scenario_parsing() {
        for s in ["random:0.1", "tridiagonal", "block:4", "ill_conditioned"] {
            let sc: Scenario = s.parse().unwrap();
            assert_eq!(sc.to_string().parse::<Scenario>().unwrap(), sc);
        }
        assert!("block".parse::<Scenario>().is_err());
        assert!("hub".parse::<Scenario>().is_err());
    }
}
