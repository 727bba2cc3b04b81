use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use ssggm::rng::stream_rng;
use ssggm::synth::{gen_data, generate_truth, GroundTruth};
use ssggm::Scenario;

use super::{out_dir, required};
use crate::config;
use crate::error::CliError;
use crate::output::{matrix_csv, table_csv, write_atomic, write_json, RunManifest};

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerateArgs {
    /// Settings file (TOML, or JSON with a .json extension).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// random, tridiagonal, block or ill_conditioned (also `random:q`, `block:b`).
    #[arg(long)]
    pub scenario: Option<String>,
    /// Number of variables.
    #[arg(long)]
    pub p: Option<usize>,
    /// Number of observations.
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability of the random scenario (default 1/p).
    #[arg(long)]
    pub q: Option<f64>,
    /// Block size of the block scenario (default 4).
    #[arg(long)]
    pub block: Option<usize>,
    /// Seed of all random streams (default 1).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: current directory).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Output of `generate` besides the CSV files.
#[derive(Serialize, Deserialize)]
pub struct TruthFile {
    pub manifest: RunManifest,
    pub n: usize,
    pub truth: GroundTruth,
}

pub fn scenario(name: &str, p: usize, q: Option<f64>, block: Option<usize>) -> Result<Scenario, CliError> {
    let sc = match name {
        "random" => Scenario::Random {
            q: q.unwrap_or(1.0 / p as f64),
        },
        "block" => Scenario::Block { b: block.unwrap_or(4) },
        other => other.parse()?,
    };
    sc.validate(p)?;
    Ok(sc)
}

pub fn run(args: GenerateArgs) -> Result<(), CliError> {
    let args = config::resolve(args.clone(), args.config.as_deref())?;
    let p = required(&args.p, "p")?;
    let n = required(&args.n, "n")?;
    let seed = args.seed.unwrap_or(1);
    let sc = scenario(
        &args.scenario.clone().unwrap_or_else(|| "tridiagonal".into()),
        p,
        args.q,
        args.block,
    )?;
    let mut rng = stream_rng(seed, 0);
    let truth = generate_truth(&sc, p, &mut rng)?;
    let data = gen_data(&truth.omega0, n, &mut rng)?;

    let mut manifest = RunManifest::new("generate", serde_json::to_value(&args)?, seed);
    manifest.dataset_hash = Some(data.hash());
    manifest.seal()?;
    let hash = manifest.hash.clone();

    let dir = out_dir(&args.out_dir);
    write_atomic(&dir.join("Y.csv"), matrix_csv(data.y(), &hash).as_bytes())?;
    write_atomic(&dir.join("omega0.csv"), matrix_csv(&truth.omega0, &hash).as_bytes())?;
    let edges: Vec<Vec<String>> = truth
        .edges()
        .iter()
        .map(|&(i, j)| vec![i.to_string(), j.to_string()])
        .collect();
    write_atomic(&dir.join("z0.csv"), table_csv(&["i", "j"], &edges, &hash).as_bytes())?;
    write_json(
        &dir.join("truth.json"),
        &TruthFile {
            manifest,
            n,
            truth: truth.clone(),
        },
    )?;

    println!(
        "scenario {sc}, p = {p}, n = {n}: {} edges, max degree {}, eigenvalues [{:.6e}, {:.6e}], condition number {:.4e}",
        edges.len(),
        truth.max_degree,
        truth.min_eigenvalue,
        truth.max_eigenvalue,
        truth.max_eigenvalue / truth.min_eigenvalue
    );
    Ok(())
}
