use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::{Deserialize, Serialize};
use ssggm::conditional::{enumerate_log_weights, normalize_log_weights, ColumnContext};
use ssggm::data::read_csv;
use ssggm::linalg::full_index;
use ssggm::rng::stream_rng;
use ssggm::samplers::column_visit_counts;
use ssggm::{Algorithm, ColumnModel, Error, PrecisionState};

use super::{load_dataset, out_dir, required, HyperArgs};
use crate::config;
use crate::error::CliError;
use crate::output::{num, table_csv, write_atomic, write_json, RunManifest};

/// Discarded kernel updates before counting visits.
const KERNEL_WARMUP: usize = 1_000;

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleArgs {
    /// Settings file (TOML, or JSON with a .json extension).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Headerless CSV, one observation per row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Column whose edge pattern is enumerated (0-based).
    #[arg(long)]
    pub j: Option<usize>,
    /// CSV holding the precision matrix whose other columns are held fixed
    /// (default identity).
    #[arg(long)]
    pub omega: Option<PathBuf>,
    /// Largest p accepted (default 12).
    #[arg(long)]
    pub max_p: Option<usize>,
    /// Center and scale the data (same default as `fit`).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub standardize: Option<bool>,
    /// Kernel whose empirical law is compared with the exact one.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Kernel updates counted (default 100000).
    #[arg(long)]
    pub updates: Option<usize>,
    /// Inner moves per update, or `auto`.
    #[arg(long = "M", alias = "moves")]
    pub moves: Option<String>,
    /// Seed of all random streams (default 1).
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub hyper: HyperArgs,
    /// Output directory (default: current directory).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Contents of oracle.json.
#[derive(Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub manifest: RunManifest,
    pub p: usize,
    pub j: usize,
    pub models: usize,
    pub probability_sum: f64,
    pub kernel: Option<Algorithm>,
    pub updates: Option<usize>,
    pub total_variation: Option<f64>,
    pub acceptance_rate: Option<f64>,
}

pub fn run(args: OracleArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut args = config::resolve(args.clone(), args.config.as_deref())?;
    let max_p = *args.max_p.get_or_insert(12);
    let seed = *args.seed.get_or_insert(1);
    let data_path = required(&args.data, "data")?;
    let j = required(&args.j, "j")?;
    let (data, _) = load_dataset(&data_path, args.standardize)?;
    let p = data.p();
    if p > max_p {
        return Err(Error::Capability(format!("enumeration is limited to p <= {max_p}, data has p = {p}")).into());
    }
    if j >= p {
        return Err(CliError::usage(format!("--j must be below p = {p}, got {j}")));
    }
    let (hyper, elicited) = args.hyper.resolve(p, seed)?;
    let dbar = hyper.dbar(p);
    let state = match &args.omega {
        Some(path) => PrecisionState::from_dense(&read_csv(path)?, dbar)?,
        None => PrecisionState::identity(p, dbar),
    };
    let ctx = ColumnContext::from_state(&state, &data, &hyper, j)?;
    let logw = enumerate_log_weights(&ctx)?;
    let probs = normalize_log_weights(&logw);

    let kernel: Option<Algorithm> = args.kernel.as_deref().map(str::parse).transpose()?;
    let moves = match args.moves.as_deref() {
        None | Some("auto") => None,
        Some(m) => Some(
            m.parse()
                .map_err(|_| CliError::usage(format!("--M expects a count or `auto`, got `{m}`")))?,
        ),
    };
    let updates = kernel.map(|_| *args.updates.get_or_insert(100_000));
    let mut empirical = None;
    let mut acceptance_rate = None;
    if let (Some(alg), Some(updates)) = (kernel, updates) {
        let mut rng = stream_rng(seed, 0);
        let (counts, stats) = column_visit_counts(alg, &ctx, &data, &hyper, moves, KERNEL_WARMUP, updates, &mut rng)?;
        empirical = Some(counts.iter().map(|&c| c as f64 / updates as f64).collect::<Vec<f64>>());
        acceptance_rate = stats.rate();
    }
    let tv = empirical
        .as_ref()
        .map(|e| 0.5 * e.iter().zip(&probs).map(|(a, b)| (a - b).abs()).sum::<f64>());

    let mut manifest = RunManifest::new("oracle", serde_json::to_value(&args)?, seed);
    manifest.dataset_hash = Some(data.hash());
    manifest.elicited = elicited;
    manifest.hyper = Some(hyper.clone());
    manifest.seal()?;
    manifest
        .timings
        .insert("total_seconds".into(), start.elapsed().as_secs_f64());

    let m = p - 1;
    let rows: Vec<Vec<String>> = (0..probs.len())
        .map(|mask| {
            let z = ColumnModel::from_mask(m, mask as u64);
            let nb: Vec<String> = z.iter().map(|r| full_index(j, r).to_string()).collect();
            let mut row = vec![mask.to_string(), nb.join(";"), num(logw[mask]), num(probs[mask])];
            if let Some(e) = &empirical {
                row.push(num(e[mask]));
            }
            row
        })
        .collect();
    let mut header = vec!["mask", "neighbours", "log_weight", "probability"];
    if empirical.is_some() {
        header.push("empirical");
    }
    let dir = out_dir(&args.out_dir);
    write_atomic(
        &dir.join("oracle.csv"),
        table_csv(&header, &rows, &manifest.hash).as_bytes(),
    )?;
    let report = OracleReport {
        manifest,
        p,
        j,
        models: probs.len(),
        probability_sum: probs.iter().sum(),
        kernel,
        updates,
        total_variation: tv,
        acceptance_rate,
    };
    write_json(&dir.join("oracle.json"), &report)?;
    let mut line = format!(
        "column {j} of p = {p}: {} models, probabilities sum to {:.15}",
        report.models, report.probability_sum
    );
    if let (Some(k), Some(tv)) = (kernel, tv) {
        line.push_str(&format!("; {k} total variation {tv:.5}"));
    }
    println!("{line}");
    Ok(())
}
