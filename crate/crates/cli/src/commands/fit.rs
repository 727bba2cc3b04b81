use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::Args;
use serde::{Deserialize, Serialize};
use ssggm::data::read_csv;
use ssggm::inference::PosteriorSummary;
use ssggm::lr_proposal::{build_all_tables, read_tables, write_tables, TableSampler};
use ssggm::priors::Elicited;
use ssggm::samplers::kernels::KernelStats;
use ssggm::samplers::{Diagnostics, Timing};
use ssggm::{Algorithm, Chain, Estimator, Hyperparams, Init, SamplerConfig};

use super::{load_dataset, out_dir, required, HyperArgs};
use crate::config;
use crate::error::CliError;
use crate::output::{matrix_csv, num, table_csv, write_atomic, write_draws, write_json, RunManifest};

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FitArgs {
    /// Settings file (TOML, or JSON with a .json extension).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Headerless CSV, one observation per row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// gibbs, bdmh, lit, gimh or exact.
    #[arg(long)]
    pub algorithm: Option<String>,
    /// Total iterations including warmup (default 15000).
    #[arg(long)]
    pub iters: Option<usize>,
    /// Warmup iterations (default 5000).
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Seed of all random streams (default 1).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Inner moves per column visit, or `auto`.
    #[arg(long = "M", alias = "moves")]
    pub moves: Option<String>,
    /// Keep every k-th retained sweep in draws and traces (default 1).
    #[arg(long)]
    pub thin: Option<usize>,
    /// Sweeps between full recomputations of the covariance.
    #[arg(long)]
    pub refresh_every: Option<usize>,
    /// identity, random, or a CSV file holding the starting precision matrix.
    #[arg(long)]
    pub init: Option<String>,
    /// Center and scale the data (default: on unless a truth.json sits next to the data).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub standardize: Option<bool>,
    /// rb or indicator (default rb for gibbs, indicator otherwise).
    #[arg(long)]
    pub estimator: Option<String>,
    /// Level of the credible intervals (default 0.95).
    #[arg(long)]
    pub ci_level: Option<f64>,
    /// Write all retained draws to draws.bin (default true).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub store_draws: Option<bool>,
    /// Write the edge set of every retained sweep to z_trace.csv.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub record_z: Option<bool>,
    /// Entry `i:j` whose value is written to omega_trace.csv (repeatable).
    #[arg(long)]
    pub trace_edge: Vec<String>,
    /// Regression-chain length per proposal table.
    #[arg(long)]
    pub table_length: Option<usize>,
    /// Warmup of the regression chain per proposal table.
    #[arg(long)]
    pub table_warmup: Option<usize>,
    /// gibbs or bdmh.
    #[arg(long)]
    pub table_sampler: Option<String>,
    /// Proposal-table file reused when it matches this run and written otherwise.
    #[arg(long)]
    pub tables: Option<PathBuf>,
    /// Largest number of swap neighbours scored per locally-informed step.
    #[arg(long)]
    pub lit_swap_cap: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub hyper: HyperArgs,
    /// Output directory (default: current directory).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Contents of summary.json.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitSummary {
    pub manifest: RunManifest,
    pub n: usize,
    pub p: usize,
    pub standardized: bool,
    pub hyper: Hyperparams,
    pub elicited: Option<Elicited>,
    pub algorithm: Algorithm,
    pub moves: usize,
    pub iterations: usize,
    pub warmup: usize,
    pub acceptance: KernelStats,
    pub acceptance_rate: Option<f64>,
    pub ejd: Option<f64>,
    pub table_sizes: Option<Vec<usize>>,
    pub diagnostics: Diagnostics,
    pub timing: Timing,
    pub summary: PosteriorSummary,
    /// File name of the draws sidecar, relative to summary.json.
    pub draws_file: Option<String>,
}

fn parse_estimator(s: &str) -> Result<Estimator, CliError> {
    match s {
        "rb" | "rao_blackwell" => Ok(Estimator::RaoBlackwell),
        "indicator" => Ok(Estimator::Indicator),
        other => Err(CliError::usage(format!("--estimator: unknown estimator `{other}`"))),
    }
}

fn parse_edge(s: &str, p: usize) -> Result<(usize, usize), CliError> {
    let bad = || CliError::usage(format!("--trace-edge expects i:j with indices below {p}, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (i, j): (usize, usize) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    if i >= p || j >= p {
        return Err(bad());
    }
    Ok((i, j))
}

fn parse_init(s: Option<&str>) -> Result<Init, CliError> {
    Ok(match s.unwrap_or("identity") {
        "identity" => Init::Identity,
        "random" => Init::RandomDiagonallyDominant,
        path => Init::Given(read_csv(path)?),
    })
}

/// Sampler settings for `p` variables from the flags.
fn sampler_config(args: &FitArgs, p: usize) -> Result<SamplerConfig, CliError> {
    let algorithm: Algorithm = args.algorithm.as_deref().unwrap_or("gibbs").parse()?;
    let mut cfg = SamplerConfig::new(
        algorithm,
        args.iters.unwrap_or(15_000),
        args.warmup.unwrap_or(5_000),
        args.seed.unwrap_or(1),
    );
    cfg.moves = match args.moves.as_deref() {
        None | Some("auto") => None,
        Some(m) => Some(
            m.parse()
                .map_err(|_| CliError::usage(format!("--M expects a count or `auto`, got `{m}`")))?,
        ),
    };
    if let Some(v) = args.thin {
        cfg.thin = v;
    }
    if let Some(v) = args.refresh_every {
        cfg.refresh_every = v;
    }
    cfg.estimator = args.estimator.as_deref().map(parse_estimator).transpose()?;
    cfg.store_draws = args.store_draws.unwrap_or(true);
    cfg.record_z = args.record_z.unwrap_or(false);
    cfg.record_edges = args
        .trace_edge
        .iter()
        .map(|e| parse_edge(e, p))
        .collect::<Result<_, _>>()?;
    if let Some(v) = args.table_length {
        cfg.table.length = v;
    }
    if let Some(v) = args.table_warmup {
        cfg.table.warmup = v;
    }
    if let Some(s) = args.table_sampler.as_deref() {
        cfg.table.sampler = match s {
            "gibbs" => TableSampler::Gibbs,
            "bdmh" => TableSampler::Bdmh,
            other => return Err(CliError::usage(format!("--table-sampler: unknown sampler `{other}`"))),
        };
    }
    cfg.lit_swap_cap = args.lit_swap_cap;
    cfg.validate(p)?;
    Ok(cfg)
}

fn table_key(data_hash: &str, hyper: &Hyperparams, cfg: &SamplerConfig) -> String {
    format!("{data_hash}|{hyper:?}|{:?}|{}", cfg.table, cfg.seed)
}

pub fn run(args: FitArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut args = config::resolve(args.clone(), args.config.as_deref())?;
    // echo the defaults in the manifest
    args.algorithm.get_or_insert_with(|| "gibbs".into());
    args.iters.get_or_insert(15_000);
    args.warmup.get_or_insert(5_000);
    args.seed.get_or_insert(1);
    args.ci_level.get_or_insert(0.95);
    let data_path = required(&args.data, "data")?;
    let (data, standardized) = load_dataset(&data_path, args.standardize)?;
    let p = data.p();
    let cfg = sampler_config(&args, p)?;
    let ci_level = args.ci_level.unwrap_or(0.95);
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(CliError::usage(format!(
            "--ci-level must lie in (0, 1), got {ci_level}"
        )));
    }
    let init = parse_init(args.init.as_deref())?;
    let (hyper, elicited) = args.hyper.resolve(p, cfg.seed)?;

    let mut manifest = RunManifest::new("fit", serde_json::to_value(&args)?, cfg.seed);
    manifest.dataset_hash = Some(data.hash());
    manifest.elicited = elicited;
    manifest.hyper = Some(hyper.clone());
    manifest.seal()?;

    let tables = match (&args.tables, cfg.algorithm) {
        (Some(path), Algorithm::Gimh) => {
            let key = table_key(&data.hash(), &hyper, &cfg);
            let cached = if path.exists() { read_tables(path, &key)? } else { None };
            let tables = match cached {
                Some(t) => t,
                None => {
                    let t = build_all_tables(&data, &hyper, &cfg.table, cfg.seed)?;
                    write_tables(path, &key, &t)?;
                    t
                }
            };
            Some(Arc::new(tables))
        }
        _ => None,
    };
    let moves = cfg.moves.unwrap_or(cfg.algorithm.default_moves(&hyper, p));
    let chain = Chain::with_tables(&data, hyper.clone(), cfg.clone(), init, tables)?;
    let mut out = chain.run()?;
    let mut summary = PosteriorSummary::from_output(&out, None)?;
    if let Some(draws) = &out.draws {
        if draws.count() >= ssggm::inference::MIN_INTERVAL_SAMPLES {
            summary.set_intervals(draws, ci_level)?;
        }
    }
    manifest
        .timings
        .insert("table_seconds".into(), out.timing.table_seconds);
    manifest
        .timings
        .insert("warmup_seconds".into(), out.timing.warmup_seconds);
    manifest
        .timings
        .insert("sampling_seconds".into(), out.timing.sampling_seconds);
    manifest
        .timings
        .insert("total_seconds".into(), start.elapsed().as_secs_f64());

    let dir = out_dir(&args.out_dir);
    let hash = manifest.hash.clone();
    write_atomic(
        &dir.join("incl_prob.csv"),
        matrix_csv(&summary.incl_prob, &hash).as_bytes(),
    )?;
    write_atomic(
        &dir.join("mean_omega.csv"),
        matrix_csv(&summary.mean_omega, &hash).as_bytes(),
    )?;
    let draws_file = match out.draws.take() {
        Some(d) => {
            write_draws(&dir.join("draws.bin"), &d, &hash)?;
            Some("draws.bin".to_string())
        }
        None => None,
    };
    if cfg.record_z {
        let rows: Vec<Vec<String>> = out
            .z_trace
            .iter()
            .enumerate()
            .flat_map(|(k, edges)| {
                let iteration = cfg.warmup + 1 + k * cfg.thin;
                edges
                    .iter()
                    .map(move |&(i, j)| vec![iteration.to_string(), i.to_string(), j.to_string()])
            })
            .collect();
        write_atomic(
            &dir.join("z_trace.csv"),
            table_csv(&["iteration", "i", "j"], &rows, &hash).as_bytes(),
        )?;
    }
    if !cfg.record_edges.is_empty() {
        let rows: Vec<Vec<String>> = out
            .omega_trace
            .iter()
            .map(|t| vec![t.iteration.to_string(), format!("{}:{}", t.i, t.j), num(t.value)])
            .collect();
        write_atomic(
            &dir.join("omega_trace.csv"),
            table_csv(&["iteration", "edge", "value"], &rows, &hash).as_bytes(),
        )?;
    }
    let report = FitSummary {
        manifest,
        n: data.n(),
        p,
        standardized,
        hyper,
        elicited,
        algorithm: cfg.algorithm,
        moves,
        iterations: out.iterations,
        warmup: out.warmup,
        acceptance: out.acceptance,
        acceptance_rate: out.acceptance_rate,
        ejd: out.ejd,
        table_sizes: out.table_sizes.clone(),
        diagnostics: out.diagnostics.clone(),
        timing: out.timing.clone(),
        summary,
        draws_file,
    };
    write_json(&dir.join("summary.json"), &report)?;
    println!(
        "{} on p = {p}, n = {}: {} retained sweeps, {:.3e} s per sweep{}",
        cfg.algorithm,
        data.n(),
        report.summary.retained,
        out.timing.seconds_per_sweep,
        out.acceptance_rate
            .map(|r| format!(", acceptance {r:.3}"))
            .unwrap_or_default()
    );
    Ok(())
}

/// Reads summary.json written by `fit`.
pub fn read_summary(path: &Path) -> Result<FitSummary, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
