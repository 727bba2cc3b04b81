use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use ssggm::inference::{chain_diff, PosteriorSummary};
use ssggm::rng::stream_rng;
use ssggm::synth::{gen_data, generate_truth};
use ssggm::{Algorithm, Chain, Init, SamplerConfig};

use super::generate::scenario;
use super::{out_dir, parse_list, HyperArgs};
use crate::config;
use crate::error::CliError;
use crate::output::{num, table_csv, write_atomic, write_json, RunManifest};

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchArgs {
    /// Settings file (TOML, or JSON with a .json extension).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Simulation scenario (default tridiagonal).
    #[arg(long)]
    pub scenario: Option<String>,
    /// Comma-separated dimensions (default 50,100,200).
    #[arg(long)]
    pub p: Option<String>,
    /// Sample size: a multiple of p such as `2p`, or a fixed count (default 2p).
    #[arg(long)]
    pub n_rule: Option<String>,
    /// Comma-separated kernels (default gibbs).
    #[arg(long)]
    pub algorithms: Option<String>,
    /// Chain pairs per dimension and kernel (default 1).
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Iterations per chain including warmup (default 5000).
    #[arg(long)]
    pub iters: Option<usize>,
    /// Warmup iterations (default 1000).
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Number of post-warmup points at which the chains are compared (default 10).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Wall-clock budget in seconds; cells still running when it expires are cut short and flagged.
    #[arg(long)]
    pub time_budget: Option<f64>,
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

fn sample_size(rule: &str, p: usize) -> Result<usize, CliError> {
    let bad = || CliError::usage(format!("--n-rule expects `<k>p` or a count, got `{rule}`"));
    match rule.strip_suffix('p') {
        Some("") => Ok(p),
        Some(k) => k.trim().parse::<usize>().map(|k| k * p).map_err(|_| bad()),
        None => rule.trim().parse().map_err(|_| bad()),
    }
}

struct Cell {
    p: usize,
    n: usize,
    algorithm: Algorithm,
    replicate: usize,
}

/// One comparison point of a cell.
struct Point {
    iteration: usize,
    elapsed: f64,
    diff_prob: f64,
    diff_omega: f64,
}

struct CellResult {
    points: Vec<Point>,
    per_1000_total: f64,
    per_1000_post: f64,
    ejd: Option<f64>,
    partial: bool,
}

#[derive(Serialize)]
struct BenchReport {
    manifest: RunManifest,
    cells: usize,
    partial_cells: usize,
    budget_exceeded: bool,
}

fn run_cell(cell: &Cell, args: &BenchArgs, seed: u64, deadline: Option<Instant>) -> Result<CellResult, CliError> {
    let iters = args.iters.unwrap_or(5_000);
    let warmup = args.warmup.unwrap_or(1_000);
    let grid = args.grid.unwrap_or(10).max(1);
    let sc = scenario(args.scenario.as_deref().unwrap_or("tridiagonal"), cell.p, None, None)?;
    let stream = ((cell.p as u64) << 20) + cell.replicate as u64;
    let mut rng = stream_rng(seed, stream);
    let truth = generate_truth(&sc, cell.p, &mut rng)?;
    let data = gen_data(&truth.omega0, cell.n, &mut rng)?;
    let (hyper, _) = args.hyper.resolve(cell.p, seed)?;
    let chain_seed = seed.wrapping_add(stream << 1);
    let mut cfg = SamplerConfig::new(cell.algorithm, iters, warmup, chain_seed);
    cfg.store_draws = false;
    let mut a = Chain::new(&data, hyper.clone(), cfg.clone(), Init::Identity)?;
    cfg.seed = chain_seed + 1;
    let mut b = Chain::new(&data, hyper, cfg, Init::RandomDiagonallyDominant)?;
    let post = iters - warmup;
    let checkpoints: Vec<usize> = (1..=grid)
        .map(|k| warmup + (k * post).div_ceil(grid))
        .filter(|&c| c > warmup)
        .collect();
    let mut points = Vec::new();
    let mut partial = false;
    for it in 1..=iters {
        if deadline.is_some_and(|d| Instant::now() > d) {
            partial = true;
            break;
        }
        a.sweep()?;
        b.sweep()?;
        if checkpoints.contains(&it) {
            let summary = |c: &Chain<'_>| {
                let (mean, incl) = c.estimates().expect("checkpoints follow warmup");
                PosteriorSummary::from_estimates(mean, incl, c.retained(), c.config().estimator())
            };
            let (diff_omega, diff_prob) = chain_diff(&summary(&a), &summary(&b))?;
            let t = a.timing();
            points.push(Point {
                iteration: it,
                elapsed: t.table_seconds + t.warmup_seconds + t.sampling_seconds,
                diff_prob,
                diff_omega,
            });
        }
    }
    let done = a.iteration();
    let out = a.finish();
    let t = &out.timing;
    let per = |secs: f64, sweeps: usize| {
        if sweeps == 0 {
            f64::NAN
        } else {
            1000.0 * secs / sweeps as f64
        }
    };
    Ok(CellResult {
        points,
        per_1000_total: per(t.warmup_seconds + t.sampling_seconds, done),
        per_1000_post: per(t.sampling_seconds, done.saturating_sub(warmup)),
        ejd: out.ejd,
        partial,
    })
}

pub fn run(args: BenchArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut args = config::resolve(args.clone(), args.config.as_deref())?;
    let seed = *args.seed.get_or_insert(1);
    let ps: Vec<usize> = parse_list(args.p.get_or_insert_with(|| "50,100,200".into()), "p")?;
    let n_rule = args.n_rule.get_or_insert_with(|| "2p".into()).clone();
    let algorithms: Vec<Algorithm> = args
        .algorithms
        .get_or_insert_with(|| "gibbs".into())
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()?;
    let replicates = *args.replicates.get_or_insert(1);
    let iters = *args.iters.get_or_insert(5_000);
    let warmup = *args.warmup.get_or_insert(1_000);
    if warmup >= iters {
        return Err(CliError::usage("--warmup must be below --iters"));
    }
    let deadline = args
        .time_budget
        .map(|b| start + std::time::Duration::from_secs_f64(b.max(0.0)));

    let mut cells = Vec::new();
    for &p in &ps {
        let n = sample_size(&n_rule, p)?;
        for &algorithm in &algorithms {
            for replicate in 0..replicates {
                cells.push(Cell {
                    p,
                    n,
                    algorithm,
                    replicate,
                });
            }
        }
    }
    let results: Vec<CellResult> = cells
        .par_iter()
        .map(|c| run_cell(c, &args, seed, deadline))
        .collect::<Result<_, _>>()?;

    let mut manifest = RunManifest::new("bench", serde_json::to_value(&args)?, seed);
    manifest.seal()?;
    manifest
        .timings
        .insert("total_seconds".into(), start.elapsed().as_secs_f64());
    let mut rows = Vec::new();
    for (c, r) in cells.iter().zip(&results) {
        for pt in &r.points {
            rows.push(vec![
                c.p.to_string(),
                c.n.to_string(),
                c.algorithm.to_string(),
                c.replicate.to_string(),
                pt.iteration.to_string(),
                num(pt.elapsed),
                num(pt.diff_prob),
                num(pt.diff_omega),
                num(r.per_1000_total),
                num(r.per_1000_post),
                r.ejd.map(num).unwrap_or_default(),
                r.partial.to_string(),
            ]);
        }
    }
    let header = [
        "p",
        "n",
        "algorithm",
        "replicate",
        "iteration",
        "elapsed_seconds",
        "mean_abs_diff_prob",
        "mean_abs_diff_omega",
        "seconds_per_1000_with_warmup",
        "seconds_per_1000_post_warmup",
        "ejd",
        "partial",
    ];
    let dir = out_dir(&args.out_dir);
    write_atomic(
        &dir.join("bench.csv"),
        table_csv(&header, &rows, &manifest.hash).as_bytes(),
    )?;
    let partial_cells = results.iter().filter(|r| r.partial).count();
    write_json(
        &dir.join("bench.json"),
        &BenchReport {
            manifest,
            cells: cells.len(),
            partial_cells,
            budget_exceeded: partial_cells > 0,
        },
    )?;
    for (c, r) in cells.iter().zip(&results) {
        println!(
            "p = {:4}, {:5}, replicate {}: {:.4} s per 1000 sweeps ({:.4} post-warmup){}",
            c.p,
            c.algorithm.to_string(),
            c.replicate,
            r.per_1000_total,
            r.per_1000_post,
            if r.partial {
                " [partial: time budget exceeded]"
            } else {
                ""
            }
        );
    }
    if partial_cells > 0 {
        eprintln!("warning: time budget exceeded; {partial_cells} cells are partial");
    }
    Ok(())
}
