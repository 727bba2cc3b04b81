use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::{Deserialize, Serialize};
use ssggm::inference::{bfdr_select, chain_diff, evaluate, EvalReport};

use super::fit::read_summary;
use super::generate::TruthFile;
use super::out_dir;
use crate::config;
use crate::error::CliError;
use crate::output::{num, read_draws, table_csv, write_atomic, write_json, RunManifest};

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SummarizeArgs {
    /// Settings file (TOML, or JSON with a .json extension).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// summary.json from `fit`; give two to compare chains.
    #[arg(long)]
    pub summary: Vec<PathBuf>,
    /// Bayesian FDR level of the edge selection (default 0.05).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Recompute intervals at this level from the stored draws.
    #[arg(long)]
    pub ci_level: Option<f64>,
    /// truth.json from `generate`.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Output directory (default: current directory).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChainDiff {
    pub mean_abs_diff_omega: f64,
    pub mean_abs_diff_prob: f64,
}

/// Contents of report.json.
#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub alpha: f64,
    pub ci_level: Option<f64>,
    pub selected: usize,
    pub evaluation: Option<EvalReport>,
    pub chain_diff: Option<ChainDiff>,
}

pub fn run(args: SummarizeArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut args = config::resolve(args.clone(), args.config.as_deref())?;
    if args.summary.is_empty() || args.summary.len() > 2 {
        return Err(CliError::usage("--summary must be given once or twice"));
    }
    let alpha = *args.alpha.get_or_insert(0.05);
    let mut fits = Vec::new();
    for path in &args.summary {
        let mut fit = read_summary(path)?;
        if let Some(level) = args.ci_level {
            if fit.summary.ci_level != Some(level) {
                let name = fit.draws_file.clone().ok_or_else(|| {
                    CliError::usage(format!("{} has no stored draws to recompute intervals", path.display()))
                })?;
                let draws = read_draws(&path.parent().unwrap_or(std::path::Path::new(".")).join(name))?;
                fit.summary.set_intervals(&draws, level)?;
            }
        }
        fits.push(fit);
    }
    let first = &fits[0].summary;
    let selection = bfdr_select(&first.incl_prob, alpha)?;
    let evaluation = match &args.truth {
        Some(path) => {
            let truth: TruthFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            Some(evaluate(first, &truth.truth, alpha)?)
        }
        None => None,
    };
    let diff = match fits.get(1) {
        Some(b) => {
            let (d_omega, d_prob) = chain_diff(first, &b.summary)?;
            Some(ChainDiff {
                mean_abs_diff_omega: d_omega,
                mean_abs_diff_prob: d_prob,
            })
        }
        None => None,
    };

    let mut manifest = RunManifest::new("summarize", serde_json::to_value(&args)?, 0);
    manifest.dataset_hash = fits[0].manifest.dataset_hash.clone();
    manifest.seal()?;
    manifest
        .timings
        .insert("total_seconds".into(), start.elapsed().as_secs_f64());
    let dir = out_dir(&args.out_dir);
    let rows: Vec<Vec<String>> = selection
        .iter()
        .map(|&(i, j)| vec![i.to_string(), j.to_string(), num(first.incl_prob[(i, j)])])
        .collect();
    write_atomic(
        &dir.join("selection.csv"),
        table_csv(&["i", "j", "incl_prob"], &rows, &manifest.hash).as_bytes(),
    )?;
    let report = Report {
        manifest,
        alpha,
        ci_level: first.ci_level,
        selected: selection.len(),
        evaluation,
        chain_diff: diff,
    };
    write_json(&dir.join("report.json"), &report)?;
    let mut line = format!("{} edges selected at alpha = {alpha}", report.selected);
    if let Some(e) = &report.evaluation {
        line.push_str(&format!(
            "; fdr {:.4}, power {:.4}, mae {:.4e}",
            e.fdr, e.power, e.mae_omega
        ));
    }
    if let Some(d) = &report.chain_diff {
        line.push_str(&format!(
            "; mean |diff| omega {:.4e}, inclusion {:.4e}",
            d.mean_abs_diff_omega, d.mean_abs_diff_prob
        ));
    }
    println!("{line}");
    Ok(())
}
