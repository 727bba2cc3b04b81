//! Subcommands and the pieces they share.

pub mod bench;
pub mod fit;
pub mod generate;
pub mod oracle;
pub mod summarize;

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use ssggm::data::read_csv;
use ssggm::priors::{elicit, ElicitationConfig, Elicited};
use ssggm::rng::stream_rng;
use ssggm::{standardize, Dataset, Hyperparams};

use crate::error::CliError;

/// Stream used for hyperparameter elicitation, apart from chain streams.
const ELICIT_STREAM: u64 = 1 << 30;

/// Prior settings; unset values of `theta`, `g1` and `lambda` are elicited.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperArgs {
    /// Prior edge probability.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Slab standard deviation.
    #[arg(long)]
    pub g1: Option<f64>,
    /// Rate of the diagonal prior Exp(lambda/2).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Elicit theta, g1 and lambda; explicitly given values still win.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub elicit: Option<bool>,
    /// Maximum node degree.
    #[arg(long)]
    pub dbar: Option<usize>,
    /// Probability of a birth move in the birth-death-swap kernel (default 0.75).
    #[arg(long)]
    pub p_birth: Option<f64>,
    /// Probability of a death move in the birth-death-swap kernel (default 0.125).
    #[arg(long)]
    pub p_death: Option<f64>,
    /// Tempering exponent of the regression proposal.
    #[arg(long)]
    pub upsilon: Option<f64>,
    /// Prior precision of the regression proposal (default g1^-2).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Expected node degree used to elicit theta.
    #[arg(long)]
    pub expected_degree: Option<f64>,
    /// P(Omega_jj > 1) used to elicit lambda.
    #[arg(long)]
    pub diag_quantile: Option<f64>,
    /// Target prior probability of positive definiteness used to elicit g1.
    #[arg(long)]
    pub pd_target: Option<f64>,
    /// Monte-Carlo draws per PD-rate estimate.
    #[arg(long)]
    pub mc_samples: Option<usize>,
}

impl HyperArgs {
    pub fn elicitation(&self) -> ElicitationConfig {
        let mut cfg = ElicitationConfig::default();
        if let Some(v) = self.expected_degree {
            cfg.expected_degree = v;
        }
        if let Some(v) = self.diag_quantile {
            cfg.diag_quantile = v;
        }
        if let Some(v) = self.pd_target {
            cfg.pd_target = v;
        }
        if let Some(v) = self.mc_samples {
            cfg.mc_samples = v;
        }
        cfg
    }

    /// Validated hyperparameters for `p` variables, with the elicited
    /// values when elicitation ran.
    pub fn resolve(&self, p: usize, seed: u64) -> Result<(Hyperparams, Option<Elicited>), CliError> {
        let needed = self.elicit == Some(true) || self.theta.is_none() || self.g1.is_none() || self.lambda.is_none();
        let elicited = if needed {
            Some(elicit(p, &self.elicitation(), &mut stream_rng(seed, ELICIT_STREAM))?)
        } else {
            None
        };
        let pick = |given: Option<f64>, f: fn(&Elicited) -> f64| {
            given.unwrap_or_else(|| f(elicited.as_ref().expect("elicited")))
        };
        let mut hyper = Hyperparams::new(
            pick(self.theta, |e| e.theta),
            pick(self.g1, |e| e.g1),
            pick(self.lambda, |e| e.lambda),
        );
        hyper.dbar = self.dbar;
        if let Some(v) = self.p_birth {
            hyper.p_birth = v;
        }
        if let Some(v) = self.p_death {
            hyper.p_death = v;
        }
        hyper.upsilon = self.upsilon;
        hyper.tau = self.tau;
        Ok((hyper.validate(p)?, elicited))
    }
}

/// Reads a data file. Standardization defaults to on, except for simulated
/// data (a `truth.json` next to the file), which stays on its own scale.
pub fn load_dataset(path: &Path, standardize_flag: Option<bool>) -> Result<(Dataset, bool), CliError> {
    let y = read_csv(path)?;
    let simulated = path.parent().unwrap_or(Path::new(".")).join("truth.json").exists();
    let on = standardize_flag.unwrap_or(!simulated);
    let data = if on { standardize(&y)? } else { Dataset::new(y)? };
    Ok((data, on))
}

pub fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

pub fn out_dir(v: &Option<PathBuf>) -> PathBuf {
    v.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Parses a comma-separated list.
pub fn parse_list<T: std::str::FromStr>(text: &str, flag: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("--{flag}: cannot parse `{s}`")))
        })
        .collect()
}
