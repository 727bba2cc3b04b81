//! The outer random-scan sweep and the model-space kernels it runs.
//!
//! Each sweep visits every column once in a fresh random order. A visit
//! reads `(Ω_{-j-j})⁻¹` from `Σ`, updates the column's edge pattern with the
//! configured kernel, draws the column values in closed form, and writes
//! the new column back with a one-rank update of `Σ`.

pub mod bdmh;
pub mod gibbs;
pub mod gimh;
pub mod kernels;
pub mod lit;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::conditional::{
    sample_model_exact, sample_u1_and_assemble, sample_u2, ColumnContext, ModelCache, ModelFamily, Target,
};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::inference::EdgeDraws;
use crate::linalg::full_index;
use crate::lr_proposal::{build_all_tables, LrColumnContext, ProposalTable, TableConfig, TableExtension};
use crate::rng::{stream_rng, ChainRng};
use crate::state::PrecisionState;
use kernels::{KernelStats, MoveProbs};

/// Stream used to draw a random starting matrix.
pub const INIT_STREAM: u64 = 1 << 31;

/// Inner model-space kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// One coordinate-wise Gibbs scan per column visit.
    Gibbs,
    /// Birth-death-swap Metropolis-Hastings.
    Bdmh,
    /// Locally-informed thresholded proposals.
    Lit,
    /// Globally-informed independence proposals from regression tables.
    Gimh,
    /// Direct draw from the enumerated conditional (small `p` only).
    Exact,
}

impl Algorithm {
    pub fn default_estimator(self) -> Estimator {
        match self {
            Algorithm::Gibbs => Estimator::RaoBlackwell,
            _ => Estimator::Indicator,
        }
    }

    /// Inner moves per column visit when none are configured.
    pub fn default_moves(self, hyper: &Hyperparams, p: usize) -> usize {
        match self {
            Algorithm::Lit => 1,
            _ => hyper.inner_moves(p),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Gibbs => "gibbs",
            Algorithm::Bdmh => "bdmh",
            Algorithm::Lit => "lit",
            Algorithm::Gimh => "gimh",
            Algorithm::Exact => "exact",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gibbs" => Ok(Algorithm::Gibbs),
            "bdmh" => Ok(Algorithm::Bdmh),
            "lit" => Ok(Algorithm::Lit),
            "gimh" => Ok(Algorithm::Gimh),
            "exact" => Ok(Algorithm::Exact),
            other => Err(Error::config("algorithm", format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Edge inclusion estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Average of the conditional inclusion probabilities (Gibbs only).
    RaoBlackwell,
    /// Average of the sampled edge indicators.
    Indicator,
}

/// Sampler settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub algorithm: Algorithm,
    /// Total sweeps including warmup.
    pub iterations: usize,
    pub warmup: usize,
    /// Inner moves per column visit; the kernel default when unset.
    pub moves: Option<usize>,
    /// Stride for stored draws and traces.
    pub thin: usize,
    /// Sweeps between full recomputations of `Σ`.
    pub refresh_every: usize,
    pub seed: u64,
    /// Keep the edge set of every stored sweep.
    pub record_z: bool,
    /// Keep the value of these entries at every stored sweep.
    pub record_edges: Vec<(usize, usize)>,
    /// Keep per-sweep Rao-Blackwellised and indicator values of every edge.
    pub record_inclusion: bool,
    /// Keep all post-warmup draws for credible intervals.
    pub store_draws: bool,
    pub estimator: Option<Estimator>,
    pub table: TableConfig,
    /// Largest number of swap neighbours scored per locally-informed step.
    pub lit_swap_cap: Option<usize>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Gibbs,
            iterations: 15_000,
            warmup: 5_000,
            moves: None,
            thin: 1,
            refresh_every: 100,
            seed: 0,
            record_z: false,
            record_edges: Vec::new(),
            record_inclusion: false,
            store_draws: true,
            estimator: None,
            table: TableConfig::default(),
            lit_swap_cap: None,
        }
    }
}

impl SamplerConfig {
    pub fn new(algorithm: Algorithm, iterations: usize, warmup: usize, seed: u64) -> Self {
        Self {
            algorithm,
            iterations,
            warmup,
            seed,
            ..Self::default()
        }
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator.unwrap_or(self.algorithm.default_estimator())
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.warmup > self.iterations {
            return Err(Error::config("warmup", "must not exceed iterations"));
        }
        if self.moves == Some(0) {
            return Err(Error::config("moves", "must be at least 1"));
        }
        if self.thin == 0 {
            return Err(Error::config("thin", "must be at least 1"));
        }
        if self.refresh_every == 0 {
            return Err(Error::config("refresh_every", "must be at least 1"));
        }
        if self.lit_swap_cap == Some(0) {
            return Err(Error::config("lit_swap_cap", "must be at least 1"));
        }
        if let Some(&(i, j)) = self.record_edges.iter().find(|&&(i, j)| i >= p || j >= p) {
            return Err(Error::config(
                "record_edges",
                format!("entry ({i}, {j}) is outside a {p}x{p} matrix"),
            ));
        }
        if self.estimator() == Estimator::RaoBlackwell && self.algorithm != Algorithm::Gibbs {
            return Err(Error::config(
                "estimator",
                "Rao-Blackwellised estimates require the gibbs kernel",
            ));
        }
        if self.algorithm == Algorithm::Gimh && self.table.length <= self.table.warmup {
            return Err(Error::config("table.length", "must exceed table.warmup"));
        }
        Ok(())
    }
}

/// Starting value of `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub enum Init {
    Identity,
    Given(DMatrix<f64>),
    /// Random diagonally dominant matrix drawn from [`INIT_STREAM`].
    RandomDiagonallyDominant,
}

/// Numerical health of the run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub refreshes: usize,
    /// Largest change of any `Σ` entry at a scheduled refresh.
    pub max_refresh_drift: f64,
    /// `max |ΩΣ - I|` at the end of the run.
    pub final_inverse_residual: f64,
    pub final_max_degree: usize,
    pub cache_hits: u64,
    pub cache_misses: u64,
}

/// Wall-clock timings; the only non-deterministic part of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub table_seconds: f64,
    pub warmup_seconds: f64,
    pub sampling_seconds: f64,
    /// Mean seconds per sweep over all sweeps.
    pub seconds_per_sweep: f64,
}

/// One recorded entry value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Posterior summaries streamed from a chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainOutput {
    pub p: usize,
    pub algorithm: Algorithm,
    pub estimator: Estimator,
    pub iterations: usize,
    pub warmup: usize,
    pub thin: usize,
    /// Post-warmup sweeps averaged into the estimates.
    pub retained: usize,
    /// Posterior mean of `Ω` (empty when nothing was retained).
    pub mean_omega: Vec<Vec<f64>>,
    /// Inclusion probabilities under `estimator`; diagonal fixed at 1.
    pub incl_prob: Vec<Vec<f64>>,
    pub incl_indicator: Vec<Vec<f64>>,
    pub incl_rb: Option<Vec<Vec<f64>>>,
    /// Mean normalized Hamming distance between consecutive retained graphs.
    pub ejd: Option<f64>,
    pub acceptance: KernelStats,
    pub acceptance_rate: Option<f64>,
    pub table_sizes: Option<Vec<usize>>,
    pub diagnostics: Diagnostics,
    pub timing: Timing,
    #[serde(skip)]
    pub draws: Option<EdgeDraws>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z_trace: Vec<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omega_trace: Vec<TracePoint>,
    /// Per retained sweep, Rao-Blackwellised values of each pair `i < j`
    /// in [`pair_index`] order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rb_trace: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indicator_trace: Vec<Vec<u8>>,
}

/// Position of pair `i < j` in row-major upper-triangle order.
pub fn pair_index(i: usize, j: usize, p: usize) -> usize {
    debug_assert!(i < j && j < p);
    i * (2 * p - i - 1) / 2 + (j - i - 1)
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

struct Accumulators {
    sum_omega: DMatrix<f64>,
    indicator: DMatrix<f64>,
    rb: DMatrix<f64>,
    retained: usize,
    prev_edges: Option<Vec<(usize, usize)>>,
    ejd_sum: f64,
    ejd_count: usize,
    draws: Option<EdgeDraws>,
    z_trace: Vec<Vec<(usize, usize)>>,
    omega_trace: Vec<TracePoint>,
    rb_trace: Vec<Vec<f64>>,
    indicator_trace: Vec<Vec<u8>>,
}

/// A single chain. Use [`Chain::sweep`] for step-wise control or
/// [`run_chain`] for a complete run.
pub struct Chain<'d> {
    data: &'d Dataset,
    hyper: Hyperparams,
    cfg: SamplerConfig,
    state: PrecisionState,
    rng: ChainRng,
    iteration: usize,
    moves: usize,
    probs: MoveProbs,
    tables: Option<Arc<Vec<ProposalTable>>>,
    extensions: Vec<TableExtension>,
    lr_caches: Vec<ModelCache>,
    cache: ModelCache,
    perm: Vec<usize>,
    rb_sweep: DMatrix<f64>,
    rb_scratch: Vec<f64>,
    acc: Accumulators,
    stats: KernelStats,
    diagnostics: Diagnostics,
    timing: Timing,
}

impl<'d> Chain<'d> {
    /// Validates the settings, builds the starting state and, for the
    /// globally-informed kernel, the proposal tables.
    pub fn new(data: &'d Dataset, hyper: Hyperparams, cfg: SamplerConfig, init: Init) -> Result<Self> {
        Self::with_tables(data, hyper, cfg, init, None)
    }

    /// As [`Chain::new`], reusing prebuilt proposal tables when given.
    pub fn with_tables(
        data: &'d Dataset,
        hyper: Hyperparams,
        cfg: SamplerConfig,
        init: Init,
        tables: Option<Arc<Vec<ProposalTable>>>,
    ) -> Result<Self> {
        let p = data.p();
        let hyper = hyper.validate(p)?;
        cfg.validate(p)?;
        let dbar = hyper.dbar(p);
        let state = match init {
            Init::Identity => PrecisionState::identity(p, dbar),
            Init::Given(m) => {
                if m.nrows() != p {
                    return Err(Error::Initialization(format!(
                        "initial matrix is {}x{}, data has p = {p}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                PrecisionState::from_dense(&m, dbar)?
            }
            Init::RandomDiagonallyDominant => {
                let mut rng = stream_rng(cfg.seed, INIT_STREAM);
                PrecisionState::random_diagonally_dominant(p, dbar, &mut rng)
            }
        };
        if cfg.algorithm == Algorithm::Exact && p > crate::conditional::MAX_ENUMERATION_P {
            return Err(Error::Capability(format!(
                "the exact kernel supports p <= {}, got {p}",
                crate::conditional::MAX_ENUMERATION_P
            )));
        }
        let mut timing = Timing::default();
        let tables = if cfg.algorithm == Algorithm::Gimh {
            let tables = match tables {
                Some(t) => t,
                None => {
                    let start = Instant::now();
                    let built = build_all_tables(data, &hyper, &cfg.table, cfg.seed)?;
                    timing.table_seconds = start.elapsed().as_secs_f64();
                    Arc::new(built)
                }
            };
            if tables.len() != p || tables.iter().enumerate().any(|(j, t)| t.column() != j) {
                return Err(Error::Dimension("one proposal table per column required".into()));
            }
            Some(tables)
        } else {
            None
        };
        let moves = cfg.moves.unwrap_or(cfg.algorithm.default_moves(&hyper, p));
        let store = cfg.store_draws && cfg.iterations > cfg.warmup;
        let acc = Accumulators {
            sum_omega: DMatrix::zeros(p, p),
            indicator: DMatrix::zeros(p, p),
            rb: DMatrix::zeros(p, p),
            retained: 0,
            prev_edges: None,
            ejd_sum: 0.0,
            ejd_count: 0,
            draws: store.then(|| EdgeDraws::new(p)),
            z_trace: Vec::new(),
            omega_trace: Vec::new(),
            rb_trace: Vec::new(),
            indicator_trace: Vec::new(),
        };
        Ok(Self {
            data,
            probs: MoveProbs::new(hyper.p_birth, hyper.p_death),
            hyper,
            rng: stream_rng(cfg.seed, 0),
            cfg,
            state,
            iteration: 0,
            moves,
            extensions: vec![TableExtension::default(); if tables.is_some() { p } else { 0 }],
            lr_caches: vec![ModelCache::new(); if tables.is_some() { p } else { 0 }],
            tables,
            cache: ModelCache::new(),
            perm: (0..p).collect(),
            rb_sweep: DMatrix::zeros(p, p),
            rb_scratch: vec![0.0; p - 1],
            acc,
            stats: KernelStats::default(),
            diagnostics: Diagnostics::default(),
            timing,
        })
    }

    pub fn state(&self) -> &PrecisionState {
        &self.state
    }

    /// Completed sweeps.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Post-warmup sweeps accumulated so far.
    pub fn retained(&self) -> usize {
        self.acc.retained
    }

    pub fn hyper(&self) -> &Hyperparams {
        &self.hyper
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    pub fn tables(&self) -> Option<&Arc<Vec<ProposalTable>>> {
        self.tables.as_ref()
    }

    pub fn stats(&self) -> KernelStats {
        self.stats
    }

    pub fn timing(&self) -> &Timing {
        &self.timing
    }

    /// One full sweep over all columns in random order.
    pub fn sweep(&mut self) -> Result<()> {
        let start = Instant::now();
        self.perm.shuffle(&mut self.rng);
        for r in 0..self.perm.len() {
            let j = self.perm[r];
            self.update_column(j).map_err(|e| Error::Sweep {
                iteration: self.iteration + 1,
                column: j,
                source: Box::new(e),
            })?;
        }
        self.iteration += 1;
        if self.iteration.is_multiple_of(self.cfg.refresh_every) {
            let drift = self.state.refresh()?;
            self.diagnostics.refreshes += 1;
            self.diagnostics.max_refresh_drift = self.diagnostics.max_refresh_drift.max(drift);
        }
        if self.iteration > self.cfg.warmup {
            self.accumulate();
        }
        let secs = start.elapsed().as_secs_f64();
        if self.iteration > self.cfg.warmup {
            self.timing.sampling_seconds += secs;
        } else {
            self.timing.warmup_seconds += secs;
        }
        Ok(())
    }

    fn update_column(&mut self, j: usize) -> Result<()> {
        let ctx = ColumnContext::from_state(&self.state, self.data, &self.hyper, j)?;
        self.cache.clear();
        let mut z = self.state.column_model(j);
        let mut u2 = None;
        match self.cfg.algorithm {
            Algorithm::Gibbs => {
                let mut target = Target::new(&ctx, &mut self.cache);
                gibbs::inner_gibbs(&mut target, &mut z, &mut self.rng, Some(&mut self.rb_scratch))?;
                for (r, &v) in self.rb_scratch.iter().enumerate() {
                    self.rb_sweep[(full_index(j, r), j)] = v;
                }
            }
            Algorithm::Bdmh => {
                let mut target = Target::new(&ctx, &mut self.cache);
                bdmh::inner_bdmh(
                    &mut target,
                    &mut z,
                    self.moves,
                    &self.probs,
                    &mut self.rng,
                    &mut self.stats,
                )?;
            }
            Algorithm::Lit => {
                let mut target = Target::new(&ctx, &mut self.cache);
                let p = self.state.p();
                lit::inner_lit(
                    &mut target,
                    &mut z,
                    self.moves,
                    &self.probs,
                    p,
                    self.cfg.lit_swap_cap,
                    &mut self.rng,
                    &mut self.stats,
                )?;
            }
            Algorithm::Gimh => {
                // u2 does not depend on z; it is drawn before the model update
                u2 = Some(sample_u2(&ctx, &mut self.rng));
                let tables = self.tables.as_ref().expect("tables are built for this kernel");
                let lr_ctx = LrColumnContext::new(self.data, &self.hyper, j)?;
                let mut lr = Target::new(&lr_ctx, &mut self.lr_caches[j]);
                let mut target = Target::new(&ctx, &mut self.cache);
                gimh::inner_gimh(
                    &mut target,
                    &mut lr,
                    &tables[j],
                    &mut self.extensions[j],
                    &mut z,
                    self.moves,
                    &mut self.rng,
                    &mut self.stats,
                )?;
            }
            Algorithm::Exact => {
                z = sample_model_exact(&ctx, &mut self.rng)?;
            }
        }
        let u2 = match u2 {
            Some(v) => v,
            None => sample_u2(&ctx, &mut self.rng),
        };
        let draw = sample_u1_and_assemble(&ctx, &z, &mut self.cache, u2, &mut self.rng)?;
        drop(ctx);
        self.state.replace_column(j, &draw.omega_col, draw.omega_diag)
    }

    fn accumulate(&mut self) {
        let p = self.state.p();
        let acc = &mut self.acc;
        acc.retained += 1;
        let post = self.iteration - self.cfg.warmup;
        let stored = (post - 1).is_multiple_of(self.cfg.thin);
        for j in 0..p {
            acc.sum_omega[(j, j)] += self.state.diag(j);
            for &(i, v) in self.state.column(j) {
                acc.sum_omega[(i, j)] += v;
                acc.indicator[(i, j)] += 1.0;
            }
        }
        let gibbs = self.cfg.algorithm == Algorithm::Gibbs;
        let mut rb_row = Vec::new();
        if gibbs {
            for j in 1..p {
                for i in 0..j {
                    let v = 0.5 * (self.rb_sweep[(i, j)] + self.rb_sweep[(j, i)]);
                    acc.rb[(i, j)] += v;
                }
            }
            if self.cfg.record_inclusion && stored {
                rb_row = vec![0.0; p * (p - 1) / 2];
                for j in 1..p {
                    for i in 0..j {
                        rb_row[pair_index(i, j, p)] = 0.5 * (self.rb_sweep[(i, j)] + self.rb_sweep[(j, i)]);
                    }
                }
            }
        }
        let edges: Vec<(usize, usize)> = self.state.edges().collect();
        if let Some(prev) = &acc.prev_edges {
            let slots = (p * (p - 1) / 2) as f64;
            acc.ejd_sum += symmetric_difference(prev, &edges) as f64 / slots;
            acc.ejd_count += 1;
        }
        if stored {
            if let Some(draws) = &mut acc.draws {
                draws.push(&self.state);
            }
            if self.cfg.record_z {
                acc.z_trace.push(edges.clone());
            }
            for &(i, j) in &self.cfg.record_edges {
                acc.omega_trace.push(TracePoint {
                    iteration: self.iteration,
                    i,
                    j,
                    value: self.state.get(i, j),
                });
            }
            if self.cfg.record_inclusion {
                let mut ind = vec![0u8; p * (p - 1) / 2];
                for &(i, j) in &edges {
                    ind[pair_index(i, j, p)] = 1;
                }
                acc.indicator_trace.push(ind);
                if gibbs {
                    acc.rb_trace.push(rb_row);
                }
            }
        }
        acc.prev_edges = Some(edges);
    }

    /// Running posterior mean of `Ω` and inclusion probabilities under the
    /// configured estimator; `None` before the first retained sweep.
    pub fn estimates(&self) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
        let acc = &self.acc;
        if acc.retained == 0 {
            return None;
        }
        let p = self.state.p();
        let n = acc.retained as f64;
        let rb = self.cfg.estimator() == Estimator::RaoBlackwell;
        let mean = DMatrix::from_fn(p, p, |i, j| acc.sum_omega[(i, j)] / n);
        let incl = DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                1.0
            } else if rb {
                acc.rb[(i.min(j), i.max(j))] / n
            } else {
                acc.indicator[(i, j)] / n
            }
        });
        Some((mean, incl))
    }

    /// Runs the remaining sweeps and returns the summaries.
    pub fn run(mut self) -> Result<ChainOutput> {
        while self.iteration < self.cfg.iterations {
            self.sweep()?;
        }
        Ok(self.finish())
    }

    /// Summaries of the sweeps completed so far.
    pub fn finish(mut self) -> ChainOutput {
        let p = self.state.p();
        let acc = self.acc;
        let n = acc.retained as f64;
        let estimator = self.cfg.estimator();
        let (mean_omega, incl_indicator, incl_rb) = if acc.retained == 0 {
            (Vec::new(), Vec::new(), None)
        } else {
            let mean = DMatrix::from_fn(p, p, |i, j| acc.sum_omega[(i, j)] / n);
            let ind = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { acc.indicator[(i, j)] / n });
            let rb = (self.cfg.algorithm == Algorithm::Gibbs)
                .then(|| DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { acc.rb[(i.min(j), i.max(j))] / n }));
            (to_rows(&mean), to_rows(&ind), rb.as_ref().map(to_rows))
        };
        let incl_prob = match (estimator, &incl_rb) {
            (Estimator::RaoBlackwell, Some(rb)) => rb.clone(),
            _ => incl_indicator.clone(),
        };
        self.diagnostics.final_inverse_residual = self.state.inverse_residual();
        self.diagnostics.final_max_degree = self.state.max_degree();
        self.diagnostics.cache_hits = self.cache.hits();
        self.diagnostics.cache_misses = self.cache.misses();
        let sweeps = self.iteration.max(1) as f64;
        self.timing.seconds_per_sweep = (self.timing.warmup_seconds + self.timing.sampling_seconds) / sweeps;
        let tracked = !matches!(self.cfg.algorithm, Algorithm::Gibbs | Algorithm::Exact);
        ChainOutput {
            p,
            algorithm: self.cfg.algorithm,
            estimator,
            iterations: self.iteration,
            warmup: self.cfg.warmup,
            thin: self.cfg.thin,
            retained: acc.retained,
            mean_omega,
            incl_prob,
            incl_indicator,
            incl_rb,
            ejd: (acc.ejd_count > 0).then(|| acc.ejd_sum / acc.ejd_count as f64),
            acceptance: self.stats,
            acceptance_rate: if tracked { self.stats.rate() } else { None },
            table_sizes: self.tables.as_ref().map(|t| t.iter().map(ProposalTable::len).collect()),
            diagnostics: self.diagnostics,
            timing: self.timing,
            draws: acc.draws,
            z_trace: acc.z_trace,
            omega_trace: acc.omega_trace,
            rb_trace: acc.rb_trace,
            indicator_trace: acc.indicator_trace,
        }
    }
}

fn symmetric_difference(a: &[(usize, usize)], b: &[(usize, usize)]) -> usize {
    // both lists are sorted by (column, row)
    let key = |e: &(usize, usize)| (e.1, e.0);
    let (mut x, mut y, mut diff) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match key(&a[x]).cmp(&key(&b[y])) {
            std::cmp::Ordering::Less => {
                diff += 1;
                x += 1;
            }
            std::cmp::Ordering::Greater => {
                diff += 1;
                y += 1;
            }
            std::cmp::Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    diff + (a.len() - x) + (b.len() - y)
}

/// Visit counts of the column models, indexed by bit mask, over `updates`
/// inner-kernel updates of column `ctx.j()` with the rest of `Ω` held fixed,
/// after `warmup` discarded updates from the empty model. The
/// globally-informed kernel uses a table over every model.
#[allow(clippy::too_many_arguments)]
pub fn column_visit_counts(
    algorithm: Algorithm,
    ctx: &ColumnContext<'_>,
    data: &Dataset,
    hyper: &Hyperparams,
    moves: Option<usize>,
    warmup: usize,
    updates: usize,
    rng: &mut ChainRng,
) -> Result<(Vec<u64>, KernelStats)> {
    let m = ctx.dim();
    let p = m + 1;
    if p > crate::conditional::MAX_ENUMERATION_P {
        return Err(Error::Capability(format!(
            "visit counts need p <= {}, got {p}",
            crate::conditional::MAX_ENUMERATION_P
        )));
    }
    let hyper = hyper.clone().validate(p)?;
    let moves = moves.unwrap_or(algorithm.default_moves(&hyper, p));
    let probs = MoveProbs::new(hyper.p_birth, hyper.p_death);
    let lr_ctx = LrColumnContext::new(data, &hyper, ctx.j())?;
    let table = match algorithm {
        Algorithm::Gimh => Some(ProposalTable::full(&lr_ctx, hyper.upsilon())?),
        _ => None,
    };
    let mut cache = ModelCache::new();
    let mut lr_cache = ModelCache::new();
    let mut extension = TableExtension::default();
    let mut stats = KernelStats::default();
    let mut counts = vec![0u64; 1 << m];
    let mut z = crate::state::ColumnModel::empty(m);
    for it in 0..warmup + updates {
        let mut target = Target::new(ctx, &mut cache);
        match algorithm {
            Algorithm::Gibbs => gibbs::inner_gibbs(&mut target, &mut z, rng, None)?,
            Algorithm::Bdmh => bdmh::inner_bdmh(&mut target, &mut z, moves, &probs, rng, &mut stats)?,
            Algorithm::Lit => lit::inner_lit(&mut target, &mut z, moves, &probs, p, None, rng, &mut stats)?,
            Algorithm::Gimh => {
                let mut lr = Target::new(&lr_ctx, &mut lr_cache);
                let table = table.as_ref().expect("built above");
                gimh::inner_gimh(
                    &mut target,
                    &mut lr,
                    table,
                    &mut extension,
                    &mut z,
                    moves,
                    rng,
                    &mut stats,
                )?
            }
            Algorithm::Exact => z = sample_model_exact(ctx, rng)?,
        }
        if it >= warmup {
            counts[z.to_mask() as usize] += 1;
        }
    }
    Ok((counts, stats))
}

/// Runs a complete chain.
pub fn run_chain(data: &Dataset, hyper: &Hyperparams, cfg: &SamplerConfig, init: Init) -> Result<ChainOutput> {
    Chain::new(data, hyper.clone(), cfg.clone(), init)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_dense() {
        let p = 6;
        let mut seen = vec![false; p * (p - 1) / 2];
        for i in 0..p {
            for j in i + 1..p {
                let k = pair_index(i, j, p);
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn symmetric_difference_counts() {
        let a = [(0, 1), (1, 2), (0, 3)];
        let b = [(0, 1), (2, 3)];
        assert_eq!(symmetric_difference(&a, &b), 3);
        assert_eq!(symmetric_difference(&a, &a), 0);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [
            Algorithm::Gibbs,
            Algorithm::Bdmh,
            Algorithm::Lit,
            Algorithm::Gimh,
            Algorithm::Exact,
        ] {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert!("foo".parse::<Algorithm>().is_err());
    }
}
