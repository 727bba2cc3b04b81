//! Regression-based proposals for the globally-informed kernel.
//!
//! Regressing variable `j` on the others under a conjugate spike-and-slab
//! prior gives a closed-form model posterior that does not depend on `Ω`:
//!
//! ```text
//! log π_LR(z | Y) = |z| log θ + (p-1-|z|) log(1-θ) + (|z|/2) log τ - ½ log|W_z|
//!                   - (n/2 + 1) log(λ + S_jj - S_zjᵀ W_z⁻¹ S_zj),
//! W_z = S_zz + τ I.
//! ```
//!
//! A short chain on this posterior collects a catalogue of models for each
//! column. Proposals are drawn from the catalogue with probability
//! proportional to `π_LR^υ`, using the exact weights rather than visit
//! frequencies.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditional::{enumerate_log_weights, ColumnContext, ModelCache, ModelFamily, Target};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::linalg::full_index;
use crate::rng::stream_rng;
use crate::samplers::bdmh::inner_bdmh;
use crate::samplers::gibbs::inner_gibbs;
use crate::samplers::kernels::{KernelStats, MoveProbs};
use crate::state::ColumnModel;

/// Stream ids from this offset upward are reserved for proposal tables.
pub const TABLE_STREAM_BASE: u64 = 1 << 32;

/// The regression posterior of column `j` on the remaining variables.
#[derive(Clone, Debug)]
pub struct LrColumnContext<'a> {
    j: usize,
    n: usize,
    s: &'a DMatrix<f64>,
    s_col: Vec<f64>,
    s_jj: f64,
    tau: f64,
    lambda: f64,
    log_theta: f64,
    log_1m_theta: f64,
    dbar: usize,
}

impl<'a> LrColumnContext<'a> {
    pub fn new(data: &'a Dataset, hyper: &Hyperparams, j: usize) -> Result<Self> {
        let p = data.p();
        if j >= p {
            return Err(Error::Index { index: j, dim: p });
        }
        let s = data.gram();
        Ok(Self {
            j,
            n: data.n(),
            s,
            s_col: (0..p).filter(|&i| i != j).map(|i| s[(i, j)]).collect(),
            s_jj: s[(j, j)],
            tau: hyper.tau(),
            lambda: hyper.lambda,
            log_theta: hyper.theta.ln(),
            log_1m_theta: (-hyper.theta).ln_1p(),
            dbar: hyper.dbar(p),
        })
    }

    pub fn j(&self) -> usize {
        self.j
    }
}

impl ModelFamily for LrColumnContext<'_> {
    fn dim(&self) -> usize {
        self.s_col.len()
    }

    #[inline]
    fn gram(&self, r: usize, c: usize) -> f64 {
        self.s[(full_index(self.j, r), full_index(self.j, c))]
    }

    fn ridge(&self) -> f64 {
        self.tau
    }

    fn rhs(&self, r: usize) -> f64 {
        self.s_col[r]
    }

    fn admissible(&self, z: &ColumnModel) -> bool {
        z.size() <= self.dbar
    }

    fn finish(&self, size: usize, logdet: f64, quad: f64) -> Result<f64> {
        let resid = self.lambda + self.s_jj - quad;
        if !(resid > 0.0) {
            return Err(Error::Numerical(format!(
                "regression residual {resid:e} is not positive for column {}",
                self.j
            )));
        }
        let k = size as f64;
        let m = self.s_col.len() as f64;
        Ok(
            k * self.log_theta + (m - k) * self.log_1m_theta + 0.5 * k * self.tau.ln()
                - 0.5 * logdet
                - (self.n as f64 / 2.0 + 1.0) * resid.ln(),
        )
    }
}

/// Unnormalized log regression posterior of `z`; `-∞` outside the support.
pub fn lr_log_weight(ctx: &LrColumnContext<'_>, z: &ColumnModel, cache: &mut ModelCache) -> Result<f64> {
    cache.log_weight(ctx, z, None)
}

/// Model-space sampler used to explore the regression posterior.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSampler {
    #[default]
    Gibbs,
    Bdmh,
}

/// How proposal tables are built.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    /// Iterations of the exploration chain.
    pub length: usize,
    pub warmup: usize,
    pub sampler: TableSampler,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            length: 5000,
            warmup: 1000,
            sampler: TableSampler::Gibbs,
        }
    }
}

/// Provenance of a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableMeta {
    pub length: usize,
    pub warmup: usize,
    pub seed: u64,
    pub stream: u64,
}

/// Catalogue of distinct models for one column with exact regression log
/// weights and tempered sampling probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct ProposalTable {
    column: usize,
    upsilon: f64,
    models: Vec<ColumnModel>,
    exact_logw: Vec<f64>,
    tempered_prob: Vec<f64>,
    cumulative: Vec<f64>,
    // log Σ exp(υ·logw) over the table
    log_norm: f64,
    index: HashMap<ColumnModel, usize>,
    meta: Option<TableMeta>,
}

impl ProposalTable {
    /// Table over the given distinct models. Models with weight `-∞` are
    /// dropped.
    pub fn new(
        column: usize,
        models: Vec<ColumnModel>,
        exact_logw: Vec<f64>,
        upsilon: f64,
        meta: Option<TableMeta>,
    ) -> Result<Self> {
        if models.len() != exact_logw.len() {
            return Err(Error::Dimension("one log weight per model required".into()));
        }
        if !(0.0..=1.0).contains(&upsilon) {
            return Err(Error::config("upsilon", format!("must lie in [0, 1], got {upsilon}")));
        }
        let (models, exact_logw): (Vec<_>, Vec<_>) = models
            .into_iter()
            .zip(exact_logw)
            .filter(|(_, l)| *l > f64::NEG_INFINITY)
            .unzip();
        if models.is_empty() {
            return Err(Error::Numerical(format!("proposal table for column {column} is empty")));
        }
        let mut index = HashMap::with_capacity(models.len());
        for (i, z) in models.iter().enumerate() {
            if index.insert(z.clone(), i).is_some() {
                return Err(Error::Numerical(format!("duplicate model {z:?} in proposal table")));
            }
        }
        let max = exact_logw.iter().map(|l| upsilon * l).fold(f64::NEG_INFINITY, f64::max);
        let mass: Vec<f64> = exact_logw.iter().map(|l| (upsilon * l - max).exp()).collect();
        let total: f64 = mass.iter().sum();
        let tempered_prob: Vec<f64> = mass.iter().map(|v| v / total).collect();
        let mut acc = 0.0;
        let cumulative = tempered_prob
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        Ok(Self {
            column,
            upsilon,
            models,
            exact_logw,
            tempered_prob,
            cumulative,
            log_norm: max + total.ln(),
            index,
            meta,
        })
    }

    /// Table over every admissible model (small `p` only).
    pub fn full(ctx: &LrColumnContext<'_>, upsilon: f64) -> Result<Self> {
        let logw = enumerate_log_weights(ctx)?;
        let m = ctx.dim();
        let models = (0..logw.len()).map(|i| ColumnModel::from_mask(m, i as u64)).collect();
        Self::new(ctx.j, models, logw, upsilon, None)
    }

    pub fn column(&self) -> usize {
        self.column
    }

    pub fn upsilon(&self) -> f64 {
        self.upsilon
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> &[ColumnModel] {
        &self.models
    }

    pub fn exact_logw(&self) -> &[f64] {
        &self.exact_logw
    }

    pub fn tempered_prob(&self) -> &[f64] {
        &self.tempered_prob
    }

    pub fn meta(&self) -> Option<TableMeta> {
        self.meta
    }

    pub fn position(&self, z: &ColumnModel) -> Option<usize> {
        self.index.get(z).copied()
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    fn draw_index(&self, u: f64) -> usize {
        let target = u * self.cumulative[self.cumulative.len() - 1];
        self.cumulative
            .partition_point(|&c| c <= target)
            .min(self.models.len() - 1)
    }
}

/// Categorical draw from the tempered table probabilities.
pub fn sample_proposal<'t, R: Rng + ?Sized>(table: &'t ProposalTable, rng: &mut R) -> &'t ColumnModel {
    let i = table.draw_index(rng.random());
    &table.models[i]
}

/// Builds the table for `ctx.j()` from a chain of `cfg.length` iterations
/// on the untempered regression posterior started at the empty model;
/// every distinct state visited after `cfg.warmup` iterations is kept.
pub fn build_proposal_table<R: Rng + ?Sized>(
    ctx: &LrColumnContext<'_>,
    cfg: &TableConfig,
    hyper: &Hyperparams,
    rng: &mut R,
) -> Result<ProposalTable> {
    if cfg.length <= cfg.warmup {
        return Err(Error::config("table.length", "must exceed table.warmup"));
    }
    let m = ctx.dim();
    let mut cache = ModelCache::new();
    let mut target = Target::new(ctx, &mut cache);
    let mut z = ColumnModel::empty(m);
    let mut seen: HashMap<ColumnModel, ()> = HashMap::new();
    let mut models = Vec::new();
    let probs = MoveProbs::new(hyper.p_birth, hyper.p_death);
    let moves = hyper.inner_moves(m + 1);
    let mut stats = KernelStats::default();
    for t in 0..cfg.length {
        match cfg.sampler {
            TableSampler::Gibbs => inner_gibbs(&mut target, &mut z, rng, None)?,
            TableSampler::Bdmh => inner_bdmh(&mut target, &mut z, moves, &probs, rng, &mut stats)?,
        }
        if t >= cfg.warmup && seen.insert(z.clone(), ()).is_none() {
            models.push(z.clone());
        }
    }
    let logw = models
        .iter()
        .map(|z| target.log_weight(z, None))
        .collect::<Result<Vec<_>>>()?;
    ProposalTable::new(ctx.j, models, logw, hyper.upsilon(), None)
}

/// Builds one table per column, each from its own generator stream, in
/// parallel.
pub fn build_all_tables(
    data: &Dataset,
    hyper: &Hyperparams,
    cfg: &TableConfig,
    seed: u64,
) -> Result<Vec<ProposalTable>> {
    (0..data.p())
        .into_par_iter()
        .map(|j| {
            let stream = TABLE_STREAM_BASE + j as u64;
            let mut rng = stream_rng(seed, stream);
            let ctx = LrColumnContext::new(data, hyper, j)?;
            let mut table = build_proposal_table(&ctx, cfg, hyper, &mut rng)?;
            table.meta = Some(TableMeta {
                length: cfg.length,
                warmup: cfg.warmup,
                seed,
                stream,
            });
            Ok(table)
        })
        .collect()
}

/// A column's table plus the models appended during a chain because the
/// current state was not in the table. Appended models stay for the rest
/// of the chain, so the proposal support only grows.
#[derive(Clone, Debug, Default)]
pub struct TableExtension {
    models: Vec<ColumnModel>,
    logw: Vec<f64>,
    // tempered mass relative to the table's total of one
    mass: Vec<f64>,
    total: f64,
    index: HashMap<ColumnModel, usize>,
}

impl TableExtension {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Exact regression log weight of `z` if it is in the table or extension.
    pub fn lookup(&self, table: &ProposalTable, z: &ColumnModel) -> Option<f64> {
        table
            .position(z)
            .map(|i| table.exact_logw[i])
            .or_else(|| self.index.get(z).map(|&i| self.logw[i]))
    }

    /// Adds `z` with regression log weight `logw` unless already present.
    pub fn ensure(&mut self, table: &ProposalTable, z: &ColumnModel, logw: f64) {
        if table.position(z).is_some() || self.index.contains_key(z) || logw == f64::NEG_INFINITY {
            return;
        }
        let mass = (table.upsilon * logw - table.log_norm).exp();
        self.index.insert(z.clone(), self.models.len());
        self.models.push(z.clone());
        self.logw.push(logw);
        self.mass.push(mass);
        self.total += mass;
    }

    /// Draw from table and extension jointly, returning the model and its
    /// regression log weight.
    pub fn sample<'s, R: Rng + ?Sized>(&'s self, table: &'s ProposalTable, rng: &mut R) -> (&'s ColumnModel, f64) {
        let u = rng.random::<f64>() * (1.0 + self.total);
        if u < 1.0 || self.models.is_empty() {
            let i = table.draw_index(u.min(1.0 - f64::EPSILON));
            return (&table.models[i], table.exact_logw[i]);
        }
        let mut acc = 1.0;
        for (i, &w) in self.mass.iter().enumerate() {
            acc += w;
            if u < acc {
                return (&self.models[i], self.logw[i]);
            }
        }
        let last = self.models.len() - 1;
        (&self.models[last], self.logw[last])
    }
}

/// `min(0, [log π(z*) - log π(z)] - υ [log π_LR(z*) - log π_LR(z)])`.
pub fn gimh_log_accept_from_weights(lw_cur: f64, lw_prop: f64, lr_cur: f64, lr_prop: f64, upsilon: f64) -> f64 {
    if lw_prop == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if lw_cur == f64::NEG_INFINITY {
        return 0.0;
    }
    let delta = (lw_prop - lw_cur) - upsilon * (lr_prop - lr_cur);
    delta.min(0.0)
}

/// Log acceptance probability of moving column model `z_cur` to `z_prop`
/// under the independence proposal `π_LR^υ`.
pub fn gimh_log_accept(
    ctx_cond: &ColumnContext<'_>,
    ctx_lr: &LrColumnContext<'_>,
    z_cur: &ColumnModel,
    z_prop: &ColumnModel,
    upsilon: f64,
    cond_cache: &mut ModelCache,
    lr_cache: &mut ModelCache,
) -> Result<f64> {
    if z_cur == z_prop {
        return Ok(0.0);
    }
    let lw_cur = cond_cache.log_weight(ctx_cond, z_cur, None)?;
    let lw_prop = cond_cache.log_weight(ctx_cond, z_prop, Some(z_cur))?;
    let lr_cur = lr_cache.log_weight(ctx_lr, z_cur, None)?;
    let lr_prop = lr_cache.log_weight(ctx_lr, z_prop, Some(z_cur))?;
    Ok(gimh_log_accept_from_weights(lw_cur, lw_prop, lr_cur, lr_prop, upsilon))
}

const SIDECAR_MAGIC: &[u8; 8] = b"SSGGMPT1";

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'b> {
    buf: &'b [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Parse("truncated proposal table file".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Parse("count does not fit in usize".into()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// Serializes tables under `key` (typically a hash of the dataset and the
/// settings that produced them).
pub fn encode_tables(key: &str, tables: &[ProposalTable]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(SIDECAR_MAGIC);
    put_u64(&mut out, key.len() as u64);
    out.extend_from_slice(key.as_bytes());
    put_u64(&mut out, tables.len() as u64);
    for t in tables {
        put_u64(&mut out, t.column as u64);
        put_f64(&mut out, t.upsilon);
        let meta = t.meta.unwrap_or(TableMeta {
            length: 0,
            warmup: 0,
            seed: 0,
            stream: 0,
        });
        for v in [meta.length as u64, meta.warmup as u64, meta.seed, meta.stream] {
            put_u64(&mut out, v);
        }
        put_u64(&mut out, t.models.len() as u64);
        put_u64(&mut out, t.models.first().map_or(0, |z| z.len()) as u64);
        for (z, &l) in t.models.iter().zip(&t.exact_logw) {
            put_u64(&mut out, z.size() as u64);
            for k in z.iter() {
                put_u64(&mut out, k as u64);
            }
            put_f64(&mut out, l);
        }
    }
    out
}

/// Parses tables written by [`encode_tables`]; `Ok(None)` when the file was
/// written under a different key.
pub fn decode_tables(bytes: &[u8], key: &str) -> Result<Option<Vec<ProposalTable>>> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != SIDECAR_MAGIC {
        return Err(Error::Parse("not a proposal table file".into()));
    }
    let klen = r.usize()?;
    if r.take(klen)? != key.as_bytes() {
        return Ok(None);
    }
    let count = r.usize()?;
    let mut tables = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let column = r.usize()?;
        let upsilon = r.f64()?;
        let meta = TableMeta {
            length: r.usize()?,
            warmup: r.usize()?,
            seed: r.u64()?,
            stream: r.u64()?,
        };
        let n_models = r.usize()?;
        let len = r.usize()?;
        let mut models = Vec::with_capacity(n_models.min(1 << 20));
        let mut logw = Vec::with_capacity(n_models.min(1 << 20));
        for _ in 0..n_models {
            let size = r.usize()?;
            let idx = (0..size).map(|_| r.usize()).collect::<Result<Vec<_>>>()?;
            models.push(ColumnModel::from_indices(len, &idx)?);
            logw.push(r.f64()?);
        }
        let meta = (meta.length > 0).then_some(meta);
        tables.push(ProposalTable::new(column, models, logw, upsilon, meta)?);
    }
    Ok(Some(tables))
}

pub fn write_tables(path: impl AsRef<Path>, key: &str, tables: &[ProposalTable]) -> Result<()> {
    let path = path.as_ref();
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(&encode_tables(key, tables))?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_tables(path: impl AsRef<Path>, key: &str) -> Result<Option<Vec<ProposalTable>>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_tables(&bytes, key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditional::{enumerate_probabilities, normalize_log_weights};
    use crate::rng::seeded;
    use rand_distr::{Distribution, StandardNormal};

    fn dataset(n: usize, p: usize, seed: u64) -> Dataset {
        let mut rng = seeded(seed);
        let mut y = DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng));
        for i in 0..n {
            y[(i, 1)] += 0.8 * y[(i, 0)];
        }
        Dataset::new(y).unwrap()
    }

    #[test]
    fn empty_model_weight() {
        let data = dataset(30, 4, 1);
        let hyper = Hyperparams::new(0.3, 0.8, 0.05);
        let ctx = LrColumnContext::new(&data, &hyper, 2).unwrap();
        let mut cache = ModelCache::new();
        let lw = lr_log_weight(&ctx, &ColumnModel::empty(3), &mut cache).unwrap();
        let s22 = data.gram()[(2, 2)];
        let expect = 3.0 * (0.7f64).ln() - 16.0 * (0.05 + s22).ln();
        assert!((lw - expect).abs() < 1e-10);
    }

    #[test]
    fn table_probabilities() {
        let data = dataset(30, 4, 2);
        let mut hyper = Hyperparams::new(0.3, 0.8, 0.05);
        hyper.upsilon = Some(1.0);
        let ctx = LrColumnContext::new(&data, &hyper, 0).unwrap();
        let table = ProposalTable::full(&ctx, 1.0).unwrap();
        assert_eq!(table.len(), 8);
        assert!((table.tempered_prob().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let exact = enumerate_probabilities(&ctx).unwrap();
        for (z, &pr) in table.models().iter().zip(table.tempered_prob()) {
            assert!((pr - exact[z.to_mask() as usize]).abs() < 1e-12);
        }
        let tempered = ProposalTable::full(&ctx, 0.5).unwrap();
        let expect = normalize_log_weights(&tempered.exact_logw().iter().map(|l| 0.5 * l).collect::<Vec<_>>());
        for (a, b) in tempered.tempered_prob().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn singleton_and_two_model_tables() {
        let z = ColumnModel::from_indices(3, &[1]).unwrap();
        let t = ProposalTable::new(0, vec![z.clone()], vec![-3.0], 0.75, None).unwrap();
        let mut rng = seeded(3);
        for _ in 0..10 {
            assert_eq!(sample_proposal(&t, &mut rng), &z);
        }
        let y = ColumnModel::empty(3);
        let t2 = ProposalTable::new(0, vec![z.clone(), y], vec![-1.0, -1.0], 0.75, None).unwrap();
        let hits = (0..10_000).filter(|_| sample_proposal(&t2, &mut rng) == &z).count();
        assert!((hits as f64 - 5000.0).abs() < 3.0 * 50.0);
        assert!(ProposalTable::new(0, vec![z.clone(), z], vec![0.0, 0.0], 0.75, None).is_err());
    }

    #[test]
    fn short_chain_keeps_final_state() {
        let data = dataset(30, 4, 4);
        let hyper = Hyperparams::new(0.3, 0.8, 0.05);
        let ctx = LrColumnContext::new(&data, &hyper, 1).unwrap();
        let cfg = TableConfig {
            length: 11,
            warmup: 10,
            sampler: TableSampler::Gibbs,
        };
        let t = build_proposal_table(&ctx, &cfg, &hyper, &mut seeded(5)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.tempered_prob(), &[1.0]);
    }

    #[test]
    fn extension_and_acceptance() {
        let z0 = ColumnModel::empty(3);
        let z1 = ColumnModel::from_indices(3, &[0]).unwrap();
        let t = ProposalTable::new(0, vec![z0.clone()], vec![-2.0], 0.5, None).unwrap();
        let mut ext = TableExtension::default();
        ext.ensure(&t, &z0, -2.0);
        assert!(ext.is_empty());
        ext.ensure(&t, &z1, -2.0);
        assert_eq!(ext.lookup(&t, &z1), Some(-2.0));
        let mut rng = seeded(6);
        let hits = (0..10_000).filter(|_| ext.sample(&t, &mut rng).0 == &z1).count();
        assert!((hits as f64 - 5000.0).abs() < 3.0 * 50.0);

        assert_eq!(gimh_log_accept_from_weights(-1.0, -1.0, -4.0, -4.0, 0.75), 0.0);
        assert_eq!(gimh_log_accept_from_weights(-1.0, -3.0, -4.0, -9.0, 0.0), -2.0);
        assert_eq!(
            gimh_log_accept_from_weights(-1.0, f64::NEG_INFINITY, -4.0, -9.0, 0.5),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn sidecar_round_trip() {
        let data = dataset(25, 5, 7);
        let hyper = Hyperparams::new(0.25, 0.8, 0.05);
        let cfg = TableConfig {
            length: 200,
            warmup: 50,
            sampler: TableSampler::Bdmh,
        };
        let tables = build_all_tables(&data, &hyper, &cfg, 11).unwrap();
        let bytes = encode_tables("k1", &tables);
        assert_eq!(decode_tables(&bytes, "k1").unwrap().unwrap(), tables);
        assert!(decode_tables(&bytes, "other").unwrap().is_none());
        assert!(decode_tables(&bytes[..20], "k1").is_err());
        let again = build_all_tables(&data, &hyper, &cfg, 11).unwrap();
        assert_eq!(again, tables);
    }
}
