//! Conditional posterior of one column's edge pattern given the rest of `Ω`,
//! exact draws of the column values, and the per-visit model cache.
//!
//! For column `j` with `A⁻¹ = (Ω_{-j-j})⁻¹` and `c = S_jj + λ`, a model `z`
//! has `U_z = c·[A⁻¹]_zz + g1⁻² I` and `m_z = U_z⁻¹ S_zj`, and
//!
//! ```text
//! log π(z | Y, Ω_{-j-j}) = ½ m_zᵀ U_z m_z - ½ log|U_z| - |z| log g1
//!                          + |z| log θ + (p-1-|z|) log(1-θ) + const.
//! ```
//!
//! Both this family and the regression family used by the independence
//! proposal have the shape `f(|z|, log|Q_z|, b_zᵀ Q_z⁻¹ b_z)` with
//! `Q_z = G_zz + ridge·I`, so they share [`ModelFamily`] and [`ModelCache`].

use std::borrow::Cow;
use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::linalg::{CholFactor, DroppedInverse};
use crate::state::{ColumnModel, PrecisionState};

/// Largest column dimension `p` for which exact enumeration is offered.
pub const MAX_ENUMERATION_P: usize = 20;

/// Bound applied to log-ratios before exponentiation.
pub const LOG_RATIO_CLAMP: f64 = 700.0;

/// A log-weight over column models of the form
/// `finish(|z|, log|G_zz + ridge·I|, b_zᵀ (G_zz + ridge·I)⁻¹ b_z)`.
pub trait ModelFamily {
    /// Number of coordinates, `p - 1`.
    fn dim(&self) -> usize;
    fn gram(&self, r: usize, c: usize) -> f64;
    fn ridge(&self) -> f64;
    fn rhs(&self, r: usize) -> f64;
    /// Prior support check; inadmissible models have weight zero.
    fn admissible(&self, z: &ColumnModel) -> bool;
    fn finish(&self, size: usize, logdet: f64, quad: f64) -> Result<f64>;
}

/// Factorization of `Q_z` for one model, with `w = L⁻¹ b_z` and the
/// resulting log weight. Rows follow `order`, which is ascending for fresh
/// factorizations and has appended variables last after incremental builds.
#[derive(Clone, Debug)]
pub struct ModelEntry {
    order: Vec<usize>,
    chol: CholFactor,
    w: Vec<f64>,
    log_weight: f64,
}

impl ModelEntry {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn chol(&self) -> &CholFactor {
        &self.chol
    }

    /// `b_zᵀ Q_z⁻¹ b_z`.
    pub fn quad(&self) -> f64 {
        self.w.iter().map(|v| v * v).sum()
    }

    /// `Q_z⁻¹ b_z`, aligned with [`ModelEntry::order`].
    pub fn mean(&self) -> Vec<f64> {
        let mut m = self.w.clone();
        self.chol
            .backward_solve_in_place(&mut m)
            .expect("dimensions agree by construction");
        m
    }

    /// Unnormalized log weight; `-∞` is never stored here.
    pub fn log_weight(&self) -> f64 {
        self.log_weight
    }
}

fn finish_entry<F: ModelFamily>(family: &F, order: Vec<usize>, chol: CholFactor) -> Result<ModelEntry> {
    let b: Vec<f64> = order.iter().map(|&r| family.rhs(r)).collect();
    let w = chol.forward_solve(&b)?;
    let quad = w.iter().map(|v| v * v).sum();
    let log_weight = family.finish(order.len(), chol.logdet(), quad)?;
    Ok(ModelEntry {
        order,
        chol,
        w,
        log_weight,
    })
}

/// Builds the entry for `z` by a fresh `O(|z|³)` factorization in ascending
/// variable order.
pub fn evaluate_fresh<F: ModelFamily>(family: &F, z: &ColumnModel) -> Result<ModelEntry> {
    let order = z.indices();
    let ridge = family.ridge();
    let chol = CholFactor::factor_with(order.len(), |a, b| {
        family.gram(order[a], order[b]) + if a == b { ridge } else { 0.0 }
    })?;
    finish_entry(family, order, chol)
}

/// Builds the entry for `z` from the entry of a model `base` that differs
/// in a few coordinates, by `O(|z|²)` removals and appends.
pub fn evaluate_from<F: ModelFamily>(
    family: &F,
    z: &ColumnModel,
    base: &ColumnModel,
    base_entry: &ModelEntry,
) -> Result<ModelEntry> {
    let (removed, added) = base.diff(z);
    let mut order = base_entry.order.clone();
    let mut chol = base_entry.chol.clone();
    for r in removed {
        let pos = order
            .iter()
            .position(|&v| v == r)
            .expect("removed variable is in the base model");
        chol.remove(pos)?;
        order.remove(pos);
    }
    let ridge = family.ridge();
    for a in added {
        let col: Vec<f64> = order.iter().map(|&r| family.gram(r, a)).collect();
        chol.append(&col, family.gram(a, a) + ridge)?;
        order.push(a);
    }
    finish_entry(family, order, chol)
}

/// Cache of model entries for one fixed family (one column visit).
#[derive(Clone, Debug, Default)]
pub struct ModelCache {
    map: HashMap<ColumnModel, ModelEntry>,
    hits: u64,
    misses: u64,
}

/// Hints are used when the cached neighbour differs in at most this many
/// coordinates.
const MAX_HINT_DISTANCE: usize = 2;

impl ModelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.map.clear();
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }

    pub fn get(&self, z: &ColumnModel) -> Option<&ModelEntry> {
        self.map.get(z)
    }

    /// Cached entry for `z`, computing it if needed. When `hint` names a
    /// cached model close to `z`, the factor is derived from the hint's.
    pub fn entry<F: ModelFamily>(
        &mut self,
        family: &F,
        z: &ColumnModel,
        hint: Option<&ColumnModel>,
    ) -> Result<&ModelEntry> {
        if self.map.contains_key(z) {
            self.hits += 1;
            return Ok(&self.map[z]);
        }
        self.misses += 1;
        let from_hint = hint
            .filter(|h| h.hamming(z) <= MAX_HINT_DISTANCE)
            .and_then(|h| self.map.get(h).map(|e| (h, e)))
            .map(|(h, e)| evaluate_from(family, z, h, e));
        let entry = match from_hint {
            Some(Ok(e)) => e,
            // rounding in a long update chain can trip the pivot guard;
            // a fresh factorization settles it
            Some(Err(_)) | None => evaluate_fresh(family, z)?,
        };
        Ok(self.map.entry(z.clone()).or_insert(entry))
    }

    /// Log weight of `z`; `-∞` when `z` is outside the prior support.
    pub fn log_weight<F: ModelFamily>(
        &mut self,
        family: &F,
        z: &ColumnModel,
        hint: Option<&ColumnModel>,
    ) -> Result<f64> {
        if !family.admissible(z) {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.entry(family, z, hint)?.log_weight)
    }
}

/// A model family paired with its cache: what the model-space kernels run on.
pub struct Target<'a, F: ModelFamily> {
    pub family: &'a F,
    pub cache: &'a mut ModelCache,
}

impl<'a, F: ModelFamily> Target<'a, F> {
    pub fn new(family: &'a F, cache: &'a mut ModelCache) -> Self {
        Self { family, cache }
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn log_weight(&mut self, z: &ColumnModel, hint: Option<&ColumnModel>) -> Result<f64> {
        self.cache.log_weight(self.family, z, hint)
    }
}

/// `exp(a - b)` with the difference clamped to `±700`; `-∞` arguments give
/// `0` or `+∞` (and `+∞` when both are `-∞`).
pub fn ratio_from_logs(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        f64::INFINITY
    } else if a == f64::NEG_INFINITY {
        0.0
    } else {
        (a - b).clamp(-LOG_RATIO_CLAMP, LOG_RATIO_CLAMP).exp()
    }
}

#[derive(Clone, Debug)]
enum Ainv<'a> {
    Dense(Cow<'a, DMatrix<f64>>),
    Dropped(DroppedInverse<'a>),
}

/// Everything the conditional law of column `j` depends on. Built once per
/// column visit.
#[derive(Clone, Debug)]
pub struct ColumnContext<'a> {
    j: usize,
    n: usize,
    ainv: Ainv<'a>,
    s_col: Vec<f64>,
    s_jj: f64,
    scale: f64,
    lambda: f64,
    inv_g1_sq: f64,
    log_g1: f64,
    log_theta: f64,
    log_1m_theta: f64,
    dbar: usize,
    // reduced coordinates whose node already has dbar edges besides j
    blocked: Vec<bool>,
}

impl<'a> ColumnContext<'a> {
    /// Context from an explicit `(Ω_{-j-j})⁻¹`, `S_{-j,j}` and `S_jj`.
    pub fn new(
        j: usize,
        ainv: DMatrix<f64>,
        s_col: Vec<f64>,
        s_jj: f64,
        n: usize,
        hyper: &Hyperparams,
    ) -> Result<ColumnContext<'static>> {
        let m = s_col.len();
        if ainv.nrows() != m || ainv.ncols() != m || m == 0 {
            return Err(Error::Dimension(format!(
                "ainv is {}x{} but S column has length {m}",
                ainv.nrows(),
                ainv.ncols()
            )));
        }
        if j > m {
            return Err(Error::Index { index: j, dim: m + 1 });
        }
        Ok(ColumnContext::build(
            j,
            n,
            Ainv::Dense(Cow::Owned(ainv)),
            s_col,
            s_jj,
            hyper,
            m + 1,
        ))
    }

    /// Context for column `j` of the chain state, reading `(Ω_{-j-j})⁻¹`
    /// lazily from `Σ`.
    pub fn from_state(
        state: &'a PrecisionState,
        data: &Dataset,
        hyper: &Hyperparams,
        j: usize,
    ) -> Result<ColumnContext<'a>> {
        let p = state.p();
        if data.p() != p {
            return Err(Error::Dimension(format!(
                "data has p = {}, state has p = {p}",
                data.p()
            )));
        }
        let ainv = DroppedInverse::new(state.sigma(), j)?;
        let s = data.gram();
        let s_col = (0..p).filter(|&i| i != j).map(|i| s[(i, j)]).collect();
        let mut ctx = ColumnContext::build(j, data.n(), Ainv::Dropped(ainv), s_col, s[(j, j)], hyper, p);
        let dbar = ctx.dbar;
        for (r, slot) in ctx.blocked.iter_mut().enumerate() {
            let i = crate::linalg::full_index(j, r);
            let others = state.degree(i) - usize::from(state.edge(i, j));
            *slot = others >= dbar;
        }
        Ok(ctx)
    }

    fn build(j: usize, n: usize, ainv: Ainv<'a>, s_col: Vec<f64>, s_jj: f64, hyper: &Hyperparams, p: usize) -> Self {
        let m = s_col.len();
        Self {
            j,
            n,
            ainv,
            s_col,
            s_jj,
            scale: s_jj + hyper.lambda,
            lambda: hyper.lambda,
            inv_g1_sq: 1.0 / (hyper.g1 * hyper.g1),
            log_g1: hyper.g1.ln(),
            log_theta: hyper.theta.ln(),
            log_1m_theta: (-hyper.theta).ln_1p(),
            dbar: hyper.dbar(p),
            blocked: vec![false; m],
        }
    }

    /// Excludes coordinates whose node is already at the degree cap.
    pub fn with_blocked(mut self, blocked: Vec<bool>) -> Result<Self> {
        if blocked.len() != self.s_col.len() {
            return Err(Error::Dimension("blocked mask length differs from p - 1".into()));
        }
        self.blocked = blocked;
        Ok(self)
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s_col(&self) -> &[f64] {
        &self.s_col
    }

    pub fn s_jj(&self) -> f64 {
        self.s_jj
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_blocked(&self, r: usize) -> bool {
        self.blocked[r]
    }

    pub fn dbar(&self) -> usize {
        self.dbar
    }

    #[inline]
    pub fn ainv(&self, r: usize, c: usize) -> f64 {
        match &self.ainv {
            Ainv::Dense(a) => a[(r, c)],
            Ainv::Dropped(d) => d.get(r, c),
        }
    }

    pub fn ainv_dense(&self) -> DMatrix<f64> {
        let m = self.s_col.len();
        DMatrix::from_fn(m, m, |r, c| self.ainv(r, c))
    }

    /// `U_z` as a dense matrix in ascending variable order.
    pub fn u_matrix(&self, z: &ColumnModel) -> DMatrix<f64> {
        let idx = z.indices();
        DMatrix::from_fn(idx.len(), idx.len(), |a, b| {
            self.scale * self.ainv(idx[a], idx[b]) + if a == b { self.inv_g1_sq } else { 0.0 }
        })
    }
}

impl ModelFamily for ColumnContext<'_> {
    fn dim(&self) -> usize {
        self.s_col.len()
    }

    #[inline]
    fn gram(&self, r: usize, c: usize) -> f64 {
        self.scale * self.ainv(r, c)
    }

    fn ridge(&self) -> f64 {
        self.inv_g1_sq
    }

    fn rhs(&self, r: usize) -> f64 {
        self.s_col[r]
    }

    fn admissible(&self, z: &ColumnModel) -> bool {
        z.size() <= self.dbar && z.iter().all(|r| !self.blocked[r])
    }

    fn finish(&self, size: usize, logdet: f64, quad: f64) -> Result<f64> {
        let k = size as f64;
        let m = self.s_col.len() as f64;
        Ok(0.5 * quad - 0.5 * logdet - k * self.log_g1 + k * self.log_theta + (m - k) * self.log_1m_theta)
    }
}

/// Unnormalized log conditional posterior of `z`; `-∞` outside the support.
pub fn log_model_weight(
    ctx: &ColumnContext<'_>,
    z: &ColumnModel,
    cache: &mut ModelCache,
    hint: Option<&ColumnModel>,
) -> Result<f64> {
    cache.log_weight(ctx, z, hint)
}

/// Log weights of all `2^{p-1}` models, indexed by bit mask, visited in
/// Gray-code order so each factor derives from its predecessor.
pub fn enumerate_log_weights<F: ModelFamily>(family: &F) -> Result<Vec<f64>> {
    let m = family.dim();
    if m + 1 > MAX_ENUMERATION_P {
        return Err(Error::Capability(format!(
            "exact enumeration supports p <= {MAX_ENUMERATION_P}, got p = {}; use an MCMC kernel",
            m + 1
        )));
    }
    let total = 1usize << m;
    let mut out = vec![f64::NEG_INFINITY; total];
    let mut prev_model = ColumnModel::empty(m);
    let mut prev = evaluate_fresh(family, &prev_model)?;
    if family.admissible(&prev_model) {
        out[0] = prev.log_weight;
    }
    for i in 1..total {
        let gray = i ^ (i >> 1);
        let z = ColumnModel::from_mask(m, gray as u64);
        let entry = evaluate_from(family, &z, &prev_model, &prev).or_else(|_| evaluate_fresh(family, &z))?;
        if family.admissible(&z) {
            out[gray] = entry.log_weight;
        }
        prev = entry;
        prev_model = z;
    }
    Ok(out)
}

/// Normalizes log weights into probabilities.
pub fn normalize_log_weights(logw: &[f64]) -> Vec<f64> {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Exact conditional probabilities of all models, indexed by bit mask.
pub fn enumerate_probabilities<F: ModelFamily>(family: &F) -> Result<Vec<f64>> {
    Ok(normalize_log_weights(&enumerate_log_weights(family)?))
}

/// Categorical draw of an index from probabilities summing to one.
pub(crate) fn categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Draws `z` from the exactly normalized conditional by enumeration.
pub fn sample_model_exact<R: Rng + ?Sized>(ctx: &ColumnContext<'_>, rng: &mut R) -> Result<ColumnModel> {
    let probs = enumerate_probabilities(ctx)?;
    let idx = categorical(&probs, rng);
    Ok(ColumnModel::from_mask(ctx.dim(), idx as u64))
}

/// New values for column `j` drawn given its model.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnDraw {
    /// Included reduced coordinates, ascending.
    pub indices: Vec<usize>,
    /// `u1`, aligned with `indices`.
    pub u1: Vec<f64>,
    pub u2: f64,
    /// Off-diagonal column `(reduced index, -u1)`, ascending.
    pub omega_col: Vec<(usize, f64)>,
    /// `u2 + u1ᵀ [A⁻¹]_zz u1`.
    pub omega_diag: f64,
}

impl ColumnDraw {
    /// Off-diagonal column as a dense `(p-1)`-vector.
    pub fn dense_col(&self, m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m];
        for &(r, v) in &self.omega_col {
            out[r] = v;
        }
        out
    }
}

/// `u2 ~ Gamma(n/2 + 1, rate (S_jj + λ)/2)`.
pub fn sample_u2<R: Rng + ?Sized>(ctx: &ColumnContext<'_>, rng: &mut R) -> f64 {
    let shape = ctx.n as f64 / 2.0 + 1.0;
    Gamma::new(shape, 2.0 / ctx.scale)
        .expect("shape and scale are positive")
        .sample(rng)
}

/// `u1 ~ N(m_z, U_z⁻¹)` assembled with a given `u2` into the new column.
pub fn sample_u1_and_assemble<R: Rng + ?Sized>(
    ctx: &ColumnContext<'_>,
    z: &ColumnModel,
    cache: &mut ModelCache,
    u2: f64,
    rng: &mut R,
) -> Result<ColumnDraw> {
    let entry = cache.entry(ctx, z, None)?;
    let k = entry.order.len();
    // u1 = L⁻ᵀ (w + ε) has mean L⁻ᵀ L⁻¹ b = m_z and covariance (L Lᵀ)⁻¹
    let mut x: Vec<f64> = entry
        .w
        .iter()
        .map(|&w| w + Distribution::<f64>::sample(&StandardNormal, rng))
        .collect();
    entry.chol.backward_solve_in_place(&mut x)?;
    let mut pairs: Vec<(usize, f64)> = entry.order.iter().copied().zip(x).collect();
    pairs.sort_unstable_by_key(|&(r, _)| r);
    let mut quad = 0.0;
    for a in 0..k {
        let (ra, ua) = pairs[a];
        quad += ua * ua * ctx.ainv(ra, ra);
        for &(rb, ub) in &pairs[..a] {
            quad += 2.0 * ua * ub * ctx.ainv(ra, rb);
        }
    }
    Ok(ColumnDraw {
        indices: pairs.iter().map(|&(r, _)| r).collect(),
        u1: pairs.iter().map(|&(_, u)| u).collect(),
        u2,
        omega_col: pairs.iter().map(|&(r, u)| (r, -u)).collect(),
        omega_diag: u2 + quad,
    })
}

/// Draws `(u1, u2)` for model `z` and assembles the new column.
pub fn sample_column<R: Rng + ?Sized>(
    ctx: &ColumnContext<'_>,
    z: &ColumnModel,
    cache: &mut ModelCache,
    rng: &mut R,
) -> Result<ColumnDraw> {
    let u2 = sample_u2(ctx, rng);
    sample_u1_and_assemble(ctx, z, cache, u2, rng)
}

/// `r_k = π(z with z_k = 0) / π(z with z_k = 1)`; `+∞` when including `k`
/// leaves the prior support.
pub fn gibbs_flip_ratio<F: ModelFamily>(family: &F, z: &ColumnModel, k: usize, cache: &mut ModelCache) -> Result<f64> {
    let (off, on) = flip_log_weights(family, z, k, cache)?;
    Ok(ratio_from_logs(off, on))
}

/// Log weights of `z` with coordinate `k` cleared and set.
pub fn flip_log_weights<F: ModelFamily>(
    family: &F,
    z: &ColumnModel,
    k: usize,
    cache: &mut ModelCache,
) -> Result<(f64, f64)> {
    let off = z.with(k, false);
    let on = z.with(k, true);
    let lw_off = cache.log_weight(family, &off, Some(z))?;
    let lw_on = cache.log_weight(family, &on, Some(z))?;
    Ok((lw_off, lw_on))
}

/// `1 / (1 + r)` computed stably from the two log weights.
pub fn inclusion_probability(lw_off: f64, lw_on: f64) -> f64 {
    if lw_on == f64::NEG_INFINITY {
        0.0
    } else if lw_off == f64::NEG_INFINITY {
        1.0
    } else {
        let d = (lw_off - lw_on).clamp(-LOG_RATIO_CLAMP, LOG_RATIO_CLAMP);
        1.0 / (1.0 + d.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn toy(p: usize, seed: u64, theta: f64) -> (ColumnContext<'static>, Hyperparams) {
        let mut rng = seeded(seed);
        let m = p - 1;
        let b = DMatrix::from_fn(m, m + 2, |_, _| rng.random_range(-1.0..1.0));
        let ainv = &b * b.transpose() / (m as f64) + DMatrix::identity(m, m) * 0.3;
        let s_col = (0..m).map(|_| rng.random_range(-8.0..8.0)).collect();
        let hyper = Hyperparams::new(theta, 0.7, 0.02);
        (ColumnContext::new(0, ainv, s_col, 12.0, 20, &hyper).unwrap(), hyper)
    }

    // direct evaluation of the closed form with nalgebra
    fn direct_log_weight(ctx: &ColumnContext<'_>, z: &ColumnModel, hyper: &Hyperparams) -> f64 {
        let idx = z.indices();
        let k = idx.len() as f64;
        let m = ctx.dim() as f64;
        let prior = k * hyper.theta.ln() + (m - k) * (1.0 - hyper.theta).ln() - k * hyper.g1.ln();
        if idx.is_empty() {
            return prior;
        }
        let u = ctx.u_matrix(z);
        let b = nalgebra::DVector::from_iterator(idx.len(), idx.iter().map(|&r| ctx.s_col()[r]));
        let uinv = u.clone().try_inverse().unwrap();
        let mz = &uinv * &b;
        let quad = (mz.transpose() * &u * &mz)[(0, 0)];
        0.5 * quad - 0.5 * u.determinant().ln() + prior
    }

    #[test]
    fn empty_model_weight() {
        let (ctx, hyper) = toy(5, 1, 0.3);
        let mut cache = ModelCache::new();
        let lw = log_model_weight(&ctx, &ColumnModel::empty(4), &mut cache, None).unwrap();
        assert!((lw - 4.0 * (1.0 - hyper.theta).ln()).abs() < 1e-12);
    }

    #[test]
    fn weights_match_direct_formula_and_normalize() {
        let (ctx, hyper) = toy(4, 2, 0.4);
        let logw = enumerate_log_weights(&ctx).unwrap();
        for (mask, &lw) in logw.iter().enumerate() {
            let z = ColumnModel::from_mask(3, mask as u64);
            assert!((lw - direct_log_weight(&ctx, &z, &hyper)).abs() < 1e-9);
        }
        let probs = enumerate_probabilities(&ctx).unwrap();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hinted_and_fresh_agree() {
        let (ctx, _) = toy(7, 3, 0.3);
        let mut cache = ModelCache::new();
        let base = ColumnModel::from_indices(6, &[0, 2, 5]).unwrap();
        log_model_weight(&ctx, &base, &mut cache, None).unwrap();
        for other in [vec![0, 2], vec![0, 2, 3, 5], vec![2, 4, 5], vec![1, 2, 5]] {
            let z = ColumnModel::from_indices(6, &other).unwrap();
            let hinted = log_model_weight(&ctx, &z, &mut cache, Some(&base)).unwrap();
            let fresh = evaluate_fresh(&ctx, &z).unwrap().log_weight();
            assert!((hinted - fresh).abs() < 1e-9);
        }
        let again = log_model_weight(&ctx, &base, &mut cache, None).unwrap();
        assert_eq!(again, cache.get(&base).unwrap().log_weight());
    }

    #[test]
    fn degree_cap_excludes_models() {
        let (ctx, _) = toy(5, 4, 0.3);
        let mut hyper = Hyperparams::new(0.3, 0.7, 0.02);
        hyper.dbar = Some(1);
        let capped = ColumnContext::new(0, ctx.ainv_dense(), ctx.s_col().to_vec(), 12.0, 20, &hyper).unwrap();
        let mut cache = ModelCache::new();
        let z = ColumnModel::from_indices(4, &[1]).unwrap();
        assert_eq!(gibbs_flip_ratio(&capped, &z, 2, &mut cache).unwrap(), f64::INFINITY);
        let (off, on) = flip_log_weights(&capped, &z, 2, &mut cache).unwrap();
        assert_eq!(inclusion_probability(off, on), 0.0);
        let blocked = capped.clone().with_blocked(vec![false, false, true, false]).unwrap();
        let z0 = ColumnModel::empty(4);
        let (off, on) = flip_log_weights(&blocked, &z0, 2, &mut cache).unwrap();
        assert_eq!(inclusion_probability(off, on), 0.0);
    }

    #[test]
    fn flip_probability_matches_enumeration() {
        let (ctx, _) = toy(4, 5, 0.4);
        let probs = enumerate_probabilities(&ctx).unwrap();
        let mut cache = ModelCache::new();
        for mask in 0..8u64 {
            let z = ColumnModel::from_mask(3, mask);
            for k in 0..3 {
                let on = (mask | (1 << k)) as usize;
                let off = (mask & !(1 << k)) as usize;
                let expect = probs[on] / (probs[on] + probs[off]);
                let r = gibbs_flip_ratio(&ctx, &z, k, &mut cache).unwrap();
                assert!((1.0 / (1.0 + r) - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn equal_weights_give_even_odds() {
        let hyper = Hyperparams::new(0.5, 1.0, 1.0);
        let ctx = ColumnContext::new(0, DMatrix::identity(2, 2), vec![1.0, 1.0], 1.0, 5, &hyper).unwrap();
        let mut cache = ModelCache::new();
        let z = ColumnModel::from_indices(2, &[0]).unwrap();
        let lw0 = log_model_weight(&ctx, &z, &mut cache, None).unwrap();
        let lw1 = log_model_weight(&ctx, &ColumnModel::from_indices(2, &[1]).unwrap(), &mut cache, None).unwrap();
        assert_eq!(lw0, lw1);
    }

    #[test]
    fn column_draw_certifies_positive_definiteness() {
        let (ctx, _) = toy(6, 6, 0.3);
        let mut cache = ModelCache::new();
        let mut rng = seeded(9);
        let z = ColumnModel::from_indices(5, &[1, 3, 4]).unwrap();
        let ainv = ctx.ainv_dense();
        for _ in 0..50 {
            let d = sample_column(&ctx, &z, &mut cache, &mut rng).unwrap();
            assert_eq!(d.indices, vec![1, 3, 4]);
            let col = nalgebra::DVector::from_vec(d.dense_col(5));
            let schur = d.omega_diag - (col.transpose() * &ainv * &col)[(0, 0)];
            assert!((schur - d.u2).abs() < 1e-10 * d.omega_diag.max(1.0));
            assert!(d.u2 > 0.0);
        }
        let empty = sample_column(&ctx, &ColumnModel::empty(5), &mut cache, &mut rng).unwrap();
        assert!(empty.omega_col.is_empty());
        assert_eq!(empty.omega_diag, empty.u2);
    }

    #[test]
    fn exact_sampler_guard_and_vanishing_theta() {
        let (ctx, _) = toy(4, 7, 1e-8);
        let mut rng = seeded(10);
        let empties = (0..2000)
            .filter(|_| sample_model_exact(&ctx, &mut rng).unwrap().is_empty())
            .count();
        assert!(empties as f64 >= 0.999 * 2000.0);

        let hyper = Hyperparams::new(0.1, 1.0, 1.0);
        let big = ColumnContext::new(0, DMatrix::identity(20, 20), vec![0.0; 20], 1.0, 5, &hyper).unwrap();
        assert!(matches!(sample_model_exact(&big, &mut rng), Err(Error::Capability(_))));
    }
}
