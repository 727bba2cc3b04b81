//! Posterior summaries, Bayesian FDR edge selection, evaluation against a
//! known truth, and mixing diagnostics.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::{ChainOutput, Estimator};
use crate::state::PrecisionState;
use crate::synth::GroundTruth;

/// Fewest stored draws accepted for credible intervals.
pub const MIN_INTERVAL_SAMPLES: usize = 20;

/// All stored draws of the upper triangle of `Ω` (diagonal included).
/// Off-diagonal entries keep only their nonzero values; the number of zeros
/// is `count - values.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeDraws {
    p: usize,
    count: usize,
    values: Vec<Vec<f64>>,
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

impl EdgeDraws {
    pub fn new(p: usize) -> Self {
        Self {
            p,
            count: 0,
            values: vec![Vec::new(); p * (p + 1) / 2],
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of stored draws.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, state: &PrecisionState) {
        self.count += 1;
        for j in 0..self.p {
            self.values[tri(j, j)].push(state.diag(j));
            for &(i, v) in state.column(j) {
                if i < j {
                    self.values[tri(i, j)].push(v);
                }
            }
        }
    }

    /// Nonzero draws of entry `(i, j)` in storage order.
    pub fn nonzero(&self, i: usize, j: usize) -> &[f64] {
        &self.values[tri(i, j)]
    }

    /// Every draw of entry `(i, j)`, zeros included, sorted ascending.
    pub fn sorted(&self, i: usize, j: usize) -> Vec<f64> {
        let nz = self.nonzero(i, j);
        let mut out = Vec::with_capacity(self.count);
        out.extend(std::iter::repeat_n(0.0, self.count - nz.len()));
        out.extend_from_slice(nz);
        out.sort_by(f64::total_cmp);
        out
    }

    /// Binary encoding: `p`, `count`, then per entry the number of nonzero
    /// values followed by the values, all little-endian.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.p as u64).to_le_bytes());
        out.extend_from_slice(&(self.count as u64).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&(v.len() as u64).to_le_bytes());
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let mut word = || -> Result<[u8; 8]> {
            let chunk = bytes
                .get(pos..pos + 8)
                .ok_or_else(|| Error::Parse("truncated draws file".into()))?;
            pos += 8;
            Ok(chunk.try_into().expect("8 bytes"))
        };
        let p = u64::from_le_bytes(word()?) as usize;
        let count = u64::from_le_bytes(word()?) as usize;
        let mut values = Vec::with_capacity(p * (p + 1) / 2);
        for _ in 0..p * (p + 1) / 2 {
            let len = u64::from_le_bytes(word()?) as usize;
            if len > count {
                return Err(Error::Parse("draws file has more values than draws".into()));
            }
            let mut v = Vec::with_capacity(len);
            for _ in 0..len {
                v.push(f64::from_le_bytes(word()?));
            }
            values.push(v);
        }
        Ok(Self { p, count, values })
    }
}

/// Empirical quantile with averaging at discontinuities: with `np = n·q`,
/// returns `x_(⌈np⌉)` when `np` is fractional and `(x_(np) + x_(np+1))/2`
/// when it is an integer (order statistics 1-based).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of an empty sample");
    let np = n as f64 * q;
    let r = np.round();
    if (np - r).abs() <= 1e-9 * n as f64 {
        let j = r as usize;
        if j == 0 {
            sorted[0]
        } else if j >= n {
            sorted[n - 1]
        } else {
            0.5 * (sorted[j - 1] + sorted[j])
        }
    } else {
        sorted[(np.ceil() as usize).clamp(1, n) - 1]
    }
}

/// Equal-tailed interval at `level` from a sample.
pub fn credible_interval(samples: &[f64], level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::config("ci_level", format!("must lie in (0, 1), got {level}")));
    }
    if samples.len() < MIN_INTERVAL_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_INTERVAL_SAMPLES,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let a = (1.0 - level) / 2.0;
    Ok((quantile_sorted(&sorted, a), quantile_sorted(&sorted, 1.0 - a)))
}

/// Per-entry equal-tailed intervals, as (lower, upper) symmetric matrices.
pub fn credible_intervals(draws: &EdgeDraws, level: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::config("ci_level", format!("must lie in (0, 1), got {level}")));
    }
    if draws.count < MIN_INTERVAL_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_INTERVAL_SAMPLES,
            got: draws.count,
        });
    }
    let p = draws.p;
    let a = (1.0 - level) / 2.0;
    let mut lo = DMatrix::zeros(p, p);
    let mut hi = DMatrix::zeros(p, p);
    for j in 0..p {
        for i in 0..=j {
            let s = draws.sorted(i, j);
            let (l, h) = (quantile_sorted(&s, a), quantile_sorted(&s, 1.0 - a));
            lo[(i, j)] = l;
            lo[(j, i)] = l;
            hi[(i, j)] = h;
            hi[(j, i)] = h;
        }
    }
    Ok((lo, hi))
}

/// Point estimates and intervals from one chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    #[serde(with = "crate::rows")]
    pub mean_omega: DMatrix<f64>,
    #[serde(with = "crate::rows")]
    pub incl_prob: DMatrix<f64>,
    #[serde(default, with = "crate::rows::option")]
    pub ci_lower: Option<DMatrix<f64>>,
    #[serde(default, with = "crate::rows::option")]
    pub ci_upper: Option<DMatrix<f64>>,
    pub ci_level: Option<f64>,
    pub retained: usize,
    pub estimator: Estimator,
}

impl PosteriorSummary {
    pub fn p(&self) -> usize {
        self.mean_omega.nrows()
    }

    /// Summary without intervals from point estimates.
    pub fn from_estimates(
        mean_omega: DMatrix<f64>,
        incl_prob: DMatrix<f64>,
        retained: usize,
        estimator: Estimator,
    ) -> Self {
        Self {
            mean_omega,
            incl_prob,
            ci_lower: None,
            ci_upper: None,
            ci_level: None,
            retained,
            estimator,
        }
    }

    /// Summary of a chain; intervals are added when `ci_level` is given and
    /// the chain stored its draws.
    pub fn from_output(out: &ChainOutput, ci_level: Option<f64>) -> Result<Self> {
        if out.retained == 0 {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        let mean_omega = crate::rows::from_rows(&out.mean_omega).map_err(Error::Parse)?;
        let incl_prob = crate::rows::from_rows(&out.incl_prob).map_err(Error::Parse)?;
        let mut summary = Self {
            mean_omega,
            incl_prob,
            ci_lower: None,
            ci_upper: None,
            ci_level: None,
            retained: out.retained,
            estimator: out.estimator,
        };
        if let (Some(level), Some(draws)) = (ci_level, &out.draws) {
            summary.set_intervals(draws, level)?;
        }
        Ok(summary)
    }

    pub fn set_intervals(&mut self, draws: &EdgeDraws, level: f64) -> Result<()> {
        if draws.p() != self.p() {
            return Err(Error::Dimension(format!(
                "draws have p = {}, summary has p = {}",
                draws.p(),
                self.p()
            )));
        }
        let (lo, hi) = credible_intervals(draws, level)?;
        self.ci_lower = Some(lo);
        self.ci_upper = Some(hi);
        self.ci_level = Some(level);
        Ok(())
    }
}

/// Edges `(i, j)`, `i < j`, ordered by decreasing inclusion probability with
/// ties broken by index.
fn ranked_edges(incl: &DMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let p = incl.nrows();
    let mut edges = Vec::with_capacity(p * (p - 1) / 2);
    for i in 0..p {
        for j in i + 1..p {
            edges.push((i, j, incl[(i, j)]));
        }
    }
    edges.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    edges
}

/// Largest set of top-ranked edges whose mean inclusion probability is at
/// least `1 - alpha`.
pub fn bfdr_select(incl: &DMatrix<f64>, alpha: f64) -> Result<Vec<(usize, usize)>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    let ranked = ranked_edges(incl);
    let mut sum = 0.0;
    let mut keep = 0;
    for (k, e) in ranked.iter().enumerate() {
        sum += e.2;
        if sum / (k + 1) as f64 >= 1.0 - alpha {
            keep = k + 1;
        }
    }
    Ok(ranked[..keep].iter().map(|&(i, j, _)| (i, j)).collect())
}

/// Frequentist performance of a posterior summary against the truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fdr: f64,
    /// Share of true edges selected; 1 when there are no true edges.
    pub power: f64,
    /// Share of truly nonzero off-diagonal entries inside their interval.
    pub coverage_nonzeros: Option<f64>,
    pub mae_omega: f64,
    /// Rank-sum AUC of inclusion probabilities; absent when every pair, or
    /// no pair, is an edge.
    pub auc: Option<f64>,
    pub selected: usize,
    pub true_edges: usize,
}

/// Mann-Whitney AUC with average ranks for ties.
pub fn auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let n1 = labels.iter().filter(|&&l| l).count();
    let n0 = labels.len() - n1;
    if n1 == 0 || n0 == 0 {
        return None;
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        rank_sum += avg * idx[start..end].iter().filter(|&&k| labels[k]).count() as f64;
        start = end;
    }
    let (n1, n0) = (n1 as f64, n0 as f64);
    Some((rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0))
}

pub fn evaluate(summary: &PosteriorSummary, truth: &GroundTruth, alpha: f64) -> Result<EvalReport> {
    let p = summary.p();
    if truth.p() != p {
        return Err(Error::Dimension(format!(
            "summary has p = {p}, truth has p = {}",
            truth.p()
        )));
    }
    let selected = bfdr_select(&summary.incl_prob, alpha)?;
    let true_edges = truth.edges().len();
    let hits = selected.iter().filter(|&&(i, j)| truth.z0[(i, j)] != 0).count();
    let fdr = (selected.len() - hits) as f64 / selected.len().max(1) as f64;
    let power = if true_edges == 0 {
        1.0
    } else {
        hits as f64 / true_edges as f64
    };
    let coverage_nonzeros = match (&summary.ci_lower, &summary.ci_upper) {
        (Some(lo), Some(hi)) if true_edges > 0 => {
            let covered = truth
                .edges()
                .iter()
                .filter(|&&(i, j)| lo[(i, j)] <= truth.omega0[(i, j)] && truth.omega0[(i, j)] <= hi[(i, j)])
                .count();
            Some(covered as f64 / true_edges as f64)
        }
        _ => None,
    };
    let mae_omega = (&summary.mean_omega - &truth.omega0).abs().sum() / (p * p) as f64;
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            scores.push(summary.incl_prob[(i, j)]);
            labels.push(truth.z0[(i, j)] != 0);
        }
    }
    Ok(EvalReport {
        fdr,
        power,
        coverage_nonzeros,
        mae_omega,
        auc: auc(&scores, &labels),
        selected: selected.len(),
        true_edges,
    })
}

/// Mean Hamming distance between consecutive edge matrices, divided by the
/// number of edge slots `p(p-1)/2`.
pub fn ejd(trace: &[DMatrix<u8>]) -> Result<f64> {
    if trace.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: trace.len(),
        });
    }
    let p = trace[0].nrows();
    if p < 2 || trace.iter().any(|z| z.nrows() != p || z.ncols() != p) {
        return Err(Error::Dimension("trace matrices must share one p >= 2".into()));
    }
    let slots = (p * (p - 1) / 2) as f64;
    let total: f64 = trace
        .windows(2)
        .map(|w| {
            let mut d = 0usize;
            for i in 0..p {
                for j in i + 1..p {
                    d += usize::from((w[0][(i, j)] != 0) != (w[1][(i, j)] != 0));
                }
            }
            d as f64 / slots
        })
        .sum();
    Ok(total / (trace.len() - 1) as f64)
}

/// Off-diagonal mean absolute differences `(mean |ΔÊ(Ω)|, mean |Δπ̂|)`
/// between two summaries.
pub fn chain_diff(a: &PosteriorSummary, b: &PosteriorSummary) -> Result<(f64, f64)> {
    let p = a.p();
    if b.p() != p || p < 2 {
        return Err(Error::Dimension(format!("summaries have p = {p} and p = {}", b.p())));
    }
    let (mut d_omega, mut d_prob) = (0.0, 0.0);
    for i in 0..p {
        for j in 0..p {
            if i != j {
                d_omega += (a.mean_omega[(i, j)] - b.mean_omega[(i, j)]).abs();
                d_prob += (a.incl_prob[(i, j)] - b.incl_prob[(i, j)]).abs();
            }
        }
    }
    let slots = (p * (p - 1)) as f64;
    Ok((d_omega / slots, d_prob / slots))
}

/// Batch-means standard error of the mean of a series, with
/// `⌊√n⌋` batches of equal length (trailing remainder dropped).
pub fn batch_means_se(series: &[f64]) -> f64 {
    let n = series.len();
    let batches = ((n as f64).sqrt().floor() as usize).max(2);
    let len = n / batches;
    if len == 0 {
        return f64::NAN;
    }
    let means: Vec<f64> = (0..batches)
        .map(|b| series[b * len..(b + 1) * len].iter().sum::<f64>() / len as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn incl(p: usize, vals: &[((usize, usize), f64)]) -> DMatrix<f64> {
        let mut m = DMatrix::identity(p, p);
        for &((i, j), v) in vals {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    #[test]
    fn bfdr_examples() {
        let all = DMatrix::from_element(4, 4, 1.0);
        assert_eq!(bfdr_select(&all, 0.05).unwrap().len(), 6);
        let m = incl(3, &[((0, 1), 0.99), ((0, 2), 0.97), ((1, 2), 0.5)]);
        assert_eq!(bfdr_select(&m, 0.05).unwrap(), vec![(0, 1), (0, 2)]);
        let low = incl(3, &[((0, 1), 0.9), ((0, 2), 0.2), ((1, 2), 0.5)]);
        assert!(bfdr_select(&low, 0.05).unwrap().is_empty());
        assert!(bfdr_select(&low, 0.0).is_err());
    }

    #[test]
    fn interval_examples() {
        let s: Vec<f64> = (1..=100).map(f64::from).collect();
        let (lo, hi) = credible_interval(&s, 0.9).unwrap();
        assert!((lo - 5.5).abs() < 1e-12 && (hi - 95.5).abs() < 1e-12);
        assert_eq!(credible_interval(&[2.5; 30], 0.95).unwrap(), (2.5, 2.5));
        assert!(credible_interval(&s, 1.0).is_err());
        assert!(matches!(
            credible_interval(&s[..10], 0.9),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn ejd_examples() {
        let empty = DMatrix::<u8>::zeros(3, 3);
        let full = DMatrix::from_fn(3, 3, |i, j| u8::from(i != j));
        assert_eq!(ejd(&[empty.clone(), empty.clone(), empty.clone()]).unwrap(), 0.0);
        assert_eq!(ejd(&[full.clone(), empty.clone(), full.clone()]).unwrap(), 1.0);
        assert!(ejd(&[full]).is_err());
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[0.1, 0.9, 0.8], &[false, true, true]), Some(1.0));
        assert_eq!(auc(&[0.5, 0.5], &[false, true]), Some(0.5));
        assert_eq!(auc(&[0.5, 0.5], &[true, true]), None);
    }

    #[test]
    fn draws_round_trip() {
        let omega = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let st = PrecisionState::from_dense(&omega, 2).unwrap();
        let mut d = EdgeDraws::new(3);
        d.push(&st);
        d.push(&PrecisionState::identity(3, 2));
        assert_eq!(d.sorted(0, 1), vec![0.0, 0.5]);
        assert_eq!(d.sorted(2, 2), vec![1.0, 1.0]);
        assert_eq!(EdgeDraws::decode(&d.encode()).unwrap(), d);
        assert!(EdgeDraws::decode(&d.encode()[..30]).is_err());
    }

    #[test]
    fn batch_means_of_constant_series() {
        assert_eq!(batch_means_se(&[1.0; 100]), 0.0);
    }
}
