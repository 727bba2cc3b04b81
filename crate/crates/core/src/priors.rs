//! Prior elicitation and unconstrained prior draws.
//!
//! `λ` is set from a tail probability of the diagonal prior, `θ` from an
//! expected node degree, and `g1` as the largest slab scale for which a
//! Monte-Carlo estimate of the probability that an unconstrained prior draw
//! is positive definite stays above a target.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::stream_rng;

/// Settings for [`elicit_g1`] and the other elicitation helpers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElicitationConfig {
    /// `q` in `P(Ω_jj > 1) = q`.
    pub diag_quantile: f64,
    /// Required prior probability of positive definiteness.
    pub pd_target: f64,
    /// Expected node degree `K`.
    pub expected_degree: f64,
    pub mc_samples: usize,
    pub g1_bracket: (f64, f64),
}

impl Default for ElicitationConfig {
    fn default() -> Self {
        Self {
            diag_quantile: 0.99,
            pd_target: 0.95,
            expected_degree: 2.0,
            mc_samples: 2000,
            g1_bracket: (0.01, 10.0),
        }
    }
}

impl ElicitationConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("diag_quantile", self.diag_quantile), ("pd_target", self.pd_target)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::config(field, format!("must lie in (0, 1), got {v}")));
            }
        }
        if !(self.expected_degree > 0.0) {
            return Err(Error::config("expected_degree", "must be positive"));
        }
        if self.mc_samples == 0 {
            return Err(Error::config("mc_samples", "must be at least 1"));
        }
        let (lo, hi) = self.g1_bracket;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::config(
                "g1_bracket",
                format!("need 0 < lo < hi, got ({lo}, {hi})"),
            ));
        }
        Ok(())
    }
}

/// `λ = -2 ln q`, so that `P(Ω_jj > 1) = q` under `Exp(λ/2)`.
pub fn elicit_lambda(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::config("diag_quantile", format!("must lie in (0, 1), got {q}")));
    }
    Ok(-2.0 * q.ln())
}

/// `θ = K / (p - 1)`.
pub fn elicit_theta(k: f64, p: usize) -> Result<f64> {
    if p < 2 {
        return Err(Error::Dimension(format!("p >= 2 required, got {p}")));
    }
    let slots = (p - 1) as f64;
    if !(k > 0.0 && k <= slots) {
        return Err(Error::config(
            "expected_degree",
            format!("must lie in (0, {slots}], got {k}"),
        ));
    }
    Ok(k / slots)
}

/// One draw of the prior without the positive-definiteness constraint:
/// `Ω_ii ~ Exp(λ/2)`, each off-diagonal `N(0, g1²)` with probability `θ`
/// and zero otherwise.
pub fn sample_prior_unconstrained<R: Rng + ?Sized>(
    theta: f64,
    g1: f64,
    lambda: f64,
    p: usize,
    rng: &mut R,
) -> DMatrix<f64> {
    let (diag, off) = draw_components(theta, lambda, p, rng);
    assemble(&diag, &off, g1, p)
}

// Diagonal draws and standardized off-diagonal slab draws (zero when the
// spike is selected) in column-major upper-triangle order.
fn draw_components<R: Rng + ?Sized>(theta: f64, lambda: f64, p: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let exp = Exp::new(lambda / 2.0).expect("positive rate");
    let diag = (0..p).map(|_| exp.sample(rng)).collect();
    let mut off = Vec::with_capacity(p * (p - 1) / 2);
    for _ in 0..p * (p.saturating_sub(1)) / 2 {
        let slab = rng.random::<f64>() < theta;
        let xi: f64 = StandardNormal.sample(rng);
        off.push(if slab { xi } else { 0.0 });
    }
    (diag, off)
}

fn assemble(diag: &[f64], off: &[f64], g1: f64, p: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p, p);
    let mut idx = 0;
    for j in 0..p {
        m[(j, j)] = diag[j];
        for i in 0..j {
            let v = g1 * off[idx];
            m[(i, j)] = v;
            m[(j, i)] = v;
            idx += 1;
        }
    }
    m
}

/// Monte-Carlo fraction of unconstrained prior draws that are positive
/// definite. Draw `i` always uses stream `i` of `seed`, so the same
/// underlying variates are reused at every `g1` and the estimate is exactly
/// non-increasing in `g1`.
pub fn pd_rate(theta: f64, g1: f64, lambda: f64, p: usize, samples: usize, seed: u64) -> f64 {
    let hits: usize = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let (diag, off) = draw_components(theta, lambda, p, &mut rng);
            usize::from(linalg::chol_factor(&assemble(&diag, &off, g1, p)).is_ok())
        })
        .sum();
    hits as f64 / samples as f64
}

/// Largest `g1` whose estimated PD rate is at least `cfg.pd_target`, found by
/// geometric bisection to a relative bracket width of 1e-2. When the upper
/// end of the bracket already meets the target it is returned as is; when
/// the lower end does not, it is halved up to 20 times.
pub fn elicit_g1<R: Rng + ?Sized>(
    lambda: f64,
    theta: f64,
    p: usize,
    cfg: &ElicitationConfig,
    rng: &mut R,
) -> Result<f64> {
    cfg.validate()?;
    if !(lambda > 0.0) {
        return Err(Error::config("lambda", "must be positive"));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::config("theta", format!("must lie in [0, 1], got {theta}")));
    }
    let (mut lo, mut hi) = cfg.g1_bracket;
    if theta == 0.0 {
        return Ok(hi);
    }
    let seed: u64 = rng.random();
    let rate = |g: f64| pd_rate(theta, g, lambda, p, cfg.mc_samples, seed);
    if rate(hi) >= cfg.pd_target {
        return Ok(hi);
    }
    let mut doublings = 0;
    while rate(lo) < cfg.pd_target {
        if doublings == 20 {
            return Err(Error::Elicitation(format!(
                "PD rate stays below {} down to g1 = {lo:e}",
                cfg.pd_target
            )));
        }
        hi = lo;
        lo /= 2.0;
        doublings += 1;
    }
    while (hi - lo) / hi > 1e-2 {
        let mid = (lo * hi).sqrt();
        if rate(mid) >= cfg.pd_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Hyperparameters elicited for a problem with `p` variables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Elicited {
    pub theta: f64,
    pub g1: f64,
    pub lambda: f64,
}

/// Full elicitation. The expected degree is capped at `(p - 1) / 2`, so a
/// small `p` cannot turn the default `K` into the all-edges prior `θ = 1`.
pub fn elicit<R: Rng + ?Sized>(p: usize, cfg: &ElicitationConfig, rng: &mut R) -> Result<Elicited> {
    cfg.validate()?;
    if p < 2 {
        return Err(Error::Dimension(format!("p >= 2 required, got {p}")));
    }
    let lambda = elicit_lambda(cfg.diag_quantile)?;
    let theta = elicit_theta(cfg.expected_degree.min((p - 1) as f64 / 2.0), p)?;
    let g1 = elicit_g1(lambda, theta, p, cfg, rng)?;
    Ok(Elicited { theta, g1, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn lambda_examples() {
        assert!((elicit_lambda(0.99).unwrap() - 0.020_100_671_707_002_9).abs() < 1e-12);
        assert!((elicit_lambda((-0.5f64).exp()).unwrap() - 1.0).abs() < 1e-15);
        assert!(elicit_lambda(1.0).is_err());
        for q in [1e-6, 0.1, 0.5, 0.9, 0.999_999] {
            let lambda = elicit_lambda(q).unwrap();
            assert!(((-lambda / 2.0).exp() - q).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_examples() {
        assert!((elicit_theta(2.0, 100).unwrap() - 2.0 / 99.0).abs() < 1e-15);
        assert_eq!(elicit_theta(9.0, 10).unwrap(), 1.0);
        assert!(elicit_theta(0.0, 10).is_err());
        assert!(elicit_theta(10.0, 10).is_err());
    }

    #[test]
    fn small_p_elicitation_keeps_theta_below_one() {
        let e = elicit(3, &ElicitationConfig::default(), &mut seeded(4)).unwrap();
        assert_eq!(e.theta, 0.5);
        let e = elicit(10, &ElicitationConfig::default(), &mut seeded(4)).unwrap();
        assert!((e.theta - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn zero_theta_gives_bracket_top() {
        let cfg = ElicitationConfig::default();
        let g = elicit_g1(0.02, 0.0, 10, &cfg, &mut seeded(1)).unwrap();
        assert_eq!(g, cfg.g1_bracket.1);
        let m = sample_prior_unconstrained(0.0, 1.0, 0.02, 5, &mut seeded(2));
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(m[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn unattainable_target_is_rejected() {
        let cfg = ElicitationConfig {
            pd_target: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            elicit_g1(0.02, 0.2, 5, &cfg, &mut seeded(1)),
            Err(Error::Config { field: "pd_target", .. })
        ));
    }

    #[test]
    fn pd_rate_is_monotone_in_g1() {
        let mut last = 1.0;
        for g in [0.05, 0.2, 0.5, 1.0, 2.0] {
            let r = pd_rate(0.25, g, 0.02, 8, 400, 7);
            assert!(r <= last);
            last = r;
        }
    }
}
