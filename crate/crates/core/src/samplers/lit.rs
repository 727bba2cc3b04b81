//! Locally-informed thresholded proposals over column models.
//!
//! A move class is drawn as in the birth-death-swap kernel; within the class
//! each neighbour `z'` gets weight `π(z')/π(z)` clamped to `[1/p, p]` and
//! neighbours outside the prior support get weight zero.

use rand::seq::index;
use rand::Rng;

use super::kernels::{neighbours, swap_neighbour, KernelStats, MoveClass, MoveProbs};
use crate::conditional::{ModelFamily, Target};
use crate::error::Result;
use crate::state::ColumnModel;

/// Thresholded weight for a log posterior ratio.
pub fn lit_weight(log_ratio: f64, p: usize) -> f64 {
    if log_ratio == f64::NEG_INFINITY {
        return 0.0;
    }
    let bound = (p as f64).ln();
    log_ratio.clamp(-bound, bound).exp()
}

struct Neighbourhood {
    models: Vec<ColumnModel>,
    log_weights: Vec<f64>,
    weights: Vec<f64>,
    // sum of weights, scaled up when swaps were subsampled
    total: f64,
}

fn neighbourhood<F: ModelFamily, R: Rng + ?Sized>(
    target: &mut Target<'_, F>,
    z: &ColumnModel,
    lw: f64,
    class: MoveClass,
    p: usize,
    swap_cap: Option<usize>,
    rng: &mut R,
) -> Result<Neighbourhood> {
    let full = class.neighbours(z.size(), z.len());
    let (models, scale) = match (class, swap_cap) {
        (MoveClass::Swap, Some(cap)) if full > cap => {
            let (inc, exc) = (z.indices(), z.complement());
            let picked = index::sample(rng, full, cap);
            let models = picked.iter().map(|i| swap_neighbour(z, &inc, &exc, i)).collect();
            (models, full as f64 / cap as f64)
        }
        _ => (neighbours(z, class), 1.0),
    };
    let mut log_weights = Vec::with_capacity(models.len());
    let mut weights = Vec::with_capacity(models.len());
    for nb in &models {
        let l = target.log_weight(nb, Some(z))?;
        log_weights.push(l);
        weights.push(lit_weight(l - lw, p));
    }
    let total = weights.iter().sum::<f64>() * scale;
    Ok(Neighbourhood {
        models,
        log_weights,
        weights,
        total,
    })
}

/// `moves` informed proposals, each accepted with the Hastings ratio that
/// includes the forward and reverse neighbourhood normalizers. `p` is the
/// number of variables and sets the clamp `[1/p, p]`. With `swap_cap`, at
/// most that many swap neighbours are scored per step (an approximation).
#[allow(clippy::too_many_arguments)]
pub fn inner_lit<F: ModelFamily, R: Rng + ?Sized>(
    target: &mut Target<'_, F>,
    z: &mut ColumnModel,
    moves: usize,
    probs: &MoveProbs,
    p: usize,
    swap_cap: Option<usize>,
    rng: &mut R,
    stats: &mut KernelStats,
) -> Result<()> {
    let m = target.dim();
    let mut lw = target.log_weight(z, None)?;
    for _ in 0..moves {
        let k = z.size();
        let Some(class) = probs.choose(k, m, rng) else {
            break;
        };
        let fwd = neighbourhood(target, z, lw, class, p, swap_cap, rng)?;
        if fwd.total <= 0.0 {
            stats.record(false);
            continue;
        }
        let sum: f64 = fwd.weights.iter().sum();
        let u = rng.random::<f64>() * sum;
        let mut acc = 0.0;
        let mut pick = fwd.weights.len() - 1;
        for (i, &w) in fwd.weights.iter().enumerate() {
            acc += w;
            if w > 0.0 && u < acc {
                pick = i;
                break;
            }
        }
        while fwd.weights[pick] <= 0.0 {
            pick -= 1;
        }
        let prop = fwd.models[pick].clone();
        let lw_prop = fwd.log_weights[pick];
        let rev_class = class.reverse();
        let rev = neighbourhood(target, &prop, lw_prop, rev_class, p, swap_cap, rng)?;
        let q_fwd = probs.class_prob(class, k, m) * fwd.weights[pick] / fwd.total;
        let w_rev = lit_weight(lw - lw_prop, p);
        // a subsampled reverse neighbourhood may miss z itself
        let q_rev = probs.class_prob(rev_class, prop.size(), m) * w_rev / rev.total.max(w_rev);
        let log_acc = lw_prop - lw + q_rev.ln() - q_fwd.ln();
        let accepted = rng.random::<f64>().ln() < log_acc;
        stats.record(accepted);
        if accepted {
            *z = prop;
            lw = lw_prop;
        }
    }
    Ok(())
}
