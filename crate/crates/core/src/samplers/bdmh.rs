//! Birth-death-swap Metropolis-Hastings over column models.

use rand::Rng;

use super::kernels::{random_neighbour, KernelStats, MoveProbs};
use crate::conditional::{ModelFamily, Target};
use crate::error::Result;
use crate::state::ColumnModel;

/// `moves` birth/death/swap proposals with uniform choice inside each class.
pub fn inner_bdmh<F: ModelFamily, R: Rng + ?Sized>(
    target: &mut Target<'_, F>,
    z: &mut ColumnModel,
    moves: usize,
    probs: &MoveProbs,
    rng: &mut R,
    stats: &mut KernelStats,
) -> Result<()> {
    let m = target.dim();
    let mut lw = target.log_weight(z, None)?;
    for _ in 0..moves {
        let Some(class) = probs.choose(z.size(), m, rng) else {
            break;
        };
        let prop = random_neighbour(z, class, rng);
        let lw_prop = target.log_weight(&prop, Some(z))?;
        let q_fwd = probs.proposal_prob(z, &prop);
        let q_rev = probs.proposal_prob(&prop, z);
        let log_acc = lw_prop - lw + q_rev.ln() - q_fwd.ln();
        let accepted = lw_prop > f64::NEG_INFINITY && rng.random::<f64>().ln() < log_acc;
        stats.record(accepted);
        if accepted {
            *z = prop;
            lw = lw_prop;
        }
    }
    Ok(())
}
