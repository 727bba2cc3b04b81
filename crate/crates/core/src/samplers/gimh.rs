//! Globally-informed independence Metropolis-Hastings over column models.

use rand::Rng;

use super::kernels::KernelStats;
use crate::conditional::{ModelFamily, Target};
use crate::error::Result;
use crate::lr_proposal::{gimh_log_accept_from_weights, LrColumnContext, ProposalTable, TableExtension};
use crate::state::ColumnModel;

/// `moves` independence proposals drawn from the tempered table (plus any
/// appended models), each accepted with the ratio
/// `π(z*) π_LR(z)^υ / (π(z) π_LR(z*)^υ)`. The current model is appended to
/// the extension first when the table lacks it.
#[allow(clippy::too_many_arguments)]
pub fn inner_gimh<F: ModelFamily, R: Rng + ?Sized>(
    target: &mut Target<'_, F>,
    lr: &mut Target<'_, LrColumnContext<'_>>,
    table: &ProposalTable,
    extension: &mut TableExtension,
    z: &mut ColumnModel,
    moves: usize,
    rng: &mut R,
    stats: &mut KernelStats,
) -> Result<()> {
    let upsilon = table.upsilon();
    let mut lr_cur = match extension.lookup(table, z) {
        Some(l) => l,
        None => {
            let l = lr.log_weight(z, None)?;
            extension.ensure(table, z, l);
            l
        }
    };
    let mut lw = target.log_weight(z, None)?;
    for _ in 0..moves {
        let (prop, lr_prop) = extension.sample(table, rng);
        if prop == z {
            stats.record(true);
            continue;
        }
        let prop = prop.clone();
        let lw_prop = target.log_weight(&prop, Some(z))?;
        let log_acc = gimh_log_accept_from_weights(lw, lw_prop, lr_cur, lr_prop, upsilon);
        let accepted = log_acc > f64::NEG_INFINITY && rng.random::<f64>().ln() < log_acc;
        stats.record(accepted);
        if accepted {
            *z = prop;
            lw = lw_prop;
            lr_cur = lr_prop;
        }
    }
    Ok(())
}
