//! Coordinate-wise Gibbs updates of a column model.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::conditional::{flip_log_weights, inclusion_probability, ModelFamily, Target};
use crate::error::Result;
use crate::state::ColumnModel;

/// One scan over all `p - 1` coordinates in a fresh random order, each set
/// from its full conditional. When `rb` is given, the inclusion probability
/// used for coordinate `k` is written to `rb[k]`.
pub fn inner_gibbs<F: ModelFamily, R: Rng + ?Sized>(
    target: &mut Target<'_, F>,
    z: &mut ColumnModel,
    rng: &mut R,
    mut rb: Option<&mut [f64]>,
) -> Result<()> {
    let m = target.dim();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    for k in order {
        let (off, on) = flip_log_weights(target.family, z, k, target.cache)?;
        let prob = inclusion_probability(off, on);
        if let Some(rb) = rb.as_deref_mut() {
            rb[k] = prob;
        }
        let include = rng.random::<f64>() < prob;
        if include != z.contains(k) {
            z.set(k, include);
        }
    }
    Ok(())
}
