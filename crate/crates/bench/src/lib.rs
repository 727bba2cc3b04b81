//! Shared fixtures for the benchmarks.

use ssggm::rng::stream_rng;
use ssggm::synth::{gen_data, generate_truth};
use ssggm::{Dataset, Hyperparams, Scenario};

/// Tri-diagonal data set with fixed moderate hyperparameters.
pub fn fixture(p: usize, n: usize, seed: u64) -> (Dataset, Hyperparams) {
    let mut rng = stream_rng(seed, 0);
    let truth = generate_truth(&Scenario::Tridiagonal, p, &mut rng).expect("tri-diagonal truth");
    let data = gen_data(&truth.omega0, n, &mut rng).expect("data");
    (data, Hyperparams::new(2.0 / (p - 1) as f64, 1.0, 0.5))
}
