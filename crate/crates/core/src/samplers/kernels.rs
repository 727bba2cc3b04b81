//! Shared pieces of the model-space kernels: move classes and counters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::state::ColumnModel;

/// Proposal and acceptance counts of a Metropolis-Hastings kernel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelStats {
    pub proposals: u64,
    pub accepts: u64,
}

impl KernelStats {
    pub fn rate(&self) -> Option<f64> {
        (self.proposals > 0).then(|| self.accepts as f64 / self.proposals as f64)
    }

    pub fn merge(&mut self, other: KernelStats) {
        self.proposals += other.proposals;
        self.accepts += other.accepts;
    }

    pub(crate) fn record(&mut self, accepted: bool) {
        self.proposals += 1;
        self.accepts += u64::from(accepted);
    }
}

/// Local move classes over column models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveClass {
    Birth,
    Death,
    Swap,
}

impl MoveClass {
    pub const ALL: [MoveClass; 3] = [MoveClass::Birth, MoveClass::Death, MoveClass::Swap];

    /// Class that undoes a move of this class.
    pub fn reverse(self) -> MoveClass {
        match self {
            MoveClass::Birth => MoveClass::Death,
            MoveClass::Death => MoveClass::Birth,
            MoveClass::Swap => MoveClass::Swap,
        }
    }

    /// Number of neighbours of a model of size `k` among `m` coordinates.
    pub fn neighbours(self, k: usize, m: usize) -> usize {
        match self {
            MoveClass::Birth => m - k,
            MoveClass::Death => k,
            MoveClass::Swap => k * (m - k),
        }
    }

    fn index(self) -> usize {
        match self {
            MoveClass::Birth => 0,
            MoveClass::Death => 1,
            MoveClass::Swap => 2,
        }
    }
}

/// Move-class probabilities. Classes without neighbours at the current
/// size get probability zero and the others are rescaled proportionally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoveProbs {
    pub birth: f64,
    pub death: f64,
    pub swap: f64,
}

impl MoveProbs {
    pub fn new(p_birth: f64, p_death: f64) -> Self {
        Self {
            birth: p_birth,
            death: p_death,
            swap: (1.0 - p_birth - p_death).max(0.0),
        }
    }

    /// Renormalized class probabilities for a model of size `k`.
    pub fn at(&self, k: usize, m: usize) -> [f64; 3] {
        let raw = [self.birth, self.death, self.swap];
        let mut out = [0.0; 3];
        for c in MoveClass::ALL {
            if c.neighbours(k, m) > 0 {
                out[c.index()] = raw[c.index()];
            }
        }
        let total: f64 = out.iter().sum();
        if total > 0.0 {
            out.iter_mut().for_each(|v| *v /= total);
        }
        out
    }

    pub fn class_prob(&self, class: MoveClass, k: usize, m: usize) -> f64 {
        self.at(k, m)[class.index()]
    }

    /// Draws a class for a model of size `k`; `None` when no class has
    /// positive probability.
    pub fn choose<R: Rng + ?Sized>(&self, k: usize, m: usize, rng: &mut R) -> Option<MoveClass> {
        let probs = self.at(k, m);
        if probs.iter().sum::<f64>() <= 0.0 {
            return None;
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = None;
        for c in MoveClass::ALL {
            let pc = probs[c.index()];
            if pc > 0.0 {
                acc += pc;
                last = Some(c);
                if u < acc {
                    return Some(c);
                }
            }
        }
        last
    }

    /// Uniform birth-death-swap proposal probability `Q(to | from)` for
    /// models one move apart.
    pub fn proposal_prob(&self, from: &ColumnModel, to: &ColumnModel) -> f64 {
        let m = from.len();
        let k = from.size();
        let class = match (to.size() as isize - k as isize, from.hamming(to)) {
            (1, 1) => MoveClass::Birth,
            (-1, 1) => MoveClass::Death,
            (0, 2) => MoveClass::Swap,
            _ => return 0.0,
        };
        self.class_prob(class, k, m) / class.neighbours(k, m) as f64
    }
}

/// Uniformly chosen neighbour of `z` in `class`.
pub(crate) fn random_neighbour<R: Rng + ?Sized>(z: &ColumnModel, class: MoveClass, rng: &mut R) -> ColumnModel {
    let pick = |v: &[usize], rng: &mut R| v[rng.random_range(0..v.len())];
    match class {
        MoveClass::Birth => z.with(pick(&z.complement(), rng), true),
        MoveClass::Death => z.with(pick(&z.indices(), rng), false),
        MoveClass::Swap => {
            let out = pick(&z.indices(), rng);
            let inn = pick(&z.complement(), rng);
            z.with(out, false).with(inn, true)
        }
    }
}

/// All neighbours of `z` in `class`, in a fixed order.
pub(crate) fn neighbours(z: &ColumnModel, class: MoveClass) -> Vec<ColumnModel> {
    match class {
        MoveClass::Birth => z.complement().into_iter().map(|k| z.with(k, true)).collect(),
        MoveClass::Death => z.indices().into_iter().map(|k| z.with(k, false)).collect(),
        MoveClass::Swap => {
            let inc = z.indices();
            let exc = z.complement();
            let mut out = Vec::with_capacity(inc.len() * exc.len());
            for &a in &inc {
                for &b in &exc {
                    out.push(z.with(a, false).with(b, true));
                }
            }
            out
        }
    }
}

/// The `idx`-th swap neighbour in the order of [`neighbours`].
pub(crate) fn swap_neighbour(z: &ColumnModel, inc: &[usize], exc: &[usize], idx: usize) -> ColumnModel {
    let a = inc[idx / exc.len()];
    let b = exc[idx % exc.len()];
    z.with(a, false).with(b, true)
}
