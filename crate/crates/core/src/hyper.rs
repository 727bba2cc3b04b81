//! Prior and sampler tuning constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tempering exponent used by the globally-informed proposal when unset.
pub const DEFAULT_UPSILON: f64 = 0.75;
/// Birth-move probability of the birth-death-swap kernel.
pub const DEFAULT_P_BIRTH: f64 = 0.75;
/// Death-move probability; swaps get the remaining `1 - p_birth - p_death`.
pub const DEFAULT_P_DEATH: f64 = 0.125;

/// Hyperparameters of the spike-and-slab prior and the model-space kernels.
///
/// Optional fields are resolved by [`Hyperparams::validate`]; the accessors
/// fall back to the same defaults so unvalidated values remain usable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Prior slab probability of each edge.
    pub theta: f64,
    /// Slab standard deviation.
    pub g1: f64,
    /// Rate parameter of the diagonal prior `Exp(lambda / 2)`.
    pub lambda: f64,
    /// Maximum node degree; `p - 1` when unset.
    pub dbar: Option<usize>,
    pub p_birth: f64,
    pub p_death: f64,
    /// Tempering exponent of the regression proposal.
    pub upsilon: Option<f64>,
    /// Inner moves per column visit; `ceil(sqrt(p))` when unset.
    pub m_inner: Option<usize>,
    /// Prior precision of the regression proposal; `g1^-2` when unset.
    pub tau: Option<f64>,
}

impl Hyperparams {
    pub fn new(theta: f64, g1: f64, lambda: f64) -> Self {
        Self {
            theta,
            g1,
            lambda,
            dbar: None,
            p_birth: DEFAULT_P_BIRTH,
            p_death: DEFAULT_P_DEATH,
            upsilon: None,
            m_inner: None,
            tau: None,
        }
    }

    pub fn dbar(&self, p: usize) -> usize {
        self.dbar.unwrap_or(p.saturating_sub(1))
    }

    pub fn upsilon(&self) -> f64 {
        self.upsilon.unwrap_or(DEFAULT_UPSILON)
    }

    pub fn inner_moves(&self, p: usize) -> usize {
        self.m_inner.unwrap_or_else(|| default_inner_moves(p))
    }

    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(1.0 / (self.g1 * self.g1))
    }

    pub fn p_swap(&self) -> f64 {
        (1.0 - self.p_birth - self.p_death).max(0.0)
    }

    /// Checks every range constraint for a problem with `p` variables and
    /// fills unset tuning values with their defaults.
    pub fn validate(mut self, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::Dimension(format!("p >= 2 required, got {p}")));
        }
        open_unit("theta", self.theta)?;
        positive("g1", self.g1)?;
        positive("lambda", self.lambda)?;
        open_unit("p_birth", self.p_birth)?;
        open_unit("p_death", self.p_death)?;
        if self.p_birth + self.p_death > 1.0 {
            return Err(Error::config(
                "p_birth + p_death",
                format!("must be <= 1, got {}", self.p_birth + self.p_death),
            ));
        }
        let dbar = self.dbar.unwrap_or(p - 1);
        if dbar < 1 || dbar > p - 1 {
            return Err(Error::config("dbar", format!("must lie in [1, {}], got {dbar}", p - 1)));
        }
        self.dbar = Some(dbar);
        let upsilon = self.upsilon.unwrap_or(DEFAULT_UPSILON);
        if !(upsilon > 0.0 && upsilon <= 1.0) {
            return Err(Error::config("upsilon", format!("must lie in (0, 1], got {upsilon}")));
        }
        self.upsilon = Some(upsilon);
        let m = self.m_inner.unwrap_or_else(|| default_inner_moves(p));
        if m < 1 {
            return Err(Error::config("M", "must be >= 1"));
        }
        self.m_inner = Some(m);
        let tau = self.tau();
        positive("tau", tau)?;
        self.tau = Some(tau);
        Ok(self)
    }
}

/// `ceil(sqrt(p))`.
pub fn default_inner_moves(p: usize) -> usize {
    let r = (p as f64).sqrt().ceil() as usize;
    // guard against floating error on perfect squares
    if (r - 1) * (r - 1) >= p && r > 1 {
        r - 1
    } else {
        r.max(1)
    }
}

fn open_unit(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must lie in (0, 1), got {v}")))
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {v}")))
    }
}
