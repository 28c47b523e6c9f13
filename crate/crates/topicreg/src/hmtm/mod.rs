//! Hidden Markov topic model: topic assignments form a Markov chain within
//! each document, with the shared topics acting as emission distributions.
//!
//! Each document carries its own transition matrix and starting
//! probabilities; the equilibrium distribution of the transition matrix
//! plays the role of the document's topic proportions, reducing the
//! predictor count from k(k-1) to k-1.

mod equilibrium;
mod fit;
mod forward_backward;
mod heldout;
mod simulate;

pub use equilibrium::{equilibrium_distribution, row_average_proportions};
pub use fit::fit_hmtm;
pub use forward_backward::{scaled_forward_backward, ScaledFB};
pub use heldout::{estimate_transition_heldout, HeldoutTransitions};
pub use simulate::{simulate_hmtm_corpus, HmtmSimulation};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topics::{serde_matrix, serde_matrix_list, TopicMatrix};

pub const DEFAULT_HELDOUT_TOL: f64 = 1e-6;
pub const DEFAULT_HELDOUT_MAX_ITER: usize = 500;

/// Dirichlet priors favoring long same-topic runs:
/// `0.99 + 0.01/k` on the diagonal, `0.01/k` elsewhere. Every row sums to
/// exactly `0.99 + k * 0.01/k = 1`.
pub fn persistent_priors(k: usize) -> Array2<f64> {
    assert!(k >= 1);
    let off = 0.01 / k as f64;
    let mut gamma = Array2::from_elem((k, k), off);
    for l in 0..k {
        gamma[[l, l]] = 0.99 + off;
    }
    gamma
}

/// Priors and EM schedule for the HMTM.
///
/// `beta` smooths the shared topics, `alpha` is the Dirichlet prior on the
/// starting probabilities, and `gamma` holds one Dirichlet prior row per
/// topic for the transition matrices. Transition and start updates use MAP
/// pseudo-counts `(gamma - 1)` and `(alpha - 1)` clamped at zero, so priors
/// with entries below one (like [`persistent_priors`]) contribute through
/// simulation and initialization rather than through smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmtmConfig {
    pub k: usize,
    pub beta: f64,
    pub alpha: f64,
    #[serde(with = "serde_matrix")]
    pub gamma: Array2<f64>,
    pub em_iterations: usize,
    pub tol: f64,
    pub seed: u64,
}

impl HmtmConfig {
    /// Flat transition priors (all ones): MAP updates reduce to maximum
    /// likelihood and initialization starts from uniform rows.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            beta: 0.1,
            alpha: 1.0,
            gamma: Array2::ones((k, k)),
            em_iterations: 500,
            tol: 1e-6,
            seed: 0,
        }
    }

    /// Same defaults with [`persistent_priors`] transition priors.
    pub fn persistent(k: usize) -> Self {
        Self { gamma: persistent_priors(k), ..Self::new(k) }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.beta <= 0.0 || self.alpha <= 0.0 {
            return Err(Error::InvalidConfig("alpha and beta must be positive".into()));
        }
        if self.gamma.dim() != (self.k, self.k) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be {k} x {k}",
                k = self.k
            )));
        }
        if self.gamma.iter().any(|&g| g <= 0.0) {
            return Err(Error::InvalidConfig("gamma entries must be positive".into()));
        }
        if self.tol <= 0.0 {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        Ok(())
    }
}

/// A fitted HMTM: shared topics plus per-document transition matrices and
/// starting probabilities. The objective trace records log-likelihood plus
/// log-prior at each EM iteration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HmtmModel {
    pub phi: TopicMatrix,
    #[serde(with = "serde_matrix_list")]
    pub transitions: Vec<Array2<f64>>,
    pub starts: Vec<Vec<f64>>,
    pub config: HmtmConfig,
    pub objective_trace: Vec<f64>,
}

impl HmtmModel {
    pub fn num_topics(&self) -> usize {
        self.phi.num_topics()
    }
}

/// MAP pseudo-count for a Dirichlet parameter: `max(prior - 1, 0)`.
pub(crate) fn map_pseudo_count(prior: f64) -> f64 {
    (prior - 1.0).max(0.0)
}

/// Row-normalizes `gamma` as the deterministic starting point for EM: flat
/// priors give uniform rows, persistent priors give diagonal-heavy rows.
pub(crate) fn prior_mean_rows(gamma: &Array2<f64>) -> Array2<f64> {
    let mut rows = gamma.clone();
    for mut row in rows.rows_mut() {
        let total: f64 = row.sum();
        row.mapv_inplace(|x| x / total);
    }
    rows
}
