//! Latent Dirichlet allocation: generative simulation, collapsed-Gibbs
//! fitting, and likelihood-based estimation of topic proportions for
//! documents that were not in the training corpus.

mod gibbs;
pub(crate) mod simulate;
#[cfg(test)]
mod tests;
mod theta;

pub(crate) use simulate::synthetic_vocabulary;

pub use gibbs::{fit_lda_gibbs, GibbsState};
pub use simulate::{
    simulate_corpus, simulate_corpus_with_lengths, simulate_documents_with_theta,
    uniform_lengths, LdaSimulation,
};
pub use theta::{estimate_theta_mle, log_likelihood_theta, DEFAULT_MLE_TOL};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topics::{serde_matrix, TopicMatrix};

/// Hyperparameters and Gibbs schedule for LDA.
///
/// `alpha` and `beta` are the symmetric Dirichlet concentrations for the
/// per-document topic proportions and the topics; `xi` is the mean document
/// length used only when simulating. The sampler runs `burnin` discarded
/// sweeps followed by `iterations` sweeps of which every `keep`-th state is
/// averaged into the point estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
    pub burnin: usize,
    pub iterations: usize,
    pub keep: usize,
    pub seed: u64,
}

impl LdaConfig {
    /// Defaults: `alpha = 50/k`, `beta = 0.1`, schedule burnin 1000,
    /// iterations 1000, keep 50.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            alpha: 50.0 / k as f64,
            beta: 0.1,
            xi: 100.0,
            burnin: 1000,
            iterations: 1000,
            keep: 50,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// A reduced schedule for small corpora and tests.
    pub fn with_schedule(mut self, burnin: usize, iterations: usize, keep: usize) -> Self {
        self.burnin = burnin;
        self.iterations = iterations;
        self.keep = keep;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.alpha <= 0.0 || self.beta <= 0.0 {
            return Err(Error::InvalidConfig("alpha and beta must be positive".into()));
        }
        if self.xi <= 0.0 {
            return Err(Error::InvalidConfig("xi must be positive".into()));
        }
        if self.keep == 0 {
            return Err(Error::InvalidConfig("keep must be at least 1".into()));
        }
        Ok(())
    }
}

/// A fitted LDA model: topics, training-document proportions and the
/// configuration (including the RNG seed) that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LdaModel {
    pub phi: TopicMatrix,
    #[serde(with = "serde_matrix")]
    pub theta: Array2<f64>,
    pub config: LdaConfig,
}

impl LdaModel {
    pub fn num_topics(&self) -> usize {
        self.phi.num_topics()
    }
}
