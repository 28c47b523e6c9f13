//! Collapsed Gibbs sampling for LDA. Topic proportions and topics are
//! integrated out; the sampler walks the per-token topic assignments z and
//! reads smoothed point estimates off the count tables.

use ndarray::Array2;
use rand::Rng;

use super::{LdaConfig, LdaModel};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::math::{sample_categorical, seeded_stream};
use crate::topics::TopicMatrix;

const FIT_STREAM: u64 = 5;

/// Sampler state: per-token assignments plus the count tables that are kept
/// as running marginals of z.
#[derive(Debug)]
pub struct GibbsState {
    z: Vec<Vec<usize>>,
    topic_term: Array2<u32>, // k x v
    doc_topic: Array2<u32>,  // m x k
    topic_total: Vec<u32>,   // k
}

impl GibbsState {
    pub fn init<R: Rng>(corpus: &Corpus, k: usize, rng: &mut R) -> Self {
        let v = corpus.vocabulary.len();
        let m = corpus.len();
        let mut state = Self {
            z: Vec::with_capacity(m),
            topic_term: Array2::zeros((k, v)),
            doc_topic: Array2::zeros((m, k)),
            topic_total: vec![0; k],
        };
        for (j, doc) in corpus.docs.iter().enumerate() {
            let mut zj = Vec::with_capacity(doc.len());
            for &w in doc.tokens() {
                let topic = rng.random_range(0..k);
                state.topic_term[[topic, w]] += 1;
                state.doc_topic[[j, topic]] += 1;
                state.topic_total[topic] += 1;
                zj.push(topic);
            }
            state.z.push(zj);
        }
        state
    }

    /// One full sweep over every token. The full conditional for token w in
    /// document j is proportional to
    /// `(n_word[l][w] + beta) / (n_l + v*beta) * (n_doc[j][l] + alpha)`.
    pub fn sweep<R: Rng>(&mut self, corpus: &Corpus, alpha: f64, beta: f64, rng: &mut R) {
        let k = self.topic_total.len();
        let v = corpus.vocabulary.len() as f64;
        let mut weights = vec![0.0; k];
        for (j, doc) in corpus.docs.iter().enumerate() {
            for (i, &w) in doc.tokens().iter().enumerate() {
                let old = self.z[j][i];
                self.topic_term[[old, w]] -= 1;
                self.doc_topic[[j, old]] -= 1;
                self.topic_total[old] -= 1;
                for l in 0..k {
                    let word_part = (self.topic_term[[l, w]] as f64 + beta)
                        / (self.topic_total[l] as f64 + v * beta);
                    weights[l] = word_part * (self.doc_topic[[j, l]] as f64 + alpha);
                }
                let new = sample_categorical(rng, &weights);
                self.topic_term[[new, w]] += 1;
                self.doc_topic[[j, new]] += 1;
                self.topic_total[new] += 1;
                self.z[j][i] = new;
            }
        }
    }

    /// Smoothed topic estimate `(n_word + beta) / (n_l + v*beta)`.
    pub fn phi_estimate(&self, beta: f64) -> Array2<f64> {
        let (k, v) = self.topic_term.dim();
        let mut phi = Array2::zeros((k, v));
        for l in 0..k {
            let denom = self.topic_total[l] as f64 + v as f64 * beta;
            for w in 0..v {
                phi[[l, w]] = (self.topic_term[[l, w]] as f64 + beta) / denom;
            }
        }
        phi
    }

    /// Smoothed proportions estimate `(n_doc + alpha) / (n_j + k*alpha)`.
    pub fn theta_estimate(&self, alpha: f64) -> Array2<f64> {
        let (m, k) = self.doc_topic.dim();
        let mut theta = Array2::zeros((m, k));
        for j in 0..m {
            let n_j: u32 = (0..k).map(|l| self.doc_topic[[j, l]]).sum();
            let denom = n_j as f64 + k as f64 * alpha;
            for l in 0..k {
                theta[[j, l]] = (self.doc_topic[[j, l]] as f64 + alpha) / denom;
            }
        }
        theta
    }

    /// True when the count tables are exact marginals of z. Used by tests.
    pub fn is_consistent(&self, corpus: &Corpus) -> bool {
        let (k, v) = self.topic_term.dim();
        let mut topic_term = Array2::<u32>::zeros((k, v));
        let mut doc_topic = Array2::<u32>::zeros((corpus.len(), k));
        let mut topic_total = vec![0u32; k];
        for (j, doc) in corpus.docs.iter().enumerate() {
            for (i, &w) in doc.tokens().iter().enumerate() {
                let l = self.z[j][i];
                topic_term[[l, w]] += 1;
                doc_topic[[j, l]] += 1;
                topic_total[l] += 1;
            }
        }
        topic_term == self.topic_term
            && doc_topic == self.doc_topic
            && topic_total == self.topic_total
    }
}

/// Fits LDA by collapsed Gibbs sampling: `burnin` discarded sweeps, then
/// `iterations` sweeps with every `keep`-th state averaged into the phi and
/// theta estimates. Training-document proportions come from the Gibbs count
/// tables, not from re-running held-out inference.
pub fn fit_lda_gibbs(corpus: &Corpus, config: &LdaConfig) -> Result<LdaModel> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    if let Some(j) = corpus.docs.iter().position(|d| d.is_empty()) {
        return Err(Error::InvalidInput(format!("document {j} is empty")));
    }
    let total = corpus.total_tokens();
    if config.k > total {
        return Err(Error::MoreTopicsThanTokens { k: config.k, tokens: total });
    }

    let mut rng = seeded_stream(config.seed, FIT_STREAM);
    let mut state = GibbsState::init(corpus, config.k, &mut rng);
    for _ in 0..config.burnin {
        state.sweep(corpus, config.alpha, config.beta, &mut rng);
    }
    let mut phi_acc: Option<Array2<f64>> = None;
    let mut theta_acc: Option<Array2<f64>> = None;
    let mut samples = 0usize;
    for it in 1..=config.iterations {
        state.sweep(corpus, config.alpha, config.beta, &mut rng);
        if it % config.keep == 0 {
            accumulate(&mut phi_acc, state.phi_estimate(config.beta));
            accumulate(&mut theta_acc, state.theta_estimate(config.alpha));
            samples += 1;
        }
    }
    if samples == 0 {
        // Schedule too short to keep a sample: fall back to the final state.
        accumulate(&mut phi_acc, state.phi_estimate(config.beta));
        accumulate(&mut theta_acc, state.theta_estimate(config.alpha));
        samples = 1;
    }
    let scale = 1.0 / samples as f64;
    let phi = phi_acc.unwrap() * scale;
    let theta = theta_acc.unwrap() * scale;
    Ok(LdaModel {
        phi: TopicMatrix::new(phi)?,
        theta,
        config: config.clone(),
    })
}

fn accumulate(acc: &mut Option<Array2<f64>>, sample: Array2<f64>) {
    match acc {
        Some(a) => *a += &sample,
        None => *acc = Some(sample),
    }
}
