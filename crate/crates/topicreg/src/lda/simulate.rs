//! LDA generative process: topics from Dir(beta), per-document proportions
//! from Dir(alpha), Poisson document lengths, multinomial topic assignments
//! and words.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::LdaConfig;
use crate::corpus::{Corpus, Document, Vocabulary};
use crate::error::{Error, Result};
use crate::math::{sample_categorical, sample_dirichlet_sym, seeded_stream};
use crate::topics::TopicMatrix;

const SIM_STREAM: u64 = 1;
const LENGTH_STREAM: u64 = 2;
const THETA_SIM_STREAM: u64 = 3;
const UNIFORM_LENGTH_STREAM: u64 = 4;

/// A simulated corpus together with the ground truth that generated it.
#[derive(Debug)]
pub struct LdaSimulation {
    pub corpus: Corpus,
    /// m x k ground-truth topic proportions.
    pub theta: Array2<f64>,
    /// The topics used (drawn from Dir(beta) when not supplied).
    pub phi: TopicMatrix,
}

pub(crate) fn synthetic_vocabulary(v: usize) -> Vocabulary {
    Vocabulary::new((0..v).map(|i| format!("w{i}")).collect()).expect("v >= 1")
}

/// Cumulative rows of phi, so word draws are a binary search instead of a
/// linear scan over the vocabulary.
pub(crate) struct TopicCdf {
    rows: Vec<Vec<f64>>,
}

impl TopicCdf {
    pub(crate) fn new(phi: &TopicMatrix) -> Self {
        let rows = (0..phi.num_topics())
            .map(|l| {
                let mut acc = 0.0;
                phi.row(l)
                    .iter()
                    .map(|&p| {
                        acc += p;
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R, topic: usize) -> usize {
        let row = &self.rows[topic];
        let u = rng.random::<f64>() * row.last().copied().unwrap_or(1.0);
        row.partition_point(|&c| c <= u).min(row.len() - 1)
    }
}

fn draw_tokens<R: Rng>(rng: &mut R, theta: &[f64], cdf: &TopicCdf, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let z = sample_categorical(rng, theta);
            cdf.draw(rng, z)
        })
        .collect()
}

fn resolve_phi<R: Rng>(
    rng: &mut R,
    config: &LdaConfig,
    vocab_size: usize,
    phi: Option<&TopicMatrix>,
) -> Result<TopicMatrix> {
    match phi {
        Some(p) => {
            if p.num_topics() != config.k {
                return Err(Error::DimensionMismatch(format!(
                    "phi has {} topics, config.k = {}",
                    p.num_topics(),
                    config.k
                )));
            }
            if p.vocab_size() != vocab_size {
                return Err(Error::DimensionMismatch(format!(
                    "phi has vocabulary {}, expected {}",
                    p.vocab_size(),
                    vocab_size
                )));
            }
            Ok(p.clone())
        }
        None => {
            let rows: Vec<Vec<f64>> = (0..config.k)
                .map(|_| sample_dirichlet_sym(rng, config.beta, vocab_size))
                .collect();
            TopicMatrix::from_rows(rows)
        }
    }
}

/// Simulates a corpus with explicit per-document lengths.
pub fn simulate_corpus_with_lengths(
    config: &LdaConfig,
    lengths: &[usize],
    vocab_size: usize,
    phi: Option<&TopicMatrix>,
) -> Result<LdaSimulation> {
    config.validate()?;
    if vocab_size == 0 {
        return Err(Error::InvalidConfig("vocab_size must be at least 1".into()));
    }
    if lengths.iter().any(|&n| n == 0) {
        return Err(Error::InvalidInput("document lengths must be at least 1".into()));
    }
    let mut rng = seeded_stream(config.seed, SIM_STREAM);
    let phi = resolve_phi(&mut rng, config, vocab_size, phi)?;
    let cdf = TopicCdf::new(&phi);
    let m = lengths.len();
    let vocabulary = synthetic_vocabulary(vocab_size);
    let mut theta = Array2::zeros((m, config.k));
    let mut docs = Vec::with_capacity(m);
    for (j, &n) in lengths.iter().enumerate() {
        let theta_j = sample_dirichlet_sym(&mut rng, config.alpha, config.k);
        theta.row_mut(j).assign(&ndarray::Array1::from_vec(theta_j.clone()));
        let tokens = draw_tokens(&mut rng, &theta_j, &cdf, n);
        docs.push(Document::new(tokens, vocab_size)?);
    }
    let ids = (0..m).map(|j| format!("d{j}")).collect();
    Ok(LdaSimulation {
        corpus: Corpus::new(ids, docs, vocabulary, None)?,
        theta,
        phi,
    })
}

/// Simulates `num_docs` documents with lengths drawn from Poisson(xi);
/// zero-length draws are rejected so every document is non-empty.
pub fn simulate_corpus(
    config: &LdaConfig,
    num_docs: usize,
    vocab_size: usize,
    phi: Option<&TopicMatrix>,
) -> Result<LdaSimulation> {
    config.validate()?;
    let mut rng = seeded_stream(config.seed, LENGTH_STREAM);
    let poisson = Poisson::new(config.xi)
        .map_err(|e| Error::InvalidConfig(format!("invalid xi: {e}")))?;
    let lengths: Vec<usize> = (0..num_docs)
        .map(|_| loop {
            let n = poisson.sample(&mut rng) as usize;
            if n > 0 {
                break n;
            }
        })
        .collect();
    simulate_corpus_with_lengths(config, &lengths, vocab_size, phi)
}

/// Document lengths drawn uniformly from `lo..=hi`.
pub fn uniform_lengths(num_docs: usize, lo: usize, hi: usize, seed: u64) -> Vec<usize> {
    assert!(lo >= 1 && hi >= lo);
    let mut rng = seeded_stream(seed, UNIFORM_LENGTH_STREAM);
    (0..num_docs).map(|_| rng.random_range(lo..=hi)).collect()
}

/// Draws documents from known topics with one fixed proportion vector,
/// as in recovery experiments where every document shares its true theta.
pub fn simulate_documents_with_theta(
    phi: &TopicMatrix,
    theta: &[f64],
    lengths: &[usize],
    seed: u64,
) -> Result<Vec<Document>> {
    if theta.len() != phi.num_topics() {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} entries, phi has {} topics",
            theta.len(),
            phi.num_topics()
        )));
    }
    if !crate::math::is_simplex(theta, 1e-8) {
        return Err(Error::InvalidInput("theta must lie on the simplex".into()));
    }
    let mut rng = seeded_stream(seed, THETA_SIM_STREAM);
    let cdf = TopicCdf::new(phi);
    lengths
        .iter()
        .map(|&n| Document::new(draw_tokens(&mut rng, theta, &cdf, n), phi.vocab_size()))
        .collect()
}
