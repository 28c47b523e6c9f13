//! HMTM generative process: shared topics from Dir(beta), per-document
//! starting probabilities from Dir(alpha) and transition rows from
//! Dir(gamma_l), then a Markov chain of topic assignments emitting words.

use ndarray::Array2;

use super::{HmtmConfig, HmtmModel};
use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::lda::simulate::TopicCdf;
use crate::lda::synthetic_vocabulary;
use crate::math::{sample_categorical, sample_dirichlet, sample_dirichlet_sym, seeded_stream};
use crate::topics::TopicMatrix;

const SIM_STREAM: u64 = 11;

/// A simulated HMTM corpus alongside the generating model and the latent
/// topic paths (useful for run-length statistics).
#[derive(Debug)]
pub struct HmtmSimulation {
    pub corpus: Corpus,
    pub truth: HmtmModel,
    pub topic_paths: Vec<Vec<usize>>,
}

pub fn simulate_hmtm_corpus(
    config: &HmtmConfig,
    lengths: &[usize],
    vocab_size: usize,
    phi: Option<&TopicMatrix>,
) -> Result<HmtmSimulation> {
    config.validate()?;
    if vocab_size == 0 {
        return Err(Error::InvalidConfig("vocab_size must be at least 1".into()));
    }
    if lengths.iter().any(|&n| n == 0) {
        return Err(Error::InvalidInput("document lengths must be at least 1".into()));
    }
    let k = config.k;
    let mut rng = seeded_stream(config.seed, SIM_STREAM);
    let phi = match phi {
        Some(p) => {
            if p.num_topics() != k || p.vocab_size() != vocab_size {
                return Err(Error::DimensionMismatch(
                    "phi does not match config.k / vocab_size".into(),
                ));
            }
            p.clone()
        }
        None => {
            let rows: Vec<Vec<f64>> = (0..k)
                .map(|_| sample_dirichlet_sym(&mut rng, config.beta, vocab_size))
                .collect();
            TopicMatrix::from_rows(rows)?
        }
    };
    let cdf = TopicCdf::new(&phi);

    let m = lengths.len();
    let mut docs = Vec::with_capacity(m);
    let mut transitions = Vec::with_capacity(m);
    let mut starts = Vec::with_capacity(m);
    let mut paths = Vec::with_capacity(m);
    for &n in lengths {
        let start = sample_dirichlet_sym(&mut rng, config.alpha, k);
        let mut trans = Array2::zeros((k, k));
        for l in 0..k {
            let gamma_row: Vec<f64> = config.gamma.row(l).to_vec();
            let row = sample_dirichlet(&mut rng, &gamma_row);
            for (s, &p) in row.iter().enumerate() {
                trans[[l, s]] = p;
            }
        }
        let mut path = Vec::with_capacity(n);
        let mut tokens = Vec::with_capacity(n);
        let mut state = sample_categorical(&mut rng, &start);
        path.push(state);
        tokens.push(cdf.draw(&mut rng, state));
        for _ in 1..n {
            let row: Vec<f64> = trans.row(state).to_vec();
            state = sample_categorical(&mut rng, &row);
            path.push(state);
            tokens.push(cdf.draw(&mut rng, state));
        }
        docs.push(Document::new(tokens, vocab_size)?);
        transitions.push(trans);
        starts.push(start);
        paths.push(path);
    }

    let ids = (0..m).map(|j| format!("d{j}")).collect();
    let corpus = Corpus::new(ids, docs, synthetic_vocabulary(vocab_size), None)?;
    let truth = HmtmModel {
        phi,
        transitions,
        starts,
        config: config.clone(),
        objective_trace: Vec::new(),
    };
    Ok(HmtmSimulation { corpus, truth, topic_paths: paths })
}
