//! MAP EM training for the HMTM with shared emissions.
//!
//! The E-step runs scaled forward-backward per document; the M-step pools
//! emission expectations into the shared topics (beta-smoothed), and updates
//! each document's transition matrix and starting probabilities with MAP
//! pseudo-counts. The tracked objective (log-likelihood plus log-prior) is
//! non-decreasing; failure to stabilize within the configured iteration
//! budget is an error.

use ndarray::Array2;
use rayon::prelude::*;

use super::forward_backward::forward_backward_tokens;
use super::{map_pseudo_count, prior_mean_rows, HmtmConfig, HmtmModel};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::math::{sample_dirichlet_sym, seeded_stream};
use crate::topics::TopicMatrix;

const FIT_STREAM: u64 = 12;

struct DocExpectations {
    log_likelihood: f64,
    posteriors: Array2<f64>,
    xi: Array2<f64>,
}

pub fn fit_hmtm(corpus: &Corpus, config: &HmtmConfig) -> Result<HmtmModel> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    if let Some(j) = corpus.docs.iter().position(|d| d.is_empty()) {
        return Err(Error::InvalidInput(format!("document {j} is empty")));
    }
    let k = config.k;
    let v = corpus.vocabulary.len();
    let m = corpus.len();

    let mut rng = seeded_stream(config.seed, FIT_STREAM);
    let phi_rows: Vec<Vec<f64>> = (0..k)
        .map(|_| sample_dirichlet_sym(&mut rng, 1.0, v))
        .collect();
    let mut phi = TopicMatrix::from_rows(phi_rows)?;
    let init_rows = prior_mean_rows(&config.gamma);
    let mut transitions = vec![init_rows; m];
    let mut starts = vec![vec![1.0 / k as f64; k]; m];

    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..config.em_iterations {
        let expectations: Vec<DocExpectations> = corpus
            .docs
            .par_iter()
            .zip(transitions.par_iter().zip(starts.par_iter()))
            .map(|(doc, (trans, start))| {
                let fb = forward_backward_tokens(doc.tokens(), &phi, trans, start)?;
                let posteriors = fb.state_posteriors();
                let xi = fb.expected_transitions(doc.tokens(), &phi, trans);
                Ok(DocExpectations { log_likelihood: fb.log_likelihood, posteriors, xi })
            })
            .collect::<Result<_>>()?;

        let objective = objective_value(config, &expectations, &phi, &transitions, &starts);
        trace.push(objective);
        if trace.len() >= 2 {
            let prev = trace[trace.len() - 2];
            if (objective - prev).abs() <= config.tol * (1.0 + objective.abs()) {
                converged = true;
                break;
            }
        }

        // M-step: shared topics from pooled expectations.
        let mut emit = Array2::<f64>::zeros((k, v));
        for (doc, exp) in corpus.docs.iter().zip(&expectations) {
            for (t, &w) in doc.tokens().iter().enumerate() {
                for l in 0..k {
                    emit[[l, w]] += exp.posteriors[[t, l]];
                }
            }
        }
        let mut phi_rows = Vec::with_capacity(k);
        for l in 0..k {
            let total: f64 = emit.row(l).sum() + v as f64 * config.beta;
            phi_rows.push(emit.row(l).iter().map(|&c| (c + config.beta) / total).collect());
        }
        phi = TopicMatrix::from_rows(phi_rows)?;

        // Per-document transition and start updates.
        let start_pseudo = map_pseudo_count(config.alpha);
        for (j, exp) in expectations.iter().enumerate() {
            transitions[j] = transition_update(&exp.xi, &config.gamma);
            let mut pi: Vec<f64> = (0..k)
                .map(|l| exp.posteriors[[0, l]] + start_pseudo)
                .collect();
            let total: f64 = pi.iter().sum();
            for x in &mut pi {
                *x /= total;
            }
            starts[j] = pi;
        }
    }
    if !converged {
        return Err(Error::NoStabilization { iterations: config.em_iterations });
    }

    Ok(HmtmModel {
        phi,
        transitions,
        starts,
        config: config.clone(),
        objective_trace: trace,
    })
}

/// Row-wise MAP update: expected counts plus clamped pseudo-counts. A row
/// with no mass at all falls back to the prior mean.
pub(crate) fn transition_update(xi: &Array2<f64>, gamma: &Array2<f64>) -> Array2<f64> {
    let k = xi.nrows();
    let mut out = Array2::zeros((k, k));
    for l in 0..k {
        let mut row: Vec<f64> = (0..k)
            .map(|s| xi[[l, s]] + map_pseudo_count(gamma[[l, s]]))
            .collect();
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            for x in &mut row {
                *x /= total;
            }
        } else {
            let prior_total: f64 = gamma.row(l).sum();
            for (s, x) in row.iter_mut().enumerate() {
                *x = gamma[[l, s]] / prior_total;
            }
        }
        for (s, &x) in row.iter().enumerate() {
            out[[l, s]] = x;
        }
    }
    out
}

/// Log-likelihood plus the log-prior terms that the M-step maximizes:
/// `beta * sum ln phi` for the topics and clamped `charge * ln value` for
/// transitions and starts. Zero-coefficient terms are skipped so boundary
/// values do not produce `0 * -inf`.
fn objective_value(
    config: &HmtmConfig,
    expectations: &[DocExpectations],
    phi: &TopicMatrix,
    transitions: &[Array2<f64>],
    starts: &[Vec<f64>],
) -> f64 {
    let k = config.k;
    let mut obj: f64 = expectations.iter().map(|e| e.log_likelihood).sum();
    for l in 0..k {
        for &p in phi.row(l) {
            obj += config.beta * p.ln();
        }
    }
    let start_pseudo = map_pseudo_count(config.alpha);
    for (trans, start) in transitions.iter().zip(starts) {
        for l in 0..k {
            for s in 0..k {
                let charge = map_pseudo_count(config.gamma[[l, s]]);
                if charge > 0.0 && trans[[l, s]] > 0.0 {
                    obj += charge * trans[[l, s]].ln();
                }
            }
        }
        if start_pseudo > 0.0 {
            for &p in start {
                if p > 0.0 {
                    obj += start_pseudo * p.ln();
                }
            }
        }
    }
    obj
}
