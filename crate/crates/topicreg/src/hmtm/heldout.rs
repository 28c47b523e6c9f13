//! Transition estimation for documents outside the training corpus: the
//! shared topics from the fitted HMTM are taken as the truth and Baum-Welch
//! updates only the document's transition matrix and starting
//! probabilities.

use ndarray::{Array1, Array2};

use super::forward_backward::forward_backward_tokens;
use super::fit::transition_update;
use super::prior_mean_rows;
use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::topics::TopicMatrix;

/// Result of held-out Baum-Welch: the estimated transition matrix and start
/// vector, the per-iteration log-posterior trace, and whether the iteration
/// stabilized within its budget. A non-converged result still carries the
/// best (latest) iterate; callers decide whether to use or exclude it.
#[derive(Debug, Clone)]
pub struct HeldoutTransitions {
    pub transitions: Array2<f64>,
    pub start: Array1<f64>,
    pub log_posterior: Vec<f64>,
    pub converged: bool,
    pub dropped_tokens: usize,
}

pub fn estimate_transition_heldout(
    doc: &Document,
    phi: &TopicMatrix,
    gamma: &Array2<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<HeldoutTransitions> {
    let k = phi.num_topics();
    if gamma.dim() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "gamma is {:?}, expected ({k}, {k})",
            gamma.dim()
        )));
    }
    if doc.counts().len() != phi.vocab_size() {
        return Err(Error::DimensionMismatch(format!(
            "document over vocabulary of {}, phi has {}",
            doc.counts().len(),
            phi.vocab_size()
        )));
    }
    if tol <= 0.0 || max_iter == 0 {
        return Err(Error::InvalidConfig("tol and max_iter must be positive".into()));
    }
    // Words impossible under every topic behave like out-of-vocabulary
    // tokens and are removed before estimation.
    let tokens: Vec<usize> = doc
        .tokens()
        .iter()
        .copied()
        .filter(|&w| phi.word_support(w) > 0.0)
        .collect();
    let dropped = doc.len() - tokens.len();
    if tokens.len() < 2 {
        return Err(Error::InsufficientSequence { found: tokens.len() });
    }
    if k == 1 {
        let fb = forward_backward_tokens(&tokens, phi, &Array2::ones((1, 1)), &[1.0])?;
        return Ok(HeldoutTransitions {
            transitions: Array2::ones((1, 1)),
            start: Array1::ones(1),
            log_posterior: vec![fb.log_likelihood],
            converged: true,
            dropped_tokens: dropped,
        });
    }

    let mut transitions = prior_mean_rows(gamma);
    let mut start = vec![1.0 / k as f64; k];
    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let fb = forward_backward_tokens(&tokens, phi, &transitions, &start)?;
        let objective = fb.log_likelihood + prior_term(&transitions, gamma);
        trace.push(objective);
        if trace.len() >= 2 {
            let prev = trace[trace.len() - 2];
            if (objective - prev).abs() <= tol * (1.0 + objective.abs()) {
                converged = true;
                break;
            }
        }
        let xi = fb.expected_transitions(&tokens, phi, &transitions);
        transitions = transition_update(&xi, gamma);
        let posteriors = fb.state_posteriors();
        start = (0..k).map(|l| posteriors[[0, l]]).collect();
    }

    Ok(HeldoutTransitions {
        transitions,
        start: Array1::from_vec(start),
        log_posterior: trace,
        converged,
        dropped_tokens: dropped,
    })
}

fn prior_term(transitions: &Array2<f64>, gamma: &Array2<f64>) -> f64 {
    let k = transitions.nrows();
    let mut acc = 0.0;
    for l in 0..k {
        for s in 0..k {
            let charge = super::map_pseudo_count(gamma[[l, s]]);
            if charge > 0.0 && transitions[[l, s]] > 0.0 {
                acc += charge * transitions[[l, s]].ln();
            }
        }
    }
    acc
}
