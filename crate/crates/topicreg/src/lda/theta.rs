//! Topic proportions for documents outside the training corpus.
//!
//! The document log-likelihood under fixed topics is `N . log(theta phi)`,
//! concave in theta, so the maximizer can be found without retraining the
//! topic model. Words with zero probability under every topic behave like
//! out-of-vocabulary words and are removed before estimation.

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::math::l_inf_diff;
use crate::topics::{TopicMatrix, TopicProportions};

pub const DEFAULT_MLE_TOL: f64 = 1e-8;
const MAX_MLE_ITERATIONS: usize = 10_000;

/// Log-likelihood `N . log(theta phi)` of a document's counts under fixed
/// topics and proportions. Terms with zero count contribute nothing even
/// when their mixture probability is zero; a positive count on a
/// zero-probability word yields negative infinity (the document is
/// impossible under this theta).
pub fn log_likelihood_theta(doc: &Document, theta: &[f64], phi: &TopicMatrix) -> Result<f64> {
    validate_dims(doc, theta, phi)?;
    let mut total = 0.0;
    for (w, c) in doc.nonzero_counts() {
        let mix: f64 = theta
            .iter()
            .enumerate()
            .map(|(l, &t)| t * phi.prob(l, w))
            .sum();
        if mix <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += c as f64 * mix.ln();
    }
    Ok(total)
}

/// Maximum-likelihood topic proportions for a document under fixed topics.
///
/// Uses the fixed-point EM update
/// `theta_l <- (1/n) sum_w N_w * theta_l phi_{l,w} / (theta phi)_w`,
/// which stays on the simplex and monotonically increases the concave
/// objective; iteration stops when the L-infinity change drops below `tol`
/// (or after 10,000 rounds). Estimates may land on the simplex boundary and
/// are reported as-is.
pub fn estimate_theta_mle(
    doc: &Document,
    phi: &TopicMatrix,
    tol: f64,
) -> Result<TopicProportions> {
    if doc.counts().len() != phi.vocab_size() {
        return Err(Error::DimensionMismatch(format!(
            "document over vocabulary of {}, phi has {}",
            doc.counts().len(),
            phi.vocab_size()
        )));
    }
    // Drop words impossible under every topic; they carry no information
    // about theta (the model assigns them probability zero regardless).
    let counts: Vec<(usize, f64)> = doc
        .nonzero_counts()
        .filter(|&(w, _)| phi.word_support(w) > 0.0)
        .map(|(w, c)| (w, c as f64))
        .collect();
    if counts.is_empty() {
        return Err(Error::NoInVocabularyTokens);
    }
    let k = phi.num_topics();
    if k == 1 {
        return TopicProportions::new(vec![1.0]);
    }
    let mut theta = vec![1.0 / k as f64; k];
    let mut next = vec![0.0; k];
    for _ in 0..MAX_MLE_ITERATIONS {
        next.fill(0.0);
        for &(w, c) in &counts {
            let mix: f64 = (0..k).map(|l| theta[l] * phi.prob(l, w)).sum();
            if mix <= 0.0 {
                // Only reachable through floating-point underflow; the
                // objective cannot improve past this point.
                break;
            }
            let scale = c / mix;
            for l in 0..k {
                next[l] += theta[l] * phi.prob(l, w) * scale;
            }
        }
        // The new iterate sums to n by construction; normalize explicitly to
        // absorb rounding drift.
        let total: f64 = next.iter().sum();
        if !(total > 0.0) {
            break;
        }
        for x in &mut next {
            *x /= total;
        }
        let delta = l_inf_diff(&theta, &next);
        theta.copy_from_slice(&next);
        if delta < tol {
            break;
        }
    }
    TopicProportions::new(theta)
}

fn validate_dims(doc: &Document, theta: &[f64], phi: &TopicMatrix) -> Result<()> {
    if theta.len() != phi.num_topics() {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} entries, phi has {} topics",
            theta.len(),
            phi.num_topics()
        )));
    }
    if doc.counts().len() != phi.vocab_size() {
        return Err(Error::DimensionMismatch(format!(
            "document over vocabulary of {}, phi has {}",
            doc.counts().len(),
            phi.vocab_size()
        )));
    }
    if !crate::math::is_simplex(theta, 1e-8) {
        return Err(Error::InvalidInput("theta must lie on the simplex".into()));
    }
    Ok(())
}
