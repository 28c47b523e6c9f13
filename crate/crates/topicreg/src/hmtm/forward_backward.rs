//! Scaled forward-backward recursion. Raw forward probabilities underflow
//! on documents of thousands of tokens over vocabularies with tens of
//! thousands of columns, so each position is normalized by the incremental
//! likelihood `s_t = P(w_t | w_1..t-1)` and the log-likelihood is recovered
//! from the scaling factors.

use ndarray::{Array1, Array2};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::topics::TopicMatrix;

/// Scaled forward/backward tables for one document.
///
/// `forward` rows are the filtered state posteriors `P(z_t | w_1..t)` and
/// each sums to 1; `scales` stores `c_t = 1 / s_t`, so the log-likelihood
/// equals `-sum(ln c_t)`.
#[derive(Debug, Clone)]
pub struct ScaledFB {
    pub forward: Array2<f64>,
    pub backward: Array2<f64>,
    pub scales: Vec<f64>,
    pub log_likelihood: f64,
}

pub fn scaled_forward_backward(
    doc: &Document,
    phi: &TopicMatrix,
    transitions: &Array2<f64>,
    start: &[f64],
) -> Result<ScaledFB> {
    if doc.counts().len() != phi.vocab_size() {
        return Err(Error::DimensionMismatch(format!(
            "document over vocabulary of {}, phi has {}",
            doc.counts().len(),
            phi.vocab_size()
        )));
    }
    forward_backward_tokens(doc.tokens(), phi, transitions, start)
}

pub(crate) fn forward_backward_tokens(
    tokens: &[usize],
    phi: &TopicMatrix,
    transitions: &Array2<f64>,
    start: &[f64],
) -> Result<ScaledFB> {
    let k = phi.num_topics();
    if tokens.is_empty() {
        return Err(Error::InvalidInput("empty document".into()));
    }
    if transitions.dim() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "transition matrix is {:?}, expected ({k}, {k})",
            transitions.dim()
        )));
    }
    if start.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "start vector has {} entries, expected {k}",
            start.len()
        )));
    }
    let n = tokens.len();
    let mut forward = Array2::zeros((n, k));
    let mut scales = Vec::with_capacity(n);

    // Forward pass over filtered posteriors.
    let mut s_total = 0.0;
    for l in 0..k {
        let f = start[l] * phi.prob(l, tokens[0]);
        forward[[0, l]] = f;
        s_total += f;
    }
    check_position(0, s_total)?;
    for l in 0..k {
        forward[[0, l]] /= s_total;
    }
    scales.push(1.0 / s_total);
    let mut log_likelihood = s_total.ln();

    let mut prev = Array1::zeros(k);
    for t in 1..n {
        for l in 0..k {
            prev[l] = forward[[t - 1, l]];
        }
        let mut s_total = 0.0;
        for l in 0..k {
            let mut pred = 0.0;
            for i in 0..k {
                pred += prev[i] * transitions[[i, l]];
            }
            let f = pred * phi.prob(l, tokens[t]);
            forward[[t, l]] = f;
            s_total += f;
        }
        check_position(t, s_total)?;
        for l in 0..k {
            forward[[t, l]] /= s_total;
        }
        scales.push(1.0 / s_total);
        log_likelihood += s_total.ln();
    }

    // Backward pass, scaled by the same factors so that
    // forward[t] * backward[t] is the smoothed posterior.
    let mut backward = Array2::zeros((n, k));
    for l in 0..k {
        backward[[n - 1, l]] = 1.0;
    }
    for t in (0..n - 1).rev() {
        let s_next = 1.0 / scales[t + 1];
        for l in 0..k {
            let mut acc = 0.0;
            for j in 0..k {
                acc += transitions[[l, j]] * phi.prob(j, tokens[t + 1]) * backward[[t + 1, j]];
            }
            backward[[t, l]] = acc / s_next;
        }
    }

    Ok(ScaledFB { forward, backward, scales, log_likelihood })
}

// An exactly-zero position mass is structural (zero emission, start or
// transition probability), not underflow: the recursion normalizes before
// anything can underflow.
fn check_position(position: usize, s_total: f64) -> Result<()> {
    if s_total > 0.0 {
        return Ok(());
    }
    Err(Error::ImpossibleObservation { position })
}

impl ScaledFB {
    /// Smoothed state posteriors `P(z_t | w_1..n)`, one row per position.
    pub fn state_posteriors(&self) -> Array2<f64> {
        let (n, k) = self.forward.dim();
        let mut post = Array2::zeros((n, k));
        for t in 0..n {
            let mut total = 0.0;
            for l in 0..k {
                let p = self.forward[[t, l]] * self.backward[[t, l]];
                post[[t, l]] = p;
                total += p;
            }
            for l in 0..k {
                post[[t, l]] /= total;
            }
        }
        post
    }

    /// Expected transition counts `sum_t P(z_t = i, z_{t+1} = j | w)`.
    pub fn expected_transitions(
        &self,
        tokens: &[usize],
        phi: &TopicMatrix,
        transitions: &Array2<f64>,
    ) -> Array2<f64> {
        let (n, k) = self.forward.dim();
        let mut xi = Array2::zeros((k, k));
        for t in 0..n - 1 {
            let s_next = 1.0 / self.scales[t + 1];
            for i in 0..k {
                let a = self.forward[[t, i]];
                if a == 0.0 {
                    continue;
                }
                for j in 0..k {
                    xi[[i, j]] += a
                        * transitions[[i, j]]
                        * phi.prob(j, tokens[t + 1])
                        * self.backward[[t + 1, j]]
                        / s_next;
                }
            }
        }
        xi
    }

    /// Recomputes the log-likelihood through the backward tables instead of
    /// the forward scaling product. Both routes must agree; used as an
    /// internal consistency check.
    pub fn log_likelihood_via_backward(
        &self,
        tokens: &[usize],
        phi: &TopicMatrix,
        start: &[f64],
    ) -> f64 {
        let k = phi.num_topics();
        let mut first = 0.0;
        for l in 0..k {
            first += start[l] * phi.prob(l, tokens[0]) * self.backward[[0, l]];
        }
        let tail: f64 = self.scales[1..].iter().map(|&c| -c.ln()).sum();
        first.ln() + tail
    }
}
