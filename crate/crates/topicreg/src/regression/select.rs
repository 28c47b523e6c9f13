//! Step-up predictor selection on the Akaike information criterion.

use ndarray::{Array2, Axis};

use super::{fit_glm, GlmFamily, GlmModel};
use crate::corpus::ResponseVector;
use crate::error::{Error, Result};

/// `AIC = 2p - 2 logL`, with `p` counting every free coefficient.
pub fn aic(model: &GlmModel) -> f64 {
    2.0 * model.num_parameters() as f64 - 2.0 * model.log_likelihood
}

/// Outcome of step-up selection: the final model, the candidate column
/// indices chosen (in selection order), and the AIC after each accepted
/// step, starting with the intercept-only model. The trace is strictly
/// decreasing by construction.
#[derive(Debug, Clone)]
pub struct StepUpResult {
    pub model: GlmModel,
    pub selected: Vec<usize>,
    pub aic_trace: Vec<f64>,
}

/// Greedy forward selection: starting from the intercept-only model, add
/// the candidate column that lowers AIC the most (ties break to the
/// smallest index) and stop when no addition lowers it.
pub fn step_up_select(
    candidates: &Array2<f64>,
    y: &ResponseVector,
    family: &GlmFamily,
) -> Result<StepUpResult> {
    let (n, c) = candidates.dim();
    if n == 0 || y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} candidate rows for {} responses",
            y.len()
        )));
    }
    for a in 0..c {
        for b in a + 1..c {
            if candidates.column(a) == candidates.column(b) {
                return Err(Error::InvalidInput(format!(
                    "candidate columns {a} and {b} are identical"
                )));
            }
        }
    }

    let mut selected: Vec<usize> = Vec::new();
    let mut model = fit_glm(&Array2::zeros((n, 0)), y, family)?;
    let mut trace = vec![model.aic];
    loop {
        let mut best: Option<(f64, usize, GlmModel)> = None;
        for cand in 0..c {
            if selected.contains(&cand) {
                continue;
            }
            let mut cols = selected.clone();
            cols.push(cand);
            let design = candidates.select(Axis(1), &cols);
            let fitted = fit_glm(&design, y, family)?;
            if best.as_ref().is_none_or(|(a, _, _)| fitted.aic < *a) {
                best = Some((fitted.aic, cand, fitted));
            }
        }
        match best {
            Some((candidate_aic, cand, fitted)) if candidate_aic < *trace.last().unwrap() => {
                selected.push(cand);
                trace.push(candidate_aic);
                model = fitted;
            }
            _ => break,
        }
    }
    Ok(StepUpResult { model, selected, aic_trace: trace })
}
