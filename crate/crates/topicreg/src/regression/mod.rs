//! GLM regression on topic proportions or word counts, step-up AIC
//! predictor selection, and CVPE-based selection of the number of topics.

mod cvpe;
mod glm;
mod select;
#[cfg(test)]
mod tests;

pub use cvpe::{
    cvpe, select_num_topics, CvpeKResult, CvpeReport, FittedTopicModel, InferredTheta,
    TopicRegressor,
};
pub use glm::{fit_glm, fit_glm_with_options, GlmOptions};
pub use select::{aic, step_up_select, StepUpResult};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::corpus::ResponseVector;
use crate::error::{Error, Result};
use crate::topics::serde_matrix;

/// Response family: the mean function is the identity, the logistic
/// function, or the softmax over `levels` categories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GlmFamily {
    Gaussian,
    Binomial,
    Multinomial { levels: usize },
}

impl GlmFamily {
    /// The natural family for a tagged response column.
    pub fn for_response(responses: &ResponseVector) -> GlmFamily {
        match responses {
            ResponseVector::Numeric { .. } => GlmFamily::Gaussian,
            ResponseVector::Binary { .. } => GlmFamily::Binomial,
            ResponseVector::Categorical { levels, .. } => {
                GlmFamily::Multinomial { levels: levels.len() }
            }
        }
    }

    /// Rows of the coefficient matrix: `levels - 1` for the multinomial
    /// family (the first level is the baseline), one otherwise.
    pub fn coefficient_rows(&self) -> usize {
        match self {
            GlmFamily::Multinomial { levels } => levels - 1,
            _ => 1,
        }
    }
}

/// A fitted GLM. `coefficients` has one row per linear predictor (the
/// intercept in column 0) and `aic = 2p - 2 logL` with `p` counting every
/// free coefficient.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlmModel {
    pub family: GlmFamily,
    #[serde(with = "serde_matrix")]
    pub coefficients: Array2<f64>,
    pub log_likelihood: f64,
    pub aic: f64,
    /// Set when the fit needed the stronger ridge because the classes are
    /// (quasi-)separable.
    pub separation: bool,
}

impl GlmModel {
    pub fn num_parameters(&self) -> usize {
        self.coefficients.len()
    }

    /// Linear predictors for one observation (without the baseline row).
    pub fn linear_predictors(&self, x: &[f64]) -> Result<Vec<f64>> {
        let q = self.coefficients.ncols();
        if x.len() + 1 != q {
            return Err(Error::DimensionMismatch(format!(
                "observation has {} predictors, model expects {}",
                x.len(),
                q - 1
            )));
        }
        Ok(self
            .coefficients
            .rows()
            .into_iter()
            .map(|row| row[0] + row.iter().skip(1).zip(x).map(|(b, v)| b * v).sum::<f64>())
            .collect())
    }

    /// Predicted mean for one observation: `[mu]` for gaussian, `[p]` for
    /// binomial, and the full probability vector (baseline level first) for
    /// multinomial. Probabilities lie in [0, 1] and sum to one.
    pub fn predict_mean(&self, x: &[f64]) -> Result<Vec<f64>> {
        let eta = self.linear_predictors(x)?;
        Ok(match self.family {
            GlmFamily::Gaussian => vec![eta[0]],
            GlmFamily::Binomial => vec![logistic(eta[0])],
            GlmFamily::Multinomial { .. } => softmax_with_baseline(&eta),
        })
    }
}

pub(crate) fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Softmax over `[0, eta_1, ..., eta_{s-1}]`, stabilized by the max trick.
pub(crate) fn softmax_with_baseline(eta: &[f64]) -> Vec<f64> {
    let max = eta.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut probs = Vec::with_capacity(eta.len() + 1);
    probs.push((-max).exp());
    probs.extend(eta.iter().map(|&e| (e - max).exp()));
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    probs
}
