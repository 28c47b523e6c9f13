//! Topic-model regression: fit LDA, sLDA or hidden Markov topic models to a
//! labelled corpus, use per-document topic proportions as regression
//! predictors, infer proportions for unseen documents without retraining,
//! and evaluate predictive performance with cross-validated ROC/AUC and
//! Brier scores.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`corpus`]: text cleaning, vocabulary construction, document encoding
//!   and corpus file formats;
//! - [`lda`]: generative simulation, collapsed-Gibbs fitting and
//!   likelihood-based topic-proportion estimation for held-out documents;
//! - [`slda`]: supervised LDA via variational EM with a GLM response;
//! - [`hmtm`]: hidden Markov topic models with shared emissions, scaled
//!   forward-backward inference and equilibrium-distribution predictors;
//! - [`regression`]: GLMs on topic proportions or word counts, step-up AIC
//!   predictor selection and CVPE-based selection of the number of topics;
//! - [`evaluation`]: ROC curves, threshold averaging, AUC, Brier scores and
//!   the repeated-holdout / leave-one-out cross-validation harnesses;
//! - [`pipeline`]: glue combining a topic model with a downstream GLM;
//! - [`cli`]: the `topicreg` command-line interface.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod hmtm;
pub mod lda;
pub mod pipeline;
pub mod regression;
pub mod slda;
pub mod topics;

pub(crate) mod math;

pub use error::{Error, Result};
pub use topics::{TopicMatrix, TopicProportions};
