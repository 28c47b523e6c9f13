//! GLM estimation by iteratively reweighted least squares (binomial), a
//! damped Newton method (multinomial), or a direct weighted solve
//! (gaussian). All solves carry a small ridge term; separable classification
//! problems are refit with a stronger ridge and flagged.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;

use super::{logistic, softmax_with_baseline, GlmFamily, GlmModel};
use crate::corpus::ResponseVector;
use crate::error::{Error, Result};

const SEPARATION_ETA: f64 = 30.0;
const MIN_WEIGHT: f64 = 1e-10;
const MIN_VARIANCE: f64 = 1e-12;
const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct GlmOptions {
    /// Ridge added to the normal equations; keeps collinear designs solvable
    /// and deterministic.
    pub ridge: f64,
    /// Ridge used on the refit after separation is detected.
    pub separation_ridge: f64,
    pub max_iterations: usize,
    pub tol: f64,
}

impl Default for GlmOptions {
    fn default() -> Self {
        Self {
            ridge: 1e-8,
            separation_ridge: 1e-4,
            max_iterations: 100,
            tol: 1e-10,
        }
    }
}

/// Fits a GLM of `y` on `x` (observations in rows, predictors in columns;
/// the intercept is added internally). Deterministic given its inputs.
pub fn fit_glm(x: &Array2<f64>, y: &ResponseVector, family: &GlmFamily) -> Result<GlmModel> {
    fit_glm_with_options(x, y, family, &GlmOptions::default())
}

pub fn fit_glm_with_options(
    x: &Array2<f64>,
    y: &ResponseVector,
    family: &GlmFamily,
    options: &GlmOptions,
) -> Result<GlmModel> {
    let n = x.nrows();
    if n == 0 || y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} rows of predictors for {} responses",
            n,
            y.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value in design matrix".into()));
    }
    let design = augmented(x);
    match family {
        GlmFamily::Gaussian => {
            let y = gaussian_response(y)?;
            fit_gaussian(&design, &y, family, options)
        }
        GlmFamily::Binomial => {
            let y = binomial_response(y)?;
            fit_binomial(&design, &y, family, options)
        }
        GlmFamily::Multinomial { levels } => {
            let codes = multinomial_response(y, *levels)?;
            fit_multinomial(&design, &codes, *levels, family, options)
        }
    }
}

fn augmented(x: &Array2<f64>) -> DMatrix<f64> {
    let (n, p) = x.dim();
    DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x[[i, j - 1]] })
}

fn gaussian_response(y: &ResponseVector) -> Result<Vec<f64>> {
    match y {
        ResponseVector::Numeric { values } => Ok(values.clone()),
        ResponseVector::Binary { values } => {
            Ok(values.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
        }
        ResponseVector::Categorical { .. } => Err(Error::FamilyMismatch(
            "categorical response with gaussian family".into(),
        )),
    }
}

fn binomial_response(y: &ResponseVector) -> Result<Vec<f64>> {
    match y {
        ResponseVector::Binary { values } => {
            Ok(values.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
        }
        ResponseVector::Numeric { values } if values.iter().all(|&v| v == 0.0 || v == 1.0) => {
            Ok(values.clone())
        }
        _ => Err(Error::FamilyMismatch(
            "binomial family requires a 0/1 response".into(),
        )),
    }
}

fn multinomial_response(y: &ResponseVector, levels: usize) -> Result<Vec<usize>> {
    match y {
        ResponseVector::Categorical { levels: names, codes } => {
            if names.len() != levels {
                return Err(Error::FamilyMismatch(format!(
                    "response has {} levels, family expects {levels}",
                    names.len()
                )));
            }
            Ok(codes.clone())
        }
        ResponseVector::Binary { values } if levels == 2 => {
            Ok(values.iter().map(|&b| usize::from(b)).collect())
        }
        _ => Err(Error::FamilyMismatch(
            "multinomial family requires a categorical response".into(),
        )),
    }
}

/// Ridge-stabilized solve of `a x = b` for symmetric positive definite `a`.
fn solve_spd(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    let solution = match a.clone().cholesky() {
        Some(chol) => chol.solve(&b),
        None => a.lu().solve(&b).ok_or(Error::SingularDesign)?,
    };
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularDesign);
    }
    Ok(solution)
}

fn coefficients_matrix(rows: usize, cols: usize, flat: &[f64]) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |(r, c)| flat[r * cols + c])
}

fn fit_gaussian(
    design: &DMatrix<f64>,
    y: &[f64],
    family: &GlmFamily,
    options: &GlmOptions,
) -> Result<GlmModel> {
    let n = design.nrows();
    let q = design.ncols();
    let yv = DVector::from_column_slice(y);
    let mut xtx = design.transpose() * design;
    for j in 0..q {
        xtx[(j, j)] += options.ridge;
    }
    let beta = solve_spd(xtx, design.transpose() * &yv)?;
    let residuals = &yv - design * &beta;
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    // Profile log-likelihood at the MLE variance, floored so perfect fits
    // keep the AIC finite.
    let sigma2 = (rss / n as f64).max(MIN_VARIANCE);
    let log_likelihood =
        -0.5 * n as f64 * ((2.0 * std::f64::consts::PI * sigma2).ln() + rss / (n as f64 * sigma2));
    let coefficients = coefficients_matrix(1, q, beta.as_slice());
    Ok(finish(family.clone(), coefficients, log_likelihood, false))
}

fn fit_binomial(
    design: &DMatrix<f64>,
    y: &[f64],
    family: &GlmFamily,
    options: &GlmOptions,
) -> Result<GlmModel> {
    let (beta, separated) = binomial_irls(design, y, options.ridge, options)?;
    let (beta, separation) = if separated {
        let (beta, _) = binomial_irls(design, y, options.separation_ridge, options)?;
        (beta, true)
    } else {
        (beta, false)
    };
    let eta = design * &beta;
    let log_likelihood: f64 = eta
        .iter()
        .zip(y)
        .map(|(&e, &yi)| {
            let p = logistic(e).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            yi * p.ln() + (1.0 - yi) * (1.0 - p).ln()
        })
        .sum();
    let coefficients = coefficients_matrix(1, design.ncols(), beta.as_slice());
    Ok(finish(family.clone(), coefficients, log_likelihood, separation))
}

fn binomial_irls(
    design: &DMatrix<f64>,
    y: &[f64],
    ridge: f64,
    options: &GlmOptions,
) -> Result<(DVector<f64>, bool)> {
    let n = design.nrows();
    let q = design.ncols();
    let mut beta = DVector::zeros(q);
    let mut converged = false;
    for _ in 0..options.max_iterations {
        let eta = design * &beta;
        let mut xtwx = DMatrix::zeros(q, q);
        let mut xtwz = DVector::zeros(q);
        for i in 0..n {
            let mu = logistic(eta[i]);
            let w = (mu * (1.0 - mu)).max(MIN_WEIGHT);
            let z = eta[i] + (y[i] - mu) / w;
            for a in 0..q {
                let xa = design[(i, a)];
                xtwz[a] += w * xa * z;
                for b in a..q {
                    xtwx[(a, b)] += w * xa * design[(i, b)];
                }
            }
        }
        for a in 0..q {
            for b in 0..a {
                xtwx[(a, b)] = xtwx[(b, a)];
            }
            xtwx[(a, a)] += ridge;
        }
        let next = solve_spd(xtwx, xtwz)?;
        let delta = (&next - &beta).amax();
        beta = next;
        if delta < options.tol {
            converged = true;
            break;
        }
    }
    let eta = design * &beta;
    let separated = !converged || eta.iter().any(|e| e.abs() > SEPARATION_ETA);
    Ok((beta, separated))
}

fn fit_multinomial(
    design: &DMatrix<f64>,
    codes: &[usize],
    levels: usize,
    family: &GlmFamily,
    options: &GlmOptions,
) -> Result<GlmModel> {
    if levels < 2 {
        return Err(Error::InvalidConfig("multinomial family needs >= 2 levels".into()));
    }
    if let Some(&bad) = codes.iter().find(|&&c| c >= levels) {
        return Err(Error::InvalidInput(format!(
            "response code {bad} out of range for {levels} levels"
        )));
    }
    let (beta, separated) = multinomial_newton(design, codes, levels, options.ridge, options)?;
    let (beta, separation) = if separated {
        let (beta, _) =
            multinomial_newton(design, codes, levels, options.separation_ridge, options)?;
        (beta, true)
    } else {
        (beta, false)
    };
    let q = design.ncols();
    let log_likelihood = multinomial_loglik(design, codes, levels, &beta);
    let coefficients = coefficients_matrix(levels - 1, q, beta.as_slice());
    Ok(finish(family.clone(), coefficients, log_likelihood, separation))
}

fn multinomial_etas(design: &DMatrix<f64>, beta: &DVector<f64>, i: usize, levels: usize) -> Vec<f64> {
    let q = design.ncols();
    (0..levels - 1)
        .map(|a| (0..q).map(|j| design[(i, j)] * beta[a * q + j]).sum())
        .collect()
}

fn multinomial_loglik(
    design: &DMatrix<f64>,
    codes: &[usize],
    levels: usize,
    beta: &DVector<f64>,
) -> f64 {
    let n = design.nrows();
    let mut ll = 0.0;
    for i in 0..n {
        let probs = softmax_with_baseline(&multinomial_etas(design, beta, i, levels));
        ll += probs[codes[i]].max(PROB_CLAMP).ln();
    }
    ll
}

fn multinomial_newton(
    design: &DMatrix<f64>,
    codes: &[usize],
    levels: usize,
    ridge: f64,
    options: &GlmOptions,
) -> Result<(DVector<f64>, bool)> {
    let n = design.nrows();
    let q = design.ncols();
    let dim = (levels - 1) * q;
    let mut beta = DVector::zeros(dim);
    let penalized = |b: &DVector<f64>| {
        multinomial_loglik(design, codes, levels, b) - 0.5 * ridge * b.norm_squared()
    };
    let mut objective = penalized(&beta);
    let mut converged = false;
    for _ in 0..options.max_iterations {
        let mut grad = DVector::zeros(dim);
        let mut hess = DMatrix::zeros(dim, dim);
        for i in 0..n {
            let probs = softmax_with_baseline(&multinomial_etas(design, &beta, i, levels));
            for a in 0..levels - 1 {
                let indicator = if codes[i] == a + 1 { 1.0 } else { 0.0 };
                let ra = indicator - probs[a + 1];
                for j in 0..q {
                    grad[a * q + j] += design[(i, j)] * ra;
                }
                for b in 0..levels - 1 {
                    let w = probs[a + 1] * (if a == b { 1.0 } else { 0.0 } - probs[b + 1]);
                    for j in 0..q {
                        for l in 0..q {
                            hess[(a * q + j, b * q + l)] += design[(i, j)] * design[(i, l)] * w;
                        }
                    }
                }
            }
        }
        for d in 0..dim {
            grad[d] -= ridge * beta[d];
            hess[(d, d)] += ridge;
        }
        let step = solve_spd(hess, grad)?;
        if step.amax() < options.tol {
            converged = true;
            break;
        }
        // Damped step: halve until the penalized objective does not drop.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let candidate = &beta + scale * &step;
            let value = penalized(&candidate);
            if value >= objective - 1e-12 {
                beta = candidate;
                objective = value;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            converged = true;
            break;
        }
    }
    let separated = !converged
        || (0..n).any(|i| {
            multinomial_etas(design, &beta, i, levels)
                .iter()
                .any(|e| e.abs() > SEPARATION_ETA)
        });
    Ok((beta, separated))
}

fn finish(
    family: GlmFamily,
    coefficients: Array2<f64>,
    log_likelihood: f64,
    separation: bool,
) -> GlmModel {
    let p = coefficients.len();
    GlmModel {
        family,
        coefficients,
        log_likelihood,
        aic: 2.0 * p as f64 - 2.0 * log_likelihood,
        separation,
    }
}
