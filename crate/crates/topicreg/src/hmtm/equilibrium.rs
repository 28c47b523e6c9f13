//! Stationary distribution of a document's transition matrix: the theta
//! solving `theta Theta = theta`, `theta e = 1`, used as the document's
//! topic proportions.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::topics::TopicProportions;

const RESIDUAL_TOL: f64 = 1e-10;
const NULLITY_TOL: f64 = 1e-10;
const POWER_ITERATION_CUTOFF: usize = 100;

/// Solves the stationarity equations by least squares on
/// `[Theta^T - I; 1^T] theta = [0; 1]`, with a power-iteration fallback for
/// large k. Errors with "non-unique equilibrium" when `Theta^T - I` has
/// nullity above one (a reducible chain); callers wanting the paper's
/// row-averaging escape hatch opt in via [`row_average_proportions`].
pub fn equilibrium_distribution(transitions: &Array2<f64>) -> Result<TopicProportions> {
    let k = validate_row_stochastic(transitions)?;
    if k == 1 {
        return TopicProportions::new(vec![1.0]);
    }
    let mut theta = if k <= POWER_ITERATION_CUTOFF {
        direct_solve(transitions, k)?
    } else {
        power_iterate(transitions, k)
    };

    // Clip least-squares noise and renormalize.
    for x in &mut theta {
        if *x < 0.0 {
            if *x < -1e-9 {
                return Err(Error::NonUniqueEquilibrium);
            }
            *x = 0.0;
        }
    }
    let total: f64 = theta.iter().sum();
    for x in &mut theta {
        *x /= total;
    }

    let residual = stationarity_residual(&theta, transitions);
    if residual >= RESIDUAL_TOL {
        return Err(Error::InvalidInput(format!(
            "equilibrium solve left residual {residual:.3e}"
        )));
    }
    TopicProportions::new(theta)
}

/// Mean of the transition-matrix rows: the explicit fallback for reducible
/// chains where the stationary distribution is not unique.
pub fn row_average_proportions(transitions: &Array2<f64>) -> Result<TopicProportions> {
    let k = validate_row_stochastic(transitions)?;
    let mut avg = vec![0.0; k];
    for row in transitions.rows() {
        for (a, &x) in avg.iter_mut().zip(row.iter()) {
            *a += x / k as f64;
        }
    }
    TopicProportions::new(avg)
}

fn validate_row_stochastic(transitions: &Array2<f64>) -> Result<usize> {
    let (r, c) = transitions.dim();
    if r != c || r == 0 {
        return Err(Error::DimensionMismatch(format!(
            "transition matrix is {r} x {c}, expected square"
        )));
    }
    for (l, row) in transitions.rows().into_iter().enumerate() {
        let row: Vec<f64> = row.to_vec();
        if !crate::math::is_simplex(&row, 1e-8) {
            return Err(Error::InvalidInput(format!(
                "transition row {l} is not a distribution"
            )));
        }
    }
    Ok(r)
}

fn direct_solve(transitions: &Array2<f64>, k: usize) -> Result<Vec<f64>> {
    // M = Theta^T - I. Uniqueness of the stationary distribution is
    // equivalent to nullity(M) == 1, checked through the singular values.
    let mut m = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = transitions[[j, i]] - if i == j { 1.0 } else { 0.0 };
        }
    }
    let svd = m.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = NULLITY_TOL * sigma_max.max(1.0);
    let nullity = svd.singular_values.iter().filter(|&&s| s <= cutoff).count();
    if nullity != 1 {
        return Err(Error::NonUniqueEquilibrium);
    }

    let mut a = DMatrix::<f64>::zeros(k + 1, k);
    a.view_mut((0, 0), (k, k)).copy_from(&m);
    for j in 0..k {
        a[(k, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k + 1);
    b[k] = 1.0;
    let solution = a
        .svd(true, true)
        .solve(&b, f64::EPSILON)
        .map_err(|e| Error::InvalidInput(format!("least-squares solve failed: {e}")))?;
    Ok(solution.iter().copied().collect())
}

/// Power iteration on the lazy chain `(I + Theta) / 2`, which shares the
/// stationary distribution but is aperiodic.
fn power_iterate(transitions: &Array2<f64>, k: usize) -> Vec<f64> {
    let mut theta = vec![1.0 / k as f64; k];
    let mut next = vec![0.0; k];
    for _ in 0..200_000 {
        for x in &mut next {
            *x = 0.0;
        }
        for i in 0..k {
            let half = 0.5 * theta[i];
            next[i] += half;
            for j in 0..k {
                next[j] += half * transitions[[i, j]];
            }
        }
        let total: f64 = next.iter().sum();
        for x in &mut next {
            *x /= total;
        }
        let delta = crate::math::l_inf_diff(&theta, &next);
        theta.copy_from_slice(&next);
        if delta < 1e-15 {
            break;
        }
    }
    theta
}

fn stationarity_residual(theta: &[f64], transitions: &Array2<f64>) -> f64 {
    let k = theta.len();
    let mut max = 0.0f64;
    for j in 0..k {
        let mut acc = 0.0;
        for i in 0..k {
            acc += theta[i] * transitions[[i, j]];
        }
        max = max.max((acc - theta[j]).abs());
    }
    max
}
