//! Core topic types shared by the LDA, sLDA and HMTM models.
//!
//! A topic is a probability distribution over the vocabulary; `k` topics form
//! a k x v row-stochastic [`TopicMatrix`]. A document's [`TopicProportions`]
//! is a point on the k-simplex and serves as the predictor vector in the
//! downstream regression models.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{is_simplex, total_variation};

pub const SIMPLEX_TOL: f64 = 1e-8;

/// k x v matrix with one distribution over the vocabulary per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct TopicMatrix {
    rows: Array2<f64>,
}

impl TopicMatrix {
    /// Validates that every row is a probability vector (within [`SIMPLEX_TOL`]).
    pub fn new(rows: Array2<f64>) -> Result<Self> {
        if rows.nrows() == 0 || rows.ncols() == 0 {
            return Err(Error::InvalidInput("empty topic matrix".into()));
        }
        for (l, row) in rows.rows().into_iter().enumerate() {
            let r: Vec<f64> = row.to_vec();
            if !is_simplex(&r, SIMPLEX_TOL) {
                return Err(Error::InvalidInput(format!(
                    "topic {l} is not a distribution (sum = {})",
                    r.iter().sum::<f64>()
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("empty topic matrix".into()));
        }
        let v = rows[0].len();
        if rows.iter().any(|r| r.len() != v) {
            return Err(Error::DimensionMismatch("ragged topic rows".into()));
        }
        let k = rows.len();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let arr = Array2::from_shape_vec((k, v), flat)
            .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
        Self::new(arr)
    }

    /// Number of topics k.
    pub fn num_topics(&self) -> usize {
        self.rows.nrows()
    }

    /// Vocabulary size v.
    pub fn vocab_size(&self) -> usize {
        self.rows.ncols()
    }

    pub fn row(&self, topic: usize) -> ArrayView1<'_, f64> {
        self.rows.row(topic)
    }

    /// P(word | topic).
    #[inline]
    pub fn prob(&self, topic: usize, word: usize) -> f64 {
        self.rows[[topic, word]]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.rows
    }

    /// Total probability of `word` summed over topics; zero means the word is
    /// impossible under the model and is treated like an out-of-vocabulary
    /// token by the inference routines.
    pub fn word_support(&self, word: usize) -> f64 {
        (0..self.num_topics()).map(|l| self.prob(l, word)).sum()
    }
}

impl TryFrom<Vec<Vec<f64>>> for TopicMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<TopicMatrix> for Vec<Vec<f64>> {
    fn from(m: TopicMatrix) -> Self {
        m.rows.rows().into_iter().map(|r| r.to_vec()).collect()
    }
}

/// A point on the k-simplex: the mixture of topics in one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TopicProportions(Vec<f64>);

impl TopicProportions {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if !is_simplex(&values, SIMPLEX_TOL) {
            return Err(Error::InvalidInput(format!(
                "topic proportions are not on the simplex (sum = {})",
                values.iter().sum::<f64>()
            )));
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for TopicProportions {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for TopicProportions {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TopicProportions> for Vec<f64> {
    fn from(p: TopicProportions) -> Self {
        p.0
    }
}

/// Greedy maximum-overlap matching of estimated topics onto reference topics.
///
/// Returns `assignment` with `assignment[est] = reference`: pairs are picked
/// in order of smallest total-variation distance until all topics are
/// matched. Used by recovery tests, where topic labels are arbitrary.
pub fn align_topics(estimated: &TopicMatrix, reference: &TopicMatrix) -> Result<Vec<usize>> {
    let k = estimated.num_topics();
    if k != reference.num_topics() || estimated.vocab_size() != reference.vocab_size() {
        return Err(Error::DimensionMismatch(
            "topic matrices must have identical shapes".into(),
        ));
    }
    let mut dist = vec![vec![0.0; k]; k];
    for e in 0..k {
        for r in 0..k {
            dist[e][r] = total_variation(
                estimated.row(e).as_slice().unwrap(),
                reference.row(r).as_slice().unwrap(),
            );
        }
    }
    let mut assignment = vec![usize::MAX; k];
    let mut est_used = vec![false; k];
    let mut ref_used = vec![false; k];
    for _ in 0..k {
        let mut best = (f64::INFINITY, 0, 0);
        for e in 0..k {
            if est_used[e] {
                continue;
            }
            for r in 0..k {
                if ref_used[r] {
                    continue;
                }
                if dist[e][r] < best.0 {
                    best = (dist[e][r], e, r);
                }
            }
        }
        assignment[best.1] = best.2;
        est_used[best.1] = true;
        ref_used[best.2] = true;
    }
    Ok(assignment)
}

/// Per-topic total-variation distances after aligning `estimated` onto
/// `reference`.
pub fn aligned_tv_distances(estimated: &TopicMatrix, reference: &TopicMatrix) -> Result<Vec<f64>> {
    let assignment = align_topics(estimated, reference)?;
    Ok(assignment
        .iter()
        .enumerate()
        .map(|(e, &r)| {
            total_variation(
                estimated.row(e).as_slice().unwrap(),
                reference.row(r).as_slice().unwrap(),
            )
        })
        .collect())
}

/// Serde adapters for matrices stored as plain nested JSON arrays (row-major).
pub(crate) mod serde_matrix {
    use ndarray::Array2;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Array2<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.rows().into_iter().map(|r| r.to_vec()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Array2<f64>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Array2::from_shape_vec((nrows, ncols), rows.into_iter().flatten().collect())
            .map_err(D::Error::custom)
    }
}

/// Serde adapters for a list of matrices (one per document).
pub(crate) mod serde_matrix_list {
    use ndarray::Array2;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        ms: &[Array2<f64>],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let all: Vec<Vec<Vec<f64>>> = ms
            .iter()
            .map(|m| m.rows().into_iter().map(|r| r.to_vec()).collect())
            .collect();
        all.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Array2<f64>>, D::Error> {
        let all: Vec<Vec<Vec<f64>>> = Vec::deserialize(d)?;
        all.into_iter()
            .map(|rows| {
                let nrows = rows.len();
                let ncols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != ncols) {
                    return Err(D::Error::custom("ragged matrix rows"));
                }
                Array2::from_shape_vec((nrows, ncols), rows.into_iter().flatten().collect())
                    .map_err(D::Error::custom)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_non_stochastic_rows() {
        assert!(TopicMatrix::new(array![[0.5, 0.4]]).is_err());
        assert!(TopicMatrix::new(array![[1.2, -0.2]]).is_err());
        assert!(TopicMatrix::new(array![[0.5, 0.5], [0.25, 0.75]]).is_ok());
    }

    #[test]
    fn alignment_recovers_a_permutation() {
        let truth = TopicMatrix::from_rows(vec![
            vec![0.9, 0.05, 0.05],
            vec![0.05, 0.9, 0.05],
            vec![0.05, 0.05, 0.9],
        ])
        .unwrap();
        // Same topics permuted and lightly perturbed.
        let est = TopicMatrix::from_rows(vec![
            vec![0.06, 0.06, 0.88],
            vec![0.88, 0.06, 0.06],
            vec![0.06, 0.88, 0.06],
        ])
        .unwrap();
        let assignment = align_topics(&est, &truth).unwrap();
        assert_eq!(assignment, vec![2, 0, 1]);
        let tv = aligned_tv_distances(&est, &truth).unwrap();
        assert!(tv.iter().all(|&d| d < 0.05), "{tv:?}");
    }

    #[test]
    fn matrix_serde_round_trip_is_row_major() {
        let m = TopicMatrix::from_rows(vec![vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[0.8,0.2],[0.3,0.7]]");
        let back: TopicMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
