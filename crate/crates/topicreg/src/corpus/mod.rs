//! Text ingestion, cleaning, vocabulary construction and document encoding
//! shared by all topic models.
//!
//! A [`Corpus`] is a set of encoded [`Document`]s over one [`Vocabulary`],
//! optionally paired with a per-document response used by the regression
//! stage. All types are immutable after construction and safe to share
//! across threads.

mod clean;
mod io;

pub use clean::{clean_text, default_stopwords, CleaningConfig};
pub use io::{
    encode_corpus, load_corpus_json, load_raw_documents, save_corpus_json, IngestReport,
    InputFormat, RawDocument, ResponseFamilyHint,
};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An indexed set of unique terms: the coordinate system for topics and
/// count vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new(terms: Vec<String>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate term {t:?}")));
            }
        }
        Ok(Self { terms, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, id: usize) -> &str {
        &self.terms[id]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Maps token ids back to terms.
    pub fn decode(&self, tokens: &[usize]) -> Vec<&str> {
        tokens.iter().map(|&t| self.term(t)).collect()
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = Error;
    fn try_from(terms: Vec<String>) -> Result<Self> {
        Self::new(terms)
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.terms
    }
}

/// One encoded document: the ordered token-id sequence plus its word-count
/// vector over the vocabulary. `counts[i]` always equals the number of
/// occurrences of term `i` in `tokens`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    tokens: Vec<usize>,
    counts: Vec<u32>,
}

impl Document {
    pub fn new(tokens: Vec<usize>, vocab_size: usize) -> Result<Self> {
        let mut counts = vec![0u32; vocab_size];
        for &t in &tokens {
            if t >= vocab_size {
                return Err(Error::InvalidInput(format!(
                    "token id {t} out of range for vocabulary of size {vocab_size}"
                )));
            }
            counts[t] += 1;
        }
        Ok(Self { tokens, counts })
    }

    /// Document length n_j.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[usize] {
        &self.tokens
    }

    /// Dense count vector N over the vocabulary.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// (term id, count) pairs for terms that actually occur.
    pub fn nonzero_counts(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
    }
}

/// Per-document responses, stored column-wise with an explicit family tag so
/// downstream GLM selection is type-driven.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ResponseVector {
    Numeric { values: Vec<f64> },
    Binary { values: Vec<bool> },
    Categorical { levels: Vec<String>, codes: Vec<usize> },
}

impl ResponseVector {
    pub fn len(&self) -> usize {
        match self {
            ResponseVector::Numeric { values } => values.len(),
            ResponseVector::Binary { values } => values.len(),
            ResponseVector::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Keeps only the entries at `ids`, in that order.
    pub fn subset(&self, ids: &[usize]) -> ResponseVector {
        match self {
            ResponseVector::Numeric { values } => ResponseVector::Numeric {
                values: ids.iter().map(|&i| values[i]).collect(),
            },
            ResponseVector::Binary { values } => ResponseVector::Binary {
                values: ids.iter().map(|&i| values[i]).collect(),
            },
            ResponseVector::Categorical { levels, codes } => ResponseVector::Categorical {
                levels: levels.clone(),
                codes: ids.iter().map(|&i| codes[i]).collect(),
            },
        }
    }
}

/// A collection of m documents over one vocabulary, with optional responses.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub ids: Vec<String>,
    pub docs: Vec<Document>,
    pub vocabulary: Vocabulary,
    pub responses: Option<ResponseVector>,
}

impl Corpus {
    pub fn new(
        ids: Vec<String>,
        docs: Vec<Document>,
        vocabulary: Vocabulary,
        responses: Option<ResponseVector>,
    ) -> Result<Self> {
        if ids.len() != docs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} ids for {} documents",
                ids.len(),
                docs.len()
            )));
        }
        for (j, d) in docs.iter().enumerate() {
            if d.counts.len() != vocabulary.len() {
                return Err(Error::DimensionMismatch(format!(
                    "document {j} encoded against a vocabulary of size {}, corpus has {}",
                    d.counts.len(),
                    vocabulary.len()
                )));
            }
        }
        if let Some(r) = &responses {
            if r.len() != docs.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} responses for {} documents",
                    r.len(),
                    docs.len()
                )));
            }
        }
        Ok(Self { ids, docs, vocabulary, responses })
    }

    /// Number of documents m.
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn total_tokens(&self) -> usize {
        self.docs.iter().map(Document::len).sum()
    }

    /// A corpus holding only the documents at `ids` (same vocabulary).
    pub fn subset(&self, ids: &[usize]) -> Corpus {
        Corpus {
            ids: ids.iter().map(|&i| self.ids[i].clone()).collect(),
            docs: ids.iter().map(|&i| self.docs[i].clone()).collect(),
            vocabulary: self.vocabulary.clone(),
            responses: self.responses.as_ref().map(|r| r.subset(ids)),
        }
    }
}

/// Builds a vocabulary from token lists, keeping terms in first-appearance
/// order. Errors if no document contributes a token.
pub fn build_vocabulary<S: AsRef<str>>(token_docs: &[Vec<S>]) -> Result<Vocabulary> {
    let mut terms = Vec::new();
    let mut seen = HashMap::new();
    for doc in token_docs {
        for tok in doc {
            let t = tok.as_ref();
            if !seen.contains_key(t) {
                seen.insert(t.to_string(), terms.len());
                terms.push(t.to_string());
            }
        }
    }
    if terms.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Vocabulary::new(terms)
}

/// Encodes tokens against a vocabulary. Tokens absent from the vocabulary
/// are dropped (they carry probability zero under every topic, which is
/// equivalent to removing them); a fully out-of-vocabulary document encodes
/// to length zero and callers decide whether that is fatal.
pub fn encode_document<S: AsRef<str>>(tokens: &[S], vocabulary: &Vocabulary) -> Document {
    let ids: Vec<usize> = tokens
        .iter()
        .filter_map(|t| vocabulary.id(t.as_ref()))
        .collect();
    Document::new(ids, vocabulary.len()).expect("ids from the vocabulary are in range")
}

/// Ids of terms that occur in at least `ceil(min_fraction * m)` documents.
pub fn filter_by_document_frequency(corpus: &Corpus, min_fraction: f64) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&min_fraction) {
        return Err(Error::InvalidInput(format!(
            "min_fraction must lie in [0, 1], got {min_fraction}"
        )));
    }
    let m = corpus.len();
    let threshold = (min_fraction * m as f64).ceil() as usize;
    let v = corpus.vocabulary.len();
    let mut doc_freq = vec![0usize; v];
    for doc in &corpus.docs {
        for (term, _) in doc.nonzero_counts() {
            doc_freq[term] += 1;
        }
    }
    Ok((0..v).filter(|&t| doc_freq[t] >= threshold).collect())
}
