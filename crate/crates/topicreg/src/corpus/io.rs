//! Corpus file formats: CSV / JSONL ingestion of raw documents and the JSON
//! serialization of encoded corpora (vocabulary with explicit term order,
//! token-id documents, tagged responses).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    build_vocabulary, clean_text, encode_document, CleaningConfig, Corpus, Document,
    ResponseVector, Vocabulary,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Jsonl,
}

impl InputFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") | Some("json") => InputFormat::Jsonl,
            _ => InputFormat::Csv,
        }
    }
}

/// One document as read from disk, before cleaning.
#[derive(Debug, Clone)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub response: Option<String>,
}

#[derive(Debug, Deserialize)]
struct JsonlRecord {
    id: Option<serde_json::Value>,
    text: String,
    #[serde(default)]
    response: Option<serde_json::Value>,
}

fn value_to_string(v: serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Reads raw documents from CSV (columns: `id`, `text`, optional `response`;
/// a header row is required) or JSONL (one object per line with fields
/// `id`, `text`, `response`).
pub fn load_raw_documents(path: &Path, format: InputFormat) -> Result<Vec<RawDocument>> {
    match format {
        InputFormat::Csv => {
            let mut reader = csv::Reader::from_path(path)?;
            let headers = reader.headers()?.clone();
            let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
            let text_col = find("text").ok_or_else(|| {
                Error::InvalidInput(format!("{}: no 'text' column in header", path.display()))
            })?;
            let id_col = find("id");
            let resp_col = find("response");
            let mut out = Vec::new();
            for (row, record) in reader.records().enumerate() {
                let record = record?;
                let id = id_col
                    .and_then(|c| record.get(c))
                    .map(str::to_string)
                    .unwrap_or_else(|| row.to_string());
                let text = record.get(text_col).unwrap_or("").to_string();
                let response = resp_col
                    .and_then(|c| record.get(c))
                    .map(str::to_string)
                    .filter(|s| !s.is_empty());
                out.push(RawDocument { id, text, response });
            }
            Ok(out)
        }
        InputFormat::Jsonl => {
            let reader = BufReader::new(File::open(path)?);
            let mut out = Vec::new();
            for (row, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: JsonlRecord = serde_json::from_str(&line)?;
                out.push(RawDocument {
                    id: rec
                        .id
                        .map(value_to_string)
                        .unwrap_or_else(|| row.to_string()),
                    text: rec.text,
                    response: rec.response.map(value_to_string),
                });
            }
            Ok(out)
        }
    }
}

/// How to interpret the response column when building a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseFamilyHint {
    /// Numeric if everything parses as a number, binary if those numbers are
    /// all 0/1, categorical otherwise.
    #[default]
    Auto,
    Numeric,
    Binary,
    Categorical,
}

fn parse_binary(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "1.0" => Some(true),
        "0" | "false" | "0.0" => Some(false),
        _ => None,
    }
}

fn build_responses(raw: &[Option<String>], hint: ResponseFamilyHint) -> Result<Option<ResponseVector>> {
    let present = raw.iter().filter(|r| r.is_some()).count();
    if present == 0 {
        return Ok(None);
    }
    if present != raw.len() {
        return Err(Error::InvalidInput(format!(
            "{} of {} documents are missing a response",
            raw.len() - present,
            raw.len()
        )));
    }
    let values: Vec<&str> = raw.iter().map(|r| r.as_deref().unwrap()).collect();
    let as_numeric: Option<Vec<f64>> = values
        .iter()
        .map(|s| s.trim().parse::<f64>().ok())
        .collect();
    let family = match hint {
        ResponseFamilyHint::Auto => match &as_numeric {
            Some(nums) if nums.iter().all(|&x| x == 0.0 || x == 1.0) => ResponseFamilyHint::Binary,
            Some(_) => ResponseFamilyHint::Numeric,
            None => ResponseFamilyHint::Categorical,
        },
        other => other,
    };
    match family {
        ResponseFamilyHint::Numeric => {
            let nums = as_numeric.ok_or_else(|| {
                Error::FamilyMismatch("non-numeric response with numeric family".into())
            })?;
            Ok(Some(ResponseVector::Numeric { values: nums }))
        }
        ResponseFamilyHint::Binary => {
            let bools: Option<Vec<bool>> = values.iter().map(|s| parse_binary(s)).collect();
            let bools = bools.ok_or_else(|| {
                Error::FamilyMismatch("response is not binary (expected 0/1)".into())
            })?;
            Ok(Some(ResponseVector::Binary { values: bools }))
        }
        ResponseFamilyHint::Categorical => {
            let mut levels: Vec<String> = Vec::new();
            let mut codes = Vec::with_capacity(values.len());
            for v in &values {
                let pos = match levels.iter().position(|l| l == v) {
                    Some(p) => p,
                    None => {
                        levels.push(v.to_string());
                        levels.len() - 1
                    }
                };
                codes.push(pos);
            }
            Ok(Some(ResponseVector::Categorical { levels, codes }))
        }
        ResponseFamilyHint::Auto => unreachable!(),
    }
}

/// Summary of an ingestion run: documents kept and the ids of documents that
/// cleaned to nothing (they are dropped, since every model requires
/// non-empty documents).
#[derive(Debug, Clone, Serialize)]
pub struct IngestReport {
    pub kept: usize,
    pub dropped_empty: Vec<String>,
}

/// Cleans and encodes raw documents into a corpus.
pub fn encode_corpus(
    raw: &[RawDocument],
    cleaning: &CleaningConfig,
    hint: ResponseFamilyHint,
) -> Result<(Corpus, IngestReport)> {
    let mut ids = Vec::new();
    let mut token_docs = Vec::new();
    let mut responses = Vec::new();
    let mut dropped = Vec::new();
    for doc in raw {
        let tokens = clean_text(&doc.text, cleaning);
        if tokens.is_empty() {
            dropped.push(doc.id.clone());
            continue;
        }
        ids.push(doc.id.clone());
        token_docs.push(tokens);
        responses.push(doc.response.clone());
    }
    let vocabulary = build_vocabulary(&token_docs)?;
    let docs: Vec<Document> = token_docs
        .iter()
        .map(|t| encode_document(t, &vocabulary))
        .collect();
    let responses = build_responses(&responses, hint)?;
    let report = IngestReport { kept: ids.len(), dropped_empty: dropped };
    Ok((Corpus::new(ids, docs, vocabulary, responses)?, report))
}

#[derive(Debug, Serialize, Deserialize)]
struct DocumentRecord {
    id: String,
    tokens: Vec<usize>,
}

/// On-disk corpus: vocabulary in explicit term order, documents as token-id
/// sequences (counts are recomputed on load), responses with family tag.
#[derive(Debug, Serialize, Deserialize)]
struct CorpusFile {
    vocabulary: Vec<String>,
    documents: Vec<DocumentRecord>,
    responses: Option<ResponseVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cleaning: Option<CleaningConfig>,
}

pub fn save_corpus_json(
    corpus: &Corpus,
    cleaning: Option<&CleaningConfig>,
    path: &Path,
) -> Result<()> {
    let file = CorpusFile {
        vocabulary: corpus.vocabulary.terms().to_vec(),
        documents: corpus
            .ids
            .iter()
            .zip(&corpus.docs)
            .map(|(id, d)| DocumentRecord { id: id.clone(), tokens: d.tokens().to_vec() })
            .collect(),
        responses: corpus.responses.clone(),
        cleaning: cleaning.cloned(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &file)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn load_corpus_json(path: &Path) -> Result<(Corpus, Option<CleaningConfig>)> {
    let file: CorpusFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    let vocabulary = Vocabulary::new(file.vocabulary)?;
    let mut ids = Vec::with_capacity(file.documents.len());
    let mut docs = Vec::with_capacity(file.documents.len());
    for rec in file.documents {
        ids.push(rec.id);
        docs.push(Document::new(rec.tokens, vocabulary.len())?);
    }
    Ok((
        Corpus::new(ids, docs, vocabulary, file.responses)?,
        file.cleaning,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(id: &str, text: &str, response: Option<&str>) -> RawDocument {
        RawDocument {
            id: id.into(),
            text: text.into(),
            response: response.map(str::to_string),
        }
    }

    #[test]
    fn auto_response_inference() {
        let docs = vec![
            raw("a", "grey cat sleeping", Some("1")),
            raw("b", "small dog barking", Some("0")),
        ];
        let (corpus, _) = encode_corpus(&docs, &CleaningConfig::default(), ResponseFamilyHint::Auto)
            .unwrap();
        assert_eq!(
            corpus.responses,
            Some(ResponseVector::Binary { values: vec![true, false] })
        );

        let docs = vec![
            raw("a", "grey cat sleeping", Some("1.5")),
            raw("b", "small dog barking", Some("0")),
        ];
        let (corpus, _) = encode_corpus(&docs, &CleaningConfig::default(), ResponseFamilyHint::Auto)
            .unwrap();
        assert_eq!(
            corpus.responses,
            Some(ResponseVector::Numeric { values: vec![1.5, 0.0] })
        );

        let docs = vec![
            raw("a", "grey cat sleeping", Some("north")),
            raw("b", "small dog barking", Some("south")),
            raw("c", "white cat purring", Some("north")),
        ];
        let (corpus, _) = encode_corpus(&docs, &CleaningConfig::default(), ResponseFamilyHint::Auto)
            .unwrap();
        assert_eq!(
            corpus.responses,
            Some(ResponseVector::Categorical {
                levels: vec!["north".into(), "south".into()],
                codes: vec![0, 1, 0],
            })
        );
    }

    #[test]
    fn empty_documents_are_dropped_with_a_record() {
        let docs = vec![
            raw("keep", "grey cat sleeping", None),
            raw("gone", "the of and", None), // all stop words
        ];
        let (corpus, report) =
            encode_corpus(&docs, &CleaningConfig::default(), ResponseFamilyHint::Auto).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(report.dropped_empty, vec!["gone".to_string()]);
    }

    #[test]
    fn corpus_json_round_trip() {
        let docs = vec![
            raw("a", "grey cat sleeping near mat", Some("1")),
            raw("b", "small dog barking near gate", Some("0")),
        ];
        let cleaning = CleaningConfig::default();
        let (corpus, _) = encode_corpus(&docs, &cleaning, ResponseFamilyHint::Auto).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.json");
        save_corpus_json(&corpus, Some(&cleaning), &path).unwrap();
        let (loaded, loaded_cleaning) = load_corpus_json(&path).unwrap();
        assert_eq!(loaded.vocabulary, corpus.vocabulary);
        assert_eq!(loaded.docs, corpus.docs);
        assert_eq!(loaded.responses, corpus.responses);
        assert!(loaded_cleaning.is_some());
    }

    #[test]
    fn csv_and_jsonl_ingestion() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("docs.csv");
        std::fs::write(&csv_path, "id,text,response\nd1,\"a cat, a mat\",1\nd2,a dog,0\n").unwrap();
        let docs = load_raw_documents(&csv_path, InputFormat::Csv).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].id, "d1");
        assert_eq!(docs[0].text, "a cat, a mat");
        assert_eq!(docs[1].response.as_deref(), Some("0"));

        let jsonl_path = dir.path().join("docs.jsonl");
        std::fs::write(
            &jsonl_path,
            "{\"id\":\"d1\",\"text\":\"a cat\",\"response\":1}\n{\"text\":\"a dog\"}\n",
        )
        .unwrap();
        let docs = load_raw_documents(&jsonl_path, InputFormat::Jsonl).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].response.as_deref(), Some("1"));
        assert_eq!(docs[1].id, "1");
        assert_eq!(docs[1].response, None);
    }
}
