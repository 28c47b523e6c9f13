//! Text cleaning: punctuation/number removal, lowercasing, stop word
//! removal and Snowball English (Porter2) stemming.

use std::collections::HashSet;
use std::sync::LazyLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

static STEMMER: LazyLock<Stemmer> = LazyLock::new(|| Stemmer::create(Algorithm::English));

static DEFAULT_STOPWORDS: LazyLock<HashSet<String>> = LazyLock::new(|| {
    include_str!("data/english_stopwords.txt")
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect()
});

/// The bundled Snowball English stop word list. Contractions are stored as
/// their apostrophe-split fragments so that entries match tokens produced
/// after punctuation removal.
pub fn default_stopwords() -> &'static HashSet<String> {
    &DEFAULT_STOPWORDS
}

/// Which cleaning steps to apply. Defaults enable all four; disable
/// stemming for corpora where grammatical structure matters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CleaningConfig {
    pub lowercase: bool,
    pub strip_punct_numbers: bool,
    #[serde(skip, default = "default_stopword_set")]
    pub stopwords: HashSet<String>,
    pub stem: bool,
    /// Recorded so serialized configs round-trip: true when `stopwords` is
    /// the bundled list, false when the caller supplied a custom set.
    #[serde(default = "default_true")]
    pub default_stopword_list: bool,
}

fn default_stopword_set() -> HashSet<String> {
    DEFAULT_STOPWORDS.clone()
}

fn default_true() -> bool {
    true
}

impl Default for CleaningConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_punct_numbers: true,
            stopwords: default_stopword_set(),
            stem: true,
            default_stopword_list: true,
        }
    }
}

impl CleaningConfig {
    /// All steps except stemming.
    pub fn without_stemming() -> Self {
        Self { stem: false, ..Self::default() }
    }

    /// Replaces the stop word list. Entries are normalized through the same
    /// lowercase / punctuation treatment the cleaner applies to text, so the
    /// invariant that stop words are lowercase and punctuation-free holds by
    /// construction.
    pub fn with_stopwords<I: IntoIterator<Item = String>>(mut self, words: I) -> Self {
        let mut set = HashSet::new();
        for w in words {
            let stripped: String = w
                .chars()
                .map(|c| if c.is_alphabetic() { c } else { ' ' })
                .collect();
            for part in stripped.split_whitespace() {
                set.insert(part.to_lowercase());
            }
        }
        self.stopwords = set;
        self.default_stopword_list = false;
        self
    }

    pub fn no_stopwords(mut self) -> Self {
        self.stopwords = HashSet::new();
        self.default_stopword_list = false;
        self
    }
}

/// Stems to a fixpoint: single-pass Snowball stemming is not stable on rare
/// suffix chains ("zupzrisiveness" -> "zupzris" -> "zupzri"), and cleaning
/// must leave its own output unchanged.
fn stem_fixpoint(token: &str) -> String {
    let mut current = token.to_string();
    for _ in 0..8 {
        let next = STEMMER.stem(&current).into_owned();
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// Cleans raw text into tokens. Steps, in order: replace punctuation and
/// digits with spaces, lowercase, split on whitespace, drop stop words,
/// stem. Token order is preserved and empty input yields empty output.
pub fn clean_text(raw: &str, config: &CleaningConfig) -> Vec<String> {
    let stripped: String = if config.strip_punct_numbers {
        raw.chars()
            .map(|c| {
                if c.is_alphabetic() || c.is_whitespace() {
                    c
                } else {
                    ' '
                }
            })
            .collect()
    } else {
        raw.to_string()
    };
    let cased = if config.lowercase {
        stripped.to_lowercase()
    } else {
        stripped
    };
    cased
        .split_whitespace()
        .filter(|t| !config.stopwords.contains(*t))
        .map(|t| {
            if config.stem {
                stem_fixpoint(t)
            } else {
                t.to_string()
            }
        })
        // Some stems land on stop words ("others" -> "other"); filter again
        // so cleaning its own output changes nothing.
        .filter(|t| !config.stopwords.contains(t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_on() -> CleaningConfig {
        CleaningConfig::default()
    }

    #[test]
    fn empty_input_gives_empty_output() {
        assert!(clean_text("", &all_on()).is_empty());
    }

    #[test]
    fn digits_punctuation_and_stems() {
        assert_eq!(clean_text("2 cats!!", &all_on()), vec!["cat"]);
    }

    #[test]
    fn stopwords_removed_and_stemmed() {
        assert_eq!(clean_text("The cat, sitting.", &all_on()), vec!["cat", "sit"]);
    }

    #[test]
    fn order_is_preserved() {
        assert_eq!(
            clean_text("mats under cats", &all_on()),
            vec!["mat", "cat"]
        );
        assert_eq!(
            clean_text("cats over mats", &all_on()),
            vec!["cat", "mat"]
        );
    }

    #[test]
    fn flags_can_be_disabled() {
        let cfg = CleaningConfig {
            lowercase: false,
            strip_punct_numbers: false,
            stopwords: HashSet::new(),
            stem: false,
            default_stopword_list: false,
        };
        assert_eq!(
            clean_text("The cat, sitting.", &cfg),
            vec!["The", "cat,", "sitting."]
        );
    }

    #[test]
    fn no_stemming_config_keeps_inflections() {
        let cfg = CleaningConfig::without_stemming();
        assert_eq!(clean_text("The cat, sitting.", &cfg), vec!["cat", "sitting"]);
    }

    #[test]
    fn cleaning_is_idempotent() {
        let cfg = all_on();
        let samples = [
            "2 cats!!",
            "The cat, sitting.",
            "Mostly harmless, said the others.",
            "Oscillators are generously proportioned; sameness abounds.",
            "don't you walk away while I'm talking",
            "ADOPTED: 3 gorgeous kittens needing re-homing ASAP!!!",
        ];
        for raw in samples {
            let once = clean_text(raw, &cfg);
            let twice = clean_text(&once.join(" "), &cfg);
            assert_eq!(once, twice, "not idempotent on {raw:?}");
        }
        // Every entry of the bundled list must itself clean to nothing.
        for w in default_stopwords() {
            assert!(clean_text(w, &cfg).is_empty(), "stopword {w:?} survived");
        }
    }

    #[test]
    fn idempotent_on_random_wordlike_strings() {
        use rand::Rng;
        let cfg = all_on();
        let mut rng = crate::math::seeded_stream(20_240_811, 0);
        let suffixes = [
            "", "s", "es", "ed", "ing", "ly", "ational", "ization", "ness", "ful", "ousli",
            "iveness", "ement", "ities",
        ];
        for _ in 0..400 {
            let stem_len = rng.random_range(2..8);
            let mut word = String::new();
            for _ in 0..stem_len {
                word.push((b'a' + rng.random_range(0..26u8)) as char);
            }
            word.push_str(suffixes[rng.random_range(0..suffixes.len())]);
            let once = clean_text(&word, &cfg);
            let twice = clean_text(&once.join(" "), &cfg);
            assert_eq!(once, twice, "not idempotent on {word:?}");
        }
    }

    #[test]
    fn custom_stopword_lists_are_normalized() {
        let cfg = CleaningConfig::default().with_stopwords(vec!["Don't".to_string()]);
        assert!(cfg.stopwords.contains("don"));
        assert!(cfg.stopwords.contains("t"));
        assert!(!cfg.stopwords.contains("the"));
    }
}
