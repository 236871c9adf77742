//! Deterministic text features: word tokens, word/character n-grams, years.
//!
//! The regular expressions used for dates and citations are part of the
//! output contract and are covered by golden tests:
//!
//! * standalone years: every maximal run of ASCII digits `[0-9]+` of length
//!   exactly 4 whose value lies in `[1000, 2999]`;
//! * month-name dates: [`MONTH_DATE_PATTERN`], the year being the 4-digit group;
//! * citations: [`CITE_PATTERN`]; within each comma-separated key every maximal
//!   ASCII digit run of length exactly 4 in `[1900, 2099]` is a year.

use std::collections::{BTreeSet, HashSet};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_YEAR: u32 = 1000;
pub const MAX_YEAR: u32 = 2999;
pub const MIN_CITATION_YEAR: u32 = 1900;
pub const MAX_CITATION_YEAR: u32 = 2099;
pub const MAX_NGRAM: usize = 5;

const MONTHS: &str = "January|February|March|April|May|June|July|August|September|October|November|December|Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sept|Sep|Oct|Nov|Dec";

/// `Month [day[suffix][,]] YEAR` or `day[suffix] Month[,] YEAR`, with an
/// optional period after abbreviated month names.
pub static MONTH_DATE_PATTERN: LazyLock<String> = LazyLock::new(|| {
    format!(
        r"\b(?:(?:{m})\.?\s+(?:[0-9]{{1,2}}(?:st|nd|rd|th)?,?\s+)?|[0-9]{{1,2}}(?:st|nd|rd|th)?\s+(?:{m})\.?,?\s+)([0-9]{{4}})\b",
        m = MONTHS
    )
});

/// `\cite`, `\citep`, `\citet*`, `\citeauthor`, ... with any number of
/// bracketed optional arguments, capturing the brace contents.
pub const CITE_PATTERN: &str = r"\\cite[A-Za-z]*\*?\s*(?:\[[^\]]*\]\s*)*\{([^}]*)\}";

static DIGIT_RUN: LazyLock<Regex> = LazyLock::new(|| Regex::new("[0-9]+").unwrap());
static MONTH_DATE: LazyLock<Regex> = LazyLock::new(|| Regex::new(&MONTH_DATE_PATTERN).unwrap());
static CITE: LazyLock<Regex> = LazyLock::new(|| Regex::new(CITE_PATTERN).unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub lowercase: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self { lowercase: true }
    }
}

/// Splits `text` into maximal runs of alphanumeric code points.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if config.lowercase {
                t.to_lowercase()
            } else {
                t.to_owned()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NGramKind {
    Word,
    Char,
}

/// Inclusive n-gram length range within `1..=5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NGramRange {
    pub lo: usize,
    pub hi: usize,
}

impl NGramRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || lo > hi || hi > MAX_NGRAM {
            return Err(Error::InvalidNGramRange { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.lo, self.hi).map(|_| ())
    }
}

/// A word or character n-gram. Word n-grams store their tokens joined by a
/// single space (tokens never contain one), so the string order equals the
/// lexicographic order of the token sequences.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NGram {
    pub kind: NGramKind,
    pub text: String,
}

impl NGram {
    pub fn word(tokens: &[&str]) -> Self {
        Self {
            kind: NGramKind::Word,
            text: tokens.join(" "),
        }
    }

    pub fn char(s: &str) -> Self {
        Self {
            kind: NGramKind::Char,
            text: s.to_owned(),
        }
    }

    pub fn parts(&self) -> Vec<String> {
        match self.kind {
            NGramKind::Word => self.text.split(' ').map(str::to_owned).collect(),
            NGramKind::Char => self.text.chars().map(String::from).collect(),
        }
    }

    pub fn order(&self) -> usize {
        match self.kind {
            NGramKind::Word => self.text.split(' ').count(),
            NGramKind::Char => self.text.chars().count(),
        }
    }
}

/// Feature-extraction settings shared by the n-gram based attacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub kind: NGramKind,
    pub range: NGramRange,
    pub tokenizer: TokenizerConfig,
}

impl FeatureConfig {
    pub fn new(kind: NGramKind, lo: usize, hi: usize) -> Result<Self> {
        Ok(Self {
            kind,
            range: NGramRange::new(lo, hi)?,
            tokenizer: TokenizerConfig::default(),
        })
    }

    /// Distinct n-gram strings of `text` (see [`NGram::text`]).
    pub fn keys(&self, text: &str) -> HashSet<String> {
        let mut out = HashSet::new();
        let NGramRange { lo, hi } = self.range;
        match self.kind {
            NGramKind::Word => {
                let tokens = tokenize(text, &self.tokenizer);
                for start in 0..tokens.len() {
                    for n in lo..=hi.min(tokens.len() - start) {
                        out.insert(tokens[start..start + n].join(" "));
                    }
                }
            }
            NGramKind::Char => {
                let bounds: Vec<usize> = text
                    .char_indices()
                    .map(|(i, _)| i)
                    .chain(std::iter::once(text.len()))
                    .collect();
                let n_chars = bounds.len() - 1;
                for start in 0..n_chars {
                    for n in lo..=hi.min(n_chars - start) {
                        out.insert(text[bounds[start]..bounds[start + n]].to_owned());
                    }
                }
            }
        }
        out
    }
}

/// Presence set of n-grams of `text`.
pub fn ngrams(
    text: &str,
    kind: NGramKind,
    lo: usize,
    hi: usize,
    tokenizer: &TokenizerConfig,
) -> Result<BTreeSet<NGram>> {
    let cfg = FeatureConfig {
        kind,
        range: NGramRange::new(lo, hi)?,
        tokenizer: *tokenizer,
    };
    Ok(cfg
        .keys(text)
        .into_iter()
        .map(|text| NGram { kind, text })
        .collect())
}

fn four_digit_runs(s: &str) -> impl Iterator<Item = u32> + '_ {
    DIGIT_RUN
        .find_iter(s)
        .filter(|m| m.len() == 4)
        .map(|m| m.as_str().parse::<u32>().expect("four ASCII digits"))
}

/// Years of month-name date expressions such as "March 5, 2021" or "5 Mar. 2021".
pub fn month_date_years(text: &str) -> BTreeSet<u32> {
    MONTH_DATE
        .captures_iter(text)
        .filter_map(|c| c[1].parse::<u32>().ok())
        .filter(|y| (MIN_YEAR..=MAX_YEAR).contains(y))
        .collect()
}

/// All years mentioned in `text`.
pub fn extract_years(text: &str) -> BTreeSet<u32> {
    let mut years: BTreeSet<u32> = four_digit_runs(text)
        .filter(|y| (MIN_YEAR..=MAX_YEAR).contains(y))
        .collect();
    years.extend(month_date_years(text));
    years
}

/// Years embedded in the keys of `\cite`-family commands of LaTeX source.
pub fn extract_citation_years(latex: &str) -> BTreeSet<u32> {
    let mut years = BTreeSet::new();
    for cap in CITE.captures_iter(latex) {
        for key in cap[1].split(',') {
            years.extend(
                four_digit_runs(key.trim())
                    .filter(|y| (MIN_CITATION_YEAR..=MAX_CITATION_YEAR).contains(y)),
            );
        }
    }
    years
}

/// First `n_chars` code points of `text`.
pub fn head(text: &str, n_chars: usize) -> &str {
    match text.char_indices().nth(n_chars) {
        Some((i, _)) => &text[..i],
        None => text,
    }
}

/// Fraction of `texts` containing `needle` at least once.
pub fn presence_fraction<'a>(texts: impl IntoIterator<Item = &'a str>, needle: &str) -> f64 {
    let (hits, total) = texts.into_iter().fold((0usize, 0usize), |(h, t), s| {
        (h + usize::from(s.contains(needle)), t + 1)
    });
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}
