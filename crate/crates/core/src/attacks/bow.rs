//! Multinomial Naive Bayes over word-token counts.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{ClassCounts, Label, Sample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::textkit::{tokenize, TokenizerConfig};

pub const BOW_MODEL_FORMAT: &str = "mia-audit/bow-model/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowConfig {
    /// Laplace smoothing added to every vocabulary count.
    pub alpha: f64,
    /// Minimum number of training documents a token must occur in.
    pub min_df: usize,
    #[serde(default)]
    pub tokenizer: TokenizerConfig,
}

impl Default for BowConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            min_df: 2,
            tokenizer: TokenizerConfig::default(),
        }
    }
}

impl BowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "smoothing alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.min_df == 0 {
            return Err(Error::InvalidConfig("min_df must be at least 1".into()));
        }
        Ok(())
    }
}

/// Trained model. `log_likelihood_ratios[i]` is
/// `ln P(vocabulary[i] | member) - ln P(vocabulary[i] | nonmember)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BowModelDocument<T>", into = "BowModelDocument<T>")]
#[serde(bound = "T: Scalar")]
pub struct BowModel<T: Scalar> {
    vocabulary: Vec<String>,
    index: HashMap<String, usize>,
    log_likelihood_ratios: Vec<T>,
    class_log_prior: T,
    smoothing_alpha: T,
    min_df: usize,
    tokenizer: TokenizerConfig,
}

/// Versioned on-disk form of [`BowModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BowModelDocument<T> {
    pub format: String,
    pub vocabulary: Vec<String>,
    pub log_likelihood_ratios: Vec<T>,
    pub class_log_prior: T,
    pub smoothing_alpha: T,
    pub min_df: usize,
    pub tokenizer: TokenizerConfig,
}

impl<T: Scalar> From<BowModel<T>> for BowModelDocument<T> {
    fn from(m: BowModel<T>) -> Self {
        Self {
            format: BOW_MODEL_FORMAT.to_owned(),
            vocabulary: m.vocabulary,
            log_likelihood_ratios: m.log_likelihood_ratios,
            class_log_prior: m.class_log_prior,
            smoothing_alpha: m.smoothing_alpha,
            min_df: m.min_df,
            tokenizer: m.tokenizer,
        }
    }
}

impl<T: Scalar> TryFrom<BowModelDocument<T>> for BowModel<T> {
    type Error = String;

    fn try_from(d: BowModelDocument<T>) -> Result<Self, String> {
        if d.format != BOW_MODEL_FORMAT {
            return Err(format!("unsupported model format {:?}", d.format));
        }
        if d.vocabulary.len() != d.log_likelihood_ratios.len() {
            return Err("vocabulary and ratio lengths differ".into());
        }
        if d.log_likelihood_ratios.iter().any(|r| !r.is_finite()) {
            return Err("non-finite log-likelihood ratio".into());
        }
        let index = d
            .vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Self {
            vocabulary: d.vocabulary,
            index,
            log_likelihood_ratios: d.log_likelihood_ratios,
            class_log_prior: d.class_log_prior,
            smoothing_alpha: d.smoothing_alpha,
            min_df: d.min_df,
            tokenizer: d.tokenizer,
        })
    }
}

impl<T: Scalar> BowModel<T> {
    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn class_log_prior(&self) -> T {
        self.class_log_prior
    }

    pub fn log_likelihood_ratios(&self) -> &[T] {
        &self.log_likelihood_ratios
    }

    pub fn ratio(&self, token: &str) -> Option<T> {
        self.index
            .get(token)
            .map(|&i| self.log_likelihood_ratios[i])
    }

    /// Tokens ordered by decreasing ratio (most member-indicative first).
    pub fn top_member_tokens(&self, n: usize) -> Vec<(&str, T)> {
        let mut v: Vec<(&str, T)> = self
            .vocabulary
            .iter()
            .map(String::as_str)
            .zip(self.log_likelihood_ratios.iter().copied())
            .collect();
        v.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(b.0))
        });
        v.truncate(n);
        v
    }

    /// `class_log_prior + sum(count * ratio)` over in-vocabulary tokens.
    pub fn score(&self, text: &str) -> T {
        tokenize(text, &self.tokenizer)
            .iter()
            .filter_map(|t| self.index.get(t))
            .fold(self.class_log_prior, |acc, &i| {
                acc + self.log_likelihood_ratios[i]
            })
    }
}

pub fn train_bow<T: Scalar>(train: &[&Sample], config: &BowConfig) -> Result<BowModel<T>> {
    config.validate()?;
    let counts = ClassCounts::of(train.iter().map(|s| &s.label));
    counts.require_both()?;

    let docs: Vec<(Label, Vec<String>)> = train
        .iter()
        .map(|s| (s.label, tokenize(&s.text, &config.tokenizer)))
        .collect();

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, tokens) in &docs {
        let mut seen: Vec<&str> = tokens.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_default() += 1;
        }
    }
    let vocabulary: Vec<String> = df
        .into_iter()
        .filter(|&(_, d)| d >= config.min_df)
        .map(|(t, _)| t.to_owned())
        .collect();
    if vocabulary.is_empty() {
        return Err(Error::EmptyVocabulary {
            min_df: config.min_df,
        });
    }
    let index: HashMap<String, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();

    let v = vocabulary.len();
    let mut member_counts = vec![0usize; v];
    let mut nonmember_counts = vec![0usize; v];
    for (label, tokens) in &docs {
        let target = match label {
            Label::Member => &mut member_counts,
            Label::NonMember => &mut nonmember_counts,
        };
        for t in tokens {
            if let Some(&i) = index.get(t) {
                target[i] += 1;
            }
        }
    }

    let alpha = T::from_f64_lossy(config.alpha);
    let log_denominator = |counts: &[usize]| {
        let total = T::from_usize_lossy(counts.iter().sum());
        (total + alpha * T::from_usize_lossy(v)).ln()
    };
    let member_den = log_denominator(&member_counts);
    let nonmember_den = log_denominator(&nonmember_counts);
    let log_likelihood_ratios = member_counts
        .iter()
        .zip(&nonmember_counts)
        .map(|(&cm, &cn)| {
            let lm = (T::from_usize_lossy(cm) + alpha).ln() - member_den;
            let ln = (T::from_usize_lossy(cn) + alpha).ln() - nonmember_den;
            lm - ln
        })
        .collect();
    let class_log_prior =
        T::from_usize_lossy(counts.members).ln() - T::from_usize_lossy(counts.nonmembers).ln();

    Ok(BowModel {
        vocabulary,
        index,
        log_likelihood_ratios,
        class_log_prior,
        smoothing_alpha: alpha,
        min_df: config.min_df,
        tokenizer: config.tokenizer,
    })
}

pub fn score_bow<T: Scalar>(model: &BowModel<T>, text: &str) -> T {
    model.score(text)
}
