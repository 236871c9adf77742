//! Date thresholding: a sample is member-like when every year it mentions
//! falls strictly before a cutoff.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::textkit::{self, MAX_YEAR, MIN_YEAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DateMode {
    /// Years anywhere in the text.
    TextDates,
    /// Years inside LaTeX `\cite` keys.
    CitationYears,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoDatePolicy {
    /// "All dates fall before the cutoff" holds vacuously.
    #[default]
    PredictMember,
    /// Leave the sample out of the score set.
    Abstain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateAttackConfig {
    pub mode: DateMode,
    pub cutoff_year: u32,
    #[serde(default)]
    pub no_date_policy: NoDatePolicy,
}

impl DateAttackConfig {
    pub fn new(mode: DateMode, cutoff_year: u32) -> Result<Self> {
        let cfg = Self {
            mode,
            cutoff_year,
            no_date_policy: NoDatePolicy::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_YEAR..=MAX_YEAR).contains(&self.cutoff_year) {
            return Err(Error::InvalidConfig(format!(
                "cutoff year {} outside [{MIN_YEAR}, {MAX_YEAR}]",
                self.cutoff_year
            )));
        }
        Ok(())
    }

    pub fn years(&self, text: &str) -> BTreeSet<u32> {
        match self.mode {
            DateMode::TextDates => textkit::extract_years(text),
            DateMode::CitationYears => textkit::extract_citation_years(text),
        }
    }
}

/// Score for samples without any year under [`NoDatePolicy::PredictMember`]:
/// minus the smallest representable year, at least as member-like as any dated sample.
pub fn no_date_score<T: Scalar>() -> T {
    -T::from_u32(MIN_YEAR).expect("small integer")
}

/// `-max(years)`, so older texts score higher. `None` means abstain.
pub fn date_attack_score<T: Scalar>(text: &str, config: &DateAttackConfig) -> Option<T> {
    match config.years(text).last() {
        Some(&latest) => Some(-T::from_u32(latest).expect("small integer")),
        None => match config.no_date_policy {
            NoDatePolicy::PredictMember => Some(no_date_score()),
            NoDatePolicy::Abstain => None,
        },
    }
}

/// Hard prediction: member iff the latest year is strictly before the cutoff.
pub fn date_attack_predict(text: &str, config: &DateAttackConfig) -> Option<bool> {
    match config.years(text).last() {
        Some(&latest) => Some(latest < config.cutoff_year),
        None => match config.no_date_policy {
            NoDatePolicy::PredictMember => Some(true),
            NoDatePolicy::Abstain => None,
        },
    }
}
