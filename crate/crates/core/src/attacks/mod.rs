//! Blind distinguishers: they see only sample content, never a model.

pub mod bow;
pub mod date;
pub mod greedy;

use serde::{Deserialize, Serialize};

pub use bow::{score_bow, train_bow, BowConfig, BowModel};
pub use date::{date_attack_predict, date_attack_score, DateAttackConfig, DateMode, NoDatePolicy};
pub use greedy::{apply_rules, greedy_select, GreedyConfig, GreedyRuleSet, GreedyStrategy};

use crate::error::Result;
use crate::textkit::NGramKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum AttackKind {
    Date(DateAttackConfig),
    Bow(BowConfig),
    Greedy(GreedyConfig),
}

/// An attack plus input preprocessing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub kind: AttackKind,
    /// Truncate every sample to its first N code points before scoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_chars: Option<usize>,
}

impl AttackSpec {
    pub fn new(kind: AttackKind) -> Self {
        Self {
            kind,
            head_chars: None,
        }
    }

    pub fn with_head(mut self, n_chars: usize) -> Self {
        self.head_chars = Some(n_chars);
        self
    }

    /// Short name used in reports: `date`, `citation-date`, `bow`,
    /// `greedy-word`, `greedy-char`.
    pub fn name(&self) -> &'static str {
        match &self.kind {
            AttackKind::Date(c) => match c.mode {
                DateMode::TextDates => "date",
                DateMode::CitationYears => "citation-date",
            },
            AttackKind::Bow(_) => "bow",
            AttackKind::Greedy(c) => match c.features.kind {
                NGramKind::Word => "greedy-word",
                NGramKind::Char => "greedy-char",
            },
        }
    }

    pub fn needs_training(&self) -> bool {
        !matches!(self.kind, AttackKind::Date(_))
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            AttackKind::Date(c) => c.validate(),
            AttackKind::Bow(c) => c.validate(),
            AttackKind::Greedy(c) => c.validate(),
        }
    }
}
