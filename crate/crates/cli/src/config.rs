use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use mia_audit::attacks::{
    AttackKind, AttackSpec, BowConfig, DateAttackConfig, DateMode, GreedyConfig, GreedyStrategy,
    NoDatePolicy,
};
use mia_audit::metrics::SplitSpec;
use mia_audit::textkit::{FeatureConfig, NGramKind, TokenizerConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AttackName {
    Date,
    CitationDate,
    Bow,
    GreedyWord,
    GreedyChar,
}

/// Preset attack/split combinations for the public case-study datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Recipe {
    Wikimia,
    Bookmia,
    BookmiaAuthors,
    TemporalWiki,
    TemporalArxiv,
    #[value(name = "arxiv-all-vs-1m")]
    ArxivAllVs1m,
    #[value(name = "arxiv-1m-vs-1m")]
    Arxiv1mVs1m,
    LaionMi,
    Gutenberg,
}

impl Recipe {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_owned()
    }

    fn apply(self, cfg: &mut AuditConfig) {
        use AttackName::*;
        let kfold = |k| SplitSpec::KFold { k };
        let (attacks, split) = match self {
            Recipe::Wikimia => (vec![Date, Bow], kfold(10)),
            Recipe::Bookmia => (vec![Bow], kfold(10)),
            Recipe::BookmiaAuthors => (
                vec![Bow],
                SplitSpec::GroupDisjoint {
                    group_key: "author".into(),
                    train_fraction: 0.8,
                },
            ),
            Recipe::TemporalWiki | Recipe::TemporalArxiv => (vec![Bow, GreedyWord], kfold(5)),
            Recipe::ArxivAllVs1m => (vec![CitationDate], kfold(5)),
            Recipe::Arxiv1mVs1m => (vec![GreedyWord], kfold(5)),
            Recipe::LaionMi => (vec![GreedyChar], kfold(5)),
            Recipe::Gutenberg => (vec![GreedyWord], kfold(5)),
        };
        cfg.attacks = attacks;
        cfg.split = split;
        if self == Recipe::Gutenberg {
            cfg.head_chars = Some(1000);
        }
        cfg.recipe = Some(self.name());
    }
}

/// Everything needed to re-run an audit; echoed verbatim into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub dataset: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<String>,
    pub attacks: Vec<AttackName>,
    pub split: SplitSpec,
    pub seed: u64,
    pub fpr_levels: Vec<f64>,
    pub cutoff_year: u32,
    pub no_date_policy: NoDatePolicy,
    pub word_range: [usize; 2],
    pub char_range: [usize; 2],
    pub fpr_budget: f64,
    pub greedy_strategy: GreedyStrategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_chars: Option<usize>,
    pub min_df: usize,
    pub alpha: f64,
    pub lowercase: bool,
}

/// Explicit command-line values; each one overrides the recipe.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub attacks: Vec<AttackName>,
    pub split: Option<SplitSpec>,
    pub seed: Option<u64>,
    pub fpr_levels: Vec<f64>,
    pub cutoff_year: Option<u32>,
    pub no_date_policy: Option<NoDatePolicy>,
    pub word_range: Option<[usize; 2]>,
    pub char_range: Option<[usize; 2]>,
    pub fpr_budget: Option<f64>,
    pub greedy_strategy: Option<GreedyStrategy>,
    pub head_chars: Option<usize>,
    pub min_df: Option<usize>,
    pub alpha: Option<f64>,
    pub keep_case: bool,
}

impl AuditConfig {
    pub fn new(dataset: PathBuf) -> Self {
        Self {
            dataset,
            recipe: None,
            attacks: Vec::new(),
            split: SplitSpec::KFold { k: 10 },
            seed: 0,
            fpr_levels: vec![0.01, 0.05],
            cutoff_year: 2023,
            no_date_policy: NoDatePolicy::PredictMember,
            word_range: [1, 1],
            char_range: [1, 3],
            fpr_budget: 0.01,
            greedy_strategy: GreedyStrategy::Residual,
            head_chars: None,
            min_df: 2,
            alpha: 1.0,
            lowercase: true,
        }
    }

    pub fn build(dataset: PathBuf, recipe: Option<Recipe>, o: Overrides) -> Result<Self, CliError> {
        let mut cfg = Self::new(dataset);
        if let Some(r) = recipe {
            r.apply(&mut cfg);
        }
        if !o.attacks.is_empty() {
            cfg.attacks = o.attacks;
        }
        if !o.fpr_levels.is_empty() {
            cfg.fpr_levels = o.fpr_levels;
        }
        cfg.split = o.split.unwrap_or(cfg.split);
        cfg.seed = o.seed.unwrap_or(cfg.seed);
        cfg.cutoff_year = o.cutoff_year.unwrap_or(cfg.cutoff_year);
        cfg.no_date_policy = o.no_date_policy.unwrap_or(cfg.no_date_policy);
        cfg.word_range = o.word_range.unwrap_or(cfg.word_range);
        cfg.char_range = o.char_range.unwrap_or(cfg.char_range);
        cfg.fpr_budget = o.fpr_budget.unwrap_or(cfg.fpr_budget);
        cfg.greedy_strategy = o.greedy_strategy.unwrap_or(cfg.greedy_strategy);
        cfg.head_chars = o.head_chars.or(cfg.head_chars);
        cfg.min_df = o.min_df.unwrap_or(cfg.min_df);
        cfg.alpha = o.alpha.unwrap_or(cfg.alpha);
        cfg.lowercase = cfg.lowercase && !o.keep_case;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.attacks.is_empty() {
            return Err(CliError::Usage(
                "select at least one attack (--attack or --recipe)".into(),
            ));
        }
        if let Some(bad) = self.fpr_levels.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
            return Err(CliError::Usage(format!(
                "fpr level {bad} must be in (0, 1)"
            )));
        }
        self.attack_specs().map(|_| ())
    }

    /// Attack specs in first-mention order, duplicates dropped.
    pub fn attack_specs(&self) -> Result<Vec<AttackSpec>, CliError> {
        let tokenizer = TokenizerConfig {
            lowercase: self.lowercase,
        };
        let greedy = |kind, [lo, hi]: [usize; 2]| -> Result<AttackKind, CliError> {
            let mut features = FeatureConfig::new(kind, lo, hi)?;
            features.tokenizer = tokenizer;
            let mut cfg = GreedyConfig::new(features, self.fpr_budget)?;
            cfg.strategy = self.greedy_strategy;
            Ok(AttackKind::Greedy(cfg))
        };
        let date = |mode| -> Result<AttackKind, CliError> {
            let mut cfg = DateAttackConfig::new(mode, self.cutoff_year)?;
            cfg.no_date_policy = self.no_date_policy;
            Ok(AttackKind::Date(cfg))
        };
        let mut seen = Vec::new();
        let mut specs = Vec::new();
        for &name in &self.attacks {
            if seen.contains(&name) {
                continue;
            }
            seen.push(name);
            let kind = match name {
                AttackName::Date => date(DateMode::TextDates)?,
                AttackName::CitationDate => date(DateMode::CitationYears)?,
                AttackName::Bow => {
                    let cfg = BowConfig {
                        alpha: self.alpha,
                        min_df: self.min_df,
                        tokenizer,
                    };
                    cfg.validate()?;
                    AttackKind::Bow(cfg)
                }
                AttackName::GreedyWord => greedy(NGramKind::Word, self.word_range)?,
                AttackName::GreedyChar => greedy(NGramKind::Char, self.char_range)?,
            };
            specs.push(AttackSpec {
                kind,
                head_chars: self.head_chars,
            });
        }
        Ok(specs)
    }
}
