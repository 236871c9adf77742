//! Cross-validated evaluation of an attack on a labeled corpus.
//!
//! Held-out scores from every fold are pooled into one [`ScoreSet`] (sorted
//! by sample id) and the headline AUC / TPR@FPR are computed on that pool;
//! per-fold values are kept alongside.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::attacks::{
    date_attack_score, greedy_select, train_bow, AttackKind, AttackSpec, BowModel, GreedyRuleSet,
};
use crate::corpus::{
    group_disjoint_split, holdout_split, kfold_split, FoldSplit, LabeledCorpus, Sample,
};
use crate::error::{Error, Result};
use crate::metrics::roc::{auc, roc_curve, tpr_at_fpr, ScoreSet, ScoredSample};
use crate::scalar::Scalar;
use crate::textkit::head;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SplitSpec {
    KFold {
        k: usize,
    },
    Holdout {
        train_fraction: f64,
    },
    GroupDisjoint {
        group_key: String,
        train_fraction: f64,
    },
}

impl SplitSpec {
    pub fn splits(&self, corpus: &LabeledCorpus, seed: u64) -> Result<Vec<FoldSplit>> {
        match self {
            SplitSpec::KFold { k } => kfold_split(corpus, *k, seed),
            SplitSpec::Holdout { train_fraction } => {
                Ok(vec![holdout_split(corpus, *train_fraction, seed)?])
            }
            SplitSpec::GroupDisjoint {
                group_key,
                train_fraction,
            } => Ok(vec![group_disjoint_split(
                corpus,
                group_key,
                *train_fraction,
                seed,
            )?]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TprAt<T> {
    pub fpr: f64,
    pub tpr: T,
}

/// Operating point of a full greedy rule set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GreedyFoldStats<T> {
    pub n_rules: usize,
    pub train_tpr: T,
    pub train_fpr: T,
    pub heldout_tpr: T,
    pub heldout_fpr: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FoldMetrics<T> {
    pub fold: usize,
    pub n_test: usize,
    /// `None` when the fold's scored test set holds a single class.
    pub auc: Option<T>,
    pub tpr_at: Vec<TprAt<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy: Option<GreedyFoldStats<T>>,
}

/// Pooled held-out operating point of the full rule sets across folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GreedySummary<T> {
    pub heldout_tpr: T,
    pub heldout_fpr: T,
    pub max_train_fpr: T,
    pub fpr_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MetricRow<T> {
    pub attack: String,
    pub dataset: String,
    pub auc: T,
    pub tpr_at: Vec<TprAt<T>>,
    /// Mean of the per-fold AUCs that are defined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold_mean_auc: Option<T>,
    pub fold_values: Vec<FoldMetrics<T>>,
    pub n_scored: usize,
    pub n_abstained: usize,
    /// Date attacks: samples in which no year was found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_no_date: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy: Option<GreedySummary<T>>,
}

impl<T: Scalar> MetricRow<T> {
    pub fn tpr_at(&self, fpr: f64) -> Option<T> {
        self.tpr_at.iter().find(|t| t.fpr == fpr).map(|t| t.tpr)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", bound = "T: Scalar")]
pub enum TrainedModel<T: Scalar> {
    Bow(BowModel<T>),
    Greedy(GreedyRuleSet<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FoldModel<T: Scalar> {
    pub fold: usize,
    pub model: TrainedModel<T>,
}

#[derive(Debug, Clone)]
pub struct CvOutcome<T: Scalar> {
    pub row: MetricRow<T>,
    pub models: Vec<FoldModel<T>>,
    /// Pooled held-out scores, sorted by sample id.
    pub scores: ScoreSet<T>,
}

fn input<'a>(attack: &AttackSpec, s: &'a Sample) -> &'a str {
    match attack.head_chars {
        Some(n) => head(&s.text, n),
        None => &s.text,
    }
}

fn summarize<T: Scalar>(scores: &ScoreSet<T>, fpr_levels: &[f64]) -> Result<(T, Vec<TprAt<T>>)> {
    let curve = roc_curve(scores)?;
    let levels = fpr_levels
        .iter()
        .map(|&fpr| TprAt {
            fpr,
            tpr: tpr_at_fpr(&curve, T::from_f64_lossy(fpr)),
        })
        .collect();
    Ok((auc(&curve), levels))
}

fn fold_metrics<T: Scalar>(
    fold: usize,
    scores: &ScoreSet<T>,
    fpr_levels: &[f64],
) -> FoldMetrics<T> {
    let (auc, tpr_at) = match summarize(scores, fpr_levels) {
        Ok((a, t)) => (Some(a), t),
        Err(_) => (None, Vec::new()),
    };
    FoldMetrics {
        fold,
        n_test: scores.len(),
        auc,
        tpr_at,
        greedy: None,
    }
}

fn score_with<T: Scalar>(
    samples: &[&Sample],
    mut f: impl FnMut(&Sample) -> Option<T>,
) -> Result<(ScoreSet<T>, usize)> {
    let mut set = ScoreSet::default();
    let mut abstained = 0;
    for s in samples {
        match f(s) {
            Some(score) => set.push(ScoredSample {
                id: s.id.clone(),
                label: s.label,
                score,
            })?,
            None => abstained += 1,
        }
    }
    Ok((set, abstained))
}

pub fn cross_validate<T: Scalar>(
    attack: &AttackSpec,
    corpus: &LabeledCorpus,
    split: &SplitSpec,
    seed: u64,
    fpr_levels: &[f64],
) -> Result<CvOutcome<T>> {
    attack.validate()?;
    if let Some(bad) = fpr_levels.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::InvalidConfig(format!(
            "fpr level {bad} outside [0, 1]"
        )));
    }
    corpus.counts().require_both()?;
    let splits = split.splits(corpus, seed)?;

    let mut models = Vec::new();
    let mut fold_values = Vec::with_capacity(splits.len());
    let mut n_no_date = None;
    let mut greedy_summary = None;
    let (pooled, n_abstained) = match &attack.kind {
        AttackKind::Date(cfg) => {
            // Untrained: score every tested sample once (the whole corpus for k-fold).
            let all = corpus.select(&tested_ids(&splits));
            n_no_date = Some(
                all.iter()
                    .filter(|s| cfg.years(input(attack, s)).is_empty())
                    .count(),
            );
            let (scores, abstained) =
                score_with(&all, |s| date_attack_score::<T>(input(attack, s), cfg))?;
            for f in &splits {
                let subset = scores.filter(|id| f.test_ids.contains(id));
                fold_values.push(fold_metrics(f.fold_index, &subset, fpr_levels));
            }
            (scores, abstained)
        }
        AttackKind::Bow(cfg) => {
            let mut pooled = ScoreSet::default();
            for f in &splits {
                let train: Vec<Sample> = corpus
                    .select(&f.train_ids)
                    .into_iter()
                    .map(|s| truncated(attack, s))
                    .collect();
                let train_refs: Vec<&Sample> = train.iter().collect();
                let model: BowModel<T> = train_bow(&train_refs, cfg)?;
                let test = corpus.select(&f.test_ids);
                let (scores, _) = score_with(&test, |s| Some(model.score(input(attack, s))))?;
                fold_values.push(fold_metrics(f.fold_index, &scores, fpr_levels));
                pooled.extend(scores);
                models.push(FoldModel {
                    fold: f.fold_index,
                    model: TrainedModel::Bow(model),
                });
            }
            (pooled, 0)
        }
        AttackKind::Greedy(cfg) => {
            let mut pooled = ScoreSet::default();
            let (mut tp, mut fp, mut pos, mut neg) = (0usize, 0usize, 0usize, 0usize);
            let mut max_train_fpr = T::zero();
            for f in &splits {
                let train: Vec<Sample> = corpus
                    .select(&f.train_ids)
                    .into_iter()
                    .map(|s| truncated(attack, s))
                    .collect();
                let train_refs: Vec<&Sample> = train.iter().collect();
                let rules: GreedyRuleSet<T> = greedy_select(&train_refs, cfg)?;
                let test = corpus.select(&f.test_ids);

                let (mut ftp, mut ffp, mut fpos, mut fneg) = (0usize, 0usize, 0usize, 0usize);
                let (scores, _) = score_with(&test, |s| {
                    let score = rules.rank_score(input(attack, s));
                    let hit = score > T::zero();
                    if s.label.is_member() {
                        fpos += 1;
                        ftp += usize::from(hit);
                    } else {
                        fneg += 1;
                        ffp += usize::from(hit);
                    }
                    Some(score)
                })?;
                let (train_tpr, train_fpr) = rules.train_operating_point();
                max_train_fpr = max_train_fpr.max(train_fpr);
                let mut fm = fold_metrics(f.fold_index, &scores, fpr_levels);
                fm.greedy = Some(GreedyFoldStats {
                    n_rules: rules.rules.len(),
                    train_tpr,
                    train_fpr,
                    heldout_tpr: safe_ratio(ftp, fpos),
                    heldout_fpr: safe_ratio(ffp, fneg),
                });
                fold_values.push(fm);
                (tp, fp, pos, neg) = (tp + ftp, fp + ffp, pos + fpos, neg + fneg);
                pooled.extend(scores);
                models.push(FoldModel {
                    fold: f.fold_index,
                    model: TrainedModel::Greedy(rules),
                });
            }
            greedy_summary = Some(GreedySummary {
                heldout_tpr: safe_ratio(tp, pos),
                heldout_fpr: safe_ratio(fp, neg),
                max_train_fpr,
                fpr_budget: cfg.fpr_budget,
            });
            (pooled, 0)
        }
    };

    let mut pooled = pooled;
    pooled.sort_by_id();
    let (auc, tpr_at) = summarize(&pooled, fpr_levels)?;
    let defined: Vec<T> = fold_values.iter().filter_map(|f| f.auc).collect();
    let fold_mean_auc = (!defined.is_empty()).then(|| {
        defined.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize_lossy(defined.len())
    });

    Ok(CvOutcome {
        row: MetricRow {
            attack: attack.name().to_owned(),
            dataset: corpus.name().to_owned(),
            auc,
            tpr_at,
            fold_mean_auc,
            fold_values,
            n_scored: pooled.len(),
            n_abstained,
            n_no_date,
            greedy: greedy_summary,
        },
        models,
        scores: pooled,
    })
}

fn safe_ratio<T: Scalar>(num: usize, den: usize) -> T {
    if den == 0 {
        T::zero()
    } else {
        T::ratio(num, den)
    }
}

fn truncated(attack: &AttackSpec, s: &Sample) -> Sample {
    Sample {
        text: input(attack, s).to_owned(),
        ..s.clone()
    }
}

/// Ids covered by the test sides of `splits`.
pub fn tested_ids(splits: &[FoldSplit]) -> BTreeSet<String> {
    splits
        .iter()
        .flat_map(|f| f.test_ids.iter().cloned())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{BowConfig, DateAttackConfig, DateMode, GreedyConfig, NoDatePolicy};
    use crate::corpus::Label;
    use crate::textkit::{FeatureConfig, NGramKind};

    fn dated_corpus() -> LabeledCorpus {
        let mut samples = Vec::new();
        for i in 0..10 {
            samples.push(Sample::new(
                format!("m{i:02}"),
                format!("event of {}", 1990 + i),
                Label::Member,
            ));
            samples.push(Sample::new(
                format!("n{i:02}"),
                format!("event of {}", 2023 + i % 2),
                Label::NonMember,
            ));
        }
        LabeledCorpus::new("dated", samples).unwrap()
    }

    #[test]
    fn date_attack_perfect_separation() {
        let attack = AttackSpec::new(AttackKind::Date(
            DateAttackConfig::new(DateMode::TextDates, 2023).unwrap(),
        ));
        let out: CvOutcome<f64> = cross_validate(
            &attack,
            &dated_corpus(),
            &SplitSpec::KFold { k: 5 },
            0,
            &[0.01, 0.05],
        )
        .unwrap();
        assert_eq!(out.row.auc, 1.0);
        assert_eq!(out.row.tpr_at(0.05), Some(1.0));
        assert_eq!(out.row.fold_values.len(), 5);
        assert_eq!(out.row.n_scored, 20);
        assert_eq!(out.row.n_no_date, Some(0));
        assert!(out.models.is_empty());
    }

    #[test]
    fn date_abstentions_are_counted() {
        let mut samples: Vec<Sample> = dated_corpus().samples().to_vec();
        samples.push(Sample::new("x", "undated text", Label::Member));
        let corpus = LabeledCorpus::new("d", samples).unwrap();
        let mut cfg = DateAttackConfig::new(DateMode::TextDates, 2023).unwrap();
        cfg.no_date_policy = NoDatePolicy::Abstain;
        let out: CvOutcome<f64> = cross_validate(
            &AttackSpec::new(AttackKind::Date(cfg)),
            &corpus,
            &SplitSpec::KFold { k: 2 },
            0,
            &[0.05],
        )
        .unwrap();
        assert_eq!((out.row.n_scored, out.row.n_abstained), (20, 1));
        assert_eq!(out.row.n_no_date, Some(1));
    }

    #[test]
    fn date_holdout_scores_test_side_only() {
        let out: CvOutcome<f64> = cross_validate(
            &AttackSpec::new(AttackKind::Date(
                DateAttackConfig::new(DateMode::TextDates, 2023).unwrap(),
            )),
            &dated_corpus(),
            &SplitSpec::Holdout {
                train_fraction: 0.7,
            },
            0,
            &[0.05],
        )
        .unwrap();
        assert_eq!(out.row.n_scored, 6);
        assert_eq!(out.row.fold_values[0].n_test, 6);
    }

    fn marker_corpus() -> LabeledCorpus {
        let mut samples = Vec::new();
        for i in 0..40 {
            let extra = if i % 2 == 0 { " marker" } else { "" };
            samples.push(Sample::new(
                format!("m{i:02}"),
                format!("shared words here{extra}"),
                Label::Member,
            ));
            samples.push(Sample::new(
                format!("n{i:02}"),
                "shared words here",
                Label::NonMember,
            ));
        }
        LabeledCorpus::new("marker", samples).unwrap()
    }

    #[test]
    fn greedy_reports_train_and_heldout_fpr() {
        let cfg =
            GreedyConfig::new(FeatureConfig::new(NGramKind::Word, 1, 2).unwrap(), 0.01).unwrap();
        let out: CvOutcome<f64> = cross_validate(
            &AttackSpec::new(AttackKind::Greedy(cfg)),
            &marker_corpus(),
            &SplitSpec::KFold { k: 4 },
            1,
            &[0.01],
        )
        .unwrap();
        let g = out.row.greedy.unwrap();
        assert_eq!(g.heldout_fpr, 0.0);
        assert_eq!(g.heldout_tpr, 0.5);
        assert!(g.max_train_fpr <= 0.01);
        for f in &out.row.fold_values {
            let fg = f.greedy.unwrap();
            assert!(fg.train_fpr <= 0.01);
            assert_eq!(fg.n_rules, 1);
        }
        assert_eq!(out.row.tpr_at(0.01), Some(0.5));
        assert_eq!(out.models.len(), 4);
    }

    #[test]
    fn bow_is_deterministic_and_pools_everything() {
        let attack = AttackSpec::new(AttackKind::Bow(BowConfig::default()));
        let corpus = marker_corpus();
        let run = || -> CvOutcome<f64> {
            cross_validate(&attack, &corpus, &SplitSpec::KFold { k: 5 }, 3, &[0.05]).unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.row, b.row);
        assert_eq!(a.scores, b.scores);
        assert_eq!(a.scores.len(), corpus.len());
        let ids: Vec<_> = a.scores.entries().iter().map(|e| e.id.clone()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        let score = |id: &str| {
            a.scores
                .entries()
                .iter()
                .find(|e| e.id == id)
                .unwrap()
                .score
        };
        let best_nonmember = (0..40)
            .map(|i| score(&format!("n{i:02}")))
            .fold(f64::MIN, f64::max);
        assert!((0..40)
            .step_by(2)
            .all(|i| score(&format!("m{i:02}")) > best_nonmember));
        assert!(a.row.auc >= 0.5);
    }

    #[test]
    fn holdout_and_head() {
        let attack = AttackSpec::new(AttackKind::Bow(BowConfig {
            min_df: 1,
            ..BowConfig::default()
        }))
        .with_head(5);
        let out: CvOutcome<f64> = cross_validate(
            &attack,
            &marker_corpus(),
            &SplitSpec::Holdout {
                train_fraction: 0.8,
            },
            0,
            &[0.05],
        )
        .unwrap();
        // The marker lies beyond the first five characters, so nothing separates.
        assert_eq!(out.row.auc, 0.5);
        assert_eq!(out.row.n_scored, 16);
    }

    #[test]
    fn bad_fpr_level_rejected() {
        let attack = AttackSpec::new(AttackKind::Bow(BowConfig::default()));
        assert!(cross_validate::<f64>(
            &attack,
            &marker_corpus(),
            &SplitSpec::KFold { k: 2 },
            0,
            &[1.5]
        )
        .is_err());
    }
}
