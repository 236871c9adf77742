//! Greedy rare n-gram selection.
//!
//! Candidates are the n-grams present in at least one training member. At
//! each step the candidate with the best TPR-to-FPR ratio is added to the rule
//! list, and a sample is predicted member iff it contains any rule n-gram.
//!
//! Ranking, for candidates covering `m` members and `n` nonmembers among the
//! samples still considered:
//!
//! 1. candidates with `n == 0` before all others; among them larger `m` first;
//! 2. otherwise larger `m / n` first (compared exactly as `m1 * n2` vs `m2 * n1`),
//!    then larger `m`;
//! 3. remaining ties by ascending n-gram string.
//!
//! Selection stops before the first pick that would push the cumulative
//! training FPR above the budget, or when no candidate covers a new member.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{ClassCounts, Label, Sample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::textkit::{tokenize, FeatureConfig, NGram, NGramKind};

pub const GREEDY_RULES_FORMAT: &str = "mia-audit/greedy-rules/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreedyStrategy {
    /// Re-rank on the training samples not yet covered after every pick.
    #[default]
    Residual,
    /// Rank once on the full training split, then walk that order, skipping
    /// n-grams that cover no new member.
    Static,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub features: FeatureConfig,
    pub fpr_budget: f64,
    #[serde(default)]
    pub strategy: GreedyStrategy,
}

impl GreedyConfig {
    pub fn new(features: FeatureConfig, fpr_budget: f64) -> Result<Self> {
        let cfg = Self {
            features,
            fpr_budget,
            strategy: GreedyStrategy::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.features.range.validate()?;
        if !(self.fpr_budget > 0.0 && self.fpr_budget < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fpr budget {} must be in (0, 1)",
                self.fpr_budget
            )));
        }
        Ok(())
    }
}

/// Cumulative training coverage after each rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TracePoint<T> {
    pub tpr: T,
    pub fpr: T,
    pub members_covered: usize,
    pub nonmembers_covered: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GreedyRulesDocument<T>", into = "GreedyRulesDocument<T>")]
#[serde(bound = "T: Scalar")]
pub struct GreedyRuleSet<T: Scalar> {
    pub rules: Vec<NGram>,
    pub train_tpr_fpr_trace: Vec<TracePoint<T>>,
    pub fpr_budget: f64,
    pub features: FeatureConfig,
    pub strategy: GreedyStrategy,
    pub train_counts: ClassCounts,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GreedyRulesDocument<T> {
    pub format: String,
    pub rules: Vec<NGram>,
    pub train_tpr_fpr_trace: Vec<TracePoint<T>>,
    pub fpr_budget: f64,
    pub features: FeatureConfig,
    pub strategy: GreedyStrategy,
    pub train_counts: ClassCounts,
}

impl<T: Scalar> From<GreedyRuleSet<T>> for GreedyRulesDocument<T> {
    fn from(r: GreedyRuleSet<T>) -> Self {
        Self {
            format: GREEDY_RULES_FORMAT.to_owned(),
            rules: r.rules,
            train_tpr_fpr_trace: r.train_tpr_fpr_trace,
            fpr_budget: r.fpr_budget,
            features: r.features,
            strategy: r.strategy,
            train_counts: r.train_counts,
        }
    }
}

impl<T: Scalar> TryFrom<GreedyRulesDocument<T>> for GreedyRuleSet<T> {
    type Error = String;

    fn try_from(d: GreedyRulesDocument<T>) -> Result<Self, String> {
        if d.format != GREEDY_RULES_FORMAT {
            return Err(format!("unsupported rule-set format {:?}", d.format));
        }
        if d.rules.len() != d.train_tpr_fpr_trace.len() {
            return Err("rules and trace lengths differ".into());
        }
        Ok(Self {
            rules: d.rules,
            train_tpr_fpr_trace: d.train_tpr_fpr_trace,
            fpr_budget: d.fpr_budget,
            features: d.features,
            strategy: d.strategy,
            train_counts: d.train_counts,
        })
    }
}

impl<T: Scalar> GreedyRuleSet<T> {
    /// Index of the first rule contained in `text`.
    pub fn first_match(&self, text: &str) -> Option<usize> {
        match self.features.kind {
            // A character n-gram is present iff it occurs as a substring.
            NGramKind::Char => self.rules.iter().position(|r| text.contains(&r.text)),
            NGramKind::Word => {
                let tokens = tokenize(text, &self.features.tokenizer);
                let mut windows: HashSet<String> = HashSet::new();
                let (lo, hi) = (self.features.range.lo, self.features.range.hi);
                for start in 0..tokens.len() {
                    for n in lo..=hi.min(tokens.len() - start) {
                        windows.insert(tokens[start..start + n].join(" "));
                    }
                }
                self.rules.iter().position(|r| windows.contains(&r.text))
            }
        }
    }

    pub fn predict(&self, text: &str) -> bool {
        self.first_match(text).is_some()
    }

    /// `1 / (1 + i)` when rule `i` is the first one present, `0` when none is.
    /// Thresholding at any value in `(0, 1]` recovers a prefix of the rule
    /// list; `> 0` is exactly [`GreedyRuleSet::predict`].
    pub fn rank_score(&self, text: &str) -> T {
        match self.first_match(text) {
            Some(i) => T::one() / T::from_usize_lossy(i + 1),
            None => T::zero(),
        }
    }

    /// Final cumulative training `(tpr, fpr)`; `(0, 0)` for an empty rule set.
    pub fn train_operating_point(&self) -> (T, T) {
        self.train_tpr_fpr_trace
            .last()
            .map(|p| (p.tpr, p.fpr))
            .unwrap_or((T::zero(), T::zero()))
    }
}

/// Any-of prediction with a 1/0 score.
pub fn apply_rules<T: Scalar>(rules: &GreedyRuleSet<T>, text: &str) -> (bool, T) {
    let member = rules.predict(text);
    (member, if member { T::one() } else { T::zero() })
}

/// Ranks candidate `a` against `b`; `Less` means `a` is picked first.
pub(crate) fn rank_cmp((ma, na, ka): (u64, u64, &str), (mb, nb, kb): (u64, u64, &str)) -> Ordering {
    match (na == 0, nb == 0) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => mb.cmp(&ma).then_with(|| ka.cmp(kb)),
        (false, false) => (u128::from(mb) * u128::from(na))
            .cmp(&(u128::from(ma) * u128::from(nb)))
            .then_with(|| mb.cmp(&ma))
            .then_with(|| ka.cmp(kb)),
    }
}

struct Index<'a> {
    keys: Vec<&'a str>,
    postings: Vec<Vec<u32>>,
    sample_features: Vec<Vec<u32>>,
}

impl<'a> Index<'a> {
    /// Interns n-grams present in at least one member.
    fn build(labels: &[Label], sets: &'a [HashSet<String>]) -> Self {
        let mut ids: HashMap<&'a str, u32> = HashMap::new();
        let mut keys: Vec<&'a str> = Vec::new();
        for (label, set) in labels.iter().zip(sets) {
            if label.is_member() {
                for k in set {
                    ids.entry(k.as_str()).or_insert_with(|| {
                        keys.push(k.as_str());
                        (keys.len() - 1) as u32
                    });
                }
            }
        }
        let mut postings = vec![Vec::new(); keys.len()];
        let mut sample_features = Vec::with_capacity(sets.len());
        for (s, set) in sets.iter().enumerate() {
            let mut f: Vec<u32> = set
                .iter()
                .filter_map(|k| ids.get(k.as_str()).copied())
                .collect();
            f.sort_unstable();
            for &c in &f {
                postings[c as usize].push(s as u32);
            }
            sample_features.push(f);
        }
        Self {
            keys,
            postings,
            sample_features,
        }
    }
}

struct Coverage {
    covered: Vec<bool>,
    members: usize,
    nonmembers: usize,
}

/// Returns the selected n-gram strings in pick order.
fn select(
    labels: &[Label],
    sets: &[HashSet<String>],
    fpr_budget: f64,
    strategy: GreedyStrategy,
) -> Vec<String> {
    let total_nonmembers = labels.iter().filter(|l| !l.is_member()).count();
    let index = Index::build(labels, sets);
    let n_cand = index.keys.len();

    // Coverage counts among samples not yet covered.
    let mut member_cnt = vec![0u64; n_cand];
    let mut nonmember_cnt = vec![0u64; n_cand];
    for (c, post) in index.postings.iter().enumerate() {
        for &s in post {
            match labels[s as usize] {
                Label::Member => member_cnt[c] += 1,
                Label::NonMember => nonmember_cnt[c] += 1,
            }
        }
    }

    let exceeds_budget = |fp: usize| fp as f64 / total_nonmembers as f64 > fpr_budget;
    let mut cov = Coverage {
        covered: vec![false; labels.len()],
        members: 0,
        nonmembers: 0,
    };
    let mut rules = Vec::new();

    let cover =
        |c: usize, cov: &mut Coverage, member_cnt: &mut [u64], nonmember_cnt: &mut [u64]| {
            for &s in &index.postings[c] {
                let s = s as usize;
                if cov.covered[s] {
                    continue;
                }
                cov.covered[s] = true;
                let cnt = match labels[s] {
                    Label::Member => {
                        cov.members += 1;
                        &mut *member_cnt
                    }
                    Label::NonMember => {
                        cov.nonmembers += 1;
                        &mut *nonmember_cnt
                    }
                };
                for &f in &index.sample_features[s] {
                    cnt[f as usize] -= 1;
                }
            }
        };

    match strategy {
        GreedyStrategy::Residual => {
            let mut alive: Vec<usize> = (0..n_cand).collect();
            loop {
                alive.retain(|&c| member_cnt[c] > 0);
                let best = alive.iter().copied().min_by(|&a, &b| {
                    rank_cmp(
                        (member_cnt[a], nonmember_cnt[a], index.keys[a]),
                        (member_cnt[b], nonmember_cnt[b], index.keys[b]),
                    )
                });
                let Some(best) = best else { break };
                if exceeds_budget(cov.nonmembers + nonmember_cnt[best] as usize) {
                    break;
                }
                rules.push(index.keys[best].to_owned());
                cover(best, &mut cov, &mut member_cnt, &mut nonmember_cnt);
            }
        }
        GreedyStrategy::Static => {
            let mut order: Vec<usize> = (0..n_cand).collect();
            let initial: Vec<(u64, u64)> = (0..n_cand)
                .map(|c| (member_cnt[c], nonmember_cnt[c]))
                .collect();
            order.sort_by(|&a, &b| {
                rank_cmp(
                    (initial[a].0, initial[a].1, index.keys[a]),
                    (initial[b].0, initial[b].1, index.keys[b]),
                )
            });
            for c in order {
                if member_cnt[c] == 0 {
                    continue;
                }
                if exceeds_budget(cov.nonmembers + nonmember_cnt[c] as usize) {
                    break;
                }
                rules.push(index.keys[c].to_owned());
                cover(c, &mut cov, &mut member_cnt, &mut nonmember_cnt);
            }
        }
    }
    rules
}

pub fn greedy_select<T: Scalar>(
    train: &[&Sample],
    config: &GreedyConfig,
) -> Result<GreedyRuleSet<T>> {
    config.validate()?;
    let counts = ClassCounts::of(train.iter().map(|s| &s.label));
    counts.require_both()?;

    let labels: Vec<Label> = train.iter().map(|s| s.label).collect();
    let sets: Vec<HashSet<String>> = train
        .iter()
        .map(|s| config.features.keys(&s.text))
        .collect();
    let picked = select(&labels, &sets, config.fpr_budget, config.strategy);

    let mut covered = vec![false; train.len()];
    let (mut m, mut n) = (0usize, 0usize);
    let mut trace = Vec::with_capacity(picked.len());
    for rule in &picked {
        for (i, set) in sets.iter().enumerate() {
            if !covered[i] && set.contains(rule) {
                covered[i] = true;
                if labels[i].is_member() {
                    m += 1;
                } else {
                    n += 1;
                }
            }
        }
        trace.push(TracePoint {
            tpr: T::ratio(m, counts.members),
            fpr: T::ratio(n, counts.nonmembers),
            members_covered: m,
            nonmembers_covered: n,
        });
    }

    Ok(GreedyRuleSet {
        rules: picked
            .into_iter()
            .map(|text| NGram {
                kind: config.features.kind,
                text,
            })
            .collect(),
        train_tpr_fpr_trace: trace,
        fpr_budget: config.fpr_budget,
        features: config.features,
        strategy: config.strategy,
        train_counts: counts,
    })
}
