//! ROC construction over membership scores (higher = more member-like).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::corpus::{ClassCounts, Label};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample<T> {
    pub id: String,
    pub label: Label,
    pub score: T,
}

/// Per-sample scores aligned with labels. Scores are always finite.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreSet<T> {
    entries: Vec<ScoredSample<T>>,
}

impl<T: Scalar> ScoreSet<T> {
    pub fn new(entries: Vec<ScoredSample<T>>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|e| !e.score.is_finite()) {
            return Err(Error::NonFiniteScore(bad.id.clone()));
        }
        Ok(Self { entries })
    }

    /// Scores from parallel member / nonmember slices; ids are `m<i>` / `n<i>`.
    pub fn from_classes(members: &[T], nonmembers: &[T]) -> Result<Self> {
        let tag = |prefix: char, label: Label| {
            move |(i, s): (usize, &T)| ScoredSample {
                id: format!("{prefix}{i}"),
                label,
                score: *s,
            }
        };
        let entries = members
            .iter()
            .enumerate()
            .map(tag('m', Label::Member))
            .chain(
                nonmembers
                    .iter()
                    .enumerate()
                    .map(tag('n', Label::NonMember)),
            )
            .collect();
        Self::new(entries)
    }

    pub fn push(&mut self, entry: ScoredSample<T>) -> Result<()> {
        if !entry.score.is_finite() {
            return Err(Error::NonFiniteScore(entry.id));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn extend(&mut self, other: ScoreSet<T>) {
        self.entries.extend(other.entries);
    }

    pub fn entries(&self) -> &[ScoredSample<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn counts(&self) -> ClassCounts {
        ClassCounts::of(self.entries.iter().map(|e| &e.label))
    }

    pub fn sort_by_id(&mut self) {
        self.entries.sort_by(|a, b| a.id.cmp(&b.id));
    }

    /// Entries whose id satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&str) -> bool) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|e| keep(&e.id))
                .cloned()
                .collect(),
        }
    }

    pub fn map_scores(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .map(|e| ScoredSample {
                    score: f(e.score),
                    ..e.clone()
                })
                .collect(),
        )
    }

    pub fn with_labels_swapped(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| ScoredSample {
                    label: e.label.flipped(),
                    ..e.clone()
                })
                .collect(),
        }
    }
}

/// One operating point: predict member for every score `>= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint<T> {
    pub threshold: T,
    pub fpr: T,
    pub tpr: T,
    pub true_positives: usize,
    pub false_positives: usize,
}

/// ROC curve from `(0, 0)` (threshold `+inf`) to `(1, 1)`, one point per
/// distinct score.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve<T> {
    points: Vec<RocPoint<T>>,
    positives: usize,
    negatives: usize,
}

impl<T: Scalar> RocCurve<T> {
    pub fn points(&self) -> &[RocPoint<T>] {
        &self.points
    }

    pub fn positives(&self) -> usize {
        self.positives
    }

    pub fn negatives(&self) -> usize {
        self.negatives
    }
}

pub fn roc_curve<T: Scalar>(scores: &ScoreSet<T>) -> Result<RocCurve<T>> {
    let counts = scores.counts();
    counts.require_both()?;
    let (p, n) = (counts.members, counts.nonmembers);

    let mut sorted: Vec<(T, bool)> = scores
        .entries()
        .iter()
        .map(|e| (e.score, e.label.is_member()))
        .collect();
    // Scores are finite, so partial_cmp never fails.
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

    let mut points = Vec::with_capacity(sorted.len() + 1);
    points.push(RocPoint {
        threshold: T::infinity(),
        fpr: T::zero(),
        tpr: T::zero(),
        true_positives: 0,
        false_positives: 0,
    });
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == threshold {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold,
            fpr: T::ratio(fp, n),
            tpr: T::ratio(tp, p),
            true_positives: tp,
            false_positives: fp,
        });
    }
    Ok(RocCurve {
        points,
        positives: p,
        negatives: n,
    })
}

/// Trapezoidal area under the curve. Accumulated in integer counts, so it
/// matches the pairwise statistic (ties count 1/2) up to one final rounding.
pub fn auc<T: Scalar>(curve: &RocCurve<T>) -> T {
    let twice_area: u128 = curve
        .points
        .windows(2)
        .map(|w| {
            let dx = (w[1].false_positives - w[0].false_positives) as u128;
            dx * (w[1].true_positives + w[0].true_positives) as u128
        })
        .sum();
    let denom = 2 * curve.positives as u128 * curve.negatives as u128;
    T::from_u128(twice_area).expect("finite") / T::from_u128(denom).expect("finite")
}

/// Largest TPR among realized operating points with FPR `<= target_fpr`;
/// no interpolation between points.
pub fn tpr_at_fpr<T: Scalar>(curve: &RocCurve<T>, target_fpr: T) -> T {
    curve
        .points
        .iter()
        .filter(|pt| pt.fpr <= target_fpr)
        .map(|pt| pt.tpr)
        .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(m: &[f64], n: &[f64]) -> RocCurve<f64> {
        roc_curve(&ScoreSet::from_classes(m, n).unwrap()).unwrap()
    }

    #[test]
    fn perfect_separation() {
        let c = curve(&[0.9, 0.8], &[0.7, 0.1]);
        assert!(c.points().iter().any(|p| p.fpr == 0.0 && p.tpr == 1.0));
        assert_eq!(auc(&c), 1.0);
        assert_eq!(tpr_at_fpr(&c, 0.01), 1.0);
    }

    #[test]
    fn all_ties_is_diagonal() {
        let c = curve(&[0.3, 0.3], &[0.3, 0.3, 0.3]);
        let pts: Vec<_> = c.points().iter().map(|p| (p.fpr, p.tpr)).collect();
        assert_eq!(pts, [(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(auc(&c), 0.5);
    }

    #[test]
    fn three_of_four_pairs() {
        // Pairs (m, n): (0.9,0.6) (0.9,0.2) (0.4,0.2) won, (0.4,0.6) lost.
        let c = curve(&[0.9, 0.4], &[0.6, 0.2]);
        assert_eq!(auc(&c), 0.75);
        assert_eq!(tpr_at_fpr(&c, 0.0), 0.5);
        assert_eq!(tpr_at_fpr(&c, 0.5), 1.0);
    }

    #[test]
    fn step_convention_on_diagonal() {
        let c = curve(&[1.0, 0.0], &[1.0, 0.0]);
        let fprs: Vec<_> = c.points().iter().map(|p| p.fpr).collect();
        assert_eq!(fprs, [0.0, 0.5, 1.0]);
        assert_eq!(tpr_at_fpr(&c, 0.05), 0.0);
        assert_eq!(auc(&c), 0.5);
    }

    #[test]
    fn endpoints_and_monotone() {
        let c = curve(&[0.5, 0.1, 0.9, 0.5], &[0.5, 0.2, 0.0]);
        let first = c.points().first().unwrap();
        let last = c.points().last().unwrap();
        assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in c.points().windows(2) {
            assert!(w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr);
        }
    }

    #[test]
    fn single_class_rejected() {
        let s = ScoreSet::from_classes(&[0.1f64, 0.2], &[]).unwrap();
        assert!(matches!(roc_curve(&s), Err(Error::SingleClass { .. })));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(ScoreSet::from_classes(&[f64::NAN], &[0.0]).is_err());
        assert!(ScoreSet::from_classes(&[0.0], &[f64::INFINITY]).is_err());
    }

    #[test]
    fn works_in_f32() {
        let s = ScoreSet::from_classes(&[0.9f32, 0.4], &[0.6, 0.2]).unwrap();
        assert_eq!(auc(&roc_curve(&s).unwrap()), 0.75f32);
    }
}
