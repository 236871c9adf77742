//! Independent reference implementations, deliberately naive.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeSet;

use mia_audit::rng::SplitMix64;

/// Mann-Whitney statistic: P(member > nonmember) + P(tie) / 2, by pairs.
pub fn pairwise_auc(members: &[f64], nonmembers: &[f64]) -> f64 {
    let mut twice = 0u64;
    for &m in members {
        for &n in nonmembers {
            twice += match m.partial_cmp(&n).unwrap() {
                Ordering::Greater => 2,
                Ordering::Equal => 1,
                Ordering::Less => 0,
            };
        }
    }
    twice as f64 / (2 * members.len() * nonmembers.len()) as f64
}

/// Non-negative rational; `n / 0` is "infinite" and beats every finite value.
#[derive(Debug, Clone, Copy)]
struct Frac {
    num: u64,
    den: u64,
}

impl Frac {
    fn cmp(self, other: Frac) -> Ordering {
        match (self.den, other.den) {
            (0, 0) => Ordering::Equal,
            (0, _) => Ordering::Greater,
            (_, 0) => Ordering::Less,
            _ => (self.num * other.den).cmp(&(other.num * self.den)),
        }
    }
}

/// One sample of a greedy instance: a set of candidate features and a label.
#[derive(Debug, Clone)]
pub struct Item {
    pub features: BTreeSet<String>,
    pub member: bool,
}

/// Literal residual greedy loop. Each round recounts every candidate over the
/// still-uncovered samples, keeps those covering at least one member, picks
/// the highest members/nonmembers ratio (zero nonmembers first, then more
/// members, then the lexicographically smaller key) and stops before the
/// pick that would push the cumulative training FPR over the budget.
pub fn naive_greedy(items: &[Item], budget: f64) -> Vec<String> {
    let total_nonmembers = items.iter().filter(|i| !i.member).count();
    let candidates: BTreeSet<&String> = items.iter().flat_map(|i| &i.features).collect();
    let mut covered = vec![false; items.len()];
    let mut fp = 0usize;
    let mut picked = Vec::new();
    loop {
        let mut best: Option<(Frac, u64, &String, usize)> = None;
        for &c in &candidates {
            let (mut m, mut n) = (0u64, 0u64);
            for (i, item) in items.iter().enumerate() {
                if !covered[i] && item.features.contains(c) {
                    if item.member {
                        m += 1;
                    } else {
                        n += 1;
                    }
                }
            }
            if m == 0 {
                continue;
            }
            let score = Frac { num: m, den: n };
            let better = match &best {
                None => true,
                Some((bs, bm, bk, _)) => match score.cmp(*bs) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => m > *bm || (m == *bm && c < *bk),
                },
            };
            if better {
                best = Some((score, m, c, n as usize));
            }
        }
        let Some((_, _, key, n)) = best else { break };
        if (fp + n) as f64 / total_nonmembers as f64 > budget {
            break;
        }
        fp += n;
        picked.push(key.clone());
        for (i, item) in items.iter().enumerate() {
            if item.features.contains(key) {
                covered[i] = true;
            }
        }
    }
    picked
}

/// Random instance over single-letter words `a..`, as texts and items. Both
/// classes are always present.
pub fn random_greedy_instance(rng: &mut SplitMix64) -> (Vec<(String, bool)>, Vec<Item>) {
    let n_samples = 2 + rng.below(11) as usize;
    let n_cand = 1 + rng.below(6) as usize;
    let mut out = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let member = match i {
            0 => true,
            1 => false,
            _ => rng.bernoulli(0.5),
        };
        let words: Vec<String> = (0..n_cand)
            .filter(|_| rng.bernoulli(0.4))
            .map(|c| ((b'a' + c as u8) as char).to_string())
            .collect();
        out.push((words.join(" "), member));
    }
    let items = out
        .iter()
        .map(|(t, m)| Item {
            features: t.split_whitespace().map(str::to_owned).collect(),
            member: *m,
        })
        .collect();
    (out, items)
}

/// Random score lists with 2..=10 entries per class; small integer-valued
/// scores so ties are frequent.
pub fn random_score_lists(rng: &mut SplitMix64) -> (Vec<f64>, Vec<f64>) {
    let draw = |rng: &mut SplitMix64| -> Vec<f64> {
        let n = 2 + rng.below(9) as usize;
        (0..n).map(|_| rng.below(8) as f64 / 4.0 - 1.0).collect()
    };
    let m = draw(rng);
    let n = draw(rng);
    (m, n)
}
