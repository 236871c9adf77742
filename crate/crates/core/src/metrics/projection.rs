//! Two-dimensional PCA projection of bag-of-words count vectors, for
//! visualizing member / nonmember separation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Label, LabeledCorpus};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::textkit::{tokenize, TokenizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub tokenizer: TokenizerConfig,
    pub min_df: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            tokenizer: TokenizerConfig::default(),
            min_df: 1,
            max_iterations: 200,
            tolerance: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint<T> {
    pub id: String,
    pub label: Label,
    pub x: T,
    pub y: T,
}

type SparseRow<T> = Vec<(usize, T)>;

struct Centered<'a, T> {
    rows: &'a [SparseRow<T>],
    mean: &'a [T],
}

impl<T: Scalar> Centered<'_, T> {
    fn project(&self, v: &[T]) -> Vec<T> {
        let mean_dot = dot(self.mean, v);
        self.rows
            .iter()
            .map(|r| r.iter().fold(T::zero(), |acc, &(j, x)| acc + x * v[j]) - mean_dot)
            .collect()
    }

    /// `Xc^T Xc v`.
    fn gram(&self, v: &[T]) -> Vec<T> {
        let u = self.project(v);
        let u_sum = u.iter().fold(T::zero(), |a, &b| a + b);
        let mut w: Vec<T> = self.mean.iter().map(|&m| -m * u_sum).collect();
        for (r, &ui) in self.rows.iter().zip(&u) {
            for &(j, x) in r {
                w[j] = w[j] + x * ui;
            }
        }
        w
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn orthogonalize<T: Scalar>(w: &mut [T], against: &[Vec<T>]) {
    for q in against {
        let c = dot(w, q);
        for (wi, &qi) in w.iter_mut().zip(q) {
            *wi = *wi - c * qi;
        }
    }
}

/// Leading eigenvector of `Xc^T Xc` orthogonal to `against`, with its
/// eigenvalue. The sign makes the largest-magnitude loading positive.
fn power_iteration<T: Scalar>(
    op: &Centered<'_, T>,
    against: &[Vec<T>],
    dim: usize,
    cfg: &ProjectionConfig,
    rng: &mut SplitMix64,
) -> (Vec<T>, T) {
    let mut v: Vec<T> = (0..dim)
        .map(|_| T::from_f64_lossy(2.0 * rng.next_f64() - 1.0))
        .collect();
    orthogonalize(&mut v, against);
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x = *x / n);

    let tol = T::from_f64_lossy(cfg.tolerance);
    let mut lambda = T::zero();
    for _ in 0..cfg.max_iterations {
        let mut w = op.gram(&v);
        orthogonalize(&mut w, against);
        lambda = norm(&w);
        if lambda <= T::epsilon() {
            return (v, T::zero());
        }
        w.iter_mut().for_each(|x| *x = *x / lambda);
        let delta = w
            .iter()
            .zip(&v)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt();
        v = w;
        if delta < tol {
            break;
        }
    }

    let mut pivot = 0;
    for (j, x) in v.iter().enumerate() {
        if x.abs() > v[pivot].abs() {
            pivot = j;
        }
    }
    if v[pivot] < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    (v, lambda)
}

/// Coordinates of every sample on the top two principal directions of its
/// mean-centered token-count vector.
pub fn project_2d<T: Scalar>(
    corpus: &LabeledCorpus,
    cfg: &ProjectionConfig,
) -> Result<Vec<ProjectedPoint<T>>> {
    if corpus.len() < 3 {
        return Err(Error::Degenerate(format!(
            "projection needs at least 3 samples, got {}",
            corpus.len()
        )));
    }
    let docs: Vec<BTreeMap<String, usize>> = corpus
        .samples()
        .iter()
        .map(|s| {
            let mut c = BTreeMap::new();
            for t in tokenize(&s.text, &cfg.tokenizer) {
                *c.entry(t).or_default() += 1;
            }
            c
        })
        .collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for d in &docs {
        for t in d.keys() {
            *df.entry(t.as_str()).or_default() += 1;
        }
    }
    let vocab: BTreeMap<&str, usize> = df
        .into_iter()
        .filter(|&(_, d)| d >= cfg.min_df.max(1))
        .enumerate()
        .map(|(i, (t, _))| (t, i))
        .collect();
    let dim = vocab.len();

    let rows: Vec<SparseRow<T>> = docs
        .iter()
        .map(|d| {
            d.iter()
                .filter_map(|(t, &c)| vocab.get(t.as_str()).map(|&j| (j, T::from_usize_lossy(c))))
                .collect()
        })
        .collect();
    if dim == 0 || rows.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::Degenerate(
            "all samples have identical count vectors".into(),
        ));
    }

    let n = T::from_usize_lossy(rows.len());
    let mut mean = vec![T::zero(); dim];
    for r in &rows {
        for &(j, x) in r {
            mean[j] = mean[j] + x;
        }
    }
    mean.iter_mut().for_each(|m| *m = *m / n);

    let op = Centered {
        rows: &rows,
        mean: &mean,
    };
    let mut rng = SplitMix64::new(cfg.seed);
    let (pc1, l1) = power_iteration(&op, &[], dim, cfg, &mut rng);
    let (pc2, l2) = power_iteration(&op, std::slice::from_ref(&pc1), dim, cfg, &mut rng);

    let xs = op.project(&pc1);
    let ys = if l2 <= l1 * T::from_f64_lossy(1e-12) {
        vec![T::zero(); rows.len()]
    } else {
        op.project(&pc2)
    };
    Ok(corpus
        .samples()
        .iter()
        .zip(xs.into_iter().zip(ys))
        .map(|(s, (x, y))| ProjectedPoint {
            id: s.id.clone(),
            label: s.label,
            x,
            y,
        })
        .collect())
}
