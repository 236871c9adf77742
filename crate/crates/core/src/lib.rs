//! Blind membership-inference audits.
//!
//! Membership-inference (MI) evaluation sets pair texts that a model was
//! trained on ("members") with texts it was not ("nonmembers"). If the two
//! populations differ in distribution, an attack that never looks at the
//! model can already tell them apart. This crate runs such blind attacks
//! (date thresholding, a bag-of-words classifier, greedy rare n-gram rules)
//! and reports AUC ROC and TPR at fixed low FPR.
//!
//! Numeric code is generic over [`Scalar`] (`f32` / `f64`); the `*F64` aliases
//! below are the instantiations used by the CLI.

pub mod attacks;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod rng;
pub mod scalar;
pub mod synth;
pub mod textkit;

pub use corpus::{
    group_disjoint_split, holdout_split, kfold_split, FoldSplit, Label, LabeledCorpus, Sample,
};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ScoreSetF64 = metrics::ScoreSet<f64>;
pub type ScoreSetF32 = metrics::ScoreSet<f32>;
pub type RocCurveF64 = metrics::RocCurve<f64>;
pub type RocCurveF32 = metrics::RocCurve<f32>;
pub type BowModelF64 = attacks::BowModel<f64>;
pub type BowModelF32 = attacks::BowModel<f32>;
pub type GreedyRuleSetF64 = attacks::GreedyRuleSet<f64>;
pub type GreedyRuleSetF32 = attacks::GreedyRuleSet<f32>;
pub type MetricRowF64 = metrics::MetricRow<f64>;
pub type CvOutcomeF64 = metrics::CvOutcome<f64>;
pub type ProjectedPointF64 = metrics::ProjectedPoint<f64>;

/// Tool version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
