//! ROC / AUC / TPR-at-FPR, cross-validated evaluation, and 2-D projection.

pub mod cv;
pub mod projection;
pub mod roc;

pub use cv::{
    cross_validate, CvOutcome, FoldMetrics, FoldModel, GreedyFoldStats, GreedySummary, MetricRow,
    SplitSpec, TprAt, TrainedModel,
};
pub use projection::{project_2d, ProjectedPoint, ProjectionConfig};
pub use roc::{auc, roc_curve, tpr_at_fpr, RocCurve, RocPoint, ScoreSet, ScoredSample};
