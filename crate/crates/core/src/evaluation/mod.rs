//! Stratified k-fold cross-validation with pooled out-of-fold metrics.

mod cv;
mod folds;
mod metrics;
mod report;

pub use cv::{cross_validate, cross_validate_with, CvConfig, EvalReport, FoldMetrics, Protocol};
pub use folds::{stratified_kfold, FoldPlan};
pub use metrics::{confusion_matrix, metrics_from_confusion, ClassMetrics, MetricSet};
pub use report::{parse_external_rows, render_report, ConfusionOutput, ExternalRow, RenderedReport};
