//! Subject-specific EEG inner-speech classification.
//!
//! The crate covers the whole batch pipeline:
//!
//! ```text
//! EIT1 trials ──► preprocess (robust screening, VMD drift removal)
//!             ──► features   (TD / FD / TFD catalog per channel)
//!             ──► selection  (MRMR and univariate rankers, PCA)
//!             ──► models     (logistic regression, LDA, stacked LR ensemble)
//!             ──► evaluation (stratified k-fold, pooled out-of-fold metrics)
//! ```
//!
//! plus [`topomap`] for ERP scalp maps and a ground-truth synthetic generator
//! in [`trialset`] for end-to-end checks without the recorded dataset.

mod binio;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod models;
pub mod preprocess;
pub mod selection;
pub mod signal;
pub mod stats;
pub mod topomap;
pub mod trialset;

pub use error::{Error, Result, ResultExt};
pub use preprocess::{detect_artifacts, remove_artifacts, vmd, ArtifactMask, VmdParams, VmdResult};
pub use trialset::{
    generate_synthetic, load_trialset, save_trialset, slice_interval, GroundTruth, Interval,
    SynthConfig, TrialSet,
};
pub use evaluation::{
    cross_validate, metrics_from_confusion, render_report, stratified_kfold, CvConfig, EvalReport,
    MetricSet, Protocol,
};
pub use features::{build_feature_matrix, CatalogConfig, FeatureMatrix};
pub use models::{FittedPipeline, ModelSpec, PipelineSpec, SelectorSpec};
pub use selection::{mrmr_select, rank_features, MrmrVariant, RankMethod, RankedFeatures};
pub use topomap::{compute_erp, render_topomap, ErpSummary, ScalpField};
