//! Classifiers: multinomial logistic regression, shrinkage LDA and the
//! stacked logistic-regression ensemble, plus fitted pipelines and EIM1 I/O.

mod ensemble;
mod io;
mod lda;
mod logreg;
mod pipeline;

pub use ensemble::{ensemble_train, EnsembleParams, StackEnsemble};
pub use io::{load_model, read_model, save_model, write_model, ModelFile, EIM1_MAGIC, EIM1_VERSION};
pub use lda::{lda_train, LdaModel};
pub use logreg::{argmax_rows, logreg_loss_grad, logreg_train, softmax_rows, LogRegModel, LogRegParams, TrainRecord};
pub use pipeline::{FittedModel, FittedPipeline, FittedSelector, ModelSpec, PipelineSpec, SelectorSpec};
