//! Per-channel TD / FD / TFD feature catalog and the trials × features matrix.

mod catalog;
mod fd;
mod io;
mod matrix;
mod td;
mod tfd;

pub use catalog::{definition, CatalogConfig, Domain, FeatureDescriptor, TfdSpec, CATALOG_VERSION};
pub use fd::{band_feature_names, extract_fd, extract_fd_with, Band, FD_SCALAR_NAMES};
pub use io::{load_feature_matrix, read_feature_matrix, save_feature_matrix, write_feature_matrix, EITF_MAGIC, EITF_VERSION};
pub use matrix::{build_feature_matrix, FeatureMatrix, Scaler};
pub use td::{extract_td, TD_NAMES};
pub use tfd::{extract_tfd, TFD_STATS};

/// Named feature values of one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureValues {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl FeatureValues {
    pub(crate) fn new(names: &[&str], values: Vec<f64>) -> Self {
        debug_assert_eq!(names.len(), values.len());
        FeatureValues {
            names: names.iter().map(|s| s.to_string()).collect(),
            values,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
