//! Motion-artifact screening and drift removal.

mod artifacts;
mod vmd;

pub use artifacts::{detect_artifacts, remove_artifacts, ArtifactMask, DetectionPolicy, FlagDiagnostic};
pub use vmd::{vmd, Extension, VmdParams, VmdResult};
