use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::evaluation::{cross_validate, CvConfig};
use crate::features::FeatureMatrix;
use crate::models::PipelineSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub selector: String,
    pub rows: Vec<SweepRow>,
    /// Index into `rows` of the highest accuracy (smallest K on ties).
    pub best: usize,
}

impl SweepTable {
    pub fn best_row(&self) -> &SweepRow {
        &self.rows[self.best]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,accuracy,macro_f1,best\n");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(out, "{},{:.4},{:.4},{}", r.k, r.accuracy, r.macro_f1, u8::from(i == self.best));
        }
        out
    }
}

/// Cross-validated accuracy of `spec` with its selector resized to each K.
pub fn k_sweep(fm: &FeatureMatrix, ks: &[usize], spec: &PipelineSpec, cv: &CvConfig) -> Result<SweepTable> {
    if ks.is_empty() {
        return Err(Error::invalid_arg("empty K list"));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let p = fm.n_features();
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > p) {
        return Err(Error::invalid_arg(format!("K = {k} outside 1..={p}")));
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in &ks {
        let s = PipelineSpec {
            selector: spec.selector.with_k(k)?,
            ..spec.clone()
        };
        let r = cross_validate(fm, &s, cv).map_err(|e| e.context(format!("K = {k}")))?;
        rows.push(SweepRow {
            k,
            accuracy: r.metrics.accuracy,
            macro_f1: r.metrics.macro_f1,
        });
    }
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.accuracy > rows[best].accuracy {
            best = i;
        }
    }
    Ok(SweepTable {
        selector: spec.selector.describe(),
        rows,
        best,
    })
}
