//! Feature ranking (univariate and MRMR) and PCA projection.

mod mrmr;
mod pca;
mod rank;
mod sweep;

use std::fmt::Write as _;

use crate::features::FeatureDescriptor;

pub use mrmr::{mrmr_select, MrmrVariant};
pub use pca::{pca_apply, pca_fit, PcaTransform};
pub use rank::{rank_features, RankMethod, RankParams};
pub use sweep::{k_sweep, SweepRow, SweepTable};

/// Column indices ordered best first, with the score that placed each one.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeatures {
    pub method: String,
    pub ordered_indices: Vec<usize>,
    pub scores: Vec<f64>,
    /// Number of ranked entries; a full ranking has `k == p`.
    pub k: usize,
    pub params: Vec<(String, String)>,
}

impl RankedFeatures {
    /// Sorts descending; ties and NaN-free equal scores keep the lower index first.
    pub(crate) fn from_scores(method: &str, scores: &[f64], params: Vec<(String, String)>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        RankedFeatures {
            method: method.to_string(),
            scores: order.iter().map(|&j| scores[j]).collect(),
            k: order.len(),
            ordered_indices: order,
            params,
        }
    }

    pub fn top(&self, k: usize) -> &[usize] {
        &self.ordered_indices[..k.min(self.ordered_indices.len())]
    }

    /// `rank,column,descriptor,score`; rank is 1-based.
    pub fn to_csv(&self, descriptors: &[FeatureDescriptor], channel_names: &[String]) -> String {
        let mut out = String::from("rank,column,descriptor,score\n");
        for (r, (&j, s)) in self.ordered_indices.iter().zip(&self.scores).enumerate() {
            let label = descriptors.get(j).map(|d| d.label(channel_names)).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{:.10e}", r + 1, j, label, s);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_scores_orders_and_breaks_ties_low_first() {
        let r = RankedFeatures::from_scores("t", &[1.0, 3.0, 3.0, 2.0], vec![]);
        assert_eq!(r.ordered_indices, vec![1, 2, 3, 0]);
        assert_eq!(r.scores, vec![3.0, 3.0, 2.0, 1.0]);
        assert_eq!(r.top(2), &[1, 2]);
        assert_eq!(r.top(10).len(), 4);
    }

    #[test]
    fn csv_has_one_row_per_entry() {
        let r = RankedFeatures::from_scores("t", &[0.5, 0.25], vec![]);
        let csv = r.to_csv(&[], &[]);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("1,0,"));
    }
}
