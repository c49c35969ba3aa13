//! Greedy minimum-redundancy maximum-relevance selection (quotient form).

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::rank::{anova_f, check_labels, discretize, mutual_info, zscore_columns, RankParams};
use super::RankedFeatures;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MrmrVariant {
    /// ANOVA F over mean |Pearson correlation|.
    #[default]
    Fcq,
    /// Mutual information with the labels over mean pairwise MI.
    Miq,
}

impl MrmrVariant {
    pub fn name(self) -> &'static str {
        match self {
            MrmrVariant::Fcq => "fcq",
            MrmrVariant::Miq => "miq",
        }
    }
}

impl fmt::Display for MrmrVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MrmrVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fcq" => Ok(MrmrVariant::Fcq),
            "miq" => Ok(MrmrVariant::Miq),
            _ => Err(Error::invalid_arg(format!("unknown MRMR variant '{s}'"))),
        }
    }
}

/// Selects `k` columns greedily. The first pick maximises relevance; later
/// picks maximise `relevance / (mean redundancy with the picks + 1e-12)`.
/// Ties go to the lowest column index.
pub fn mrmr_select(
    x: &Array2<f64>,
    y: &[usize],
    n_classes: usize,
    k: usize,
    variant: MrmrVariant,
    params: &RankParams,
) -> Result<RankedFeatures> {
    let classes = check_labels(x, y, n_classes)?;
    let p = x.ncols();
    if k > p {
        return Err(Error::invalid_arg(format!("K = {k} exceeds the {p} available features")));
    }
    if k == 0 {
        return Err(Error::invalid_arg("K must be at least 1"));
    }

    let redundancy: Box<dyn Fn(usize, usize) -> f64 + Sync> = match variant {
        MrmrVariant::Fcq => {
            let z = zscore_columns(x);
            let n = x.nrows() as f64;
            let cols: Vec<Vec<f64>> = z.axis_iter(Axis(1)).map(|c| c.to_vec()).collect();
            Box::new(move |a, b| {
                let dot: f64 = cols[a].iter().zip(&cols[b]).map(|(u, v)| u * v).sum();
                (dot / n).abs().min(1.0)
            })
        }
        MrmrVariant::Miq => {
            let bins = params.mi_bins;
            let disc: Vec<Vec<usize>> = x.axis_iter(Axis(1)).map(|c| discretize(c, bins)).collect();
            Box::new(move |a, b| mutual_info(&disc[a], bins, &disc[b], bins))
        }
    };
    let relevance: Vec<f64> = match variant {
        MrmrVariant::Fcq => (0..p)
            .into_par_iter()
            .map(|j| finite_or_zero(anova_f(x.column(j), y, &classes)))
            .collect(),
        MrmrVariant::Miq => (0..p)
            .into_par_iter()
            .map(|j| {
                let d = discretize(x.column(j), params.mi_bins);
                finite_or_zero(mutual_info(&d, params.mi_bins, y, n_classes))
            })
            .collect(),
    };

    let mut selected = Vec::with_capacity(k);
    let mut scores = Vec::with_capacity(k);
    let mut taken = vec![false; p];
    let mut red_sum = vec![0.0; p];
    for step in 0..k {
        if let Some(&last) = selected.last() {
            red_sum
                .par_iter_mut()
                .enumerate()
                .filter(|(j, _)| !taken[*j])
                .for_each(|(j, r)| *r += redundancy(j, last));
        }
        let best = (0..p)
            .into_par_iter()
            .filter(|&j| !taken[j])
            .map(|j| {
                let s = if step == 0 {
                    relevance[j]
                } else {
                    relevance[j] / (red_sum[j] / step as f64 + EPS)
                };
                (s, j)
            })
            .reduce_with(better)
            .expect("k ≤ p leaves a candidate");
        taken[best.1] = true;
        selected.push(best.1);
        scores.push(best.0);
    }
    Ok(RankedFeatures {
        method: format!("mrmr_{}", variant.name()),
        ordered_indices: selected,
        scores,
        k,
        params: vec![("bins".to_string(), params.mi_bins.to_string())],
    })
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Higher score wins; equal scores go to the lower index.
fn better(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.1 < b.1 {
                a
            } else {
                b
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::{rank_features, RankMethod};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn fixture(seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 120;
        let y: Vec<usize> = (0..n).map(|i| i % 4).collect();
        let mut x = Array2::zeros((n, 12));
        for i in 0..n {
            for j in 0..12 {
                let e: f64 = StandardNormal.sample(&mut rng);
                x[[i, j]] = e;
            }
            x[[i, 0]] += 2.0 * y[i] as f64;
            x[[i, 1]] += 3.0 * (y[i] % 2) as f64;
        }
        (x, y)
    }

    #[test]
    fn k1_matches_top_ranked() {
        let (x, y) = fixture(4);
        let p = RankParams::default();
        let m = mrmr_select(&x, &y, 4, 1, MrmrVariant::Fcq, &p).unwrap();
        let r = rank_features(&x, &y, 4, RankMethod::AnovaF, &p).unwrap();
        assert_eq!(m.ordered_indices[0], r.ordered_indices[0]);
        let m = mrmr_select(&x, &y, 4, 1, MrmrVariant::Miq, &p).unwrap();
        let r = rank_features(&x, &y, 4, RankMethod::MutualInfo, &p).unwrap();
        assert_eq!(m.ordered_indices[0], r.ordered_indices[0]);
    }

    #[test]
    fn zero_variance_is_picked_last() {
        let (mut x, y) = fixture(5);
        x.column_mut(3).fill(1.5);
        for variant in [MrmrVariant::Fcq, MrmrVariant::Miq] {
            let m = mrmr_select(&x, &y, 4, 12, variant, &RankParams::default()).unwrap();
            assert_eq!(*m.ordered_indices.last().unwrap(), 3, "{variant}");
        }
    }

    #[test]
    fn rejects_oversized_k() {
        let (x, y) = fixture(1);
        assert!(mrmr_select(&x, &y, 4, 13, MrmrVariant::Fcq, &RankParams::default()).is_err());
    }
}
