//! Univariate rankers and ReliefF.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::RankedFeatures;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankMethod {
    AnovaF,
    ChiSquare,
    MutualInfo,
    Pearson,
    ReliefF,
}

impl RankMethod {
    pub const ALL: [RankMethod; 5] = [
        RankMethod::AnovaF,
        RankMethod::ChiSquare,
        RankMethod::MutualInfo,
        RankMethod::Pearson,
        RankMethod::ReliefF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RankMethod::AnovaF => "anova_f",
            RankMethod::ChiSquare => "chi_square",
            RankMethod::MutualInfo => "mutual_info",
            RankMethod::Pearson => "pearson",
            RankMethod::ReliefF => "relieff",
        }
    }
}

impl fmt::Display for RankMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RankMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RankMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid_arg(format!("unknown ranking method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankParams {
    /// Equal-width bins for mutual information.
    pub mi_bins: usize,
    /// Nearest hits / misses per class for ReliefF.
    pub relief_k: usize,
}

impl Default for RankParams {
    fn default() -> Self {
        RankParams {
            mi_bins: 10,
            relief_k: 10,
        }
    }
}

/// Validated class layout of a training set.
pub(crate) struct Classes {
    pub n_classes: usize,
    pub counts: Vec<usize>,
}

pub(crate) fn check_labels(x: &Array2<f64>, y: &[usize], n_classes: usize) -> Result<Classes> {
    if x.nrows() != y.len() {
        return Err(Error::invalid_arg(format!("{} rows but {} labels", x.nrows(), y.len())));
    }
    if let Some(&l) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::invalid_arg(format!("label out of range: {l}")));
    }
    let mut counts = vec![0; n_classes];
    for &l in y {
        counts[l] += 1;
    }
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::invalid_arg("feature ranking needs at least two classes"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid_arg("feature matrix contains non-finite values"));
    }
    Ok(Classes { n_classes, counts })
}

/// Scores every column and sorts best first (ties: lowest index).
pub fn rank_features(
    x: &Array2<f64>,
    y: &[usize],
    n_classes: usize,
    method: RankMethod,
    params: &RankParams,
) -> Result<RankedFeatures> {
    let classes = check_labels(x, y, n_classes)?;
    let scores = match method {
        RankMethod::AnovaF => {
            if classes.counts.contains(&1) {
                return Err(Error::invalid_arg("anova_f needs at least two samples per class"));
            }
            per_column(x, |col| anova_f(col, y, &classes))
        }
        RankMethod::ChiSquare => per_column(x, |col| chi_square(col, y, &classes)),
        RankMethod::MutualInfo => {
            if params.mi_bins < 2 {
                return Err(Error::invalid_arg("mutual information needs at least 2 bins"));
            }
            per_column(x, |col| {
                let bins = discretize(col, params.mi_bins);
                mutual_info(&bins, params.mi_bins, y, n_classes)
            })
        }
        RankMethod::Pearson => per_column(x, |col| pearson_max(col, y, n_classes)),
        RankMethod::ReliefF => {
            if params.relief_k == 0 {
                return Err(Error::invalid_arg("ReliefF needs k ≥ 1"));
            }
            relieff(x, y, &classes, params.relief_k)
        }
    };
    let mut params_out = Vec::new();
    match method {
        RankMethod::MutualInfo => params_out.push(("bins".to_string(), params.mi_bins.to_string())),
        RankMethod::ReliefF => params_out.push(("k".to_string(), params.relief_k.to_string())),
        _ => {}
    }
    Ok(RankedFeatures::from_scores(method.name(), &scores, params_out))
}

fn per_column(x: &Array2<f64>, f: impl Fn(ArrayView1<f64>) -> f64 + Sync) -> Vec<f64> {
    (0..x.ncols())
        .into_par_iter()
        .map(|j| {
            let s = f(x.column(j));
            if s.is_finite() {
                s
            } else {
                0.0
            }
        })
        .collect()
}

fn is_constant(col: ArrayView1<f64>) -> bool {
    col.iter().all(|&v| v == col[0])
}

/// One-way ANOVA F; the within-class mean square is floored relative to the
/// total so perfectly separated columns stay finite.
pub(crate) fn anova_f(col: ArrayView1<f64>, y: &[usize], classes: &Classes) -> f64 {
    if is_constant(col) {
        return 0.0;
    }
    let n = col.len();
    let mut sums = vec![0.0; classes.n_classes];
    for (v, &l) in col.iter().zip(y) {
        sums[l] += v;
    }
    let grand = sums.iter().sum::<f64>() / n as f64;
    let means: Vec<f64> = sums
        .iter()
        .zip(&classes.counts)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let mut ssw = 0.0;
    let mut sst = 0.0;
    for (v, &l) in col.iter().zip(y) {
        ssw += (v - means[l]).powi(2);
        sst += (v - grand).powi(2);
    }
    let ssb: f64 = means
        .iter()
        .zip(&classes.counts)
        .map(|(m, &c)| c as f64 * (m - grand).powi(2))
        .sum();
    let k = classes.counts.iter().filter(|&&c| c > 0).count();
    if n <= k {
        return 0.0;
    }
    let msb = ssb / (k - 1) as f64;
    let mst = sst / (n - 1) as f64;
    let msw = (ssw / (n - k) as f64).max(1e-12 * mst);
    msb / msw
}

fn chi_square(col: ArrayView1<f64>, y: &[usize], classes: &Classes) -> f64 {
    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return 0.0;
    }
    let n = col.len() as f64;
    let mut observed = vec![0.0; classes.n_classes];
    for (v, &l) in col.iter().zip(y) {
        observed[l] += (v - lo) / (hi - lo);
    }
    let total: f64 = observed.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    observed
        .iter()
        .zip(&classes.counts)
        .filter(|(_, &c)| c > 0)
        .map(|(o, &c)| {
            let e = total * c as f64 / n;
            (o - e).powi(2) / e
        })
        .sum()
}

/// Equal-width bin index per value over the observed range; constant → all 0.
pub(crate) fn discretize(col: ArrayView1<f64>, bins: usize) -> Vec<usize> {
    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0; col.len()];
    }
    let width = (hi - lo) / bins as f64;
    col.iter()
        .map(|v| (((v - lo) / width) as usize).min(bins - 1))
        .collect()
}

/// Plug-in mutual information (nats) between two discrete variables.
pub(crate) fn mutual_info(a: &[usize], a_levels: usize, b: &[usize], b_levels: usize) -> f64 {
    let n = a.len() as f64;
    let mut joint = vec![0usize; a_levels * b_levels];
    let mut pa = vec![0usize; a_levels];
    let mut pb = vec![0usize; b_levels];
    for (&i, &j) in a.iter().zip(b) {
        joint[i * b_levels + j] += 1;
        pa[i] += 1;
        pb[j] += 1;
    }
    let mut mi = 0.0;
    for i in 0..a_levels {
        for j in 0..b_levels {
            let c = joint[i * b_levels + j];
            if c > 0 {
                let pij = c as f64 / n;
                mi += pij * (pij * n * n / (pa[i] as f64 * pb[j] as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

fn pearson_max(col: ArrayView1<f64>, y: &[usize], n_classes: usize) -> f64 {
    if is_constant(col) {
        return 0.0;
    }
    let n = col.len() as f64;
    let mean = col.sum() / n;
    let sxx: f64 = col.iter().map(|v| (v - mean).powi(2)).sum();
    let mut best = 0.0f64;
    for c in 0..n_classes {
        let k = y.iter().filter(|&&l| l == c).count() as f64;
        if k == 0.0 || k == n {
            continue;
        }
        let p = k / n;
        let sxy: f64 = col
            .iter()
            .zip(y)
            .map(|(v, &l)| (v - mean) * (if l == c { 1.0 } else { 0.0 } - p))
            .sum();
        let syy = n * p * (1.0 - p);
        best = best.max((sxy / (sxx * syy).sqrt()).abs());
    }
    best
}

/// Columns z-scored with the population std; constant columns become 0.
pub(crate) fn zscore_columns(x: &Array2<f64>) -> Array2<f64> {
    let mut z = x.clone();
    for mut col in z.axis_iter_mut(Axis(1)) {
        let n = col.len() as f64;
        let mean = col.sum() / n;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        if sd > 0.0 && col.iter().any(|&v| v != col[0]) {
            col.mapv_inplace(|v| (v - mean) / sd);
        } else {
            col.fill(0.0);
        }
    }
    z
}

fn relieff(x: &Array2<f64>, y: &[usize], classes: &Classes, k: usize) -> Vec<f64> {
    let z = zscore_columns(x);
    let (n, p) = z.dim();
    let range: Vec<f64> = z
        .axis_iter(Axis(1))
        .map(|c| {
            let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .collect();
    let prior: Vec<f64> = classes.counts.iter().map(|&c| c as f64 / n as f64).collect();

    let contributions: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = z.row(i);
            let mut by_class: Vec<Vec<(f64, usize)>> = vec![Vec::new(); classes.n_classes];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d: f64 = xi.iter().zip(z.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
                by_class[y[j]].push((d, j));
            }
            let mut w = vec![0.0; p];
            for (c, cands) in by_class.iter_mut().enumerate() {
                if cands.is_empty() {
                    continue;
                }
                cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let m = k.min(cands.len());
                let weight = if c == y[i] {
                    -1.0 / m as f64
                } else {
                    prior[c] / (1.0 - prior[y[i]]) / m as f64
                };
                for &(_, j) in &cands[..m] {
                    for f in 0..p {
                        if range[f] > 0.0 {
                            w[f] += weight * (xi[f] - z[[j, f]]).abs() / range[f];
                        }
                    }
                }
            }
            w
        })
        .collect();

    let mut scores = vec![0.0; p];
    for w in contributions {
        for (s, v) in scores.iter_mut().zip(w) {
            *s += v;
        }
    }
    scores.iter_mut().for_each(|s| *s /= n as f64);
    scores
}
