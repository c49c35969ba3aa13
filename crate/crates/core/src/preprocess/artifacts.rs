//! Statistical screening for motion artifacts and VMD-based drift removal.

use ndarray::Array2;
use rayon::prelude::*;

use super::vmd::{vmd, VmdParams};
use crate::error::{Error, Result};
use crate::stats;
use crate::trialset::TrialSet;

const MAD_SCALE: f64 = 1.4826;
const MAD_EPS: f64 = 1e-12;
/// Moving-average window used for the drift statistic, in seconds.
const DRIFT_WINDOW_S: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionPolicy {
    pub z_thresh: f64,
    pub drift_factor: f64,
}

impl Default for DetectionPolicy {
    fn default() -> Self {
        DetectionPolicy {
            z_thresh: 3.0,
            drift_factor: 5.0,
        }
    }
}

/// Per-(trial, channel) screening statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FlagDiagnostic {
    pub z_mean: f64,
    pub z_std: f64,
    /// Peak-to-peak of the 0.5 s moving average.
    pub drift: f64,
    /// `drift_factor ×` median per-trial std of the channel.
    pub drift_limit: f64,
}

impl FlagDiagnostic {
    /// Comma-free reason code, e.g. `std+drift`; empty when nothing fired.
    pub fn reason(&self, policy: &DetectionPolicy) -> String {
        let mut parts = Vec::new();
        if self.z_mean.abs() > policy.z_thresh {
            parts.push("mean");
        }
        if self.z_std.abs() > policy.z_thresh {
            parts.push("std");
        }
        if self.drift > self.drift_limit {
            parts.push("drift");
        }
        parts.join("+")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArtifactMask {
    /// `[n_trials, n_channels]`.
    pub flags: Array2<bool>,
    pub policy: DetectionPolicy,
    pub diagnostics: Array2<FlagDiagnostic>,
}

impl ArtifactMask {
    /// A mask with no flags, shaped for `ts`.
    pub fn empty(ts: &TrialSet) -> Self {
        let shape = (ts.n_trials(), ts.n_channels());
        ArtifactMask {
            flags: Array2::from_elem(shape, false),
            policy: DetectionPolicy::default(),
            diagnostics: Array2::from_elem(shape, FlagDiagnostic::default()),
        }
    }

    pub fn n_flagged(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    /// Flagged pairs in trial-major order.
    pub fn flagged_pairs(&self) -> Vec<(usize, usize)> {
        self.flags
            .indexed_iter()
            .filter(|(_, &f)| f)
            .map(|(idx, _)| idx)
            .collect()
    }

    /// CSV report: `trial,channel,reason,z_mean,z_std,drift,drift_limit`.
    pub fn to_csv(&self, channel_names: &[String]) -> String {
        let mut out = String::from("trial,channel,reason,z_mean,z_std,drift,drift_limit\n");
        for (t, c) in self.flagged_pairs() {
            let d = &self.diagnostics[[t, c]];
            let name = channel_names.get(c).map(String::as_str).unwrap_or("?");
            out.push_str(&format!(
                "{t},{name},{},{:.6},{:.6},{:.6},{:.6}\n",
                d.reason(&self.policy),
                d.z_mean,
                d.z_std,
                d.drift,
                d.drift_limit
            ));
        }
        out
    }
}

/// Flags (trial, channel) pairs whose mean or spread is a robust outlier among
/// the channel's trials, or whose slow drift exceeds `drift_factor` times the
/// channel's median standard deviation.
pub fn detect_artifacts(ts: &TrialSet, policy: DetectionPolicy) -> Result<ArtifactMask> {
    let n_trials = ts.n_trials();
    if n_trials < 8 {
        return Err(Error::invalid_arg(format!(
            "artifact screening needs at least 8 trials, got {n_trials}"
        )));
    }
    if ts.n_samples() == 0 {
        return Err(Error::invalid_arg("trials have no samples"));
    }
    let window = ((DRIFT_WINDOW_S * ts.sample_rate()).round() as usize).clamp(1, ts.n_samples());

    let per_channel: Vec<Vec<FlagDiagnostic>> = (0..ts.n_channels())
        .into_par_iter()
        .map(|c| {
            let mut means = Vec::with_capacity(n_trials);
            let mut stds = Vec::with_capacity(n_trials);
            let mut drifts = Vec::with_capacity(n_trials);
            for t in 0..n_trials {
                let x = ts.signal_f64(t, c);
                means.push(stats::mean(&x));
                stds.push(stats::std_dev(&x));
                drifts.push(moving_average_range(&x, window));
            }
            let zm = robust_z(&means);
            let zs = robust_z(&stds);
            let drift_limit = policy.drift_factor * stats::median(&stds);
            (0..n_trials)
                .map(|t| FlagDiagnostic {
                    z_mean: zm[t],
                    z_std: zs[t],
                    drift: drifts[t],
                    drift_limit,
                })
                .collect()
        })
        .collect();

    let shape = (n_trials, ts.n_channels());
    let diagnostics = Array2::from_shape_fn(shape, |(t, c)| per_channel[c][t]);
    let flags = diagnostics.mapv(|d| {
        d.z_mean.abs() > policy.z_thresh || d.z_std.abs() > policy.z_thresh || d.drift > d.drift_limit
    });
    Ok(ArtifactMask {
        flags,
        policy,
        diagnostics,
    })
}

fn robust_z(v: &[f64]) -> Vec<f64> {
    let med = stats::median(v);
    let scale = (MAD_SCALE * stats::mad(v)).max(MAD_EPS);
    v.iter().map(|x| (x - med) / scale).collect()
}

/// Peak-to-peak of the valid-mode moving average with the given window.
fn moving_average_range(x: &[f64], window: usize) -> f64 {
    let mut sum: f64 = x[..window].iter().sum();
    let mut lo = sum;
    let mut hi = sum;
    for i in window..x.len() {
        sum += x[i] - x[i - window];
        lo = lo.min(sum);
        hi = hi.max(sum);
    }
    (hi - lo) / window as f64
}

/// Replaces each flagged signal by its VMD reconstruction without the
/// lowest-frequency mode. Unflagged signals are copied bit for bit.
pub fn remove_artifacts(ts: &TrialSet, mask: &ArtifactMask, params: &VmdParams) -> Result<TrialSet> {
    if mask.flags.dim() != (ts.n_trials(), ts.n_channels()) {
        return Err(Error::invalid_arg(format!(
            "mask shape {:?} does not match trial set ({}, {})",
            mask.flags.dim(),
            ts.n_trials(),
            ts.n_channels()
        )));
    }
    let pairs = mask.flagged_pairs();
    if pairs.is_empty() {
        return Ok(ts.clone());
    }
    let cleaned: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|&(t, c)| {
            let x = ts.signal_f64(t, c);
            vmd(&x, params)
                .map(|r| r.reconstruct_without_lowest(1))
                .map_err(|e| e.context(format!("trial {t}, channel {c}")))
        })
        .collect::<Result<_>>()?;
    let mut data = ts.data().to_owned();
    for (&(t, c), signal) in pairs.iter().zip(cleaned) {
        for (i, v) in signal.into_iter().enumerate() {
            data[[t, c, i]] = v as f32;
        }
    }
    ts.clone().with_data(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array3;

    fn set_from(data: Array3<f32>) -> TrialSet {
        let n = data.dim().0;
        let n_ch = data.dim().1;
        TrialSet::new(
            "t",
            256.0,
            vec!["a".into(), "b".into()],
            (0..n_ch).map(|c| format!("C{c}")).collect(),
            data,
            (0..n).map(|t| t % 2).collect(),
        )
        .unwrap()
    }

    fn noise(seed: u64, n: usize) -> Vec<f32> {
        // small LCG keeps the fixture independent of the crate RNG choice
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) as f64 / (1u64 << 31) as f64 - 0.5) as f32
            })
            .collect()
    }

    #[test]
    fn identical_trials_raise_no_flags() {
        let base = noise(1, 256);
        let data = Array3::from_shape_fn((10, 3, 256), |(_, c, i)| base[i] * (c + 1) as f32);
        let mask = detect_artifacts(&set_from(data), DetectionPolicy::default()).unwrap();
        assert_eq!(mask.n_flagged(), 0);
    }

    #[test]
    fn amplified_trial_is_flagged_by_spread() {
        let mut data = Array3::zeros((12, 3, 256));
        for t in 0..12 {
            for c in 0..3 {
                let x = noise((t * 3 + c) as u64, 256);
                for i in 0..256 {
                    data[[t, c, i]] = x[i];
                }
            }
        }
        for i in 0..256 {
            data[[4, 1, i]] *= 100.0;
        }
        let mask = detect_artifacts(&set_from(data), DetectionPolicy::default()).unwrap();
        assert_eq!(mask.flagged_pairs(), vec![(4, 1)]);
        assert!(mask.diagnostics[[4, 1]].z_std > 3.0);
        assert!(mask.to_csv(&["A".into(), "B".into(), "C".into()]).contains("4,B,"));
    }

    #[test]
    fn needs_eight_trials() {
        let data = Array3::zeros((7, 1, 64));
        assert!(detect_artifacts(&set_from(data), DetectionPolicy::default()).is_err());
    }

    #[test]
    fn empty_mask_is_identity() {
        let data = Array3::from_shape_fn((8, 2, 64), |(t, c, i)| (t + c + i) as f32 * 0.1);
        let ts = set_from(data);
        let out = remove_artifacts(&ts, &ArtifactMask::empty(&ts), &VmdParams::default()).unwrap();
        assert_eq!(out, ts);
    }

    #[test]
    fn mask_shape_must_match() {
        let ts = set_from(Array3::zeros((8, 2, 64)));
        let other = set_from(Array3::zeros((8, 3, 64)));
        assert!(remove_artifacts(&ts, &ArtifactMask::empty(&other), &VmdParams::default()).is_err());
    }

    #[test]
    fn moving_average_range_of_ramp() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        // window 4: averages 1.5 … 7.5
        assert!((moving_average_range(&x, 4) - 6.0).abs() < 1e-12);
    }
}
