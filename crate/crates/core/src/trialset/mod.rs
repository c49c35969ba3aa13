//! Trial data model, the EIT1 container and the synthetic ground-truth generator.

mod io;
mod synth;

pub use io::{load_trialset, read_trialset, save_trialset, write_trialset, EIT1_MAGIC, EIT1_VERSION};
pub use synth::{generate_synthetic, GroundTruth, SynthConfig, TrialSignature};

use ndarray::{s, Array3, ArrayView1, ArrayView2, ArrayView3};

use crate::error::{Error, Result};

/// A named sample range `[start, end)` within each trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(name: impl Into<String>, start: usize, end: usize) -> Self {
        Interval {
            name: name.into(),
            start,
            end,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Segmented multi-channel EEG trials with class labels.
///
/// Fields are private so every instance satisfies the invariants checked in
/// [`TrialSet::new`]: consistent dimensions, finite samples, labels below the
/// class count, intervals inside the trial and positions inside the unit disc.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSet {
    subject_id: String,
    sample_rate: f64,
    class_names: Vec<String>,
    channel_names: Vec<String>,
    channel_positions: Option<Vec<[f64; 2]>>,
    intervals: Vec<Interval>,
    data: Array3<f32>,
    labels: Vec<usize>,
}

impl TrialSet {
    /// Builds a validated set. `data` is `[n_trials, n_channels, n_samples]` in microvolts.
    pub fn new(
        subject_id: impl Into<String>,
        sample_rate: f64,
        class_names: Vec<String>,
        channel_names: Vec<String>,
        data: Array3<f32>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        let ts = TrialSet {
            subject_id: subject_id.into(),
            sample_rate,
            class_names,
            channel_names,
            channel_positions: None,
            intervals: Vec::new(),
            data,
            labels,
        };
        ts.validate()?;
        Ok(ts)
    }

    pub fn with_positions(mut self, positions: Option<Vec<[f64; 2]>>) -> Result<Self> {
        self.channel_positions = positions;
        self.validate()?;
        Ok(self)
    }

    pub fn with_intervals(mut self, intervals: Vec<Interval>) -> Result<Self> {
        self.intervals = intervals;
        self.validate()?;
        Ok(self)
    }

    /// Replaces the sample array, keeping all metadata. Shape must not change.
    pub fn with_data(mut self, data: Array3<f32>) -> Result<Self> {
        if data.dim() != self.data.dim() {
            return Err(Error::invalid_data(format!(
                "replacement data shape {:?} differs from {:?}",
                data.dim(),
                self.data.dim()
            )));
        }
        self.data = data;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let (n_trials, n_ch, n_samples) = self.data.dim();
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(Error::invalid_data(format!(
                "sample rate must be positive, got {}",
                self.sample_rate
            )));
        }
        if self.class_names.is_empty() {
            return Err(Error::invalid_data("at least one class name is required"));
        }
        if self.class_names.len() > u16::MAX as usize {
            return Err(Error::invalid_data("too many classes for u16 labels"));
        }
        if self.channel_names.len() != n_ch {
            return Err(Error::invalid_data(format!(
                "{} channel names for {} channels",
                self.channel_names.len(),
                n_ch
            )));
        }
        if self.labels.len() != n_trials {
            return Err(Error::invalid_data(format!(
                "{} labels for {} trials",
                self.labels.len(),
                n_trials
            )));
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| l >= self.class_names.len()) {
            return Err(Error::invalid_data(format!(
                "label out of range: {bad} >= {}",
                self.class_names.len()
            )));
        }
        if let Some(pos) = &self.channel_positions {
            if pos.len() != n_ch {
                return Err(Error::invalid_data(format!(
                    "{} positions for {} channels",
                    pos.len(),
                    n_ch
                )));
            }
            for (i, p) in pos.iter().enumerate() {
                let r2 = p[0] * p[0] + p[1] * p[1];
                if !(p[0].is_finite() && p[1].is_finite()) || r2 > 1.0 + 1e-12 {
                    return Err(Error::invalid_data(format!(
                        "position of channel {i} ({}, {}) lies outside the unit disc",
                        p[0], p[1]
                    )));
                }
            }
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if iv.start > iv.end || iv.end > n_samples {
                return Err(Error::invalid_data(format!(
                    "interval '{}' [{}, {}) outside [0, {n_samples}]",
                    iv.name, iv.start, iv.end
                )));
            }
            if self.intervals[..i].iter().any(|o| o.name == iv.name) {
                return Err(Error::invalid_data(format!("duplicate interval '{}'", iv.name)));
            }
        }
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_data("non-finite sample in trial data"));
        }
        Ok(())
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn channel_positions(&self) -> Option<&[[f64; 2]]> {
        self.channel_positions.as_deref()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval(&self, name: &str) -> Option<&Interval> {
        self.intervals.iter().find(|iv| iv.name == name)
    }

    pub fn data(&self) -> ArrayView3<'_, f32> {
        self.data.view()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_trials(&self) -> usize {
        self.data.dim().0
    }

    pub fn n_channels(&self) -> usize {
        self.data.dim().1
    }

    pub fn n_samples(&self) -> usize {
        self.data.dim().2
    }

    /// `[n_channels, n_samples]` view of one trial.
    pub fn trial(&self, t: usize) -> ArrayView2<'_, f32> {
        self.data.slice(s![t, .., ..])
    }

    pub fn signal(&self, t: usize, c: usize) -> ArrayView1<'_, f32> {
        self.data.slice(s![t, c, ..])
    }

    /// One (trial, channel) signal widened to f64.
    pub fn signal_f64(&self, t: usize, c: usize) -> Vec<f64> {
        self.signal(t, c).iter().map(|&v| f64::from(v)).collect()
    }

    /// Per-class trial counts, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Copy keeping only the given trials, in the given order.
    pub fn select_trials(&self, trials: &[usize]) -> Result<TrialSet> {
        if let Some(&bad) = trials.iter().find(|&&t| t >= self.n_trials()) {
            return Err(Error::invalid_arg(format!("trial index {bad} out of range")));
        }
        let data = self.data.select(ndarray::Axis(0), trials);
        let labels = trials.iter().map(|&t| self.labels[t]).collect();
        Ok(TrialSet {
            data,
            labels,
            ..self.clone_metadata()
        })
    }

    fn clone_metadata(&self) -> TrialSet {
        TrialSet {
            subject_id: self.subject_id.clone(),
            sample_rate: self.sample_rate,
            class_names: self.class_names.clone(),
            channel_names: self.channel_names.clone(),
            channel_positions: self.channel_positions.clone(),
            intervals: self.intervals.clone(),
            data: Array3::zeros((0, 0, 0)),
            labels: Vec::new(),
        }
    }
}

/// Crops every trial to the named interval and rebases the interval table.
///
/// Intervals are intersected with the new window; those that fall entirely
/// outside it are dropped.
pub fn slice_interval(ts: &TrialSet, interval_name: &str) -> Result<TrialSet> {
    let iv = ts
        .interval(interval_name)
        .ok_or_else(|| Error::invalid_arg(format!("unknown interval '{interval_name}'")))?
        .clone();
    let data = ts.data.slice(s![.., .., iv.start..iv.end]).to_owned();
    let intervals = ts
        .intervals
        .iter()
        .filter_map(|o| {
            let start = o.start.max(iv.start);
            let end = o.end.min(iv.end);
            (start < end || o.name == iv.name)
                .then(|| Interval::new(o.name.clone(), start - iv.start, end.max(start) - iv.start))
        })
        .collect();
    Ok(TrialSet {
        data,
        labels: ts.labels.clone(),
        intervals,
        ..ts.clone_metadata()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n_trials: usize, n_samples: usize) -> TrialSet {
        let data = Array3::from_shape_fn((n_trials, 2, n_samples), |(t, c, i)| {
            (t * 100 + c * 10 + i) as f32
        });
        TrialSet::new(
            "s01",
            256.0,
            vec!["a".into(), "b".into()],
            vec!["C1".into(), "C2".into()],
            data,
            (0..n_trials).map(|t| t % 2).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_label_out_of_range() {
        let data = Array3::zeros((1, 1, 4));
        let err = TrialSet::new("s", 256.0, vec!["a".into()], vec!["c".into()], data, vec![1])
            .unwrap_err();
        assert!(err.to_string().contains("label out of range"));
    }

    #[test]
    fn rejects_non_finite_and_bad_rate() {
        let mut data = Array3::zeros((1, 1, 4));
        data[[0, 0, 2]] = f32::NAN;
        assert!(TrialSet::new("s", 256.0, vec!["a".into()], vec!["c".into()], data, vec![0]).is_err());
        let data = Array3::zeros((1, 1, 4));
        assert!(TrialSet::new("s", 0.0, vec!["a".into()], vec!["c".into()], data, vec![0]).is_err());
    }

    #[test]
    fn rejects_positions_outside_disc_and_bad_interval() {
        let ts = small(2, 8);
        assert!(ts.clone().with_positions(Some(vec![[0.0, 0.0], [0.9, 0.9]])).is_err());
        assert!(ts.clone().with_intervals(vec![Interval::new("x", 2, 9)]).is_err());
        assert!(ts
            .with_intervals(vec![Interval::new("x", 0, 2), Interval::new("x", 2, 4)])
            .is_err());
    }

    #[test]
    fn identity_slice_keeps_data() {
        let ts = small(3, 8).with_intervals(vec![Interval::new("all", 0, 8)]).unwrap();
        let out = slice_interval(&ts, "all").unwrap();
        assert_eq!(out, ts);
    }

    #[test]
    fn action_interval_of_full_trial() {
        // 4.5 s trial at 256 Hz with a 2.5 s action interval starting at 1.5 s.
        let ts = small(2, 1152)
            .with_intervals(vec![
                Interval::new("concentration", 0, 256),
                Interval::new("cue", 256, 384),
                Interval::new("action", 384, 1024),
                Interval::new("relax", 1024, 1152),
            ])
            .unwrap();
        let out = slice_interval(&ts, "action").unwrap();
        assert_eq!(out.n_samples(), 640);
        assert_eq!(out.n_trials(), 2);
        assert_eq!(out.labels(), ts.labels());
        assert_eq!(out.channel_names(), ts.channel_names());
        assert_eq!(out.interval("action"), Some(&Interval::new("action", 0, 640)));
        assert!(out.interval("relax").is_none());
        assert_eq!(out.signal(1, 1)[0], ts.signal(1, 1)[384]);
    }

    #[test]
    fn unknown_interval_errors() {
        let ts = small(1, 8);
        assert!(slice_interval(&ts, "bogus").is_err());
    }
}
