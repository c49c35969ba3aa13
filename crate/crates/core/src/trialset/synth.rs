//! Ground-truth synthetic EEG for desk-scale verification.
//!
//! Each trial is 1/f background noise plus a class-specific sinusoid on that
//! class's signature channels. A random subset of (trial, channel) pairs also
//! receives a slow drift, and the flags are returned as [`GroundTruth`].

use std::f64::consts::PI;

use ndarray::{Array2, Array3};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Interval, TrialSet};
use crate::error::{Error, Result};
use crate::signal::{idft, real_dft, Complex64};

/// Generator settings. Amplitudes are in microvolts.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub subject_id: String,
    pub n_trials: usize,
    pub n_channels: usize,
    pub n_samples: usize,
    pub sample_rate: f64,
    /// One signature frequency per class, in Hz.
    pub class_freqs: Vec<f64>,
    /// Defaults to `class0`, `class1`, ….
    pub class_names: Option<Vec<String>>,
    /// Signature channels per class; defaults to consecutive blocks of
    /// `channels_per_class` channels.
    pub class_channels: Option<Vec<Vec<usize>>>,
    pub channels_per_class: usize,
    pub signal_amplitude: f64,
    /// Standard deviation of the 1/f background.
    pub noise_level: f64,
    /// Probability that a (trial, channel) pair receives a drift artifact.
    pub artifact_prob: f64,
    pub artifact_amplitude: f64,
    /// Draw a uniform phase per trial instead of phase-locking to sample 0.
    pub random_phase: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            subject_id: "synthetic".into(),
            n_trials: 160,
            n_channels: 16,
            n_samples: 640,
            sample_rate: 256.0,
            class_freqs: vec![8.0, 12.0, 20.0, 30.0],
            class_names: None,
            class_channels: None,
            channels_per_class: 2,
            signal_amplitude: 0.5,
            noise_level: 1.0,
            artifact_prob: 0.2,
            artifact_amplitude: 10.0,
            random_phase: false,
        }
    }
}

impl SynthConfig {
    pub fn n_classes(&self) -> usize {
        self.class_freqs.len()
    }

    /// Signature channel sets, resolved against the defaults.
    pub fn resolved_class_channels(&self) -> Vec<Vec<usize>> {
        match &self.class_channels {
            Some(sets) => sets.clone(),
            None => (0..self.n_classes())
                .map(|c| {
                    (0..self.channels_per_class)
                        .map(|j| (c * self.channels_per_class + j) % self.n_channels.max(1))
                        .collect()
                })
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let c = self.n_classes();
        if c < 2 {
            return Err(Error::invalid_arg("at least two class frequencies are required"));
        }
        if self.n_channels == 0 || self.n_samples < 16 {
            return Err(Error::invalid_arg("need ≥ 1 channel and ≥ 16 samples"));
        }
        if self.n_trials % c != 0 {
            return Err(Error::invalid_arg(format!(
                "n_trials {} is not a multiple of the class count {c}",
                self.n_trials
            )));
        }
        if !(self.sample_rate > 0.0) {
            return Err(Error::invalid_arg("sample rate must be positive"));
        }
        let nyquist = self.sample_rate / 2.0;
        for (i, &f) in self.class_freqs.iter().enumerate() {
            if !(f > 0.0 && f < nyquist) {
                return Err(Error::invalid_arg(format!(
                    "class frequency {f} Hz outside (0, {nyquist}) Hz"
                )));
            }
            if self.class_freqs[..i].contains(&f) {
                return Err(Error::invalid_arg(format!("class frequency {f} Hz is not distinct")));
            }
        }
        if let Some(names) = &self.class_names {
            if names.len() != c {
                return Err(Error::invalid_arg("class_names length differs from class_freqs"));
            }
        }
        let sets = self.resolved_class_channels();
        if sets.len() != c {
            return Err(Error::invalid_arg("class_channels length differs from class_freqs"));
        }
        if sets.iter().flatten().any(|&ch| ch >= self.n_channels) {
            return Err(Error::invalid_arg("signature channel index out of range"));
        }
        if !(0.0..=1.0).contains(&self.artifact_prob) {
            return Err(Error::invalid_arg("artifact probability must lie in [0, 1]"));
        }
        if self.noise_level < 0.0 || self.signal_amplitude < 0.0 || self.artifact_amplitude < 0.0 {
            return Err(Error::invalid_arg("amplitudes must be non-negative"));
        }
        Ok(())
    }
}

/// Per-trial class signature as generated.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSignature {
    pub frequency: f64,
    pub amplitude: f64,
    /// Phase in radians at sample 0.
    pub phase: f64,
    pub channels: Vec<usize>,
}

/// What the generator injected, for scoring detectors and classifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub signatures: Vec<TrialSignature>,
    /// `[n_trials, n_channels]`, true where drift was injected.
    pub artifact_flags: Array2<bool>,
    pub seed: u64,
}

impl GroundTruth {
    pub fn n_flagged(&self) -> usize {
        self.artifact_flags.iter().filter(|&&f| f).count()
    }
}

/// Generates a balanced synthetic set. Identical `(config, seed)` give identical output.
pub fn generate_synthetic(cfg: &SynthConfig, seed: u64) -> Result<(TrialSet, GroundTruth)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = cfg.n_classes();
    let (n_trials, n_ch, n) = (cfg.n_trials, cfg.n_channels, cfg.n_samples);
    let fs = cfg.sample_rate;

    let mut labels: Vec<usize> = (0..n_trials).map(|t| t % n_classes).collect();
    labels.shuffle(&mut rng);

    let class_channels = cfg.resolved_class_channels();
    let shaper = PinkShaper::new(n, fs);
    let mut data = Array3::<f32>::zeros((n_trials, n_ch, n));
    let mut flags = Array2::from_elem((n_trials, n_ch), false);
    let mut signatures = Vec::with_capacity(n_trials);
    let mut buf = vec![0.0f64; n];

    for (t, &label) in labels.iter().enumerate() {
        let phase = if cfg.random_phase {
            rng.random_range(0.0..2.0 * PI)
        } else {
            0.0
        };
        let sig = TrialSignature {
            frequency: cfg.class_freqs[label],
            amplitude: cfg.signal_amplitude,
            phase,
            channels: class_channels[label].clone(),
        };
        for c in 0..n_ch {
            if cfg.noise_level > 0.0 {
                shaper.fill(&mut rng, &mut buf);
                buf.iter_mut().for_each(|v| *v *= cfg.noise_level);
            } else {
                buf.fill(0.0);
            }
            if sig.channels.contains(&c) {
                for (i, v) in buf.iter_mut().enumerate() {
                    *v += sig.amplitude * (2.0 * PI * sig.frequency * i as f64 / fs + phase).sin();
                }
            }
            if cfg.artifact_prob > 0.0 && rng.random_bool(cfg.artifact_prob) {
                flags[[t, c]] = true;
                add_drift(&mut rng, &mut buf, fs, cfg.artifact_amplitude);
            }
            for (i, &v) in buf.iter().enumerate() {
                data[[t, c, i]] = v as f32;
            }
        }
        signatures.push(sig);
    }

    let class_names = cfg
        .class_names
        .clone()
        .unwrap_or_else(|| (0..n_classes).map(|c| format!("class{c}")).collect());
    let channel_names = (0..n_ch).map(|c| format!("S{c:02}")).collect();
    let ts = TrialSet::new(cfg.subject_id.clone(), fs, class_names, channel_names, data, labels)?
        .with_positions(Some(ring_layout(n_ch)))?
        .with_intervals(vec![Interval::new("action", 0, n)])?;
    Ok((
        ts,
        GroundTruth {
            signatures,
            artifact_flags: flags,
            seed,
        },
    ))
}

/// Slow sinusoidal drift (0.1–0.4 Hz) whose zero crossing falls in the middle
/// half of the trial, so its excursion is visible within the window.
fn add_drift(rng: &mut ChaCha8Rng, buf: &mut [f64], fs: f64, amplitude: f64) {
    let n = buf.len() as f64;
    let freq = rng.random_range(0.1..0.4);
    let center = rng.random_range(0.25 * n..0.75 * n);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    for (i, v) in buf.iter_mut().enumerate() {
        *v += sign * amplitude * (2.0 * PI * freq * (i as f64 - center) / fs).sin();
    }
}

/// Spectral shaping of white noise to a 1/f power law, scaled so the
/// expected (not per-realisation) standard deviation is 1.
struct PinkShaper {
    gains: Vec<f64>,
    norm: f64,
}

impl PinkShaper {
    /// Below this frequency the amplitude response is held flat.
    const CORNER_HZ: f64 = 1.0;

    fn new(n: usize, fs: f64) -> Self {
        let gains: Vec<f64> = (0..n)
            .map(|k| {
                let k_sym = k.min(n - k);
                if k_sym == 0 {
                    return 0.0;
                }
                let f = (k_sym as f64 * fs / n as f64).max(Self::CORNER_HZ);
                1.0 / f.sqrt()
            })
            .collect();
        // E[var] of the shaped signal for unit white input is mean(|H|²)
        let mean_gain2 = gains.iter().map(|g| g * g).sum::<f64>() / n as f64;
        PinkShaper {
            gains,
            norm: 1.0 / mean_gain2.sqrt(),
        }
    }

    fn fill(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let mut spec = real_dft(out);
        for (s, g) in spec.iter_mut().zip(&self.gains) {
            *s *= *g * self.norm;
        }
        let shaped: Vec<Complex64> = idft(&spec);
        for (o, s) in out.iter_mut().zip(shaped) {
            *o = s.re;
        }
    }
}

/// Concentric rings inside radius 0.9, one channel at the centre.
fn ring_layout(n: usize) -> Vec<[f64; 2]> {
    if n == 0 {
        return Vec::new();
    }
    let mut pos = vec![[0.0, 0.0]];
    let mut ring = 1;
    while pos.len() < n {
        let capacity = 6 * ring;
        let remaining = n - pos.len();
        let count = capacity.min(remaining);
        let radius = 0.9 * ring as f64 / ring_count(n) as f64;
        for j in 0..count {
            let theta = PI / 2.0 - 2.0 * PI * j as f64 / count as f64;
            pos.push([radius * theta.cos(), radius * theta.sin()]);
        }
        ring += 1;
    }
    pos
}

fn ring_count(n: usize) -> usize {
    let mut rings = 0;
    let mut placed = 1;
    while placed < n {
        rings += 1;
        placed += 6 * rings;
    }
    rings.max(1)
}
