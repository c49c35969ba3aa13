//! Frequency-domain features from the Hann-windowed periodogram.

use crate::error::{Error, Result};
use crate::signal::{psd, Spectrum, Window};

use super::FeatureValues;

const POWER_FLOOR: f64 = 1e-20;
const ROLLOFF: f64 = 0.85;
/// Fit range of the log-power slope, Hz.
const SLOPE_RANGE: (f64, f64) = (0.5, 100.0);

/// A named frequency band `[lo, hi)` in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Band {
            name: name.into(),
            lo,
            hi,
        }
    }

    /// δ, θ, α, β, γ; γ is capped at min(100 Hz, Nyquist).
    pub fn eeg_defaults() -> Vec<Band> {
        vec![
            Band::new("delta", 0.5, 4.0),
            Band::new("theta", 4.0, 8.0),
            Band::new("alpha", 8.0, 13.0),
            Band::new("beta", 13.0, 30.0),
            Band::new("gamma", 30.0, 100.0),
        ]
    }

    /// Upper edge clipped to the Nyquist frequency (inclusive of the last bin).
    pub fn effective_hi(&self, sample_rate: f64) -> f64 {
        let nyquist = sample_rate / 2.0;
        if self.hi >= nyquist {
            nyquist + 1e-9
        } else {
            self.hi
        }
    }
}

/// Scalar FD features, in column order; band powers follow.
pub const FD_SCALAR_NAMES: [&str; 9] = [
    "dominant_frequency",
    "spectral_centroid",
    "median_frequency",
    "spectral_rolloff",
    "spectral_slope",
    "spectral_skewness",
    "spectral_kurtosis",
    "spectral_entropy",
    "spectral_flatness",
];

/// Column names for the band powers of `bands`: all absolute, then all relative.
pub fn band_feature_names(bands: &[Band]) -> Vec<String> {
    bands
        .iter()
        .map(|b| format!("band_power_{}", b.name))
        .chain(bands.iter().map(|b| format!("relative_power_{}", b.name)))
        .collect()
}

/// Default FD features with the standard EEG bands (19 values).
pub fn extract_fd(x: &[f64], sample_rate: f64) -> Result<FeatureValues> {
    extract_fd_with(x, sample_rate, &Band::eeg_defaults(), Window::Hann)
}

pub fn extract_fd_with(
    x: &[f64],
    sample_rate: f64,
    bands: &[Band],
    window: Window,
) -> Result<FeatureValues> {
    if x.len() < 64 {
        return Err(Error::invalid_arg(format!(
            "FD features need ≥ 64 samples, got {}",
            x.len()
        )));
    }
    let spec = psd(x, sample_rate, window)?;
    let mut values = spectral_shape(&spec);
    let total = spec.total_power();
    let abs: Vec<f64> = bands
        .iter()
        .map(|b| spec.band_power(b.lo, b.effective_hi(sample_rate)))
        .collect();
    let rel: Vec<f64> = abs
        .iter()
        .map(|&p| if total > 0.0 { p / total } else { 0.0 })
        .collect();
    values.extend(abs);
    values.extend(rel);
    let mut names: Vec<String> = FD_SCALAR_NAMES.iter().map(|s| s.to_string()).collect();
    names.extend(band_feature_names(bands));
    Ok(FeatureValues { names, values })
}

fn spectral_shape(spec: &Spectrum) -> Vec<f64> {
    let f = &spec.freqs;
    let p = &spec.power;
    let total: f64 = p.iter().sum();
    if !(total > 0.0) {
        return vec![0.0; FD_SCALAR_NAMES.len()];
    }
    let dominant = spec.peak_frequency();
    let centroid = f.iter().zip(p).map(|(f, p)| f * p).sum::<f64>() / total;
    let cumulative_at = |q: f64| {
        let target = q * total;
        let mut acc = 0.0;
        for (fk, pk) in f.iter().zip(p) {
            acc += pk;
            if acc >= target {
                return *fk;
            }
        }
        *f.last().unwrap()
    };
    let median = cumulative_at(0.5);
    let rolloff = cumulative_at(ROLLOFF);

    let (mut var, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for (fk, pk) in f.iter().zip(p) {
        let w = pk / total;
        let d = fk - centroid;
        var += w * d * d;
        m3 += w * d * d * d;
        m4 += w * d * d * d * d;
    }
    let (skew, kurt) = if var > 0.0 {
        (m3 / var.powf(1.5), m4 / (var * var) - 3.0)
    } else {
        (0.0, 0.0)
    };

    let entropy = if p.len() > 1 {
        let h: f64 = p
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| {
                let q = v / total;
                -q * q.ln()
            })
            .sum();
        h / (p.len() as f64).ln()
    } else {
        0.0
    };

    // flatness over the non-DC bins
    let ac = &p[1..];
    let log_mean = ac.iter().map(|v| v.max(POWER_FLOOR).ln()).sum::<f64>() / ac.len() as f64;
    let arith = ac.iter().sum::<f64>() / ac.len() as f64;
    let flatness = if arith > 0.0 { log_mean.exp() / arith } else { 0.0 };

    vec![
        dominant,
        centroid,
        median,
        rolloff,
        log_power_slope(spec),
        skew,
        kurt,
        entropy,
        flatness,
    ]
}

/// Least-squares slope of log10 power against frequency over [`SLOPE_RANGE`].
fn log_power_slope(spec: &Spectrum) -> f64 {
    let pts: Vec<(f64, f64)> = spec
        .freqs
        .iter()
        .zip(&spec.power)
        .filter(|(&f, _)| f >= SLOPE_RANGE.0 && f <= SLOPE_RANGE.1)
        .map(|(&f, &p)| (f, p.max(POWER_FLOOR).log10()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    #[test]
    fn pure_tone() {
        let x: Vec<f64> = (0..640).map(|i| (2.0 * PI * 10.0 * i as f64 / 256.0).sin()).collect();
        let f = extract_fd(&x, 256.0).unwrap();
        assert!((f.get("dominant_frequency").unwrap() - 10.0).abs() <= 0.4);
        assert!(f.get("relative_power_alpha").unwrap() > 0.95);
        assert_eq!(f.values.len(), 19);
    }

    #[test]
    fn zero_signal_conventions() {
        let f = extract_fd(&[0.0; 128], 256.0).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0), "{:?}", f.values);
    }

    #[test]
    fn white_noise_is_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let bands = Band::eeg_defaults();
        let mut rel = vec![0.0; bands.len()];
        let mut flat = 0.0;
        let reps = 200;
        for _ in 0..reps {
            let x: Vec<f64> = (0..640).map(|_| StandardNormal.sample(&mut rng)).collect();
            let f = extract_fd(&x, 256.0).unwrap();
            flat += f.get("spectral_flatness").unwrap() / reps as f64;
            for (r, b) in rel.iter_mut().zip(&bands) {
                *r += f.get(&format!("relative_power_{}", b.name)).unwrap() / reps as f64;
            }
        }
        assert!(flat > 0.5, "{flat}");
        for (r, b) in rel.iter().zip(&bands) {
            let expect = (b.effective_hi(256.0).min(128.0) - b.lo) / 128.0;
            assert!((r / expect - 1.0).abs() < 0.25, "{}: {r} vs {expect}", b.name);
        }
    }

    #[test]
    fn too_short() {
        assert!(extract_fd(&[1.0; 63], 256.0).is_err());
    }
}
