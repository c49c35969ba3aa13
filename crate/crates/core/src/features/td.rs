//! Time-domain features, including envelope statistics.

use crate::error::{Error, Result};
use crate::signal::hilbert_envelope;
use crate::stats;

use super::FeatureValues;

/// Bins of the amplitude histogram used for the Shannon entropy.
const ENTROPY_BINS: usize = 16;
/// Added inside the logarithm of the log-energy feature.
const LOG_ENERGY_FLOOR: f64 = 1e-12;

/// Default TD catalog, in column order.
pub const TD_NAMES: [&str; 23] = [
    "mean",
    "median",
    "std",
    "variance",
    "skewness",
    "kurtosis",
    "rms",
    "mean_abs",
    "peak_to_peak",
    "iqr",
    "zero_crossings",
    "slope_sign_changes",
    "waveform_length",
    "willison_amplitude",
    "log_energy",
    "hjorth_activity",
    "hjorth_mobility",
    "hjorth_complexity",
    "amplitude_entropy",
    "envelope_mean",
    "envelope_std",
    "envelope_max",
    "envelope_median",
];

/// All TD features of one signal, aligned with [`TD_NAMES`].
///
/// Degenerate inputs follow fixed conventions: higher moments, Hjorth
/// mobility/complexity and the entropy are 0 for constant signals.
pub fn extract_td(x: &[f64], _sample_rate: f64) -> Result<FeatureValues> {
    let n = x.len();
    if n < 16 {
        return Err(Error::invalid_arg(format!("TD features need ≥ 16 samples, got {n}")));
    }
    let mean = stats::mean(x);
    let (m2, m3, m4) = central_moments(x, mean);
    let std = m2.sqrt();
    let constant = is_flat(m2, x);
    let (skew, kurt) = if constant {
        (0.0, 0.0)
    } else {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    };
    let sorted = stats::sorted(x);
    let energy: f64 = x.iter().map(|v| v * v).sum();
    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let waveform_length: f64 = diffs.iter().map(|d| d.abs()).sum();
    let wamp_eps = 0.1 * std;
    let willison = diffs.iter().filter(|d| d.abs() > wamp_eps).count() as f64;
    let zero_crossings = x.windows(2).filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).count() as f64;
    let ssc = x
        .windows(3)
        .filter(|w| (w[1] - w[0]) * (w[1] - w[2]) > 0.0)
        .count() as f64;
    let (mobility, complexity) = hjorth(x, &diffs, m2, constant);
    let env = hilbert_envelope(x);
    let env_mean = stats::mean(&env);

    let values = vec![
        mean,
        stats::quantile_sorted(&sorted, 0.5),
        std,
        m2,
        skew,
        kurt,
        (energy / n as f64).sqrt(),
        x.iter().map(|v| v.abs()).sum::<f64>() / n as f64,
        sorted[n - 1] - sorted[0],
        stats::quantile_sorted(&sorted, 0.75) - stats::quantile_sorted(&sorted, 0.25),
        zero_crossings,
        ssc,
        waveform_length,
        willison,
        (energy + LOG_ENERGY_FLOOR).ln(),
        m2,
        mobility,
        complexity,
        histogram_entropy(&sorted, ENTROPY_BINS),
        env_mean,
        stats::std_dev(&env),
        env.iter().copied().fold(f64::MIN, f64::max),
        stats::median(&env),
    ];
    Ok(FeatureValues::new(&TD_NAMES, values))
}

fn central_moments(x: &[f64], mean: f64) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Variance indistinguishable from rounding noise of the mean.
fn is_flat(m2: f64, x: &[f64]) -> bool {
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    m2 <= (1e-13 * scale).powi(2)
}

fn hjorth(x: &[f64], diffs: &[f64], m2: f64, constant: bool) -> (f64, f64) {
    if constant {
        return (0.0, 0.0);
    }
    let var_d = stats::variance(diffs);
    let mobility = (var_d / m2).sqrt();
    let dd: Vec<f64> = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    let var_dd = stats::variance(&dd);
    let complexity = if var_d > 0.0 && mobility > 0.0 {
        (var_dd / var_d).sqrt() / mobility
    } else {
        0.0
    };
    debug_assert!(x.len() == diffs.len() + 1);
    (mobility, complexity)
}

/// Shannon entropy (nats) of an equal-width amplitude histogram.
fn histogram_entropy(sorted: &[f64], bins: usize) -> f64 {
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    if hi <= lo {
        return 0.0;
    }
    let mut counts = vec![0usize; bins];
    let width = (hi - lo) / bins as f64;
    for &v in sorted {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = sorted.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn get(f: &FeatureValues, name: &str) -> f64 {
        f.get(name).unwrap()
    }

    #[test]
    fn constant_signal_closed_forms() {
        let c = -1.75;
        let f = extract_td(&[c; 64], 256.0).unwrap();
        assert!((get(&f, "mean") - c).abs() < 1e-12);
        assert!(get(&f, "std") < 1e-12);
        assert_eq!(get(&f, "zero_crossings"), 0.0);
        assert_eq!(get(&f, "waveform_length"), 0.0);
        assert!((get(&f, "envelope_mean") - c.abs()).abs() < 1e-9);
        assert_eq!(get(&f, "skewness"), 0.0);
        assert_eq!(get(&f, "hjorth_mobility"), 0.0);
        assert_eq!(get(&f, "amplitude_entropy"), 0.0);
        assert!(f.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn unit_sinusoid() {
        let x: Vec<f64> = (0..640).map(|i| (2.0 * PI * 10.0 * i as f64 / 256.0).sin()).collect();
        let f = extract_td(&x, 256.0).unwrap();
        let rms = get(&f, "rms");
        assert!((rms - 0.5f64.sqrt()).abs() / 0.5f64.sqrt() < 0.01);
        let zc = get(&f, "zero_crossings");
        assert!((zc - 50.0).abs() <= 1.0, "{zc}");
        assert!((get(&f, "kurtosis") + 1.5).abs() < 0.01);
    }

    #[test]
    fn scale_homogeneity() {
        let x: Vec<f64> = (0..200).map(|i| ((i * 37 % 11) as f64 - 5.0) * 0.3 + (i as f64 * 0.1).sin()).collect();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let a = extract_td(&x, 256.0).unwrap();
        let b = extract_td(&x2, 256.0).unwrap();
        for name in ["rms", "mean_abs", "waveform_length", "peak_to_peak"] {
            assert_eq!(get(&b, name), 2.0 * get(&a, name), "{name}");
        }
        for name in ["zero_crossings", "slope_sign_changes", "willison_amplitude"] {
            assert_eq!(get(&b, name), get(&a, name), "{name}");
        }
    }

    #[test]
    fn too_short() {
        assert!(extract_td(&[0.0; 15], 256.0).is_err());
    }
}
