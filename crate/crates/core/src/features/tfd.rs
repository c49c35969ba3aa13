//! Wavelet subband statistics.

use crate::error::{Error, Result};
use crate::signal::{dwt, Wavelet};
use crate::stats;

use super::FeatureValues;

/// Per-subband statistics, in column order within a subband.
pub const TFD_STATS: [&str; 6] = [
    "band_power",
    "mean_abs",
    "waveform_length",
    "rms",
    "std",
    "katz_fd",
];

/// Feature names for one decomposition: subband-major, then stat order.
pub fn tfd_feature_names(levels: usize, stats: &[&str]) -> Vec<String> {
    crate::signal::subband_labels(levels)
        .into_iter()
        .flat_map(|band| stats.iter().map(move |s| format!("{s}_{band}")))
        .collect()
}

/// Subband statistics of a `levels`-deep periodized DWT.
///
/// Trailing samples beyond the largest multiple of `2^levels` are dropped
/// before the transform.
pub fn extract_tfd(x: &[f64], _sample_rate: f64, wavelet: Wavelet, levels: usize) -> Result<FeatureValues> {
    let block = 1usize
        .checked_shl(levels as u32)
        .filter(|&b| b != 0 && levels > 0)
        .ok_or_else(|| Error::invalid_arg(format!("invalid wavelet depth {levels}")))?;
    if x.len() < block {
        return Err(Error::invalid_arg(format!(
            "TFD features at depth {levels} need ≥ {block} samples, got {}",
            x.len()
        )));
    }
    let usable = x.len() - x.len() % block;
    let dec = dwt(&x[..usable], wavelet, levels)?;
    let mut values = Vec::with_capacity(dec.subbands.len() * TFD_STATS.len());
    for band in &dec.subbands {
        values.extend(subband_stats(band));
    }
    Ok(FeatureValues {
        names: tfd_feature_names(levels, &TFD_STATS),
        values,
    })
}

fn subband_stats(c: &[f64]) -> [f64; 6] {
    let n = c.len() as f64;
    let power = c.iter().map(|v| v * v).sum::<f64>() / n;
    let mav = c.iter().map(|v| v.abs()).sum::<f64>() / n;
    let wl: f64 = c.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    [power, mav, wl, power.sqrt(), stats::std_dev(c), katz(c, wl)]
}

/// Katz fractal dimension `log10(n) / (log10(n) + log10(d / L))` with `n`
/// steps, curve length `L` and maximal excursion `d` from the first sample.
fn katz(c: &[f64], length: f64) -> f64 {
    if c.len() < 2 || length <= 0.0 {
        return 0.0;
    }
    let d = c.iter().map(|v| (v - c[0]).abs()).fold(0.0, f64::max);
    if d <= 0.0 {
        return 0.0;
    }
    let steps = ((c.len() - 1) as f64).log10();
    if steps <= 0.0 {
        return 0.0;
    }
    steps / (steps + (d / length).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_signal() {
        let f = extract_tfd(&[0.0; 256], 256.0, Wavelet::Db4, 5).unwrap();
        assert_eq!(f.values.len(), 36);
        assert!(f.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn forty_hz_lands_in_second_detail() {
        let x: Vec<f64> = (0..640).map(|i| (2.0 * PI * 40.0 * i as f64 / 256.0).sin()).collect();
        let f = extract_tfd(&x, 256.0, Wavelet::Db4, 5).unwrap();
        let powers: Vec<f64> = ["D1", "D2", "D3", "D4", "D5", "A5"]
            .iter()
            .map(|b| f.get(&format!("band_power_{b}")).unwrap())
            .collect();
        assert_eq!(stats::argmax(&powers), 1, "{powers:?}");
    }

    #[test]
    fn energy_consistency() {
        let x: Vec<f64> = (0..640)
            .map(|i| {
                let t = i as f64 / 256.0;
                (2.0 * PI * 7.0 * t).sin() + 0.3 * (2.0 * PI * 55.0 * t).cos() + 0.01 * i as f64
            })
            .collect();
        for (wavelet, levels) in [(Wavelet::Db4, 5), (Wavelet::Haar, 3), (Wavelet::Db2, 6)] {
            let f = extract_tfd(&x, 256.0, wavelet, levels).unwrap();
            let mut len = 640;
            let mut total = 0.0;
            for level in 1..=levels {
                len /= 2;
                total += f.get(&format!("band_power_D{level}")).unwrap() * len as f64;
            }
            total += f.get(&format!("band_power_A{levels}")).unwrap() * len as f64;
            let energy: f64 = x.iter().map(|v| v * v).sum();
            assert!((total - energy).abs() / energy < 1e-6, "{wavelet}: {total} vs {energy}");
        }
    }

    #[test]
    fn katz_conventions() {
        assert_eq!(katz(&[2.0; 10], 0.0), 0.0);
        // a straight line is one-dimensional
        let line: Vec<f64> = (0..50).map(|i| i as f64).collect();
        assert!((katz(&line, 49.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_short() {
        assert!(extract_tfd(&[1.0; 31], 256.0, Wavelet::Db4, 5).is_err());
        assert!(extract_tfd(&[1.0; 33], 256.0, Wavelet::Db4, 5).is_ok());
    }
}
