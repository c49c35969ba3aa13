use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::fourier::real_dft;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    Rect,
    #[default]
    Hann,
}

impl Window {
    pub fn name(self) -> &'static str {
        match self {
            Window::Rect => "rect",
            Window::Hann => "hann",
        }
    }

    /// Symmetric-periodic Hann (`0.5 − 0.5 cos(2πn/N)`) or all ones.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rect => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rect" => Ok(Window::Rect),
            "hann" => Ok(Window::Hann),
            other => Err(Error::invalid_arg(format!("unknown window '{other}'"))),
        }
    }
}

/// One-sided power spectrum.
///
/// `power[k]` is the mean-square power carried by bin `k` (not a density):
/// summing it over all bins gives the signal's mean square for a rectangular
/// window, and its window-normalised estimate otherwise. A unit sinusoid
/// therefore integrates to 0.5.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub resolution: f64,
}

impl Spectrum {
    /// Total power over bins with `lo <= f < hi`.
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        self.freqs
            .iter()
            .zip(&self.power)
            .filter(|(&f, _)| f >= lo && f < hi)
            .map(|(_, &p)| p)
            .sum()
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Frequency of the strongest bin (lowest frequency on ties).
    pub fn peak_frequency(&self) -> f64 {
        self.freqs[crate::stats::argmax(&self.power)]
    }
}

/// Windowed periodogram of a real signal.
pub fn psd(x: &[f64], sample_rate: f64, window: Window) -> Result<Spectrum> {
    let n = x.len();
    if n < 8 {
        return Err(Error::invalid_arg(format!("psd needs at least 8 samples, got {n}")));
    }
    if !(sample_rate > 0.0) {
        return Err(Error::invalid_arg("sample rate must be positive"));
    }
    let w = window.coefficients(n);
    let w_energy: f64 = w.iter().map(|v| v * v).sum();
    let windowed: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a * b).collect();
    let spec = real_dft(&windowed);
    let norm = 1.0 / (n as f64 * w_energy);
    let n_bins = n / 2 + 1;
    let power = (0..n_bins)
        .map(|k| {
            let p = spec[k].norm_sqr() * norm;
            // DC and (for even n) Nyquist have no mirrored partner
            if k == 0 || (n % 2 == 0 && k == n / 2) {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let resolution = sample_rate / n as f64;
    let freqs = (0..n_bins).map(|k| k as f64 * resolution).collect();
    Ok(Spectrum {
        freqs,
        power,
        resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * freq * i as f64 / fs).sin()).collect()
    }

    #[test]
    fn sinusoid_peak_and_power() {
        let x = tone(10.0, 256.0, 640);
        for w in [Window::Rect, Window::Hann] {
            let s = psd(&x, 256.0, w).unwrap();
            assert!((s.peak_frequency() - 10.0).abs() <= s.resolution);
            assert!((s.total_power() - 0.5).abs() < 1e-3, "{w:?}: {}", s.total_power());
        }
    }

    #[test]
    fn zero_signal_has_zero_power() {
        let s = psd(&[0.0; 64], 128.0, Window::Hann).unwrap();
        assert!(s.power.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn axis_is_monotone_to_nyquist() {
        for n in [64, 65] {
            let s = psd(&vec![1.0; n], 256.0, Window::Rect).unwrap();
            assert!(s.freqs.windows(2).all(|w| w[1] > w[0]));
            assert_eq!(s.freqs[0], 0.0);
            assert!(*s.freqs.last().unwrap() <= 128.0);
            assert_eq!(s.freqs.len(), s.power.len());
        }
    }

    #[test]
    fn too_short() {
        assert!(psd(&[1.0; 7], 256.0, Window::Rect).is_err());
    }
}
