//! Orthogonal multilevel DWT (Mallat cascade) with periodization.
//!
//! Periodization keeps the transform orthogonal, so every level maps `n`
//! samples to `n/2` approximation plus `n/2` detail coefficients and energy is
//! conserved exactly up to rounding. Each level therefore needs an even input
//! length: the signal length must be divisible by `2^levels`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Supported orthogonal wavelets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Wavelet {
    Haar,
    Db2,
    #[default]
    Db4,
}

// Reconstruction low-pass (scaling) filters, normalised to unit L2 norm.
const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
const DB2: [f64; 4] = [
    0.482_962_913_144_690_25,
    0.836_516_303_737_469,
    0.224_143_868_041_857_35,
    -0.129_409_522_550_921_45,
];
const DB4: [f64; 8] = [
    0.230_377_813_308_855_23,
    0.714_846_570_552_541_5,
    0.630_880_767_929_590_4,
    -0.027_983_769_416_983_85,
    -0.187_034_811_718_881_14,
    0.030_841_381_835_986_965,
    0.032_883_011_666_982_945,
    -0.010_597_401_784_997_278,
];

impl Wavelet {
    pub const ALL: [Wavelet; 3] = [Wavelet::Haar, Wavelet::Db2, Wavelet::Db4];

    pub fn name(self) -> &'static str {
        match self {
            Wavelet::Haar => "haar",
            Wavelet::Db2 => "db2",
            Wavelet::Db4 => "db4",
        }
    }

    /// Scaling filter `h`.
    pub fn lowpass(self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &HAAR,
            Wavelet::Db2 => &DB2,
            Wavelet::Db4 => &DB4,
        }
    }

    /// Wavelet filter `g[k] = (-1)^k h[L-1-k]`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] })
            .collect()
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" | "db1" => Ok(Wavelet::Haar),
            "db2" => Ok(Wavelet::Db2),
            "db4" => Ok(Wavelet::Db4),
            other => Err(Error::invalid_arg(format!("unsupported wavelet '{other}'"))),
        }
    }
}

/// Subbands ordered `[D1, D2, …, DL, AL]` (finest detail first).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    pub wavelet: Wavelet,
    pub levels: usize,
    pub subbands: Vec<Vec<f64>>,
}

impl WaveletDecomposition {
    pub fn detail(&self, level: usize) -> &[f64] {
        &self.subbands[level - 1]
    }

    pub fn approximation(&self) -> &[f64] {
        &self.subbands[self.levels]
    }

    /// Labels matching `subbands`: `D1 … DL, AL`.
    pub fn subband_names(&self) -> Vec<String> {
        subband_names(self.levels)
    }

    pub fn coefficient_count(&self) -> usize {
        self.subbands.iter().map(Vec::len).sum()
    }

    pub fn energy(&self) -> f64 {
        self.subbands.iter().flatten().map(|c| c * c).sum()
    }
}

pub(crate) fn subband_names(levels: usize) -> Vec<String> {
    (1..=levels)
        .map(|l| format!("D{l}"))
        .chain(std::iter::once(format!("A{levels}")))
        .collect()
}

pub fn dwt(x: &[f64], wavelet: Wavelet, levels: usize) -> Result<WaveletDecomposition> {
    if levels == 0 {
        return Err(Error::invalid_arg("wavelet depth must be at least 1"));
    }
    let block = 1usize
        .checked_shl(levels as u32)
        .filter(|&b| b != 0)
        .ok_or_else(|| Error::invalid_arg(format!("wavelet depth {levels} too large")))?;
    if x.len() < block {
        return Err(Error::invalid_arg(format!(
            "too few samples ({}) for {levels} wavelet levels",
            x.len()
        )));
    }
    if x.len() % block != 0 {
        return Err(Error::invalid_arg(format!(
            "periodized DWT of depth {levels} needs a length divisible by {block}, got {}",
            x.len()
        )));
    }
    let h = wavelet.lowpass();
    let g = wavelet.highpass();
    let mut subbands = Vec::with_capacity(levels + 1);
    let mut approx = x.to_vec();
    for _ in 0..levels {
        let (a, d) = analysis_step(&approx, h, &g);
        subbands.push(d);
        approx = a;
    }
    subbands.push(approx);
    Ok(WaveletDecomposition {
        wavelet,
        levels,
        subbands,
    })
}

/// Inverse of [`dwt`].
pub fn idwt(dec: &WaveletDecomposition) -> Result<Vec<f64>> {
    if dec.subbands.len() != dec.levels + 1 {
        return Err(Error::invalid_arg("subband count does not match depth"));
    }
    let h = dec.wavelet.lowpass();
    let g = dec.wavelet.highpass();
    let mut approx = dec.subbands[dec.levels].clone();
    for level in (0..dec.levels).rev() {
        let detail = &dec.subbands[level];
        if detail.len() != approx.len() {
            return Err(Error::invalid_arg("subband lengths are inconsistent"));
        }
        approx = synthesis_step(&approx, detail, h, &g);
    }
    Ok(approx)
}

fn analysis_step(x: &[f64], h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for i in 0..half {
        let mut sa = 0.0;
        let mut sd = 0.0;
        for k in 0..h.len() {
            let v = x[(2 * i + k) % n];
            sa += h[k] * v;
            sd += g[k] * v;
        }
        a[i] = sa;
        d[i] = sd;
    }
    (a, d)
}

fn synthesis_step(a: &[f64], d: &[f64], h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = 2 * a.len();
    let mut x = vec![0.0; n];
    for i in 0..a.len() {
        for k in 0..h.len() {
            x[(2 * i + k) % n] += h[k] * a[i] + g[k] * d[i];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_are_orthonormal() {
        for w in Wavelet::ALL {
            let h = w.lowpass();
            let g = w.highpass();
            let l = h.len();
            for shift in (0..l).step_by(2) {
                let hh: f64 = (0..l - shift).map(|k| h[k] * h[k + shift]).sum();
                let gg: f64 = (0..l - shift).map(|k| g[k] * g[k + shift]).sum();
                let expect = if shift == 0 { 1.0 } else { 0.0 };
                assert!((hh - expect).abs() < 1e-12, "{w} h shift {shift}: {hh}");
                assert!((gg - expect).abs() < 1e-12, "{w} g shift {shift}: {gg}");
            }
            let hg: f64 = h.iter().zip(&g).map(|(a, b)| a * b).sum();
            assert!(hg.abs() < 1e-12);
            assert!((h.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_constant_has_no_detail() {
        let dec = dwt(&[1.0; 4], Wavelet::Haar, 1).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        assert!(dec.detail(1).iter().all(|&v| v.abs() < 1e-15));
        for &a in dec.approximation() {
            assert!((a - r2).abs() < 1e-15);
        }
    }

    #[test]
    fn depth_errors() {
        assert!(dwt(&[1.0; 8], Wavelet::Db4, 4).is_err());
        assert!(dwt(&[1.0; 12], Wavelet::Db4, 3).is_err());
        assert!(dwt(&[1.0; 8], Wavelet::Db4, 0).is_err());
        assert!(dwt(&[1.0; 8], Wavelet::Db4, 3).is_ok());
    }

    #[test]
    fn round_trip_short_signal_wraps_filter() {
        // db4 (8 taps) on a 4-sample level wraps the filter more than once
        let x = [0.3, -1.2, 2.5, 0.7];
        let dec = dwt(&x, Wavelet::Db4, 2).unwrap();
        let back = idwt(&dec).unwrap();
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(dec.subband_names(), ["D1", "D2", "A2"]);
    }

    #[test]
    fn names_parse() {
        assert_eq!("db4".parse::<Wavelet>().unwrap(), Wavelet::Db4);
        assert!("sym5".parse::<Wavelet>().is_err());
    }
}
