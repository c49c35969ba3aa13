//! Catalog configuration, column descriptors and the per-channel extractor.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::signal::{Wavelet, Window};

use super::fd::{band_feature_names, extract_fd_with, Band, FD_SCALAR_NAMES};
use super::td::{extract_td, TD_NAMES};
use super::tfd::{extract_tfd, tfd_feature_names, TFD_STATS};

/// Bumped whenever a feature definition changes.
pub const CATALOG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Td,
    Fd,
    Tfd,
}

impl Domain {
    pub fn code(self) -> u8 {
        match self {
            Domain::Td => 0,
            Domain::Fd => 1,
            Domain::Tfd => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Domain::Td),
            1 => Ok(Domain::Fd),
            2 => Ok(Domain::Tfd),
            _ => Err(Error::format(format!("unknown feature domain code {code}"))),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Td => "TD",
            Domain::Fd => "FD",
            Domain::Tfd => "TFD",
        })
    }
}

/// One column of a feature matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureDescriptor {
    pub channel_index: usize,
    pub domain: Domain,
    pub name: String,
    /// Ordered key-value parameters, e.g. `wavelet=db4`.
    pub params: Vec<(String, String)>,
}

impl FeatureDescriptor {
    /// `key=value;key=value`, empty when there are no parameters.
    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Compact label such as `C3/TFD/rms[wavelet=db4;levels=5;subband=D2]`.
    pub fn label(&self, channel_names: &[String]) -> String {
        let ch = channel_names
            .get(self.channel_index)
            .cloned()
            .unwrap_or_else(|| format!("ch{}", self.channel_index));
        let params = self.params_string();
        if params.is_empty() {
            format!("{ch}/{}/{}", self.domain, self.name)
        } else {
            format!("{ch}/{}/{}[{params}]", self.domain, self.name)
        }
    }
}

/// One wavelet decomposition of the TFD block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TfdSpec {
    pub wavelet: Wavelet,
    pub levels: usize,
}

impl fmt::Display for TfdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.wavelet, self.levels)
    }
}

impl FromStr for TfdSpec {
    type Err = Error;

    /// `db4:5`, or just `db4` for five levels.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (w, l) = match s.split_once(':') {
            Some((w, l)) => (w, l.trim()),
            None => (s, "5"),
        };
        let levels: usize = l
            .parse()
            .map_err(|_| Error::invalid_arg(format!("bad wavelet depth in '{s}'")))?;
        if levels == 0 || levels > 16 {
            return Err(Error::invalid_arg(format!("wavelet depth must be 1..=16, got {levels}")));
        }
        Ok(TfdSpec {
            wavelet: w.trim().parse()?,
            levels,
        })
    }
}

/// Which features are extracted from every channel.
///
/// Empty name lists disable a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogConfig {
    pub td: Vec<String>,
    /// Scalar spectral names and/or `band_power_<band>` / `relative_power_<band>`.
    pub fd: Vec<String>,
    pub bands: Vec<Band>,
    pub window: Window,
    pub tfd: Vec<TfdSpec>,
    pub tfd_stats: Vec<String>,
}

impl Default for CatalogConfig {
    /// 23 TD, 19 FD and 36 TFD (db4, 5 levels) features per channel.
    fn default() -> Self {
        let bands = Band::eeg_defaults();
        let mut fd: Vec<String> = FD_SCALAR_NAMES.iter().map(|s| s.to_string()).collect();
        fd.extend(band_feature_names(&bands));
        CatalogConfig {
            td: TD_NAMES.iter().map(|s| s.to_string()).collect(),
            fd,
            bands,
            window: Window::Hann,
            tfd: vec![TfdSpec {
                wavelet: Wavelet::Db4,
                levels: 5,
            }],
            tfd_stats: TFD_STATS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl CatalogConfig {
    /// 191 features per channel: TD without `variance` (a duplicate of Hjorth
    /// activity), all FD, and TFD blocks db4:5, db2:5, haar:5, db4:6.
    pub fn extended() -> Self {
        let mut cfg = CatalogConfig::default();
        cfg.td.retain(|n| n != "variance");
        cfg.tfd = ["db4:5", "db2:5", "haar:5", "db4:6"]
            .iter()
            .map(|s| s.parse().expect("static spec"))
            .collect();
        cfg
    }

    /// Checks names against the known catalog; rejects duplicates and empty catalogs.
    pub fn validate(&self) -> Result<()> {
        check_subset("TD", &self.td, TD_NAMES.iter().map(|s| s.to_string()))?;
        let mut band_names = HashSet::new();
        for b in &self.bands {
            if !(b.lo >= 0.0 && b.hi > b.lo) {
                return Err(Error::invalid_arg(format!("band '{}' has bad edges", b.name)));
            }
            if !band_names.insert(b.name.as_str()) {
                return Err(Error::invalid_arg(format!("duplicate band '{}'", b.name)));
            }
        }
        let fd_known = FD_SCALAR_NAMES
            .iter()
            .map(|s| s.to_string())
            .chain(band_feature_names(&self.bands));
        check_subset("FD", &self.fd, fd_known)?;
        check_subset("TFD stat", &self.tfd_stats, TFD_STATS.iter().map(|s| s.to_string()))?;
        let mut seen = HashSet::new();
        for spec in &self.tfd {
            if !seen.insert((spec.wavelet, spec.levels)) {
                return Err(Error::invalid_arg(format!("duplicate TFD block {spec}")));
            }
        }
        if self.per_channel_count() == 0 {
            return Err(Error::invalid_arg("feature catalog is empty"));
        }
        Ok(())
    }

    pub fn per_channel_count(&self) -> usize {
        let tfd: usize = if self.tfd_stats.is_empty() {
            0
        } else {
            self.tfd.iter().map(|s| (s.levels + 1) * self.tfd_stats.len()).sum()
        };
        self.td.len() + self.fd.len() + tfd
    }

    /// Shortest signal every enabled extractor accepts.
    pub fn min_samples(&self) -> usize {
        let mut n = 1;
        if !self.td.is_empty() {
            n = n.max(16);
        }
        if !self.fd.is_empty() {
            n = n.max(64);
        }
        if !self.tfd_stats.is_empty() {
            for s in &self.tfd {
                n = n.max(1 << s.levels);
            }
        }
        n
    }

    /// One-line summary stored alongside matrices.
    pub fn describe(&self) -> String {
        let tfd: Vec<String> = self.tfd.iter().map(|s| s.to_string()).collect();
        format!(
            "catalog-v{CATALOG_VERSION} td={} fd={} tfd=[{}]x{} window={}",
            self.td.len(),
            self.fd.len(),
            tfd.join(","),
            self.tfd_stats.len(),
            self.window.name()
        )
    }

    /// Column descriptors of one channel, in extraction order.
    pub fn channel_descriptors(&self, channel_index: usize) -> Vec<FeatureDescriptor> {
        let mut out = Vec::with_capacity(self.per_channel_count());
        for name in &self.td {
            out.push(FeatureDescriptor {
                channel_index,
                domain: Domain::Td,
                name: name.clone(),
                params: vec![],
            });
        }
        for name in &self.fd {
            let params = match self.band_of(name) {
                Some(b) => vec![
                    ("lo_hz".to_string(), format!("{}", b.lo)),
                    ("hi_hz".to_string(), format!("{}", b.hi)),
                ],
                None => vec![],
            };
            out.push(FeatureDescriptor {
                channel_index,
                domain: Domain::Fd,
                name: name.clone(),
                params,
            });
        }
        if !self.tfd_stats.is_empty() {
            for spec in &self.tfd {
                for band in crate::signal::subband_labels(spec.levels) {
                    for stat in &self.tfd_stats {
                        out.push(FeatureDescriptor {
                            channel_index,
                            domain: Domain::Tfd,
                            name: stat.clone(),
                            params: vec![
                                ("wavelet".to_string(), spec.wavelet.to_string()),
                                ("levels".to_string(), spec.levels.to_string()),
                                ("subband".to_string(), band.clone()),
                            ],
                        });
                    }
                }
            }
        }
        out
    }

    fn band_of(&self, fd_name: &str) -> Option<&Band> {
        let band = fd_name
            .strip_prefix("band_power_")
            .or_else(|| fd_name.strip_prefix("relative_power_"))?;
        self.bands.iter().find(|b| b.name == band)
    }

    /// Feature vector of one signal, aligned with [`Self::channel_descriptors`].
    pub fn extract(&self, x: &[f64], sample_rate: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.per_channel_count());
        if !self.td.is_empty() {
            let all = extract_td(x, sample_rate)?;
            pick(&all, &self.td, &mut out)?;
        }
        if !self.fd.is_empty() {
            let all = extract_fd_with(x, sample_rate, &self.bands, self.window)?;
            pick(&all, &self.fd, &mut out)?;
        }
        if !self.tfd_stats.is_empty() {
            let stats: Vec<&str> = self.tfd_stats.iter().map(String::as_str).collect();
            for spec in &self.tfd {
                let all = extract_tfd(x, sample_rate, spec.wavelet, spec.levels)?;
                pick(&all, &tfd_feature_names(spec.levels, &stats), &mut out)?;
            }
        }
        Ok(out)
    }
}

fn pick(all: &super::FeatureValues, names: &[String], out: &mut Vec<f64>) -> Result<()> {
    for n in names {
        out.push(
            all.get(n)
                .ok_or_else(|| Error::invalid_arg(format!("extractor produced no '{n}'")))?,
        );
    }
    Ok(())
}

fn check_subset(what: &str, names: &[String], known: impl Iterator<Item = String>) -> Result<()> {
    let known: HashSet<String> = known.collect();
    let mut seen = HashSet::new();
    for n in names {
        if !known.contains(n) {
            return Err(Error::invalid_arg(format!("unknown {what} feature '{n}'")));
        }
        if !seen.insert(n) {
            return Err(Error::invalid_arg(format!("duplicate {what} feature '{n}'")));
        }
    }
    Ok(())
}

/// Short human-readable definition used in the catalog manifest.
pub fn definition(d: &FeatureDescriptor) -> &'static str {
    match (d.domain, d.name.as_str()) {
        (Domain::Td, "mean") => "arithmetic mean",
        (Domain::Td, "median") => "median",
        (Domain::Td, "std") => "population standard deviation",
        (Domain::Td, "variance") => "population variance",
        (Domain::Td, "skewness") => "third standardized moment; 0 for constant signals",
        (Domain::Td, "kurtosis") => "excess kurtosis; 0 for constant signals",
        (Domain::Td, "rms") => "root mean square",
        (Domain::Td, "mean_abs") => "mean absolute value",
        (Domain::Td, "peak_to_peak") => "max - min",
        (Domain::Td, "iqr") => "interquartile range (linear interpolation)",
        (Domain::Td, "zero_crossings") => "sign changes with threshold 0",
        (Domain::Td, "slope_sign_changes") => "local extrema count",
        (Domain::Td, "waveform_length") => "sum of |x[i+1] - x[i]|",
        (Domain::Td, "willison_amplitude") => "count of |x[i+1] - x[i]| > 0.1 std",
        (Domain::Td, "log_energy") => "ln(sum x^2 + 1e-12)",
        (Domain::Td, "hjorth_activity") => "variance",
        (Domain::Td, "hjorth_mobility") => "sqrt(var(dx) / var(x)); 0 for constant signals",
        (Domain::Td, "hjorth_complexity") => "mobility(dx) / mobility(x); 0 when undefined",
        (Domain::Td, "amplitude_entropy") => "Shannon entropy (nats) of a 16-bin amplitude histogram",
        (Domain::Td, "envelope_mean") => "mean of the Hilbert envelope",
        (Domain::Td, "envelope_std") => "std of the Hilbert envelope",
        (Domain::Td, "envelope_max") => "max of the Hilbert envelope",
        (Domain::Td, "envelope_median") => "median of the Hilbert envelope",
        (Domain::Fd, "dominant_frequency") => "frequency of the largest periodogram bin",
        (Domain::Fd, "spectral_centroid") => "power-weighted mean frequency",
        (Domain::Fd, "median_frequency") => "frequency at 50% cumulative power",
        (Domain::Fd, "spectral_rolloff") => "frequency at 85% cumulative power",
        (Domain::Fd, "spectral_slope") => {
            "least-squares slope of log10 power vs frequency over 0.5-100 Hz (spectral deformation)"
        }
        (Domain::Fd, "spectral_skewness") => "skewness of power as a distribution over frequency",
        (Domain::Fd, "spectral_kurtosis") => "excess kurtosis of power over frequency",
        (Domain::Fd, "spectral_entropy") => "Shannon entropy of normalized power / ln(bins)",
        (Domain::Fd, "spectral_flatness") => "geometric / arithmetic mean of non-DC power",
        (Domain::Fd, n) if n.starts_with("band_power_") => "periodogram power in [lo, hi) Hz",
        (Domain::Fd, n) if n.starts_with("relative_power_") => "band power / total power",
        (Domain::Tfd, "band_power") => "mean squared subband coefficient",
        (Domain::Tfd, "mean_abs") => "mean absolute subband coefficient",
        (Domain::Tfd, "waveform_length") => "subband waveform length",
        (Domain::Tfd, "rms") => "subband root mean square",
        (Domain::Tfd, "std") => "subband standard deviation",
        (Domain::Tfd, "katz_fd") => "Katz fractal dimension of the subband (fractal length); 0 if constant",
        _ => "",
    }
}
