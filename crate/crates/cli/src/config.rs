//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Every accepted key with its default value and a one-line description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("seed", "0", "seed for synthesis, fold assignment and the ensemble's inner folds"),
    ("synth.subject", "synthetic", "subject identifier written into the trial set"),
    ("synth.trials", "160", "number of trials (a multiple of the class count)"),
    ("synth.channels", "16", "number of channels"),
    ("synth.samples", "640", "samples per trial"),
    ("synth.sample_rate", "256", "sampling rate in Hz"),
    ("synth.class_freqs", "8,12,20,30", "signature frequency per class in Hz"),
    ("synth.class_names", "", "comma-separated class names; empty for class0, class1, ..."),
    ("synth.channels_per_class", "2", "signature channels per class"),
    ("synth.amplitude", "0.5", "signature amplitude"),
    ("synth.noise", "1.0", "standard deviation of the 1/f background"),
    ("synth.artifact_prob", "0.2", "probability of a drift artifact per (trial, channel)"),
    ("synth.artifact_amplitude", "10", "drift artifact amplitude"),
    ("synth.random_phase", "false", "draw a random signature phase per trial"),
    ("clean.z_thresh", "3.0", "robust z-score threshold for mean and spread"),
    ("clean.drift_factor", "5.0", "drift limit as a multiple of the median channel std"),
    ("vmd.modes", "6", "number of VMD modes"),
    ("vmd.alpha", "2000", "VMD bandwidth penalty"),
    ("vmd.tau", "0", "VMD dual ascent step"),
    ("vmd.tol", "1e-7", "VMD convergence tolerance"),
    ("vmd.max_iter", "500", "VMD iteration cap"),
    ("vmd.extension", "even", "boundary extension: even | odd"),
    ("features.catalog", "default", "feature catalog: default | extended"),
    ("features.interval", "", "interval to extract features from; empty for the whole trial"),
    ("standardize", "true", "z-score features with training-row statistics"),
    ("selector", "mrmr_fcq", "mrmr_fcq | mrmr_miq | anova_f | chi_square | mutual_info | pearson | relieff | pca | all"),
    ("selector.k", "12", "features (or PCA components) kept"),
    ("selector.mi_bins", "10", "equal-width bins for mutual information"),
    ("selector.relief_k", "10", "ReliefF neighbours"),
    ("model", "ensemble", "ensemble | logreg | lda"),
    ("model.lambda", "1", "L2 penalty of the single logistic regression"),
    ("model.lambdas", "100,10,1,0.1,0.01", "L2 penalties of the ensemble's base models"),
    ("model.inner_folds", "5", "inner folds producing the meta-features"),
    ("model.meta_lambda", "1", "L2 penalty of the meta-learner"),
    ("model.max_iter", "2000", "logistic regression iteration cap"),
    ("model.grad_tol", "1e-6", "logistic regression gradient tolerance"),
    ("model.lda_gamma", "0.1", "LDA covariance shrinkage"),
    ("cv.k", "10", "cross-validation folds"),
    ("cv.protocol", "leakage_safe", "leakage_safe | paper_protocol"),
    ("sweep.ks", "2,4,8,12,16,24,32", "K values for the sweep"),
    ("topomap.interval", "action", "interval averaged for the ERP"),
    ("topomap.summary", "rms", "rms | mean | mean_abs"),
    ("topomap.grid", "64", "raster size in cells per side"),
    ("topomap.positions", "", "positions CSV (channel_name,x,y); empty to use the trial set's"),
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            values: KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

impl RunConfig {
    /// Defaults overlaid with the file text and then the `key=value` overrides.
    pub fn load(text: Option<&str>, overrides: &[String]) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(text) = text {
            let mut seen = Vec::new();
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", i + 1)))?;
                let k = k.trim();
                if seen.contains(&k.to_string()) {
                    return Err(ConfigError(format!("line {}: key '{k}' given twice", i + 1)));
                }
                seen.push(k.to_string());
                cfg.set(k, v.trim()).map_err(|e| ConfigError(format!("line {}: {}", i + 1, e.0)))?;
            }
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("--set '{o}': expected key=value")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(v) => {
                *v = value.to_string();
                Ok(())
            }
            None => Err(ConfigError(format!("unknown key '{key}'"))),
        }
    }

    pub fn str(&self, key: &str) -> &str {
        self.values.get(key).unwrap_or_else(|| panic!("undeclared config key {key}"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.str(key)
            .parse()
            .map_err(|e| ConfigError(format!("{key} = '{}': {e}", self.str(key))))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        let s = self.str(key);
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|e| ConfigError(format!("{key}: '{}': {e}", p.trim())))
            })
            .collect()
    }

    /// Every key with its effective value, in key order.
    pub fn echo(&self) -> String {
        let mut out = String::from("# effective configuration\n");
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}
