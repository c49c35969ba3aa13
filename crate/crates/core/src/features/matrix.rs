use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::trialset::TrialSet;

use super::catalog::{CatalogConfig, FeatureDescriptor};

/// Trials × features table with column descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub values: Array2<f64>,
    pub descriptors: Vec<FeatureDescriptor>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub channel_names: Vec<String>,
    /// Subject id of the source trial set.
    pub source_id: String,
    /// Catalog summary, see [`CatalogConfig::describe`].
    pub catalog: String,
}

impl FeatureMatrix {
    /// Checks shapes, labels and finiteness.
    pub fn validate(&self) -> Result<()> {
        let (rows, cols) = self.values.dim();
        if self.descriptors.len() != cols {
            return Err(Error::invalid_data(format!(
                "{} descriptors for {cols} columns",
                self.descriptors.len()
            )));
        }
        if self.labels.len() != rows {
            return Err(Error::invalid_data(format!("{} labels for {rows} rows", self.labels.len())));
        }
        if let Some(&l) = self.labels.iter().find(|&&l| l >= self.class_names.len()) {
            return Err(Error::invalid_data(format!("label out of range: {l}")));
        }
        if let Some(((r, c), _)) = self.values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid_data(format!("non-finite value at row {r}, column {c}")));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn column_label(&self, j: usize) -> String {
        self.descriptors[j].label(&self.channel_names)
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            values: self.values.select(Axis(0), rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            ..self.clone_meta()
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            values: self.values.select(Axis(1), cols),
            descriptors: cols.iter().map(|&c| self.descriptors[c].clone()).collect(),
            labels: self.labels.clone(),
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> FeatureMatrix {
        FeatureMatrix {
            values: Array2::zeros((0, 0)),
            descriptors: self.descriptors.clone(),
            labels: vec![],
            class_names: self.class_names.clone(),
            channel_names: self.channel_names.clone(),
            source_id: self.source_id.clone(),
            catalog: self.catalog.clone(),
        }
    }

    /// CSV manifest: one line per column with its definition.
    pub fn catalog_csv(&self) -> String {
        let mut out = String::from("column,channel_index,channel,domain,name,params,definition\n");
        for (j, d) in self.descriptors.iter().enumerate() {
            let ch = self.channel_names.get(d.channel_index).map(String::as_str).unwrap_or("");
            out.push_str(&format!(
                "{j},{},{},{},{},{},\"{}\"\n",
                d.channel_index,
                ch,
                d.domain,
                d.name,
                d.params_string(),
                super::catalog::definition(d)
            ));
        }
        out
    }
}

/// Extracts the catalog from every (trial, channel) signal.
///
/// Columns are channel-major, then catalog order. Non-finite feature values
/// are reported as errors naming the trial, channel and feature.
pub fn build_feature_matrix(ts: &TrialSet, cfg: &CatalogConfig) -> Result<FeatureMatrix> {
    cfg.validate()?;
    let n_ch = ts.n_channels();
    if ts.n_samples() < cfg.min_samples() {
        return Err(Error::invalid_arg(format!(
            "catalog needs ≥ {} samples per trial, got {}",
            cfg.min_samples(),
            ts.n_samples()
        )));
    }
    let per_ch = cfg.per_channel_count();
    let template: Vec<Vec<FeatureDescriptor>> = (0..n_ch).map(|c| cfg.channel_descriptors(c)).collect();
    let descriptors: Vec<FeatureDescriptor> = template.iter().flatten().cloned().collect();
    let fs = ts.sample_rate();

    let rows: Vec<Vec<f64>> = (0..ts.n_trials())
        .into_par_iter()
        .map(|t| {
            let mut row = Vec::with_capacity(per_ch * n_ch);
            for c in 0..n_ch {
                let x = ts.signal_f64(t, c);
                let v = cfg
                    .extract(&x, fs)
                    .map_err(|e| e.context(format!("trial {t}, channel {c}")))?;
                if let Some(j) = v.iter().position(|v| !v.is_finite()) {
                    return Err(Error::numerical(format!(
                        "non-finite feature '{}' at trial {t}, channel {c}",
                        template[c][j].name
                    )));
                }
                row.extend(v);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut values = Array2::zeros((ts.n_trials(), per_ch * n_ch));
    for (t, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            values[[t, j]] = v;
        }
    }
    Ok(FeatureMatrix {
        values,
        descriptors,
        labels: ts.labels().to_vec(),
        class_names: ts.class_names().to_vec(),
        channel_names: ts.channel_names().to_vec(),
        source_id: ts.subject_id().to_string(),
        catalog: cfg.describe(),
    })
}

const STD_FLOOR: f64 = 1e-12;

/// Per-column z-scoring fitted on a row subset.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub mean: Vec<f64>,
    /// Standard deviations floored at 1e-12; floored columns map to 0.
    pub std: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: &Array2<f64>, rows: &[usize]) -> Result<Scaler> {
        if rows.is_empty() {
            return Err(Error::invalid_arg("cannot fit a scaler on zero rows"));
        }
        if let Some(&r) = rows.iter().find(|&&r| r >= x.nrows()) {
            return Err(Error::invalid_arg(format!("row {r} out of range")));
        }
        let n = rows.len() as f64;
        let p = x.ncols();
        let mut mean = vec![0.0; p];
        for &r in rows {
            for (m, v) in mean.iter_mut().zip(x.row(r)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; p];
        for &r in rows {
            for ((s, v), m) in var.iter_mut().zip(x.row(r)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt().max(STD_FLOOR)).collect();
        Ok(Scaler { mean, std })
    }

    pub fn fit_all(x: &Array2<f64>) -> Result<Scaler> {
        let rows: Vec<usize> = (0..x.nrows()).collect();
        Scaler::fit(x, &rows)
    }

    pub fn apply(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.mean.len() {
            return Err(Error::invalid_arg(format!(
                "scaler fitted on {} columns, got {}",
                self.mean.len(),
                x.ncols()
            )));
        }
        let mut out = x.clone();
        for mut row in out.rows_mut() {
            for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *v = if *s <= STD_FLOOR { 0.0 } else { (*v - m) / s };
            }
        }
        Ok(out)
    }

    pub fn apply_matrix(&self, fm: &FeatureMatrix) -> Result<FeatureMatrix> {
        Ok(FeatureMatrix {
            values: self.apply(&fm.values)?,
            ..fm.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trialset::{generate_synthetic, SynthConfig};

    fn small_set() -> TrialSet {
        let cfg = SynthConfig {
            n_trials: 12,
            n_channels: 3,
            n_samples: 256,
            channels_per_class: 0,
            artifact_prob: 0.0,
            ..SynthConfig::default()
        };
        generate_synthetic(&cfg, 5).unwrap().0
    }

    #[test]
    fn shape_and_descriptors() {
        let ts = small_set();
        let fm = build_feature_matrix(&ts, &CatalogConfig::default()).unwrap();
        assert_eq!(fm.values.dim(), (12, 3 * 78));
        fm.validate().unwrap();
        assert_eq!(fm.descriptors[78].channel_index, 1);
        assert_eq!(fm.descriptors[78].name, "mean");
    }

    #[test]
    fn rows_follow_trial_permutation() {
        let ts = small_set();
        let cfg = CatalogConfig::default();
        let fm = build_feature_matrix(&ts, &cfg).unwrap();
        let perm: Vec<usize> = (0..12).rev().collect();
        let fm2 = build_feature_matrix(&ts.select_trials(&perm).unwrap(), &cfg).unwrap();
        assert_eq!(fm2.values, fm.values.select(Axis(0), &perm));
    }

    #[test]
    fn scaler_standardizes() {
        let x = Array2::from_shape_fn((20, 3), |(i, j)| if j == 2 { 4.0 } else { (i * (j + 1)) as f64 });
        let s = Scaler::fit_all(&x).unwrap();
        let z = s.apply(&x).unwrap();
        for j in 0..2 {
            let col: Vec<f64> = z.column(j).to_vec();
            assert!(crate::stats::mean(&col).abs() < 1e-12);
            assert!((crate::stats::std_dev(&col) - 1.0).abs() < 1e-12);
        }
        assert!(z.column(2).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scaler_fit_on_subset_leaks_nothing() {
        let x = Array2::from_shape_fn((20, 1), |(i, _)| i as f64);
        let train: Vec<usize> = (0..10).collect();
        let s = Scaler::fit(&x, &train).unwrap();
        let z = s.apply(&x.select(Axis(0), &(10..20).collect::<Vec<_>>())).unwrap();
        assert!(crate::stats::mean(&z.column(0).to_vec()) > 1.0);
        assert!(Scaler::fit(&x, &[]).is_err());
    }

    #[test]
    fn too_short_for_catalog() {
        let cfg = SynthConfig {
            n_trials: 8,
            n_channels: 1,
            n_samples: 48,
            channels_per_class: 0,
            artifact_prob: 0.0,
            ..SynthConfig::default()
        };
        let ts = generate_synthetic(&cfg, 1).unwrap().0;
        assert!(build_feature_matrix(&ts, &CatalogConfig::default()).is_err());
    }
}
