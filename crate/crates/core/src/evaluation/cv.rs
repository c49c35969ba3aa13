use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Scaler};
use crate::models::{PipelineSpec, SelectorSpec};

use super::folds::{stratified_kfold, FoldPlan};
use super::metrics::{confusion_matrix, metrics_from_confusion, MetricSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Protocol {
    /// Scaler and selector are fitted inside each fold.
    #[default]
    LeakageSafe,
    /// Selection is fitted once on the full standardized matrix before folding.
    PaperProtocol,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::LeakageSafe => "leakage_safe",
            Protocol::PaperProtocol => "paper_protocol",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leakage_safe" => Ok(Protocol::LeakageSafe),
            "paper_protocol" => Ok(Protocol::PaperProtocol),
            _ => Err(Error::invalid_arg(format!("unknown protocol '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvConfig {
    pub k: usize,
    pub seed: u64,
    pub protocol: Protocol,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            k: 10,
            seed: 0,
            protocol: Protocol::LeakageSafe,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_test: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub subject: String,
    pub model: String,
    pub pipeline: String,
    pub protocol: Protocol,
    pub k: usize,
    pub seed: u64,
    pub class_names: Vec<String>,
    /// Truth in rows, prediction in columns.
    pub confusion: Array2<u64>,
    pub metrics: MetricSet,
    pub folds: Vec<FoldMetrics>,
    /// Out-of-fold prediction for every trial, in row order.
    pub predictions: Vec<usize>,
    pub labels: Vec<usize>,
    /// Fold that held out each trial.
    pub assignments: Vec<usize>,
    /// Wall time in seconds; excluded from rendered reports.
    pub elapsed_s: f64,
}

impl EvalReport {
    pub fn n_trials(&self) -> usize {
        self.labels.len()
    }

    /// Per-trial predictions with the run metadata as `#` header lines.
    pub fn predictions_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in [
            ("subject", self.subject.clone()),
            ("model", self.model.clone()),
            ("protocol", self.protocol.to_string()),
            ("pipeline", self.pipeline.clone()),
            ("k", self.k.to_string()),
            ("seed", self.seed.to_string()),
            ("classes", self.class_names.join(";")),
        ] {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str("trial,fold,truth,predicted\n");
        for i in 0..self.n_trials() {
            let _ = writeln!(out, "{i},{},{},{}", self.assignments[i], self.labels[i], self.predictions[i]);
        }
        out
    }

    /// Rebuilds a report from [`EvalReport::predictions_csv`] output; all
    /// metrics are recomputed and the wall time is zero.
    pub fn from_predictions_csv(text: &str) -> Result<EvalReport> {
        let mut meta = std::collections::HashMap::new();
        let mut rows: Vec<[usize; 4]> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if line.is_empty() || line.starts_with("trial,") {
                continue;
            }
            let cells: Vec<usize> = line
                .split(',')
                .map(|c| c.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::format(format!("line {}: expected four integers", ln + 1)))?;
            let cells: [usize; 4] = cells
                .try_into()
                .map_err(|_| Error::format(format!("line {}: expected four integers", ln + 1)))?;
            rows.push(cells);
        }
        let get = |k: &str| {
            meta.get(k)
                .cloned()
                .ok_or_else(|| Error::format(format!("missing '# {k} = …' header")))
        };
        let class_names: Vec<String> = get("classes")?.split(';').map(String::from).collect();
        let n_classes = class_names.len();
        let k: usize = get("k")?.parse().map_err(|_| Error::format("bad k header"))?;
        let seed: u64 = get("seed")?.parse().map_err(|_| Error::format("bad seed header"))?;
        if rows.is_empty() {
            return Err(Error::invalid_data("no prediction rows"));
        }
        if rows.iter().enumerate().any(|(i, r)| r[0] != i) {
            return Err(Error::invalid_data("trial column is not 0, 1, 2, …"));
        }
        if rows.iter().any(|r| r[1] >= k || r[2] >= n_classes || r[3] >= n_classes) {
            return Err(Error::invalid_data("fold or class index out of range"));
        }
        let assignments: Vec<usize> = rows.iter().map(|r| r[1]).collect();
        let labels: Vec<usize> = rows.iter().map(|r| r[2]).collect();
        let predictions: Vec<usize> = rows.iter().map(|r| r[3]).collect();
        let confusion = confusion_matrix(&labels, &predictions, n_classes);
        Ok(EvalReport {
            subject: get("subject")?,
            model: get("model")?,
            pipeline: get("pipeline")?,
            protocol: get("protocol")?.parse()?,
            k,
            seed,
            metrics: metrics_from_confusion(&confusion)?,
            folds: fold_metrics(&labels, &predictions, &assignments, k, n_classes)?,
            confusion,
            class_names,
            predictions,
            labels,
            assignments,
            elapsed_s: 0.0,
        })
    }
}

fn fold_metrics(
    labels: &[usize],
    predictions: &[usize],
    assignments: &[usize],
    k: usize,
    n_classes: usize,
) -> Result<Vec<FoldMetrics>> {
    (0..k)
        .filter(|&f| assignments.contains(&f))
        .map(|f| {
            let idx: Vec<usize> = (0..labels.len()).filter(|&i| assignments[i] == f).collect();
            let truth: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
            let pred: Vec<usize> = idx.iter().map(|&i| predictions[i]).collect();
            let m = metrics_from_confusion(&confusion_matrix(&truth, &pred, n_classes))?;
            Ok(FoldMetrics {
                fold: f,
                n_test: truth.len(),
                correct: truth.iter().zip(&pred).filter(|(a, b)| a == b).count(),
                accuracy: m.accuracy,
                macro_f1: m.macro_f1,
            })
        })
        .collect()
}

/// Pooled out-of-fold predictions from `fit_predict(train_rows, test_rows)`.
///
/// Folds run in parallel; any fold error aborts with the fold index attached.
pub fn cross_validate_with<F>(labels: &[usize], plan: &FoldPlan, fit_predict: F) -> Result<(Vec<usize>, Vec<Vec<usize>>)>
where
    F: Fn(&[usize], &[usize]) -> Result<Vec<usize>> + Sync,
{
    if plan.n_samples() != labels.len() {
        return Err(Error::invalid_arg("fold plan does not match the label count"));
    }
    let per_fold: Vec<(Vec<usize>, Vec<usize>)> = (0..plan.k)
        .into_par_iter()
        .map(|f| {
            let train = plan.train_indices(f);
            let test = plan.test_indices(f);
            let pred = fit_predict(&train, &test).map_err(|e| e.context(format!("fold {f}")))?;
            if pred.len() != test.len() {
                return Err(Error::invalid_data(format!(
                    "fold {f}: {} predictions for {} test rows",
                    pred.len(),
                    test.len()
                )));
            }
            Ok((test, pred))
        })
        .collect::<Result<_>>()?;
    let mut pooled = vec![usize::MAX; labels.len()];
    let mut fold_preds = Vec::with_capacity(plan.k);
    for (test, pred) in per_fold {
        for (&i, &p) in test.iter().zip(&pred) {
            pooled[i] = p;
        }
        fold_preds.push(pred);
    }
    if pooled.contains(&usize::MAX) {
        return Err(Error::invalid_data("some trials were never predicted"));
    }
    Ok((pooled, fold_preds))
}

/// Stratified k-fold evaluation of a pipeline with pooled metrics.
pub fn cross_validate(fm: &FeatureMatrix, spec: &PipelineSpec, cv: &CvConfig) -> Result<EvalReport> {
    fm.validate()?;
    let start = Instant::now();
    let n_classes = fm.n_classes();
    let y = &fm.labels;
    let plan = stratified_kfold(y, cv.k, cv.seed)?;

    let (x, fold_spec): (Array2<f64>, PipelineSpec) = match cv.protocol {
        Protocol::LeakageSafe => (fm.values.clone(), spec.clone()),
        Protocol::PaperProtocol => {
            let scaled = if spec.standardize {
                Scaler::fit_all(&fm.values)?.apply(&fm.values)?
            } else {
                fm.values.clone()
            };
            let sel = spec.selector.fit(&scaled, y, n_classes)?;
            let reduced = sel.apply(&scaled)?;
            (
                reduced,
                PipelineSpec {
                    selector: SelectorSpec::All,
                    ..spec.clone()
                },
            )
        }
    };

    let (pooled, _) = cross_validate_with(y, &plan, |train, test| {
        let xt = x.select(Axis(0), train);
        let yt: Vec<usize> = train.iter().map(|&i| y[i]).collect();
        let fitted = fold_spec.fit(&xt, &yt, n_classes)?;
        fitted.predict(&x.select(Axis(0), test))
    })?;

    let folds = fold_metrics(y, &pooled, &plan.assignments, cv.k, n_classes)?;
    let confusion = confusion_matrix(y, &pooled, n_classes);
    let metrics = metrics_from_confusion(&confusion)?;
    Ok(EvalReport {
        subject: fm.source_id.clone(),
        model: spec.model.name().to_string(),
        pipeline: spec.describe(),
        protocol: cv.protocol,
        k: cv.k,
        seed: cv.seed,
        class_names: fm.class_names.clone(),
        confusion,
        metrics,
        folds,
        predictions: pooled,
        labels: y.clone(),
        assignments: plan.assignments.clone(),
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Domain, FeatureDescriptor};
    use crate::models::{LogRegParams, ModelSpec};

    fn matrix(n: usize) -> FeatureMatrix {
        let labels: Vec<usize> = (0..n).map(|i| i % 4).collect();
        let values = Array2::from_shape_fn((n, 6), |(i, j)| {
            ((i * 13 + j * 5) % 11) as f64 * 0.1 + if j == labels[i] { 2.0 } else { 0.0 }
        });
        FeatureMatrix {
            values,
            descriptors: (0..6)
                .map(|j| FeatureDescriptor {
                    channel_index: j,
                    domain: Domain::Td,
                    name: "mean".into(),
                    params: vec![],
                })
                .collect(),
            labels,
            class_names: ["a", "b", "c", "d"].map(String::from).to_vec(),
            channel_names: (0..6).map(|j| format!("C{j}")).collect(),
            source_id: "s".into(),
            catalog: "test".into(),
        }
    }

    #[test]
    fn oracle_model_is_perfect() {
        let fm = matrix(40);
        let plan = stratified_kfold(&fm.labels, 10, 0).unwrap();
        let (pred, _) = cross_validate_with(&fm.labels, &plan, |_, test| Ok(test.iter().map(|&i| fm.labels[i]).collect())).unwrap();
        let m = metrics_from_confusion(&confusion_matrix(&fm.labels, &pred, 4)).unwrap();
        assert_eq!((m.accuracy, m.macro_f1), (100.0, 100.0));
    }

    #[test]
    fn fold_failure_aborts_with_context() {
        let fm = matrix(40);
        let plan = stratified_kfold(&fm.labels, 4, 0).unwrap();
        let err = cross_validate_with(&fm.labels, &plan, |_, test| {
            if test.contains(&0) {
                Err(Error::numerical("boom"))
            } else {
                Ok(vec![0; test.len()])
            }
        })
        .unwrap_err();
        assert!(err.to_string().contains("fold"), "{err}");
    }

    #[test]
    fn both_protocols_run_and_agree_on_bookkeeping() {
        let fm = matrix(80);
        let spec = PipelineSpec {
            model: ModelSpec::LogReg(LogRegParams::default()),
            ..PipelineSpec::default()
        };
        let spec = PipelineSpec {
            selector: spec.selector.with_k(4).unwrap(),
            ..spec
        };
        for protocol in [Protocol::LeakageSafe, Protocol::PaperProtocol] {
            let r = cross_validate(&fm, &spec, &CvConfig { k: 5, seed: 1, protocol }).unwrap();
            assert_eq!(r.confusion.sum(), 80);
            let correct: usize = r.folds.iter().map(|f| f.correct).sum();
            assert_eq!(r.metrics.accuracy, 100.0 * correct as f64 / 80.0);
            assert_eq!(r.metrics.micro_f1, r.metrics.accuracy);
            assert!(r.metrics.accuracy > 90.0, "{protocol}: {}", r.metrics.accuracy);
            let back = EvalReport::from_predictions_csv(&r.predictions_csv()).unwrap();
            assert_eq!(back, EvalReport { elapsed_s: 0.0, ..r });
        }
    }

    #[test]
    fn malformed_prediction_files_are_rejected() {
        let head = "# subject = s\n# model = m\n# protocol = leakage_safe\n# pipeline = p\n# k = 2\n# seed = 0\n# classes = a;b\n";
        assert!(EvalReport::from_predictions_csv(&format!("{head}0,0,0,0\n1,1,1,0\n")).is_ok());
        assert!(EvalReport::from_predictions_csv(&format!("{head}0,0,0,2\n")).is_err());
        assert!(EvalReport::from_predictions_csv(&format!("{head}0,0,0\n")).is_err());
        assert!(EvalReport::from_predictions_csv("0,0,0,0\n").is_err());
    }
}
