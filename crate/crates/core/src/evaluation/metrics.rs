use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Percentages in `[0, 100]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSet {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub micro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub total: u64,
}

/// Accuracy `trace / total` and per-class `F1 = 2TP / (2TP + FP + FN)` from a
/// confusion matrix with truth in rows. Empty classes score F1 = 0.
pub fn metrics_from_confusion(confusion: &Array2<u64>) -> Result<MetricSet> {
    let (r, c) = confusion.dim();
    if r != c {
        return Err(Error::invalid_arg(format!("confusion matrix is {r}×{c}")));
    }
    let total: u64 = confusion.sum();
    if total == 0 {
        return Err(Error::invalid_arg("confusion matrix is empty"));
    }
    let trace: u64 = confusion.diag().sum();
    let mut per_class = Vec::with_capacity(r);
    let (mut tp_sum, mut fp_sum, mut fn_sum) = (0u64, 0u64, 0u64);
    for k in 0..r {
        let tp = confusion[[k, k]];
        let fp = confusion.column(k).sum() - tp;
        let fn_ = confusion.row(k).sum() - tp;
        tp_sum += tp;
        fp_sum += fp;
        fn_sum += fn_;
        per_class.push(ClassMetrics {
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
            f1: ratio(2 * tp, 2 * tp + fp + fn_),
        });
    }
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / r as f64;
    Ok(MetricSet {
        accuracy: ratio(trace, total),
        macro_f1,
        micro_f1: ratio(2 * tp_sum, 2 * tp_sum + fp_sum + fn_sum),
        per_class,
        total,
    })
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

pub fn confusion_matrix(truth: &[usize], predicted: &[usize], n_classes: usize) -> Array2<u64> {
    let mut m = Array2::zeros((n_classes, n_classes));
    for (&t, &p) in truth.iter().zip(predicted) {
        m[[t, p]] += 1;
    }
    m
}
