//! Multinomial logistic regression trained by full-batch gradient descent.

use ndarray::{s, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
const MAX_STEP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRegParams {
    pub lambda: f64,
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            lambda: 1.0,
            max_iter: 2000,
            grad_tol: 1e-6,
        }
    }
}

impl LogRegParams {
    pub fn with_lambda(lambda: f64) -> Self {
        LogRegParams {
            lambda,
            ..LogRegParams::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainRecord {
    pub iterations: usize,
    pub final_loss: f64,
    /// Infinity norm of the gradient at the returned weights.
    pub grad_norm: f64,
    /// Loss after every accepted step, starting with the initial loss.
    pub loss_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    /// `[C, p + 1]`; the last column is the bias.
    pub weights: Array2<f64>,
    pub lambda: f64,
    pub record: TrainRecord,
}

impl LogRegModel {
    /// A model with the given weights and an empty training record.
    pub fn from_weights(weights: Array2<f64>, lambda: f64) -> Result<Self> {
        if weights.ncols() < 1 || weights.nrows() < 2 {
            return Err(Error::invalid_arg("weights need ≥ 2 classes and a bias column"));
        }
        if weights.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_data("non-finite model weights"));
        }
        Ok(LogRegModel {
            weights,
            lambda,
            record: TrainRecord::default(),
        })
    }

    pub fn n_classes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.weights.ncols() - 1
    }

    pub fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::invalid_arg(format!(
                "model expects {} features, got {}",
                self.n_features(),
                x.ncols()
            )));
        }
        let mut z = logits(x.view(), &self.weights);
        softmax_rows(&mut z);
        Ok(z)
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<usize>> {
        Ok(argmax_rows(&self.predict_proba(x)?))
    }
}

fn logits(x: ArrayView2<f64>, w: &Array2<f64>) -> Array2<f64> {
    let p = x.ncols();
    let mut z = x.dot(&w.slice(s![.., ..p]).t());
    let bias = w.column(p);
    for mut row in z.rows_mut() {
        row += &bias;
    }
    z
}

/// In-place row softmax with max subtraction.
pub fn softmax_rows(z: &mut Array2<f64>) {
    for mut row in z.rows_mut() {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - m).exp());
        let s = row.sum();
        row /= s;
    }
}

/// Row-wise argmax; ties go to the lowest class index.
pub fn argmax_rows(p: &Array2<f64>) -> Vec<usize> {
    p.rows()
        .into_iter()
        .map(|r| crate::stats::argmax(&r.to_vec()))
        .collect()
}

/// Mean cross-entropy plus `λ/(2n)·‖W_no-bias‖²`, and its gradient.
pub fn logreg_loss_grad(x: &Array2<f64>, y: &[usize], w: &Array2<f64>, lambda: f64) -> (f64, Array2<f64>) {
    let (n, p) = x.dim();
    let nf = n as f64;
    let mut z = logits(x.view(), w);
    let mut loss = 0.0;
    for (mut row, &label) in z.rows_mut().into_iter().zip(y) {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - row[label];
        row.mapv_inplace(|v| (v - lse).exp());
        row[label] -= 1.0;
    }
    // z now holds P − Y
    let mut grad = Array2::zeros(w.raw_dim());
    grad.slice_mut(s![.., ..p]).assign(&(z.t().dot(x) / nf));
    grad.column_mut(p).assign(&(z.sum_axis(Axis(0)) / nf));
    let wb = w.slice(s![.., ..p]);
    let reg = wb.iter().map(|v| v * v).sum::<f64>();
    let mut gb = grad.slice_mut(s![.., ..p]);
    gb.scaled_add(lambda / nf, &wb);
    (loss / nf + 0.5 * lambda * reg / nf, grad)
}

pub(crate) fn check_training_set(x: &Array2<f64>, y: &[usize], n_classes: usize) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::invalid_arg(format!("{} rows but {} labels", x.nrows(), y.len())));
    }
    if n_classes < 2 {
        return Err(Error::invalid_arg("need at least two classes"));
    }
    if let Some(&l) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::invalid_arg(format!("label out of range: {l}")));
    }
    if y.iter().all(|&l| l == y[0]) {
        return Err(Error::invalid_arg("training labels contain a single class"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid_arg("training matrix contains non-finite values"));
    }
    Ok(())
}

/// Trains from zero weights with Armijo backtracking (c = 1e-4, halving).
/// Stops when the gradient infinity norm drops below `grad_tol`, after
/// `max_iter` steps, or when no step length decreases the loss.
pub fn logreg_train(x: &Array2<f64>, y: &[usize], n_classes: usize, params: &LogRegParams) -> Result<LogRegModel> {
    check_training_set(x, y, n_classes)?;
    if !(params.lambda >= 0.0 && params.lambda.is_finite()) {
        return Err(Error::invalid_arg("l2 lambda must be finite and ≥ 0"));
    }
    let mut w = Array2::zeros((n_classes, x.ncols() + 1));
    let (mut loss, mut grad) = logreg_loss_grad(x, y, &w, params.lambda);
    let mut trace = vec![loss];
    let mut step = 1.0;
    let mut iterations = 0;
    while iterations < params.max_iter && inf_norm(&grad) >= params.grad_tol {
        let g2 = grad.iter().map(|v| v * v).sum::<f64>();
        let mut accepted = None;
        let mut t = step;
        for _ in 0..MAX_HALVINGS {
            let cand = &w - &(&grad * t);
            let (l, g) = logreg_loss_grad(x, y, &cand, params.lambda);
            if l.is_finite() && l <= loss - ARMIJO_C * t * g2 {
                accepted = Some((cand, l, g));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, l, g)) = accepted else { break };
        iterations += 1;
        w = cand;
        loss = l;
        grad = g;
        trace.push(loss);
        step = (t * 2.0).min(MAX_STEP);
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("logistic regression diverged"));
    }
    Ok(LogRegModel {
        weights: w,
        lambda: params.lambda,
        record: TrainRecord {
            iterations,
            final_loss: loss,
            grad_norm: inf_norm(&grad),
            loss_trace: trace,
        },
    })
}

fn inf_norm(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
