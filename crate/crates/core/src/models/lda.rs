//! Linear discriminant analysis with covariance shrinkage toward a scaled identity.

use nalgebra::{Cholesky, DMatrix, DVector};
use ndarray::Array2;

use crate::error::{Error, Result};

use super::logreg::{argmax_rows, softmax_rows};

#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    /// `[C, p]`.
    pub means: Array2<f64>,
    pub priors: Vec<f64>,
    pub gamma: f64,
    /// `Σ_γ⁻¹ μ_c` per class, `[C, p]`.
    pub coef: Array2<f64>,
    /// `−½ μ_cᵀ Σ_γ⁻¹ μ_c + ln π_c`.
    pub intercept: Vec<f64>,
}

/// `Σ_γ = (1 − γ) Σ + γ (tr Σ / p) I` with the maximum-likelihood pooled
/// within-class covariance `Σ`.
pub fn lda_train(x: &Array2<f64>, y: &[usize], n_classes: usize, gamma: f64) -> Result<LdaModel> {
    super::logreg::check_training_set(x, y, n_classes)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid_arg(format!("shrinkage must lie in [0, 1], got {gamma}")));
    }
    let (n, p) = x.dim();
    let mut counts = vec![0usize; n_classes];
    for &l in y {
        counts[l] += 1;
    }
    if let Some(c) = counts.iter().position(|&c| c < 2) {
        return Err(Error::invalid_arg(format!("class {c} has fewer than two samples")));
    }
    let mut means = Array2::<f64>::zeros((n_classes, p));
    for (row, &l) in x.rows().into_iter().zip(y) {
        let mut m = means.row_mut(l);
        m += &row;
    }
    for (mut m, &c) in means.rows_mut().into_iter().zip(&counts) {
        m /= c as f64;
    }
    let mut centered = x.clone();
    for (mut row, &l) in centered.rows_mut().into_iter().zip(y) {
        row -= &means.row(l);
    }
    let pooled = centered.t().dot(&centered) / n as f64;
    let trace: f64 = pooled.diag().sum();
    let ridge = gamma * trace / p as f64;
    let shrunk = DMatrix::from_fn(p, p, |i, j| {
        (1.0 - gamma) * pooled[[i, j]] + if i == j { ridge } else { 0.0 }
    });
    let chol = Cholesky::new(shrunk)
        .ok_or_else(|| Error::numerical("shrunk covariance is not positive definite"))?;

    let priors: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let mut coef = Array2::zeros((n_classes, p));
    let mut intercept = Vec::with_capacity(n_classes);
    for c in 0..n_classes {
        let mu = DVector::from_iterator(p, means.row(c).iter().copied());
        let a = chol.solve(&mu);
        for j in 0..p {
            coef[[c, j]] = a[j];
        }
        intercept.push(-0.5 * mu.dot(&a) + priors[c].ln());
    }
    if coef.iter().chain(&intercept).any(|v| !v.is_finite()) {
        return Err(Error::numerical("LDA produced non-finite discriminants"));
    }
    Ok(LdaModel {
        means,
        priors,
        gamma,
        coef,
        intercept,
    })
}

impl LdaModel {
    pub fn n_features(&self) -> usize {
        self.coef.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.coef.nrows()
    }

    /// Discriminant scores `δ_c(x)`, `[n, C]`.
    pub fn decision_function(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::invalid_arg(format!(
                "model expects {} features, got {}",
                self.n_features(),
                x.ncols()
            )));
        }
        let mut d = x.dot(&self.coef.t());
        for mut row in d.rows_mut() {
            for (v, b) in row.iter_mut().zip(&self.intercept) {
                *v += b;
            }
        }
        Ok(d)
    }

    /// Class posteriors under the shared-covariance Gaussian model.
    pub fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        let mut d = self.decision_function(x)?;
        softmax_rows(&mut d);
        Ok(d)
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<usize>> {
        Ok(argmax_rows(&self.decision_function(x)?))
    }
}
