//! Stacked ensemble of L2-regularized logistic regressions.

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluation::stratified_kfold;

use super::logreg::{argmax_rows, logreg_train, LogRegModel, LogRegParams};

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleParams {
    pub lambdas: Vec<f64>,
    pub inner_folds: usize,
    pub meta_lambda: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for EnsembleParams {
    fn default() -> Self {
        EnsembleParams {
            lambdas: vec![100.0, 10.0, 1.0, 0.1, 0.01],
            inner_folds: 5,
            meta_lambda: 1.0,
            seed: 0,
            max_iter: 2000,
            grad_tol: 1e-6,
        }
    }
}

impl EnsembleParams {
    fn base(&self, lambda: f64) -> LogRegParams {
        LogRegParams {
            lambda,
            max_iter: self.max_iter,
            grad_tol: self.grad_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackEnsemble {
    /// Base models refit on the full training data, one per lambda.
    pub bases: Vec<LogRegModel>,
    /// Trained on the concatenated out-of-fold base probabilities.
    pub meta: LogRegModel,
    pub inner_folds: usize,
    pub seed: u64,
}

/// Out-of-fold probabilities from `inner_folds` stratified folds feed the
/// meta model; bases are then refit on all rows for inference.
pub fn ensemble_train(x: &Array2<f64>, y: &[usize], n_classes: usize, params: &EnsembleParams) -> Result<StackEnsemble> {
    super::logreg::check_training_set(x, y, n_classes)?;
    if params.lambdas.is_empty() {
        return Err(Error::invalid_arg("ensemble needs at least one base lambda"));
    }
    if params.inner_folds < 2 {
        return Err(Error::invalid_arg("ensemble needs at least 2 inner folds"));
    }
    let needed = 2 * params.inner_folds * n_classes;
    if x.nrows() < needed {
        return Err(Error::invalid_arg(format!(
            "ensemble needs ≥ {needed} training rows for {} inner folds, got {}",
            params.inner_folds,
            x.nrows()
        )));
    }
    let plan = stratified_kfold(y, params.inner_folds, params.seed)
        .map_err(|e| e.context("ensemble inner folds"))?;

    let n_bases = params.lambdas.len();
    let jobs: Vec<(usize, usize)> = (0..n_bases)
        .flat_map(|b| (0..params.inner_folds).map(move |f| (b, f)))
        .collect();
    let oof: Vec<(usize, Vec<usize>, Array2<f64>)> = jobs
        .par_iter()
        .map(|&(b, f)| {
            let train = plan.train_indices(f);
            let test = plan.test_indices(f);
            let xt = x.select(Axis(0), &train);
            let yt: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let m = logreg_train(&xt, &yt, n_classes, &params.base(params.lambdas[b]))?;
            let p = m.predict_proba(&x.select(Axis(0), &test))?;
            Ok((b, test, p))
        })
        .collect::<Result<_>>()?;

    let mut meta_x = Array2::zeros((x.nrows(), n_bases * n_classes));
    for (b, rows, p) in oof {
        for (r, &i) in rows.iter().enumerate() {
            for c in 0..n_classes {
                meta_x[[i, b * n_classes + c]] = p[[r, c]];
            }
        }
    }
    let meta = logreg_train(&meta_x, y, n_classes, &params.base(params.meta_lambda))?;
    let bases = params
        .lambdas
        .par_iter()
        .map(|&l| logreg_train(x, y, n_classes, &params.base(l)))
        .collect::<Result<Vec<_>>>()?;
    Ok(StackEnsemble {
        bases,
        meta,
        inner_folds: params.inner_folds,
        seed: params.seed,
    })
}

impl StackEnsemble {
    pub fn n_features(&self) -> usize {
        self.bases[0].n_features()
    }

    pub fn n_classes(&self) -> usize {
        self.meta.n_classes()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.bases.iter().map(|b| b.lambda).collect()
    }

    /// Concatenated base probabilities, `[n, bases × C]`.
    pub fn meta_features(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        let c = self.n_classes();
        let mut out = Array2::zeros((x.nrows(), self.bases.len() * c));
        for (b, m) in self.bases.iter().enumerate() {
            let p = m.predict_proba(x)?;
            out.slice_mut(ndarray::s![.., b * c..(b + 1) * c]).assign(&p);
        }
        Ok(out)
    }

    pub fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.meta.predict_proba(&self.meta_features(x)?)
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<usize>> {
        Ok(argmax_rows(&self.predict_proba(x)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn clusters(n: usize, c: usize, spread: f64, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<usize> = (0..n).map(|i| i % c).collect();
        let x = Array2::from_shape_fn((n, 3), |(i, j)| {
            let e: f64 = StandardNormal.sample(&mut rng);
            let center = if j == y[i] % 3 { 3.0 } else { 0.0 } + if y[i] == 3 { -3.0 } else { 0.0 };
            center + spread * e
        });
        (x, y)
    }

    #[test]
    fn identical_bases_reduce_to_single_model() {
        let (x, y) = clusters(80, 2, 0.3, 1);
        let params = EnsembleParams {
            lambdas: vec![0.1; 5],
            ..EnsembleParams::default()
        };
        let e = ensemble_train(&x, &y, 2, &params).unwrap();
        let single = logreg_train(&x, &y, 2, &LogRegParams::with_lambda(0.1)).unwrap();
        let mf = e.meta_features(&x).unwrap();
        for b in 1..5 {
            assert_eq!(mf.column(2 * b), mf.column(0));
        }
        assert_eq!(e.predict(&x).unwrap(), single.predict(&x).unwrap());
        assert_eq!(e.predict(&x).unwrap(), y);
    }

    #[test]
    fn deterministic_and_normalized() {
        let (x, y) = clusters(80, 4, 1.0, 2);
        let p = EnsembleParams::default();
        let a = ensemble_train(&x, &y, 4, &p).unwrap();
        let b = ensemble_train(&x, &y, 4, &p).unwrap();
        assert_eq!(a, b);
        let probs = a.predict_proba(&x).unwrap();
        for row in probs.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-9);
        }
        let one = a.predict(&x.select(Axis(0), &[0])).unwrap();
        assert!(one.len() == 1 && one[0] < 4);
    }

    #[test]
    fn needs_enough_rows() {
        let (x, y) = clusters(39, 4, 1.0, 3);
        assert!(ensemble_train(&x, &y, 4, &EnsembleParams::default()).is_err());
    }
}
