//! Scaler → selector → classifier chains, as specified and as fitted.

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};
use crate::features::Scaler;
use crate::selection::{mrmr_select, pca_fit, rank_features, MrmrVariant, PcaTransform, RankMethod, RankParams};

use super::ensemble::{ensemble_train, EnsembleParams, StackEnsemble};
use super::lda::{lda_train, LdaModel};
use super::logreg::{logreg_train, LogRegModel, LogRegParams};

#[derive(Debug, Clone, PartialEq)]
pub enum SelectorSpec {
    All,
    Rank { method: RankMethod, k: usize, params: RankParams },
    Mrmr { variant: MrmrVariant, k: usize, params: RankParams },
    Pca { components: usize },
}

impl SelectorSpec {
    /// Same selector with a different feature / component count.
    pub fn with_k(&self, k: usize) -> Result<SelectorSpec> {
        Ok(match self.clone() {
            SelectorSpec::All => return Err(Error::invalid_arg("no selector to resize")),
            SelectorSpec::Rank { method, params, .. } => SelectorSpec::Rank { method, k, params },
            SelectorSpec::Mrmr { variant, params, .. } => SelectorSpec::Mrmr { variant, k, params },
            SelectorSpec::Pca { .. } => SelectorSpec::Pca { components: k },
        })
    }

    pub fn describe(&self) -> String {
        match self {
            SelectorSpec::All => "all".to_string(),
            SelectorSpec::Rank { method, k, .. } => format!("{method}(K={k})"),
            SelectorSpec::Mrmr { variant, k, .. } => format!("mrmr_{variant}(K={k})"),
            SelectorSpec::Pca { components } => format!("pca(m={components})"),
        }
    }

    /// Fits the selector on (already scaled) training rows.
    pub fn fit(&self, x: &Array2<f64>, y: &[usize], n_classes: usize) -> Result<FittedSelector> {
        Ok(match self {
            SelectorSpec::All => FittedSelector::All,
            SelectorSpec::Rank { method, k, params } => {
                if *k == 0 || *k > x.ncols() {
                    return Err(Error::invalid_arg(format!(
                        "K = {k} must lie in 1..={}",
                        x.ncols()
                    )));
                }
                let r = rank_features(x, y, n_classes, *method, params)?;
                FittedSelector::Columns(r.ordered_indices[..*k].to_vec())
            }
            SelectorSpec::Mrmr { variant, k, params } => {
                let r = mrmr_select(x, y, n_classes, *k, *variant, params)?;
                FittedSelector::Columns(r.ordered_indices)
            }
            SelectorSpec::Pca { components } => FittedSelector::Pca(pca_fit(x, *components)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedSelector {
    All,
    Columns(Vec<usize>),
    Pca(PcaTransform),
}

impl FittedSelector {
    pub fn apply(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        match self {
            FittedSelector::All => Ok(x.clone()),
            FittedSelector::Columns(cols) => {
                if let Some(&c) = cols.iter().find(|&&c| c >= x.ncols()) {
                    return Err(Error::invalid_arg(format!("selected column {c} out of range")));
                }
                Ok(x.select(Axis(1), cols))
            }
            FittedSelector::Pca(t) => t.apply(x),
        }
    }

    pub fn output_width(&self, input: usize) -> usize {
        match self {
            FittedSelector::All => input,
            FittedSelector::Columns(c) => c.len(),
            FittedSelector::Pca(t) => t.n_components(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    LogReg(LogRegParams),
    Lda { gamma: f64 },
    Ensemble(EnsembleParams),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::LogReg(_) => "logreg",
            ModelSpec::Lda { .. } => "lda",
            ModelSpec::Ensemble(_) => "ensemble",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ModelSpec::LogReg(p) => format!("logreg(lambda={})", p.lambda),
            ModelSpec::Lda { gamma } => format!("lda(gamma={gamma})"),
            ModelSpec::Ensemble(p) => {
                let l: Vec<String> = p.lambdas.iter().map(|v| v.to_string()).collect();
                format!("ensemble(lambdas=[{}],inner_folds={})", l.join(";"), p.inner_folds)
            }
        }
    }

    pub fn fit(&self, x: &Array2<f64>, y: &[usize], n_classes: usize) -> Result<FittedModel> {
        Ok(match self {
            ModelSpec::LogReg(p) => FittedModel::LogReg(logreg_train(x, y, n_classes, p)?),
            ModelSpec::Lda { gamma } => FittedModel::Lda(lda_train(x, y, n_classes, *gamma)?),
            ModelSpec::Ensemble(p) => FittedModel::Ensemble(ensemble_train(x, y, n_classes, p)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    LogReg(LogRegModel),
    Lda(LdaModel),
    Ensemble(StackEnsemble),
}

impl FittedModel {
    pub fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        match self {
            FittedModel::LogReg(m) => m.predict_proba(x),
            FittedModel::Lda(m) => m.predict_proba(x),
            FittedModel::Ensemble(m) => m.predict_proba(x),
        }
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<usize>> {
        match self {
            FittedModel::LogReg(m) => m.predict(x),
            FittedModel::Lda(m) => m.predict(x),
            FittedModel::Ensemble(m) => m.predict(x),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            FittedModel::LogReg(m) => m.n_features(),
            FittedModel::Lda(m) => m.n_features(),
            FittedModel::Ensemble(m) => m.n_features(),
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            FittedModel::LogReg(m) => m.n_classes(),
            FittedModel::Lda(m) => m.n_classes(),
            FittedModel::Ensemble(m) => m.n_classes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSpec {
    pub standardize: bool,
    pub selector: SelectorSpec,
    pub model: ModelSpec,
}

impl Default for PipelineSpec {
    /// Standardize, MRMR (FCQ) with K = 12, stacked ensemble.
    fn default() -> Self {
        PipelineSpec {
            standardize: true,
            selector: SelectorSpec::Mrmr {
                variant: MrmrVariant::Fcq,
                k: 12,
                params: RankParams::default(),
            },
            model: ModelSpec::Ensemble(EnsembleParams::default()),
        }
    }
}

impl PipelineSpec {
    pub fn describe(&self) -> String {
        format!(
            "{}{} -> {}",
            if self.standardize { "zscore -> " } else { "" },
            self.selector.describe(),
            self.model.describe()
        )
    }

    /// Fits every stage on the given rows only.
    pub fn fit(&self, x: &Array2<f64>, y: &[usize], n_classes: usize) -> Result<FittedPipeline> {
        let scaler = if self.standardize {
            Some(Scaler::fit_all(x)?)
        } else {
            None
        };
        let xs = match &scaler {
            Some(s) => s.apply(x)?,
            None => x.clone(),
        };
        let selector = self.selector.fit(&xs, y, n_classes)?;
        let xr = selector.apply(&xs)?;
        let model = self.model.fit(&xr, y, n_classes)?;
        Ok(FittedPipeline {
            n_inputs: x.ncols(),
            scaler,
            selector,
            model,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline {
    pub n_inputs: usize,
    pub scaler: Option<Scaler>,
    pub selector: FittedSelector,
    pub model: FittedModel,
}

impl FittedPipeline {
    pub fn transform(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_inputs {
            return Err(Error::invalid_arg(format!(
                "pipeline expects {} input features, got {}",
                self.n_inputs,
                x.ncols()
            )));
        }
        let xs = match &self.scaler {
            Some(s) => s.apply(x)?,
            None => x.clone(),
        };
        self.selector.apply(&xs)
    }

    pub fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.model.predict_proba(&self.transform(x)?)
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Vec<usize>> {
        self.model.predict(&self.transform(x)?)
    }

    /// Checks that the stages chain together.
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.scaler {
            if s.mean.len() != self.n_inputs {
                return Err(Error::invalid_data("scaler width does not match the input width"));
            }
        }
        if let FittedSelector::Columns(c) = &self.selector {
            if c.iter().any(|&c| c >= self.n_inputs) {
                return Err(Error::invalid_data("selected column out of range"));
            }
        }
        if let FittedSelector::Pca(t) = &self.selector {
            if t.means.len() != self.n_inputs {
                return Err(Error::invalid_data("PCA width does not match the input width"));
            }
        }
        if self.selector.output_width(self.n_inputs) != self.model.n_features() {
            return Err(Error::invalid_data("selector output width does not match the model"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_rescaling_does_not_change_predictions() {
        let n = 60;
        let y: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let x = Array2::from_shape_fn((n, 5), |(i, j)| {
            ((i * 7 + j * 13) % 17) as f64 * 0.1 + if j == y[i] { 1.0 } else { 0.0 }
        });
        let mut x2 = x.clone();
        x2.column_mut(1).mapv_inplace(|v| 2.0 * v + 5.0);
        for model in [
            ModelSpec::LogReg(LogRegParams::with_lambda(1.0)),
            ModelSpec::Lda { gamma: 0.1 },
        ] {
            let spec = PipelineSpec {
                standardize: true,
                selector: SelectorSpec::All,
                model,
            };
            let a = spec.fit(&x, &y, 3).unwrap().predict(&x).unwrap();
            let b = spec.fit(&x2, &y, 3).unwrap().predict(&x2).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn width_checks() {
        let y: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let x = Array2::from_shape_fn((20, 4), |(i, j)| (i * j) as f64 + y[i] as f64);
        let spec = PipelineSpec {
            standardize: false,
            selector: SelectorSpec::Mrmr {
                variant: MrmrVariant::Fcq,
                k: 2,
                params: RankParams::default(),
            },
            model: ModelSpec::LogReg(LogRegParams::default()),
        };
        let p = spec.fit(&x, &y, 2).unwrap();
        p.validate().unwrap();
        assert!(p.predict(&Array2::zeros((1, 3))).is_err());
        assert_eq!(p.predict(&x).unwrap().len(), 20);
    }
}
