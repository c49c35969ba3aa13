//! EIM1 model container.
//!
//! ```text
//! magic "EIM1" | version u32 | n_inputs u32 | C u32 | C × class name str | catalog str
//! scaler: flag u8 [| n_inputs × mean f64 | n_inputs × std f64]
//! selector: kind u8 (0 all, 1 columns, 2 pca)
//!   columns: count u32 | count × u32
//!   pca: m u32 | n_inputs × mean f64 | n_inputs × m components f64 | m × ratio f64
//! model: kind u8 (0 logreg, 1 lda, 2 ensemble)
//!   logreg block: rows u32 | cols u32 | lambda f64 | rows × cols f64
//!   lda: p u32 | gamma f64 | C × p means | C priors | C × p coef | C intercepts
//!   ensemble: inner_folds u32 | seed u64 | bases u32 | bases × logreg block | meta logreg block
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::ensemble::StackEnsemble;
use super::lda::LdaModel;
use super::logreg::LogRegModel;
use super::pipeline::{FittedModel, FittedPipeline, FittedSelector};
use crate::binio::{checked_product, Reader, Writer};
use crate::error::{Error, Result, ResultExt};
use crate::features::Scaler;
use crate::selection::PcaTransform;

pub const EIM1_MAGIC: &[u8; 4] = b"EIM1";
pub const EIM1_VERSION: u32 = 1;

/// A fitted pipeline plus the metadata needed to apply it to new matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub class_names: Vec<String>,
    /// Catalog summary of the training matrix.
    pub catalog: String,
    pub pipeline: FittedPipeline,
}

pub fn save_model(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_model(model, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_model(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

pub fn write_model<W: Write>(m: &ModelFile, out: W) -> Result<()> {
    let p = &m.pipeline;
    p.validate()?;
    if m.class_names.len() != p.model.n_classes() {
        return Err(Error::invalid_data("class name count does not match the model"));
    }
    let mut w = Writer::new(out);
    w.bytes(EIM1_MAGIC)?;
    w.u32(EIM1_VERSION)?;
    w.len(p.n_inputs, "input width")?;
    w.len(m.class_names.len(), "class count")?;
    for c in &m.class_names {
        w.string(c)?;
    }
    w.string(&m.catalog)?;
    match &p.scaler {
        None => w.u8(0)?,
        Some(s) => {
            w.u8(1)?;
            w.f64s(&s.mean)?;
            w.f64s(&s.std)?;
        }
    }
    match &p.selector {
        FittedSelector::All => w.u8(0)?,
        FittedSelector::Columns(cols) => {
            w.u8(1)?;
            w.len(cols.len(), "column count")?;
            for &c in cols {
                w.len(c, "column index")?;
            }
        }
        FittedSelector::Pca(t) => {
            w.u8(2)?;
            w.len(t.n_components(), "component count")?;
            w.f64s(&t.means)?;
            w.f64s(t.components.as_standard_layout().as_slice().expect("contiguous"))?;
            w.f64s(&t.explained_variance_ratio)?;
        }
    }
    match &p.model {
        FittedModel::LogReg(lr) => {
            w.u8(0)?;
            write_logreg(&mut w, lr)?;
        }
        FittedModel::Lda(l) => {
            w.u8(1)?;
            w.len(l.n_features(), "feature count")?;
            w.f64(l.gamma)?;
            write_matrix(&mut w, &l.means)?;
            w.f64s(&l.priors)?;
            write_matrix(&mut w, &l.coef)?;
            w.f64s(&l.intercept)?;
        }
        FittedModel::Ensemble(e) => {
            w.u8(2)?;
            w.len(e.inner_folds, "inner folds")?;
            w.u64(e.seed)?;
            w.len(e.bases.len(), "base count")?;
            for b in &e.bases {
                write_logreg(&mut w, b)?;
            }
            write_logreg(&mut w, &e.meta)?;
        }
    }
    Ok(())
}

fn write_matrix<W: Write>(w: &mut Writer<W>, a: &Array2<f64>) -> Result<()> {
    w.f64s(a.as_standard_layout().as_slice().expect("contiguous"))
}

fn write_logreg<W: Write>(w: &mut Writer<W>, m: &LogRegModel) -> Result<()> {
    w.len(m.weights.nrows(), "weight rows")?;
    w.len(m.weights.ncols(), "weight columns")?;
    w.f64(m.lambda)?;
    write_matrix(w, &m.weights)
}

pub fn read_model<R: Read>(input: R) -> Result<ModelFile> {
    let mut r = Reader::new(input);
    let magic = r.exact::<4>()?;
    if &magic != EIM1_MAGIC {
        return Err(Error::format(format!("bad magic {magic:?}, expected \"EIM1\"")));
    }
    let version = r.u32()?;
    if version != EIM1_VERSION {
        return Err(Error::format(format!("unsupported EIM1 version {version}")));
    }
    let n_inputs = r.u32()? as usize;
    let n_classes = r.u32()? as usize;
    checked_product(&[n_inputs, 8])?;
    let class_names = (0..n_classes).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
    let catalog = r.string()?;
    let scaler = match r.u8()? {
        0 => None,
        1 => Some(Scaler {
            mean: r.f64s(n_inputs)?,
            std: r.f64s(n_inputs)?,
        }),
        f => return Err(Error::format(format!("bad scaler flag {f}"))),
    };
    let selector = match r.u8()? {
        0 => FittedSelector::All,
        1 => {
            let n = r.u32()? as usize;
            if n > n_inputs {
                return Err(Error::format("more selected columns than inputs"));
            }
            FittedSelector::Columns((0..n).map(|_| r.u32().map(|v| v as usize)).collect::<Result<_>>()?)
        }
        2 => {
            let m = r.u32()? as usize;
            if m > n_inputs {
                return Err(Error::format("more components than inputs"));
            }
            let means = r.f64s(n_inputs)?;
            let components = read_matrix(&mut r, n_inputs, m)?;
            let ratios = r.f64s(m)?;
            FittedSelector::Pca(PcaTransform {
                components,
                explained_variance_ratio: ratios,
                means,
            })
        }
        k => return Err(Error::format(format!("unknown selector kind {k}"))),
    };
    let model = match r.u8()? {
        0 => FittedModel::LogReg(read_logreg(&mut r)?),
        1 => {
            let p = r.u32()? as usize;
            checked_product(&[p, n_classes])?;
            let gamma = r.f64()?;
            let means = read_matrix(&mut r, n_classes, p)?;
            let priors = r.f64s(n_classes)?;
            let coef = read_matrix(&mut r, n_classes, p)?;
            let intercept = r.f64s(n_classes)?;
            FittedModel::Lda(LdaModel {
                means,
                priors,
                gamma,
                coef,
                intercept,
            })
        }
        2 => {
            let inner_folds = r.u32()? as usize;
            let seed = r.u64()?;
            let n_bases = r.u32()? as usize;
            if n_bases == 0 || n_bases > 1024 {
                return Err(Error::format(format!("bad base model count {n_bases}")));
            }
            let bases = (0..n_bases).map(|_| read_logreg(&mut r)).collect::<Result<Vec<_>>>()?;
            let meta = read_logreg(&mut r)?;
            FittedModel::Ensemble(StackEnsemble {
                bases,
                meta,
                inner_folds,
                seed,
            })
        }
        k => return Err(Error::format(format!("unknown model kind {k}"))),
    };
    r.expect_eof()?;
    let pipeline = FittedPipeline {
        n_inputs,
        scaler,
        selector,
        model,
    };
    pipeline.validate()?;
    if pipeline.model.n_classes() != n_classes {
        return Err(Error::format("class count does not match the model"));
    }
    Ok(ModelFile {
        class_names,
        catalog,
        pipeline,
    })
}

fn read_matrix<R: Read>(r: &mut Reader<R>, rows: usize, cols: usize) -> Result<Array2<f64>> {
    let n = checked_product(&[rows, cols])?;
    let v = r.f64s(n)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid_data("non-finite model parameter"));
    }
    Array2::from_shape_vec((rows, cols), v).map_err(|e| Error::format(e.to_string()))
}

fn read_logreg<R: Read>(r: &mut Reader<R>) -> Result<LogRegModel> {
    let rows = r.u32()? as usize;
    let cols = r.u32()? as usize;
    let lambda = r.f64()?;
    let w = read_matrix(r, rows, cols)?;
    LogRegModel::from_weights(w, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{EnsembleParams, LogRegParams, ModelSpec, PipelineSpec, SelectorSpec};
    use crate::selection::{MrmrVariant, RankParams};

    fn data() -> (Array2<f64>, Vec<usize>) {
        let y: Vec<usize> = (0..60).map(|i| i % 3).collect();
        let x = Array2::from_shape_fn((60, 6), |(i, j)| {
            ((i * 31 + j * 7) % 13) as f64 * 0.2 + if j == y[i] { 1.5 } else { 0.0 }
        });
        (x, y)
    }

    fn round_trip(spec: PipelineSpec) {
        let (x, y) = data();
        let pipeline = spec.fit(&x, &y, 3).unwrap();
        let m = ModelFile {
            class_names: vec!["a".into(), "b".into(), "c".into()],
            catalog: "test".into(),
            pipeline,
        };
        let mut buf = Vec::new();
        write_model(&m, &mut buf).unwrap();
        let back = read_model(&buf[..]).unwrap();
        assert_eq!(back.class_names, m.class_names);
        assert_eq!(
            back.pipeline.predict_proba(&x).unwrap(),
            m.pipeline.predict_proba(&x).unwrap()
        );
        let mut again = Vec::new();
        write_model(&back, &mut again).unwrap();
        assert_eq!(buf, again);
        assert!(read_model(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn logreg_with_mrmr() {
        round_trip(PipelineSpec {
            standardize: true,
            selector: SelectorSpec::Mrmr {
                variant: MrmrVariant::Fcq,
                k: 3,
                params: RankParams::default(),
            },
            model: ModelSpec::LogReg(LogRegParams::default()),
        });
    }

    #[test]
    fn lda_with_pca() {
        round_trip(PipelineSpec {
            standardize: false,
            selector: SelectorSpec::Pca { components: 4 },
            model: ModelSpec::Lda { gamma: 0.1 },
        });
    }

    #[test]
    fn ensemble_on_all_columns() {
        round_trip(PipelineSpec {
            standardize: true,
            selector: SelectorSpec::All,
            model: ModelSpec::Ensemble(EnsembleParams {
                inner_folds: 3,
                ..EnsembleParams::default()
            }),
        });
    }

    #[test]
    fn bad_magic() {
        assert!(read_model(&b"EIM2\x01\0\0\0"[..]).is_err());
    }
}
