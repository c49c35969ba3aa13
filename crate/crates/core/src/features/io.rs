//! EIT-F feature matrix container.
//!
//! ```text
//! magic "EITF" | version u32 | n_rows u32 | n_features u32 | C u32 | n_ch u32
//! source_id str | catalog str | C × class name str | n_ch × channel name str
//! labels: n_rows × u16
//! n_features × descriptor (channel u32, domain u8, name str, n_params u32, n_params × (key str, value str))
//! values: n_rows × n_features f64, row-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::catalog::{Domain, FeatureDescriptor};
use super::matrix::FeatureMatrix;
use crate::binio::{checked_product, Reader, Writer};
use crate::error::{Error, Result, ResultExt};

pub const EITF_MAGIC: &[u8; 4] = b"EITF";
pub const EITF_VERSION: u32 = 1;

pub fn save_feature_matrix(fm: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_feature_matrix(fm, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_feature_matrix(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_feature_matrix(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

pub fn write_feature_matrix<W: Write>(fm: &FeatureMatrix, out: W) -> Result<()> {
    fm.validate()?;
    if fm.class_names.len() > u16::MAX as usize {
        return Err(Error::invalid_data("too many classes for EIT-F"));
    }
    let mut w = Writer::new(out);
    w.bytes(EITF_MAGIC)?;
    w.u32(EITF_VERSION)?;
    w.len(fm.n_rows(), "row count")?;
    w.len(fm.n_features(), "feature count")?;
    w.len(fm.class_names.len(), "class count")?;
    w.len(fm.channel_names.len(), "channel count")?;
    w.string(&fm.source_id)?;
    w.string(&fm.catalog)?;
    for s in fm.class_names.iter().chain(&fm.channel_names) {
        w.string(s)?;
    }
    for &l in &fm.labels {
        w.u16(l as u16)?;
    }
    for d in &fm.descriptors {
        w.len(d.channel_index, "channel index")?;
        w.u8(d.domain.code())?;
        w.string(&d.name)?;
        w.len(d.params.len(), "parameter count")?;
        for (k, v) in &d.params {
            w.string(k)?;
            w.string(v)?;
        }
    }
    for &v in fm.values.iter() {
        w.f64(v)?;
    }
    Ok(())
}

pub fn read_feature_matrix<R: Read>(input: R) -> Result<FeatureMatrix> {
    let mut r = Reader::new(input);
    let magic = r.exact::<4>()?;
    if &magic != EITF_MAGIC {
        return Err(Error::format(format!("bad magic {magic:?}, expected \"EITF\"")));
    }
    let version = r.u32()?;
    if version != EITF_VERSION {
        return Err(Error::format(format!("unsupported EIT-F version {version}")));
    }
    let rows = r.u32()? as usize;
    let cols = r.u32()? as usize;
    let n_classes = r.u32()? as usize;
    let n_ch = r.u32()? as usize;
    let total = checked_product(&[rows, cols])?;
    let source_id = r.string()?;
    let catalog = r.string()?;
    let class_names = (0..n_classes).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
    let channel_names = (0..n_ch).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
    let labels = (0..rows)
        .map(|_| r.u16().map(usize::from))
        .collect::<Result<Vec<_>>>()?;
    let mut descriptors = Vec::with_capacity(cols.min(1 << 20));
    for _ in 0..cols {
        let channel_index = r.u32()? as usize;
        let domain = Domain::from_code(r.u8()?)?;
        let name = r.string()?;
        let n_params = r.u32()? as usize;
        if n_params > 64 {
            return Err(Error::format(format!("descriptor has {n_params} parameters")));
        }
        let params = (0..n_params)
            .map(|_| Ok((r.string()?, r.string()?)))
            .collect::<Result<Vec<_>>>()?;
        descriptors.push(FeatureDescriptor {
            channel_index,
            domain,
            name,
            params,
        });
    }
    let mut values = Vec::with_capacity(total.min(1 << 24));
    for _ in 0..total {
        values.push(r.f64()?);
    }
    r.expect_eof()?;
    let values = Array2::from_shape_vec((rows, cols), values)
        .map_err(|e| Error::format(format!("value block: {e}")))?;
    let fm = FeatureMatrix {
        values,
        descriptors,
        labels,
        class_names,
        channel_names,
        source_id,
        catalog,
    };
    fm.validate()?;
    Ok(fm)
}
