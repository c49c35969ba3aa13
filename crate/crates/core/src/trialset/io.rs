//! EIT1 binary container.
//!
//! Layout (little-endian throughout):
//!
//! ```text
//! magic "EIT1" | version u32 | n_trials u32 | n_ch u32 | n_samples u32 | C u32 | sample_rate f64
//! subject_id str | C × class name str | n_ch × channel name str     (str = u32 len + UTF-8)
//! positions flag u8 [| n_ch × (x f64, y f64)]
//! interval count u32 | count × (name str, start u32, end u32)
//! labels: n_trials × u16
//! data: n_trials × n_ch × n_samples f32, trial-major then channel-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array3;

use super::{Interval, TrialSet};
use crate::binio::{checked_product, Reader, Writer};
use crate::error::{Error, Result, ResultExt};

pub const EIT1_MAGIC: &[u8; 4] = b"EIT1";
pub const EIT1_VERSION: u32 = 1;

pub fn save_trialset(ts: &TrialSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_trialset(ts, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_trialset(path: impl AsRef<Path>) -> Result<TrialSet> {
    let path = path.as_ref();
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_trialset(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

pub fn write_trialset<W: Write>(ts: &TrialSet, out: W) -> Result<()> {
    let mut w = Writer::new(out);
    let (n_trials, n_ch, n_samples) = ts.data.dim();
    w.bytes(EIT1_MAGIC)?;
    w.u32(EIT1_VERSION)?;
    w.len(n_trials, "trial count")?;
    w.len(n_ch, "channel count")?;
    w.len(n_samples, "sample count")?;
    w.len(ts.class_names.len(), "class count")?;
    w.f64(ts.sample_rate)?;
    w.string(&ts.subject_id)?;
    for name in ts.class_names.iter().chain(&ts.channel_names) {
        w.string(name)?;
    }
    match &ts.channel_positions {
        None => w.u8(0)?,
        Some(pos) => {
            w.u8(1)?;
            for p in pos {
                w.f64(p[0])?;
                w.f64(p[1])?;
            }
        }
    }
    w.len(ts.intervals.len(), "interval count")?;
    for iv in &ts.intervals {
        w.string(&iv.name)?;
        w.len(iv.start, "interval start")?;
        w.len(iv.end, "interval end")?;
    }
    for &l in &ts.labels {
        // class count is bounded by u16 in TrialSet::validate
        w.u16(l as u16)?;
    }
    for &v in ts.data.iter() {
        w.f32(v)?;
    }
    Ok(())
}

pub fn read_trialset<R: Read>(input: R) -> Result<TrialSet> {
    let mut r = Reader::new(input);
    let magic = r.exact::<4>()?;
    if &magic != EIT1_MAGIC {
        return Err(Error::format(format!("bad magic {magic:?}, expected \"EIT1\"")));
    }
    let version = r.u32()?;
    if version != EIT1_VERSION {
        return Err(Error::format(format!("unsupported EIT1 version {version}")));
    }
    let n_trials = r.u32()? as usize;
    let n_ch = r.u32()? as usize;
    let n_samples = r.u32()? as usize;
    let n_classes = r.u32()? as usize;
    let total = checked_product(&[n_trials, n_ch, n_samples])?;
    checked_product(&[n_ch, 16])?;
    let sample_rate = r.f64()?;
    let subject_id = r.string()?;
    let class_names = (0..n_classes).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
    let channel_names = (0..n_ch).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
    let positions = match r.u8()? {
        0 => None,
        1 => Some(
            (0..n_ch)
                .map(|_| Ok([r.f64()?, r.f64()?]))
                .collect::<Result<Vec<_>>>()?,
        ),
        flag => return Err(Error::format(format!("bad position flag {flag}"))),
    };
    let n_intervals = r.u32()? as usize;
    let intervals = (0..n_intervals)
        .map(|_| {
            let name = r.string()?;
            let start = r.u32()? as usize;
            let end = r.u32()? as usize;
            Ok(Interval::new(name, start, end))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = (0..n_trials)
        .map(|_| r.u16().map(usize::from))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(total.min(1 << 24));
    for _ in 0..total {
        values.push(r.f32()?);
    }
    r.expect_eof()?;
    let data = Array3::from_shape_vec((n_trials, n_ch, n_samples), values)
        .map_err(|e| Error::format(format!("data block: {e}")))?;
    TrialSet::new(subject_id, sample_rate, class_names, channel_names, data, labels)?
        .with_positions(positions)?
        .with_intervals(intervals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(n_trials: usize) -> TrialSet {
        let data = Array3::from_shape_fn((n_trials, 3, 5), |(t, c, i)| {
            (t as f32 - 1.5) * 0.37 + c as f32 * 1e-3 - i as f32 * 7.25
        });
        TrialSet::new(
            "subj-ä",
            256.0,
            vec!["Arriba".into(), "Abajo".into()],
            vec!["A1".into(), "A2".into(), "B7".into()],
            data,
            (0..n_trials).map(|t| t % 2).collect(),
        )
        .unwrap()
        .with_positions(Some(vec![[0.0, 0.5], [-0.3, 0.1], [0.7, -0.7]]))
        .unwrap()
        .with_intervals(vec![Interval::new("action", 1, 4)])
        .unwrap()
    }

    fn to_bytes(ts: &TrialSet) -> Vec<u8> {
        let mut buf = Vec::new();
        write_trialset(ts, &mut buf).unwrap();
        buf
    }

    #[test]
    fn round_trip_is_exact() {
        let ts = fixture(4);
        let back = read_trialset(to_bytes(&ts).as_slice()).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn saves_are_deterministic() {
        let ts = fixture(3);
        assert_eq!(to_bytes(&ts), to_bytes(&ts.clone()));
    }

    #[test]
    fn empty_trial_set_is_header_only() {
        let ts = fixture(0);
        let bytes = to_bytes(&ts);
        let back = read_trialset(bytes.as_slice()).unwrap();
        assert_eq!(back.n_trials(), 0);
        assert_eq!(back.n_channels(), 3);
        assert_eq!(back, ts);
    }

    #[test]
    fn bad_magic_and_version() {
        let mut bytes = to_bytes(&fixture(1));
        bytes[0] = b'X';
        assert!(matches!(read_trialset(bytes.as_slice()), Err(Error::Format(_))));
        let mut bytes = to_bytes(&fixture(1));
        bytes[4] = 9;
        let err = read_trialset(bytes.as_slice()).unwrap_err();
        assert!(err.to_string().contains("version"));
    }

    #[test]
    fn label_out_of_range_is_rejected() {
        let ts = fixture(2);
        let mut bytes = to_bytes(&ts);
        let label_offset = bytes.len() - 2 * 3 * 5 * 4 - 2 * 2;
        bytes[label_offset..label_offset + 2].copy_from_slice(&2u16.to_le_bytes());
        let err = read_trialset(bytes.as_slice()).unwrap_err();
        assert!(err.to_string().contains("label out of range"), "{err}");
    }

    #[test]
    fn non_finite_sample_is_rejected() {
        let mut bytes = to_bytes(&fixture(1));
        let n = bytes.len();
        bytes[n - 4..].copy_from_slice(&f32::INFINITY.to_le_bytes());
        assert!(read_trialset(bytes.as_slice()).is_err());
    }

    #[test]
    fn overflowing_dimensions_are_rejected() {
        let mut bytes = to_bytes(&fixture(1));
        for off in [8, 12, 16] {
            bytes[off..off + 4].copy_from_slice(&u32::MAX.to_le_bytes());
        }
        let err = read_trialset(bytes.as_slice()).unwrap_err();
        assert!(err.to_string().contains("overflow"), "{err}");
    }

    #[test]
    fn truncated_file_is_rejected() {
        let bytes = to_bytes(&fixture(2));
        assert!(read_trialset(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn session_sized_file() {
        let data = Array3::<f32>::zeros((200, 128, 1152));
        let ts = TrialSet::new(
            "sub-01",
            256.0,
            ["Arriba", "Abajo", "Derecha", "Izquierda"].map(String::from).to_vec(),
            (0..128).map(|c| format!("E{c}")).collect(),
            data,
            (0..200).map(|t| t % 4).collect(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s1.eit");
        save_trialset(&ts, &path).unwrap();
        let back = load_trialset(&path).unwrap();
        assert_eq!((back.n_trials(), back.n_channels(), back.n_samples()), (200, 128, 1152));
        assert_eq!(back.sample_rate(), 256.0);
    }
}
