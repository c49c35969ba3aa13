//! Per-channel ERP summaries and inverse-distance-weighted scalp maps.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result, ResultExt};
use crate::trialset::TrialSet;

const DISTANCE_FLOOR: f64 = 1e-6;
pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErpSummary {
    #[default]
    Rms,
    Mean,
    MeanAbs,
}

impl ErpSummary {
    pub fn name(self) -> &'static str {
        match self {
            ErpSummary::Rms => "rms",
            ErpSummary::Mean => "mean",
            ErpSummary::MeanAbs => "mean_abs",
        }
    }

    fn apply(self, w: &[f64]) -> f64 {
        let n = w.len() as f64;
        match self {
            ErpSummary::Rms => (w.iter().map(|v| v * v).sum::<f64>() / n).sqrt(),
            ErpSummary::Mean => w.iter().sum::<f64>() / n,
            ErpSummary::MeanAbs => w.iter().map(|v| v.abs()).sum::<f64>() / n,
        }
    }
}

impl fmt::Display for ErpSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErpSummary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rms" => Ok(ErpSummary::Rms),
            "mean" => Ok(ErpSummary::Mean),
            "mean_abs" => Ok(ErpSummary::MeanAbs),
            _ => Err(Error::invalid_arg(format!("unknown ERP summary '{s}'"))),
        }
    }
}

/// Averages the selected trials over the interval, then summarises each
/// channel's averaged waveform to one number.
pub fn compute_erp(
    ts: &TrialSet,
    class: Option<usize>,
    interval_name: &str,
    summary: ErpSummary,
) -> Result<Vec<f64>> {
    let iv = ts
        .interval(interval_name)
        .ok_or_else(|| Error::invalid_arg(format!("no interval named '{interval_name}'")))?;
    if iv.is_empty() {
        return Err(Error::invalid_data(format!("interval '{interval_name}' is empty")));
    }
    if let Some(c) = class {
        if c >= ts.n_classes() {
            return Err(Error::invalid_arg(format!("class {c} out of range")));
        }
    }
    let trials: Vec<usize> = (0..ts.n_trials())
        .filter(|&t| class.is_none_or(|c| ts.labels()[t] == c))
        .collect();
    if trials.is_empty() {
        return Err(Error::invalid_data("no trials match the class filter"));
    }
    let data = ts.data();
    let n = trials.len() as f64;
    Ok((0..ts.n_channels())
        .map(|ch| {
            let mut avg = vec![0.0; iv.len()];
            for &t in &trials {
                for (a, &v) in avg.iter_mut().zip(data.slice(ndarray::s![t, ch, iv.start..iv.end])) {
                    *a += v as f64;
                }
            }
            avg.iter_mut().for_each(|a| *a /= n);
            summary.apply(&avg)
        })
        .collect())
}

/// A `G × G` raster over `[-1, 1]²`; row 0 is the top (+y), cells outside the
/// unit circle hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalpField {
    pub grid: Array2<f64>,
    pub values: Vec<f64>,
    pub positions: Vec<[f64; 2]>,
    /// Range of the in-head cells.
    pub min: f64,
    pub max: f64,
}

/// Centre of cell `(row, col)` in head coordinates.
pub fn cell_center(g: usize, row: usize, col: usize) -> [f64; 2] {
    let gf = g as f64;
    [
        ((2 * col + 1) as f64 - gf) / gf,
        (gf - (2 * row + 1) as f64) / gf,
    ]
}

impl ScalpField {
    pub fn size(&self) -> usize {
        self.grid.nrows()
    }

    pub fn is_inside(&self, row: usize, col: usize) -> bool {
        !self.grid[[row, col]].is_nan()
    }

    /// Binary P5 graymap; the in-head range maps linearly onto 0..=255 and
    /// outside cells are 0. A flat field renders at 255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let g = self.size();
        let mut out = format!("P5\n{g} {g}\n255\n").into_bytes();
        let span = self.max - self.min;
        out.extend(self.grid.iter().map(|&v| {
            if v.is_nan() {
                0
            } else if span > 0.0 {
                (255.0 * (v - self.min) / span).round().clamp(0.0, 255.0) as u8
            } else {
                255
            }
        }));
        out
    }

    /// `row,col,x,y,value` for every in-head cell.
    pub fn to_csv(&self) -> String {
        let g = self.size();
        let mut out = String::from("row,col,x,y,value\n");
        for ((r, c), &v) in self.grid.indexed_iter() {
            if v.is_nan() {
                continue;
            }
            let [x, y] = cell_center(g, r, c);
            let _ = writeln!(out, "{r},{c},{x},{y},{v}");
        }
        out
    }
}

pub fn render_topomap(values: &[f64], positions: &[[f64; 2]], g: usize) -> Result<ScalpField> {
    if positions.len() != values.len() {
        return Err(Error::invalid_arg(format!(
            "{} values but {} positions",
            values.len(),
            positions.len()
        )));
    }
    if values.len() < 3 {
        return Err(Error::invalid_arg("a scalp map needs at least 3 channels"));
    }
    if g < MIN_GRID {
        return Err(Error::invalid_arg(format!("grid size {g} below {MIN_GRID}")));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid_data(format!("channel {i} value is not finite")));
    }
    for (i, &[x, y]) in positions.iter().enumerate() {
        if !(x.is_finite() && y.is_finite()) || x * x + y * y > 1.0 + 1e-9 {
            return Err(Error::invalid_data(format!("channel {i} position lies outside the unit disc")));
        }
    }

    let rows: Vec<Vec<f64>> = (0..g)
        .into_par_iter()
        .map(|r| {
            (0..g)
                .map(|c| {
                    let [x, y] = cell_center(g, r, c);
                    if x * x + y * y > 1.0 {
                        return f64::NAN;
                    }
                    let (mut num, mut den) = (0.0, 0.0);
                    for (&v, &[px, py]) in values.iter().zip(positions) {
                        let d = ((x - px).powi(2) + (y - py).powi(2)).sqrt().max(DISTANCE_FLOOR);
                        let w = 1.0 / (d * d);
                        num += w * v;
                        den += w;
                    }
                    num / den
                })
                .collect()
        })
        .collect();
    let grid = Array2::from_shape_vec((g, g), rows.into_iter().flatten().collect())
        .expect("g rows of g cells");
    let (min, max) = grid
        .iter()
        .filter(|v| !v.is_nan())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(ScalpField {
        grid,
        values: values.to_vec(),
        positions: positions.to_vec(),
        min,
        max,
    })
}

/// Parses `channel_name,x,y` rows (header optional) and orders them by
/// `channel_names`.
pub fn parse_positions_csv(text: &str, channel_names: &[String]) -> Result<Vec<[f64; 2]>> {
    let mut table: Vec<(String, [f64; 2])> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::format(format!("positions line {}: expected name,x,y", i + 1)));
        }
        match (parts[1].parse::<f64>(), parts[2].parse::<f64>()) {
            (Ok(x), Ok(y)) => table.push((parts[0].to_string(), [x, y])),
            _ if table.is_empty() => continue,
            _ => return Err(Error::format(format!("positions line {}: bad coordinate", i + 1))),
        }
    }
    channel_names
        .iter()
        .map(|name| {
            table
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, p)| *p)
                .ok_or_else(|| Error::invalid_data(format!("no position for channel '{name}'")))
        })
        .collect()
}

/// Writes `<stem>.pgm` and `<stem>.csv` next to each other.
pub fn write_topomap(field: &ScalpField, stem: impl AsRef<Path>) -> Result<()> {
    let stem = stem.as_ref();
    let pgm = stem.with_extension("pgm");
    let csv = stem.with_extension("csv");
    fs::write(&pgm, field.to_pgm()).with_context(|| pgm.display().to_string())?;
    fs::write(&csv, field.to_csv()).with_context(|| csv.display().to_string())?;
    Ok(())
}
