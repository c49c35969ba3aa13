//! CSV and plain-text rendering of evaluation reports.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::cv::EvalReport;

/// A comparison row supplied from outside this crate (e.g. another toolkit).
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalRow {
    pub method: String,
    pub accuracy: f64,
    pub f1: f64,
}

/// Parses `method,accuracy,f1` lines; a header line and `#` comments are skipped.
pub fn parse_external_rows(text: &str) -> Result<Vec<ExternalRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::invalid_data(format!("line {}: expected method,accuracy,f1", i + 1)));
        }
        let (Ok(accuracy), Ok(f1)) = (parts[1].parse::<f64>(), parts[2].parse::<f64>()) else {
            if i == 0 {
                continue;
            }
            return Err(Error::invalid_data(format!("line {}: bad number", i + 1)));
        };
        rows.push(ExternalRow {
            method: parts[0].to_string(),
            accuracy,
            f1,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionOutput {
    pub name: String,
    pub csv: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedReport {
    /// One row per (subject, model).
    pub summary_csv: String,
    /// Method-level means across subjects, then external rows.
    pub comparison_csv: String,
    pub comparison_text: String,
    /// Per-subject rows and an overall row, for each model.
    pub subject_csv: String,
    pub subject_text: String,
    pub confusions: Vec<ConfusionOutput>,
}

fn label(r: &EvalReport) -> String {
    format!("{} ({})", r.model, r.protocol)
}

/// Overall figures are unweighted means across subjects.
pub fn render_report(reports: &[EvalReport], external: &[ExternalRow]) -> RenderedReport {
    let mut models: Vec<String> = Vec::new();
    for r in reports {
        let l = label(r);
        if !models.contains(&l) {
            models.push(l);
        }
    }

    let mut summary_csv = String::from("subject,model,protocol,pipeline,n_trials,accuracy,macro_f1\n");
    for r in reports {
        let _ = writeln!(
            summary_csv,
            "{},{},{},\"{}\",{},{:.2},{:.2}",
            r.subject,
            r.model,
            r.protocol,
            r.pipeline,
            r.n_trials(),
            r.metrics.accuracy,
            r.metrics.macro_f1
        );
    }

    let mut comparison: Vec<(String, f64, f64)> = models
        .iter()
        .map(|m| {
            let rs: Vec<&EvalReport> = reports.iter().filter(|r| &label(r) == m).collect();
            let n = rs.len() as f64;
            (
                m.clone(),
                rs.iter().map(|r| r.metrics.accuracy).sum::<f64>() / n,
                rs.iter().map(|r| r.metrics.macro_f1).sum::<f64>() / n,
            )
        })
        .collect();
    comparison.extend(external.iter().map(|e| (e.method.clone(), e.accuracy, e.f1)));
    let mut comparison_csv = String::from("method,accuracy,f1\n");
    for (m, a, f) in &comparison {
        let _ = writeln!(comparison_csv, "{m},{a:.2},{f:.2}");
    }
    let comparison_text = text_table(
        &["Method", "Accuracy (%)", "F1 (%)"],
        &comparison
            .iter()
            .map(|(m, a, f)| vec![m.clone(), format!("{a:.2}"), format!("{f:.2}")])
            .collect::<Vec<_>>(),
    );

    let mut subject_csv = String::from("model,subject,accuracy,f1\n");
    let mut subject_text = String::new();
    for m in &models {
        let rs: Vec<&EvalReport> = reports.iter().filter(|r| &label(r) == m).collect();
        let mut rows: Vec<Vec<String>> = rs
            .iter()
            .map(|r| {
                vec![
                    r.subject.clone(),
                    format!("{:.2}", r.metrics.accuracy),
                    format!("{:.2}", r.metrics.macro_f1),
                ]
            })
            .collect();
        let n = rs.len() as f64;
        let acc = rs.iter().map(|r| r.metrics.accuracy).sum::<f64>() / n;
        let f1 = rs.iter().map(|r| r.metrics.macro_f1).sum::<f64>() / n;
        rows.push(vec!["Overall".to_string(), format!("{acc:.2}"), format!("{f1:.2}")]);
        for row in &rows {
            let _ = writeln!(subject_csv, "{m},{},{},{}", row[0], row[1], row[2]);
        }
        let _ = writeln!(subject_text, "{m}");
        subject_text.push_str(&text_table(&["Subject", "Accuracy (%)", "F1 (%)"], &rows));
        subject_text.push('\n');
    }

    let confusions = reports
        .iter()
        .map(|r| ConfusionOutput {
            name: format!("{}_{}_{}", r.subject, r.model, r.protocol),
            csv: confusion_csv(r),
            text: confusion_text(r),
        })
        .collect();

    RenderedReport {
        summary_csv,
        comparison_csv,
        comparison_text,
        subject_csv,
        subject_text,
        confusions,
    }
}

fn confusion_csv(r: &EvalReport) -> String {
    let mut out = String::from("truth\\predicted");
    for c in &r.class_names {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
    for (i, row) in r.confusion.rows().into_iter().enumerate() {
        out.push_str(&r.class_names[i]);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Row-normalised percentages.
fn confusion_text(r: &EvalReport) -> String {
    let mut header = vec!["truth \\ pred"];
    header.extend(r.class_names.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = r
        .confusion
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let total = row.sum();
            let mut cells = vec![r.class_names[i].clone()];
            cells.extend(row.iter().map(|&v| {
                if total == 0 {
                    "-".to_string()
                } else {
                    format!("{:.1}", 100.0 * v as f64 / total as f64)
                }
            }));
            cells
        })
        .collect();
    let mut out = format!(
        "{} / {} [{}], n = {}, accuracy {:.2}%, macro F1 {:.2}%\n",
        r.subject,
        r.model,
        r.protocol,
        r.n_trials(),
        r.metrics.accuracy,
        r.metrics.macro_f1
    );
    out.push_str(&text_table(&header, &rows));
    out
}

fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(rule.iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{metrics_from_confusion, Protocol};
    use ndarray::{arr2, Array2};

    fn report(subject: &str, confusion: Array2<u64>) -> EvalReport {
        let n = confusion.sum() as usize;
        EvalReport {
            subject: subject.into(),
            model: "ensemble".into(),
            pipeline: "p".into(),
            protocol: Protocol::LeakageSafe,
            k: 10,
            seed: 0,
            class_names: vec!["up".into(), "down".into()],
            metrics: metrics_from_confusion(&confusion).unwrap(),
            confusion,
            folds: vec![],
            predictions: vec![0; n],
            labels: vec![0; n],
            assignments: vec![0; n],
            elapsed_s: 0.0,
        }
    }

    #[test]
    fn single_report_row_equals_metrics() {
        let r = report("sub-01", arr2(&[[4, 1], [2, 3]]));
        let out = render_report(&[r], &[]);
        assert!(out.comparison_csv.contains("ensemble (leakage_safe),70.00,69.70"), "{}", out.comparison_csv);
    }

    #[test]
    fn overall_is_mean_of_subjects() {
        let a = report("sub-01", arr2(&[[3, 2], [2, 3]]));
        let b = report("sub-02", arr2(&[[4, 1], [1, 4]]));
        let out = render_report(&[a, b], &[]);
        assert!(out.subject_csv.contains("Overall,70.00,70.00"), "{}", out.subject_csv);
        assert!(out.subject_text.contains("Overall"));
    }

    #[test]
    fn ten_subject_table_structure() {
        let rs: Vec<EvalReport> = (1..=10)
            .map(|s| report(&format!("sub-{s:02}"), arr2(&[[5, 0], [1, 4]])))
            .collect();
        let out = render_report(&rs, &[]);
        let lines: Vec<&str> = out.subject_csv.lines().collect();
        assert_eq!(lines.len(), 1 + 10 + 1);
        assert!(lines.last().unwrap().contains("Overall"));
        assert_eq!(out.confusions.len(), 10);
    }

    #[test]
    fn external_rows_are_appended() {
        let rows = parse_external_rows("method,accuracy,f1\nSVM,55.1,54.0\n# note\n").unwrap();
        assert_eq!(rows.len(), 1);
        let out = render_report(&[report("s", arr2(&[[1, 0], [0, 1]]))], &rows);
        assert!(out.comparison_text.contains("SVM"));
        assert!(parse_external_rows("a,b,c\nx,1\n").is_err());
    }

    #[test]
    fn confusion_outputs() {
        let out = render_report(&[report("s", arr2(&[[3, 1], [0, 4]]))], &[]);
        let c = &out.confusions[0];
        assert_eq!(c.csv, "truth\\predicted,up,down\nup,3,1\ndown,0,4\n");
        assert!(c.text.contains("75.0") && c.text.contains("100.0"));
    }
}
