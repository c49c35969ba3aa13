use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ndarray::Axis;

use innerspeech_core::evaluation::{
    cross_validate, parse_external_rows, render_report, CvConfig, EvalReport, RenderedReport,
};
use innerspeech_core::features::{
    build_feature_matrix, read_feature_matrix, write_feature_matrix, CatalogConfig, FeatureMatrix, Scaler,
    EITF_MAGIC,
};
use innerspeech_core::models::{
    read_model, write_model, EnsembleParams, LogRegParams, ModelFile, ModelSpec, PipelineSpec, SelectorSpec,
    EIM1_MAGIC,
};
use innerspeech_core::preprocess::{detect_artifacts, remove_artifacts, DetectionPolicy, Extension, VmdParams};
use innerspeech_core::selection::{k_sweep, mrmr_select, pca_fit, rank_features, RankParams};
use innerspeech_core::topomap::{compute_erp, parse_positions_csv, render_topomap};
use innerspeech_core::trialset::{
    generate_synthetic, read_trialset, slice_interval, write_trialset, SynthConfig, TrialSet, EIT1_MAGIC,
};

use crate::config::{ConfigError, RunConfig};
use crate::run::{read_input, RunDir};

fn load_trials(path: &Path) -> Result<TrialSet> {
    let bytes = read_input(path)?;
    read_trialset(bytes.as_slice()).with_context(|| format!("loading {}", path.display()))
}

fn load_features(path: &Path) -> Result<FeatureMatrix> {
    let bytes = read_input(path)?;
    read_feature_matrix(bytes.as_slice()).with_context(|| format!("loading {}", path.display()))
}

fn trials_bytes(ts: &TrialSet) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_trialset(ts, &mut buf)?;
    Ok(buf)
}

fn features_bytes(fm: &FeatureMatrix) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_feature_matrix(fm, &mut buf)?;
    Ok(buf)
}

/// File-name-safe form of a subject or class name.
fn slug(s: &str) -> String {
    let out: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if out.is_empty() {
        "unnamed".into()
    } else {
        out
    }
}

pub fn synth_config(cfg: &RunConfig) -> Result<SynthConfig, ConfigError> {
    let names: Vec<String> = cfg.list("synth.class_names")?;
    Ok(SynthConfig {
        subject_id: cfg.str("synth.subject").to_string(),
        n_trials: cfg.get("synth.trials")?,
        n_channels: cfg.get("synth.channels")?,
        n_samples: cfg.get("synth.samples")?,
        sample_rate: cfg.get("synth.sample_rate")?,
        class_freqs: cfg.list("synth.class_freqs")?,
        class_names: if names.is_empty() { None } else { Some(names) },
        class_channels: None,
        channels_per_class: cfg.get("synth.channels_per_class")?,
        signal_amplitude: cfg.get("synth.amplitude")?,
        noise_level: cfg.get("synth.noise")?,
        artifact_prob: cfg.get("synth.artifact_prob")?,
        artifact_amplitude: cfg.get("synth.artifact_amplitude")?,
        random_phase: cfg.get("synth.random_phase")?,
    })
}

fn vmd_params(cfg: &RunConfig) -> Result<VmdParams, ConfigError> {
    let extension = match cfg.str("vmd.extension") {
        "even" => Extension::Even,
        "odd" => Extension::Odd,
        other => return Err(ConfigError(format!("vmd.extension = '{other}': expected even or odd"))),
    };
    Ok(VmdParams {
        modes: cfg.get("vmd.modes")?,
        alpha: cfg.get("vmd.alpha")?,
        tau: cfg.get("vmd.tau")?,
        tol: cfg.get("vmd.tol")?,
        max_iter: cfg.get("vmd.max_iter")?,
        extension,
    })
}

fn catalog(cfg: &RunConfig) -> Result<CatalogConfig, ConfigError> {
    match cfg.str("features.catalog") {
        "default" => Ok(CatalogConfig::default()),
        "extended" => Ok(CatalogConfig::extended()),
        other => Err(ConfigError(format!("features.catalog = '{other}': expected default or extended"))),
    }
}

fn rank_params(cfg: &RunConfig) -> Result<RankParams, ConfigError> {
    Ok(RankParams {
        mi_bins: cfg.get("selector.mi_bins")?,
        relief_k: cfg.get("selector.relief_k")?,
    })
}

pub fn pipeline_spec(cfg: &RunConfig) -> Result<PipelineSpec> {
    let k: usize = cfg.get("selector.k")?;
    let params = rank_params(cfg)?;
    let selector = match cfg.str("selector") {
        "all" => SelectorSpec::All,
        "pca" => SelectorSpec::Pca { components: k },
        s if s.starts_with("mrmr_") => SelectorSpec::Mrmr {
            variant: s["mrmr_".len()..].parse()?,
            k,
            params,
        },
        s => SelectorSpec::Rank {
            method: s.parse()?,
            k,
            params,
        },
    };
    let max_iter = cfg.get("model.max_iter")?;
    let grad_tol = cfg.get("model.grad_tol")?;
    let model = match cfg.str("model") {
        "ensemble" => ModelSpec::Ensemble(EnsembleParams {
            lambdas: cfg.list("model.lambdas")?,
            inner_folds: cfg.get("model.inner_folds")?,
            meta_lambda: cfg.get("model.meta_lambda")?,
            seed: cfg.get("seed")?,
            max_iter,
            grad_tol,
        }),
        "logreg" => ModelSpec::LogReg(LogRegParams {
            lambda: cfg.get("model.lambda")?,
            max_iter,
            grad_tol,
        }),
        "lda" => ModelSpec::Lda {
            gamma: cfg.get("model.lda_gamma")?,
        },
        other => bail!(ConfigError(format!("model = '{other}': expected ensemble, logreg or lda"))),
    };
    Ok(PipelineSpec {
        standardize: cfg.get("standardize")?,
        selector,
        model,
    })
}

fn cv_config(cfg: &RunConfig) -> Result<CvConfig> {
    Ok(CvConfig {
        k: cfg.get("cv.k")?,
        seed: cfg.get("seed")?,
        protocol: cfg.str("cv.protocol").parse()?,
    })
}

pub fn synth(cfg: &RunConfig, run: &mut RunDir) -> Result<()> {
    let sc = synth_config(cfg)?;
    let (ts, truth) = generate_synthetic(&sc, cfg.get("seed")?)?;
    run.write("trials.eit", &trials_bytes(&ts)?)?;

    let mut sig = String::from("trial,label,frequency_hz,amplitude,phase,channels\n");
    for (t, s) in truth.signatures.iter().enumerate() {
        let ch: Vec<String> = s.channels.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(sig, "{t},{},{},{},{},{}", ts.labels()[t], s.frequency, s.amplitude, s.phase, ch.join(";"));
    }
    run.write("signatures.csv", sig.as_bytes())?;
    let mut art = String::from("trial,channel\n");
    for ((t, c), &f) in truth.artifact_flags.indexed_iter() {
        if f {
            let _ = writeln!(art, "{t},{c}");
        }
    }
    run.write("artifacts_truth.csv", art.as_bytes())?;
    println!(
        "synthesised {} trials x {} channels x {} samples, {} injected artifacts",
        ts.n_trials(),
        ts.n_channels(),
        ts.n_samples(),
        truth.n_flagged()
    );
    Ok(())
}

pub fn inspect(path: &Path) -> Result<()> {
    let bytes = read_input(path)?;
    let magic = bytes.get(..4).unwrap_or(&[]);
    if magic == EIT1_MAGIC {
        let ts = read_trialset(bytes.as_slice())?;
        println!("EIT1 trial set '{}'", ts.subject_id());
        println!("  trials {}  channels {}  samples {}  rate {} Hz", ts.n_trials(), ts.n_channels(), ts.n_samples(), ts.sample_rate());
        println!("  classes {}", ts.class_names().join(", "));
        println!("  class counts {:?}", ts.class_counts());
        let iv: Vec<String> = ts.intervals().iter().map(|i| format!("{} [{}, {})", i.name, i.start, i.end)).collect();
        println!("  intervals {}", iv.join(", "));
        println!("  positions {}", if ts.channel_positions().is_some() { "present" } else { "absent" });
    } else if magic == EITF_MAGIC {
        let fm = read_feature_matrix(bytes.as_slice())?;
        println!("EITF feature matrix '{}'", fm.source_id);
        println!("  rows {}  features {}  classes {}", fm.n_rows(), fm.n_features(), fm.class_names.join(", "));
        println!("  catalog {}", fm.catalog);
    } else if magic == EIM1_MAGIC {
        let m = read_model(bytes.as_slice())?;
        println!("EIM1 model");
        println!("  classes {}", m.class_names.join(", "));
        println!("  inputs {}  catalog {}", m.pipeline.n_inputs, m.catalog);
        println!("  model {}", model_summary(&m));
    } else {
        bail!(innerspeech_core::Error::format(format!("{}: unrecognised file type", path.display())));
    }
    Ok(())
}

fn model_summary(m: &ModelFile) -> String {
    use innerspeech_core::models::FittedModel;
    match &m.pipeline.model {
        FittedModel::LogReg(l) => format!("logistic regression, lambda {}", l.lambda),
        FittedModel::Lda(l) => format!("LDA, gamma {}", l.gamma),
        FittedModel::Ensemble(e) => format!("stacked ensemble of {} logistic regressions", e.bases.len()),
    }
}

pub fn clean(input: &Path, cfg: &RunConfig, run: &mut RunDir) -> Result<()> {
    let ts = load_trials(input)?;
    let policy = DetectionPolicy {
        z_thresh: cfg.get("clean.z_thresh")?,
        drift_factor: cfg.get("clean.drift_factor")?,
    };
    let mask = detect_artifacts(&ts, policy)?;
    let cleaned = remove_artifacts(&ts, &mask, &vmd_params(cfg)?)?;
    run.write("clean.eit", &trials_bytes(&cleaned)?)?;
    run.write("artifacts.csv", mask.to_csv(ts.channel_names()).as_bytes())?;
    println!(
        "flagged {} of {} signals",
        mask.n_flagged(),
        ts.n_trials() * ts.n_channels()
    );
    Ok(())
}

pub fn features(input: &Path, cfg: &RunConfig, run: &mut RunDir) -> Result<()> {
    let ts = load_trials(input)?;
    let ts = match cfg.str("features.interval") {
        "" => ts,
        name => slice_interval(&ts, name)?,
    };
    let fm = build_feature_matrix(&ts, &catalog(cfg)?)?;
    run.write("features.eitf", &features_bytes(&fm)?)?;
    run.write("catalog.csv", fm.catalog_csv().as_bytes())?;
    println!("{} rows x {} features", fm.n_rows(), fm.n_features());
    Ok(())
}

pub fn select(input: &Path, cfg: &RunConfig, run: &mut RunDir) -> Result<()> {
    let fm = load_features(input)?;
    let x = if cfg.get("standardize")? {
        Scaler::fit_all(&fm.values)?.apply(&fm.values)?
    } else {
        fm.values.clone()
    };
    let y = &fm.labels;
    let c = fm.n_classes();
    let k: usize = cfg.get("selector.k")?;
    let params = rank_params(cfg)?;
    let method = cfg.str("selector");
    if method == "pca" {
        let t = pca_fit(&x, k)?;
        let mut out = String::from("component,explained_variance_ratio\n");
        for (i, r) in t.explained_variance_ratio.iter().enumerate() {
            let _ = writeln!(out, "{},{r}", i + 1);
        }
        run.write("pca.csv", out.as_bytes())?;
        println!("{} components explain {:.2}% of the variance", k, 100.0 * t.explained_variance_ratio.iter().sum::<f64>());
        return Ok(());
    }
    if k == 0 || k > fm.n_features() {
        bail!(ConfigError(format!("selector.k = {k} must lie in 1..={}", fm.n_features())));
    }
    let ranking = match method {
        "all" => bail!(ConfigError("selector = all has nothing to rank".into())),
        s if s.starts_with("mrmr_") => mrmr_select(&x, y, c, k, s["mrmr_".len()..].parse()?, &params)?,
        s => rank_features(&x, y, c, s.parse()?, &params)?,
    };
    run.write("ranking.csv", ranking.to_csv(&fm.descriptors, &fm.channel_names).as_bytes())?;
    let selected = fm.select_columns(ranking.top(k));
    run.write("selected.eitf", &features_bytes(&selected)?)?;
    println!("{}: kept {} of {} features", ranking.method, k, fm.n_features());
    Ok(())
}

pub fn sweep(input: &Path, cfg: &RunConfig, run: &mut RunDir) -> Result<()> {
    let fm = load_features(input)?;
    let spec = pipeline_spec(cfg)?;
    let ks: Vec<usize> = cfg.list("sweep.ks")?;
    let table = k_sweep(&fm, &ks, &spec, &cv_config(cfg)?)?;
    run.write("sweep.csv", table.to_csv().as_bytes())?;
    let b = table.best_row();
    println!("best K = {} ({:.2}% accuracy, {:.2}% macro F1)", b.k, b.accuracy, b.macro_f1);
    Ok(())
}

pub fn train(input: &Path, cfg: &RunConfig, run: &mut RunDir) -> Result<()> {
    let fm = load_features(input)?;
    let spec = pipeline_spec(cfg)?;
    let pipeline = spec.fit(&fm.values, &fm.labels, fm.n_classes())?;
    let pred = pipeline.predict(&fm.values)?;
    let model = ModelFile {
        class_names: fm.class_names.clone(),
        catalog: fm.catalog.clone(),
        pipeline,
    };
    let mut buf = Vec::new();
    write_model(&model, &mut buf)?;
    run.write("model.eim", &buf)?;
    let correct = pred.iter().zip(&fm.labels).filter(|(a, b)| a == b).count();
    println!(
        "trained {} on {} rows; training accuracy {:.2}%",
        spec.describe(),
        fm.n_rows(),
        100.0 * correct as f64 / fm.n_rows() as f64
    );
    Ok(())
}

fn write_rendered(run: &mut RunDir, r: &RenderedReport) -> Result<()> {
    run.write("summary.csv", r.summary_csv.as_bytes())?;
    run.write("comparison.csv", r.comparison_csv.as_bytes())?;
    run.write("comparison.txt", r.comparison_text.as_bytes())?;
    run.write("subjects.csv", r.subject_csv.as_bytes())?;
    run.write("subjects.txt", r.subject_text.as_bytes())?;
    for c in &r.confusions {
        let stem = format!("confusion_{}", slug(&c.name));
        run.write(&format!("{stem}.csv"), c.csv.as_bytes())?;
        run.write(&format!("{stem}.txt"), c.text.as_bytes())?;
    }
    Ok(())
}

pub fn evaluate(inputs: &[std::path::PathBuf], cfg: &RunConfig, run: &mut RunDir) -> Result<()> {
    let spec = pipeline_spec(cfg)?;
    let cv = cv_config(cfg)?;
    let mut reports = Vec::new();
    let mut folds = String::from("subject,fold,n_test,correct,accuracy,macro_f1\n");
    for (i, path) in inputs.iter().enumerate() {
        let fm = load_features(path)?;
        let r = cross_validate(&fm, &spec, &cv).with_context(|| format!("evaluating {}", path.display()))?;
        for f in &r.folds {
            let _ = writeln!(folds, "{},{},{},{},{:.4},{:.4}", r.subject, f.fold, f.n_test, f.correct, f.accuracy, f.macro_f1);
        }
        let name = if inputs.len() > 1 {
            format!("predictions_{:02}_{}.csv", i + 1, slug(&r.subject))
        } else {
            "predictions.csv".to_string()
        };
        run.write(&name, r.predictions_csv().as_bytes())?;
        println!(
            "{}: accuracy {:.2}%  macro F1 {:.2}%  ({} trials, {} folds, {})",
            r.subject,
            r.metrics.accuracy,
            r.metrics.macro_f1,
            r.n_trials(),
            r.k,
            r.protocol
        );
        reports.push(r);
    }
    run.write("folds.csv", folds.as_bytes())?;
    write_rendered(run, &render_report(&reports, &[]))
}

pub fn predict(model: &Path, input: &Path, run: &mut RunDir) -> Result<()> {
    let bytes = read_input(model)?;
    let m = read_model(bytes.as_slice()).with_context(|| format!("loading {}", model.display()))?;
    let fm = load_features(input)?;
    if fm.catalog != m.catalog || fm.n_features() != m.pipeline.n_inputs {
        bail!(innerspeech_core::Error::invalid_data(format!(
            "feature matrix ({} columns, catalog '{}') does not match the model ({} inputs, catalog '{}')",
            fm.n_features(),
            fm.catalog,
            m.pipeline.n_inputs,
            m.catalog
        )));
    }
    let proba = m.pipeline.predict_proba(&fm.values)?;
    let pred = innerspeech_core::models::argmax_rows(&proba);
    let mut out = String::from("trial,predicted,class");
    for c in &m.class_names {
        let _ = write!(out, ",p_{c}");
    }
    out.push_str(",truth\n");
    for (i, row) in proba.axis_iter(Axis(0)).enumerate() {
        let _ = write!(out, "{i},{},{}", pred[i], m.class_names[pred[i]]);
        for p in row {
            let _ = write!(out, ",{p:.6}");
        }
        let _ = writeln!(out, ",{}", fm.labels[i]);
    }
    run.write("predictions.csv", out.as_bytes())?;
    let correct = pred.iter().zip(&fm.labels).filter(|(a, b)| a == b).count();
    println!(
        "predicted {} trials; agreement with stored labels {:.2}%",
        pred.len(),
        100.0 * correct as f64 / pred.len() as f64
    );
    Ok(())
}

pub fn topomap(input: &Path, cfg: &RunConfig, run: &mut RunDir) -> Result<()> {
    let ts = load_trials(input)?;
    let positions = match cfg.str("topomap.positions") {
        "" => ts
            .channel_positions()
            .map(<[_]>::to_vec)
            .ok_or_else(|| innerspeech_core::Error::invalid_data("trial set has no channel positions; set topomap.positions"))?,
        path => {
            let text = String::from_utf8(read_input(Path::new(path))?).context("positions file is not UTF-8")?;
            parse_positions_csv(&text, ts.channel_names())?
        }
    };
    let interval = cfg.str("topomap.interval");
    let summary = cfg.str("topomap.summary").parse()?;
    let g: usize = cfg.get("topomap.grid")?;

    let mut groups: Vec<(String, Option<usize>)> = vec![("all".into(), None)];
    groups.extend(ts.class_names().iter().enumerate().map(|(c, n)| (n.clone(), Some(c))));
    let mut columns = Vec::new();
    for (name, class) in &groups {
        if class.is_some_and(|c| !ts.labels().contains(&c)) {
            continue;
        }
        let erp = compute_erp(&ts, *class, interval, summary)?;
        let field = render_topomap(&erp, &positions, g)?;
        let stem = format!("topomap_{}", slug(name));
        run.write(&format!("{stem}.pgm"), &field.to_pgm())?;
        run.write(&format!("{stem}.csv"), field.to_csv().as_bytes())?;
        columns.push((name.clone(), erp));
    }
    let mut erp_csv = String::from("channel");
    for (n, _) in &columns {
        let _ = write!(erp_csv, ",{n}");
    }
    erp_csv.push('\n');
    for (ch, name) in ts.channel_names().iter().enumerate() {
        erp_csv.push_str(name);
        for (_, v) in &columns {
            let _ = write!(erp_csv, ",{}", v[ch]);
        }
        erp_csv.push('\n');
    }
    run.write("erp.csv", erp_csv.as_bytes())?;
    println!("rendered {} maps ({g}x{g}, {summary} over '{interval}')", columns.len());
    Ok(())
}

pub fn report(inputs: &[std::path::PathBuf], external: Option<&Path>, run: &mut RunDir) -> Result<()> {
    let mut reports = Vec::new();
    for p in inputs {
        let text = String::from_utf8(read_input(p)?).with_context(|| format!("{} is not UTF-8", p.display()))?;
        reports.push(EvalReport::from_predictions_csv(&text).with_context(|| format!("reading {}", p.display()))?);
    }
    let rows = match external {
        Some(p) => {
            let text = String::from_utf8(read_input(p)?).with_context(|| format!("{} is not UTF-8", p.display()))?;
            parse_external_rows(&text)?
        }
        None => Vec::new(),
    };
    let rendered = render_report(&reports, &rows);
    write_rendered(run, &rendered)?;
    print!("{}", rendered.comparison_text);
    Ok(())
}
