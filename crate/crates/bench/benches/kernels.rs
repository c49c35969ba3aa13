use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ndarray::Array2;

use innerspeech_core::features::{build_feature_matrix, CatalogConfig};
use innerspeech_core::models::{logreg_train, LogRegParams};
use innerspeech_core::preprocess::{vmd, VmdParams};
use innerspeech_core::selection::{mrmr_select, MrmrVariant, RankParams};
use innerspeech_core::signal::{dwt, psd, real_dft, Wavelet, Window};
use innerspeech_core::trialset::{generate_synthetic, SynthConfig};

fn tone(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / 256.0;
            (2.0 * std::f64::consts::PI * 10.0 * t).sin() + 0.5 * (2.0 * std::f64::consts::PI * 0.3 * t).sin()
        })
        .collect()
}

fn signal(c: &mut Criterion) {
    let x = tone(640);
    c.bench_function("real_dft_640", |b| b.iter(|| real_dft(black_box(&x))));
    c.bench_function("psd_hann_640", |b| b.iter(|| psd(black_box(&x), 256.0, Window::Hann)));
    let y = tone(512);
    c.bench_function("dwt_db4_512_l5", |b| b.iter(|| dwt(black_box(&y), Wavelet::Db4, 5)));
}

fn decomposition(c: &mut Criterion) {
    let x = tone(640);
    let params = VmdParams::default();
    let mut g = c.benchmark_group("vmd");
    g.sample_size(20);
    g.bench_function("k6_640", |b| b.iter(|| vmd(black_box(&x), &params)));
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let cfg = SynthConfig {
        n_trials: 40,
        artifact_prob: 0.0,
        ..SynthConfig::default()
    };
    let (ts, _) = generate_synthetic(&cfg, 0).unwrap();
    let catalog = CatalogConfig::default();
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    g.bench_function("features_40x16x640", |b| b.iter(|| build_feature_matrix(black_box(&ts), &catalog)));

    let fm = build_feature_matrix(&ts, &catalog).unwrap();
    let params = RankParams::default();
    g.bench_function("mrmr_fcq_k12", |b| {
        b.iter(|| mrmr_select(black_box(&fm.values), &fm.labels, 4, 12, MrmrVariant::Fcq, &params))
    });
    g.finish();

    let x: Array2<f64> = fm.values.select(ndarray::Axis(1), &(0..12).collect::<Vec<_>>());
    let mean = x.mean_axis(ndarray::Axis(0)).unwrap();
    let std = x.std_axis(ndarray::Axis(0), 0.0).mapv(|s| if s > 0.0 { s } else { 1.0 });
    let z = (&x - &mean) / &std;
    c.bench_function("logreg_40x12", |b| {
        b.iter(|| logreg_train(black_box(&z), &fm.labels, 4, &LogRegParams::default()))
    });
}

criterion_group!(benches, signal, decomposition, pipeline);
criterion_main!(benches);
