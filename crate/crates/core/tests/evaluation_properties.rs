use innerspeech_core::evaluation::{cross_validate, stratified_kfold, CvConfig, Protocol};
use innerspeech_core::features::{Domain, FeatureDescriptor, FeatureMatrix};
use innerspeech_core::models::{ModelSpec, PipelineSpec, SelectorSpec};
use ndarray::Array2;
use proptest::prelude::*;

fn matrix(c: usize, per_class: usize, raw: &[f64]) -> FeatureMatrix {
    let n = c * per_class;
    let p = raw.len() / n;
    let labels: Vec<usize> = (0..n).map(|i| i % c).collect();
    FeatureMatrix {
        values: Array2::from_shape_fn((n, p), |(i, j)| raw[i * p + j] + if j % c == labels[i] { 1.0 } else { 0.0 }),
        descriptors: (0..p)
            .map(|j| FeatureDescriptor { channel_index: j, domain: Domain::Td, name: "mean".into(), params: vec![] })
            .collect(),
        labels,
        class_names: (0..c).map(|k| format!("c{k}")).collect(),
        channel_names: (0..p).map(|j| format!("E{j}")).collect(),
        source_id: "prop".into(),
        catalog: "prop".into(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn folds_cover_every_trial_once(labels in prop::collection::vec(0usize..4, 20..120), k in 2usize..6, seed in any::<u64>()) {
        let mut counts = [0usize; 4];
        labels.iter().for_each(|&l| counts[l] += 1);
        prop_assume!(counts.iter().all(|&n| n == 0 || n >= k));
        let plan = stratified_kfold(&labels, k, seed).unwrap();
        let mut seen = vec![0; labels.len()];
        for f in 0..k {
            for i in plan.test_indices(f) {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&s| s == 1));
        prop_assert_eq!(plan.clone(), stratified_kfold(&labels, k, seed).unwrap());
    }

    #[test]
    fn pooled_metrics_are_consistent(
        (c, per_class, raw) in (2usize..4, 5usize..10).prop_flat_map(|(c, m)| (Just(c), Just(m), prop::collection::vec(-2.0f64..2.0, c * m * 4))),
        seed in any::<u64>(),
        fit_once in any::<bool>(),
    ) {
        let fm = matrix(c, per_class, &raw);
        let spec = PipelineSpec {
            standardize: true,
            selector: SelectorSpec::All,
            model: ModelSpec::Lda { gamma: 0.1 },
        };
        let protocol = if fit_once { Protocol::PaperProtocol } else { Protocol::LeakageSafe };
        let cv = CvConfig { k: 5, seed, protocol };
        let r = cross_validate(&fm, &spec, &cv).unwrap();
        let n = fm.n_rows();
        let correct: usize = r.folds.iter().map(|f| f.correct).sum();
        prop_assert_eq!(r.metrics.accuracy, 100.0 * correct as f64 / n as f64);
        prop_assert_eq!(r.metrics.micro_f1, r.metrics.accuracy);
        prop_assert_eq!(r.confusion.sum() as usize, n);
        prop_assert_eq!(r.folds.iter().map(|f| f.n_test).sum::<usize>(), n);
        let again = cross_validate(&fm, &spec, &cv).unwrap();
        prop_assert_eq!(r.predictions, again.predictions);
    }
}
