use innerspeech_core::models::{
    ensemble_train, logreg_train, softmax_rows, EnsembleParams, LogRegParams, ModelSpec, PipelineSpec,
    SelectorSpec,
};
use ndarray::Array2;
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = (Array2<f64>, Vec<usize>, usize)> {
    (2usize..4, 6usize..14, 2usize..6).prop_flat_map(|(c, per_class, p)| {
        let n = c * per_class;
        prop::collection::vec(-3.0f64..3.0, n * p).prop_map(move |raw| {
            let y: Vec<usize> = (0..n).map(|i| i % c).collect();
            let x = Array2::from_shape_fn((n, p), |(i, j)| raw[i * p + j] + if j % c == y[i] { 1.5 } else { 0.0 });
            (x, y, c)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn loss_trace_never_increases((x, y, c) in dataset(), lambda in 0.01f64..10.0) {
        let m = logreg_train(&x, &y, c, &LogRegParams::with_lambda(lambda)).unwrap();
        let t = &m.record.loss_trace;
        prop_assert!(t.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn softmax_ignores_row_shifts(z in prop::collection::vec(-30.0f64..30.0, 12), shift in -500.0f64..500.0) {
        let mut a = Array2::from_shape_vec((3, 4), z.clone()).unwrap();
        let mut b = a.mapv(|v| v + shift);
        softmax_rows(&mut a);
        softmax_rows(&mut b);
        for (p, q) in a.iter().zip(b.iter()) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_a_raw_feature_keeps_predictions((x, y, c) in dataset(), col in 0usize..2) {
        let spec = PipelineSpec {
            standardize: true,
            selector: SelectorSpec::All,
            model: ModelSpec::LogReg(LogRegParams::default()),
        };
        let mut x2 = x.clone();
        x2.column_mut(col).mapv_inplace(|v| 2.0 * v);
        let a = spec.fit(&x, &y, c).unwrap().predict(&x).unwrap();
        let b = spec.fit(&x2, &y, c).unwrap().predict(&x2).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn ensemble_training_is_reproducible((x, y, c) in dataset(), seed in any::<u64>()) {
        let params = EnsembleParams { seed, inner_folds: 3, ..EnsembleParams::default() };
        let a = ensemble_train(&x, &y, c, &params).unwrap();
        let b = ensemble_train(&x, &y, c, &params).unwrap();
        prop_assert_eq!(a.predict_proba(&x).unwrap(), b.predict_proba(&x).unwrap());
    }
}
