use innerspeech_core::trialset::{
    generate_synthetic, read_trialset, slice_interval, write_trialset, Interval, SynthConfig,
};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = SynthConfig> {
    (1usize..6, 2usize..5, 2usize..9, 32usize..160, any::<bool>(), 0.0f64..0.5).prop_map(
        |(per_class, classes, channels, samples, random_phase, artifact_prob)| SynthConfig {
            n_trials: per_class * classes,
            n_channels: channels,
            n_samples: samples,
            class_freqs: [8.0, 12.0, 20.0, 30.0][..classes].to_vec(),
            channels_per_class: 1,
            random_phase,
            artifact_prob,
            ..SynthConfig::default()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn container_round_trip_is_exact(cfg in config(), seed in any::<u64>()) {
        let (ts, _) = generate_synthetic(&cfg, seed).unwrap();
        let mut buf = Vec::new();
        write_trialset(&ts, &mut buf).unwrap();
        let back = read_trialset(buf.as_slice()).unwrap();
        prop_assert_eq!(&back, &ts);
        let mut again = Vec::new();
        write_trialset(&back, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn synthetic_sets_are_balanced_and_deterministic(cfg in config(), seed in any::<u64>()) {
        let (a, ga) = generate_synthetic(&cfg, seed).unwrap();
        let (b, gb) = generate_synthetic(&cfg, seed).unwrap();
        let counts = a.class_counts();
        prop_assert!(counts.iter().all(|&c| c == counts[0]));
        let (mut ba, mut bb) = (Vec::new(), Vec::new());
        write_trialset(&a, &mut ba).unwrap();
        write_trialset(&b, &mut bb).unwrap();
        prop_assert_eq!(ba, bb);
        prop_assert_eq!(ga, gb);
    }

    #[test]
    fn slicing_keeps_trials_labels_and_channels(cfg in config(), seed in any::<u64>(), cut in 0.0f64..1.0) {
        let (ts, _) = generate_synthetic(&cfg, seed).unwrap();
        let n = ts.n_samples();
        let start = ((n - 1) as f64 * cut) as usize;
        let ts = ts.with_intervals(vec![Interval::new("part", start, n)]).unwrap();
        let s = slice_interval(&ts, "part").unwrap();
        prop_assert_eq!(s.n_trials(), ts.n_trials());
        prop_assert_eq!(s.labels(), ts.labels());
        prop_assert_eq!(s.channel_names(), ts.channel_names());
        prop_assert_eq!(s.n_samples(), n - start);
        prop_assert_eq!(s.signal(0, 0)[0], ts.signal(0, 0)[start]);
    }
}
