use innerspeech_core::topomap::render_topomap;
use proptest::prelude::*;

fn montage() -> impl Strategy<Value = (Vec<f64>, Vec<[f64; 2]>)> {
    (3usize..20).prop_flat_map(|n| {
        (
            prop::collection::vec(-50.0f64..50.0, n),
            prop::collection::vec((0.0f64..0.95, 0.0f64..std::f64::consts::TAU), n)
                .prop_map(|polar| polar.into_iter().map(|(r, t)| [r * t.cos(), r * t.sin()]).collect()),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn field_stays_within_channel_range((values, positions) in montage(), g in 16usize..48) {
        let f = render_topomap(&values, &positions, g).unwrap();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for &v in f.grid.iter().filter(|v| !v.is_nan()) {
            prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
        }
    }

    #[test]
    fn channel_order_does_not_matter((values, positions) in montage(), rot in 0usize..20) {
        let n = values.len();
        let r = rot % n;
        let mut v2 = values.clone();
        let mut p2 = positions.clone();
        v2.rotate_left(r);
        p2.rotate_left(r);
        v2.reverse();
        p2.reverse();
        let a = render_topomap(&values, &positions, 32).unwrap();
        let b = render_topomap(&v2, &p2, 32).unwrap();
        for (x, y) in a.grid.iter().zip(b.grid.iter()) {
            prop_assert!((x.is_nan() && y.is_nan()) || (x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn rendering_is_byte_stable((values, positions) in montage()) {
        let a = render_topomap(&values, &positions, 24).unwrap();
        let b = render_topomap(&values, &positions, 24).unwrap();
        prop_assert_eq!(a.to_pgm(), b.to_pgm());
        prop_assert_eq!(a.to_csv(), b.to_csv());
    }
}
