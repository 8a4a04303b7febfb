use proptest::prelude::*;
use signals_bench::{em, er, gen_signal, mode_count, q_ee};
use spectral::Signal;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generation_is_deterministic(id in 1u8..=4, sigma in 0.0f64..0.5, seed in 0u64..1000) {
        let a = gen_signal(id, sigma, seed).unwrap();
        let b = gen_signal(id, sigma, seed).unwrap();
        prop_assert_eq!(&a.mixture.samples, &b.mixture.samples);
        prop_assert_eq!(a.true_modes.len(), mode_count(id).unwrap());
    }

    #[test]
    fn metrics_are_scale_invariant_where_they_should_be(
        u in prop::collection::vec(-2.0f64..2.0, 100),
        f in prop::collection::vec(-2.0f64..2.0, 100),
        c in 0.1f64..10.0,
    ) {
        let mk = |v: &[f64]| Signal::new(v.to_vec(), 100.0).unwrap();
        let (us, fs) = (mk(&u), mk(&f));
        prop_assume!(f.iter().any(|v| v.abs() > 1e-3));
        let cu: Vec<f64> = u.iter().map(|v| v * c).collect();
        let cf: Vec<f64> = f.iter().map(|v| v * c).collect();
        let (a, b) = (er(&us, &fs).unwrap(), er(&mk(&cu), &mk(&cf)).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        // EM is absolute
        let (a, b) = (em(&us, &fs).unwrap(), em(&mk(&cu), &mk(&cf)).unwrap());
        prop_assert!((b - c * a).abs() <= 1e-12 * b.max(1.0));
        prop_assert!(er(&fs, &fs).unwrap() == 0.0);
        if let Ok(q) = q_ee(&us, &fs, 0.1) {
            prop_assert!(q >= 0.0);
        }
    }
}
