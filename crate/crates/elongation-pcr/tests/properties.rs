use elongation_pcr::{elongate, polyfit, PcrConfig};
use proptest::prelude::*;
use spectral::Signal;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polyfit_recovers_polynomials(c in prop::collection::vec(-5.0f64..5.0, 1..4)) {
        let t: Vec<f64> = (0..40).map(|k| k as f64 * 0.05).collect();
        let y: Vec<f64> = t.iter().map(|&x| c.iter().rev().fold(0.0, |acc, &a| acc * x + a)).collect();
        let got = polyfit(&t, &y, c.len() - 1).unwrap();
        for (a, b) in got.iter().zip(&c) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn elongation_keeps_the_record(x in prop::collection::vec(-3.0f64..3.0, 200..600), frac in 0.0f64..0.5) {
        let s = Signal::new(x, 100.0).unwrap();
        let cfg = PcrConfig { extension_frac: frac, ..PcrConfig::default() };
        let e = elongate(&s, &cfg).unwrap();
        prop_assert_eq!(e.extended.len(), s.len() + e.left_len + e.right_len);
        prop_assert_eq!(&e.extended.samples[e.left_len..e.left_len + s.len()], &s.samples[..]);
        prop_assert_eq!(e.original().samples, s.samples);
    }
}
