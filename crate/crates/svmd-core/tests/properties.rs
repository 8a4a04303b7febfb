use num_complex::Complex64;
use proptest::prelude::*;
use spectral::{analytic_spectrum, HalfSpectrum, Signal};
use svmd_core::{decompose, update_mode, SvmdConfig};

fn tones() -> impl Strategy<Value = Signal> {
    (
        prop::collection::vec((5.0f64..450.0, 0.1f64..3.0, 0.0f64..6.3), 1..4),
        prop::collection::vec(-0.05f64..0.05, 1000),
    )
        .prop_map(|(parts, noise)| {
            let x = (0..1000)
                .map(|k| {
                    let t = k as f64 / 1000.0;
                    parts.iter().map(|(f, a, p)| a * (2.0 * std::f64::consts::PI * f * t + p).cos()).sum::<f64>()
                        + noise[k]
                })
                .collect();
            Signal::new(x, 1000.0).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn update_never_amplifies(
        bins in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..80),
        wc in 0.0f64..50.0,
        wr in 0.0f64..50.0,
        alpha in 0.0f64..5.0,
        beta in 0.0f64..5.0,
    ) {
        let n = 2 * (bins.len() - 1);
        let f = HalfSpectrum::new(bins.iter().map(|&(a, b)| Complex64::new(a, b)).collect(), 1.0, n).unwrap();
        let u = update_mode(&f, wc, wr, alpha, beta);
        for (a, b) in u.bins.iter().zip(&f.bins) {
            prop_assert!(a.norm() <= b.norm() * (1.0 + 1e-15));
        }
    }

    #[test]
    fn modes_and_residual_sum_to_input(s in tones()) {
        let r = decompose(&s, &SvmdConfig::default()).unwrap();
        let input = analytic_spectrum(&s).unwrap();
        prop_assert!(r.reconstruct().distance_sqr(&input).sqrt() <= 1e-10 * input.power().sqrt());
    }

    #[test]
    fn scaling_the_input_scales_the_modes(s in tones(), c in prop_oneof![0.01f64..0.5, 2.0f64..100.0]) {
        let cfg = SvmdConfig::default();
        let a = decompose(&s, &cfg).unwrap();
        let b = decompose(&s.scaled(c), &cfg).unwrap();
        prop_assert_eq!(a.modes.len(), b.modes.len());
        for (x, y) in a.modes.iter().zip(&b.modes) {
            let want = x.spectrum.scaled(c);
            prop_assert!(y.spectrum.distance_sqr(&want).sqrt() <= 1e-9 * want.power().sqrt());
        }
    }

    #[test]
    fn residual_power_never_grows(s in tones()) {
        let r = decompose(&s, &SvmdConfig::default()).unwrap();
        let mut left = analytic_spectrum(&s).unwrap();
        let mut last = left.power();
        for m in &r.modes {
            left = left.sub(&m.spectrum);
            prop_assert!(left.power() <= last * (1.0 + 1e-12));
            last = left.power();
        }
    }
}
