use proptest::prelude::*;
use spectral::{analytic_spectrum, Signal};
use vmd_baseline::{vmd_decompose, VmdConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn modes_and_residual_sum_to_input(x in prop::collection::vec(-2.0f64..2.0, 256..700), k in 1usize..5, mirror: bool) {
        let s = Signal::new(x, 500.0).unwrap();
        let r = vmd_decompose(&s, &VmdConfig { k_modes: k, mirror_ends: mirror, ..VmdConfig::default() }).unwrap();
        prop_assert_eq!(r.modes.len(), k);
        let input = analytic_spectrum(&s).unwrap();
        prop_assert!(r.reconstruct().distance_sqr(&input).sqrt() <= 1e-9 * input.power().sqrt());
        let centers: Vec<f64> = r.modes.iter().map(|m| m.center_hz).collect();
        prop_assert!(centers.windows(2).all(|w| w[0] <= w[1]));
    }
}
