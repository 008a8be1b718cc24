use negwit::dynamics::EnmParams;
use negwit::profiles::{contractive_scan, match_profile, max_increase, MATCH_TOL, MONOTONE_TOL};
use negwit::random::random_mixed_state;
use negwit::states::ContractiveFunction;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FUNCTIONS: [ContractiveFunction; 4] = [
    ContractiveFunction::TraceDistance,
    ContractiveFunction::Infidelity,
    ContractiveFunction::RelativeEntropy,
    ContractiveFunction::Renyi(2.0),
];

fn grid(n: usize, t_max: f64) -> Vec<f64> {
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn enm_scans_never_increase(seed in any::<u64>(), alpha in 1.0f64..4.0, c in 0.05f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed_state(&mut rng, &[2]);
        let sigma = random_mixed_state(&mut rng, &[2]);
        let p = EnmParams::new(alpha, c).unwrap();
        for f in FUNCTIONS {
            let series = contractive_scan(f, p, &rho, &sigma, &grid(61, 6.0)).unwrap();
            prop_assert!(max_increase(&series) <= MONOTONE_TOL, "{}", f.name());
        }
    }

    #[test]
    fn monotone_profiles_above_floor_are_matched(seed in any::<u64>(), n in 2usize..20, which in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed_state(&mut rng, &[2]);
        let sigma = random_mixed_state(&mut rng, &[2]);
        let f = FUNCTIONS[which];
        let mut targets = vec![f.evaluate(&rho, &sigma).unwrap()];
        for _ in 1..n {
            let last = *targets.last().unwrap();
            targets.push(last * rng.gen_range(0.0..=1.0f64).powi(2));
        }
        let times: Vec<f64> = grid(n, rng.gen_range(0.5..6.0));
        let m = match_profile(&times, &targets, f, &rho, &sigma).unwrap();
        prop_assert!(m.is_matched(), "{} max error {:e}", f.name(), m.max_error());
        prop_assert!(m.a.iter().all(|a| (0.0..=1.0).contains(a)));
        prop_assert!(m.max_error() <= MATCH_TOL);
        prop_assert_eq!(m, match_profile(&times, &targets, f, &rho, &sigma).unwrap());
    }
}
