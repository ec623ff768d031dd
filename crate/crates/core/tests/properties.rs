use fpb_core::discrimination::{error_lower_bound, outcome_probs, DiscriminationConfig};
use fpb_core::entropy::{
    alpha_mutual_information, closed_form_i_std, joint_from_outcome_probs, mutual_information,
    shannon_entropy, ConditionalVariant, Direction, Order,
};
use fpb_core::linalg::{random_density_matrix, random_unitary, ComplexMat, C64};
use fpb_core::probe::{theta_from_error_rate, ProbeConfig, MAX_ERROR_RATE};
use fpb_core::simulator::{run_session, SessionConfig};
use fpb_core::uncertainty::{
    coles_piani_bound, direct_sum, is_majorized, majorization_data, majorization_entropy_bound,
    mutual_info_upper_bound, optimal_majorization_data, povm_distribution, tensor_product,
    zeta_coefficients,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setting(p: f64, xi: f64) -> DiscriminationConfig {
    let theta = theta_from_error_rate(&ProbeConfig::new(p).unwrap());
    DiscriminationConfig::from_xi(theta, xi).unwrap()
}

/// Qubit density matrix from a Bloch vector of length `r ≤ 1`.
fn bloch_state(r: f64, polar: f64, azimuth: f64) -> ComplexMat {
    let (x, y, z) = (r * polar.sin() * azimuth.cos(), r * polar.sin() * azimuth.sin(), r * polar.cos());
    ComplexMat::new(
        2,
        2,
        vec![
            C64::new(0.5 * (1.0 + z), 0.0),
            C64::new(0.5 * x, -0.5 * y),
            C64::new(0.5 * x, 0.5 * y),
            C64::new(0.5 * (1.0 - z), 0.0),
        ],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn outcome_probabilities_are_consistent(p in 0.0..=MAX_ERROR_RATE, xi in 0.0..=1.0f64) {
        let cfg = setting(p, xi);
        let q = outcome_probs(&cfg);
        let [s, e, u] = q.as_array();
        prop_assert!(s >= 0.0 && e >= 0.0 && u >= 0.0);
        prop_assert!((s + e + u - 1.0).abs() < 1e-12);
        prop_assert!(s >= e);
        prop_assert!((error_lower_bound(cfg.theta(), u).unwrap() - e).abs() < 1e-10);
    }

    #[test]
    fn information_is_a_bit_at_most_and_bounded_above(p in 0.001..=MAX_ERROR_RATE, xi in 0.0..=1.0f64) {
        let cfg = setting(p, xi);
        let q = outcome_probs(&cfg);
        let j = joint_from_outcome_probs(&q);
        let i = mutual_information(&j);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&i));
        prop_assert!((i - closed_form_i_std(&q)).abs() < 1e-10);
        prop_assert!(mutual_info_upper_bound(&q, cfg.eta()).unwrap() >= i - 1e-10);
    }

    #[test]
    fn conclusive_eavesdropping_identity(p in 0.001..=MAX_ERROR_RATE, alpha in 0.1..20.0f64) {
        let j = joint_from_outcome_probs(&outcome_probs(&setting(p, 0.0)));
        let order = Order::new(alpha).unwrap();
        let v1 = alpha_mutual_information(&j, order, ConditionalVariant::First, Direction::XGivenY).unwrap();
        prop_assert!((v1 - mutual_information(&j)).abs() < 1e-10);
    }

    #[test]
    fn povm_entropies_respect_bounds(
        eta in 0.0..=1.0f64,
        r in 0.0..=1.0f64,
        polar in 0.0..std::f64::consts::PI,
        azimuth in 0.0..std::f64::consts::TAU,
        alpha in prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(5.0)],
    ) {
        let p = povm_distribution(eta, &bloch_state(r, polar, azimuth)).unwrap();
        prop_assert!(shannon_entropy(&p) >= coles_piani_bound(eta).unwrap() - 1e-10);
        let md = optimal_majorization_data(eta).unwrap();
        let order = Order::new(alpha).unwrap();
        let bound = majorization_entropy_bound(&md, order).unwrap();
        prop_assert!(fpb_core::entropy::renyi_entropy(&p, order) >= bound - 1e-10);
    }

    #[test]
    fn random_overlaps_majorize(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_unitary(3, &mut rng).unwrap();
        let md = majorization_data(&zeta_coefficients(&w).unwrap()).unwrap();
        let rho = random_density_matrix(3, &mut rng).unwrap();
        let p: Vec<f64> = (0..3).map(|i| rho.get(i, i).re).collect();
        let q: Vec<f64> = (0..3)
            .map(|j| {
                let c = w.column(j);
                fpb_core::linalg::inner_product(&c, &rho.apply(&c).unwrap()).unwrap().re
            })
            .collect();
        prop_assert!(is_majorized(&tensor_product(&p, &q), md.omega_prime.probs(), 1e-10));
        prop_assert!(is_majorized(&direct_sum(&p, &q), &direct_sum(&[1.0], md.omega.probs()), 1e-10));
    }

    #[test]
    fn order_text_round_trips(alpha in 0.01..100.0f64) {
        let o = Order::new(alpha).unwrap();
        prop_assert_eq!(o.to_string().parse::<Order>().unwrap(), o);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sessions_replay_exactly(seed in any::<u64>(), p in 0.0..=MAX_ERROR_RATE, xi in 0.0..=1.0f64) {
        let cfg = SessionConfig { rounds: 300, error_rate: p, xi, seed };
        let a = run_session(&cfg).unwrap();
        prop_assert_eq!(a, run_session(&cfg).unwrap());
        prop_assert_eq!(a.counts.iter().flatten().flatten().flatten().sum::<u64>(), 300);
    }
}
