use mdelab::metrics::{
    balanced_transport, barycenter_split, flat_distance, flat_distance_dual, flat_value, wasserstein1_1d,
};
use mdelab::rng::normalize;
use mdelab::DiscreteMeasure;
use proptest::prelude::*;

fn measure(dim: usize, max_atoms: usize, half_width: f64) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((prop::collection::vec(-half_width..half_width, dim), 0.01f64..2.0), 1..=max_atoms)
        .prop_map(move |atoms| DiscreteMeasure::new(dim, atoms).unwrap())
}

fn probability_1d(max_atoms: usize) -> impl Strategy<Value = DiscreteMeasure> {
    measure(1, max_atoms, 2.0).prop_map(|m| normalize(&m))
}

fn same_dim_pair() -> impl Strategy<Value = (DiscreteMeasure, DiscreteMeasure)> {
    (1usize..=3).prop_flat_map(|d| (measure(d, 8, 2.0), measure(d, 8, 2.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn primal_matches_dual((mu, nu) in same_dim_pair()) {
        let (primal, plan) = flat_distance(&mu, &nu).unwrap();
        let (dual, cert) = flat_distance_dual(&mu, &nu).unwrap();
        prop_assert!((primal - dual).abs() <= 1e-9, "{} vs {}", primal, dual);
        prop_assert!(cert.violation() <= 1e-9);
        prop_assert!(plan.marginal_error(&mu, &nu) <= 1e-9);
        prop_assert!((plan.cost(&mu, &nu) - primal).abs() <= 1e-9);
    }

    #[test]
    fn metric_axioms((a, b, c) in (1usize..=3).prop_flat_map(|d| (measure(d, 6, 2.0), measure(d, 6, 2.0), measure(d, 6, 2.0)))) {
        let ab = flat_value(&a, &b).unwrap();
        prop_assert_eq!(ab, flat_value(&b, &a).unwrap());
        prop_assert_eq!(flat_value(&a, &a).unwrap(), 0.0);
        prop_assert!(ab <= a.total_mass() + b.total_mass() + 1e-12);
        prop_assert!(ab <= flat_value(&a, &c).unwrap() + flat_value(&c, &b).unwrap() + 1e-9);
    }

    #[test]
    fn flat_equals_w1_for_close_equal_mass(mu in measure(1, 8, 0.95), nu in measure(1, 8, 0.95)) {
        // all pairwise distances below 2, so removal never pays
        let nu = normalize(&nu).scaled(mu.total_mass()).unwrap();
        let mu = normalize(&mu).scaled(mu.total_mass()).unwrap();
        let w = wasserstein1_1d(&mu, &nu).unwrap();
        let f = flat_value(&mu, &nu).unwrap();
        prop_assert!((w - f).abs() <= 1e-9, "W1 {} flat {}", w, f);
    }

    #[test]
    fn quantile_w1_matches_balanced_transport(mu in probability_1d(10), nu in probability_1d(10), scale in 0.1f64..3.0) {
        let (mu, nu) = (mu.scaled(scale).unwrap(), nu.scaled(scale).unwrap());
        let w = wasserstein1_1d(&mu, &nu).unwrap();
        let (t, _) = balanced_transport(&mu, &nu).unwrap();
        prop_assert!((w - t).abs() <= 1e-9);
    }

    #[test]
    fn median_split_halves_and_decomposes(mu in probability_1d(10), nu in probability_1d(10)) {
        let a = barycenter_split(&mu).unwrap();
        let b = barycenter_split(&nu).unwrap();
        for s in [&a, &b] {
            prop_assert!((s.left.total_mass() - 0.5).abs() <= 1e-12);
            prop_assert!((s.right.total_mass() - 0.5).abs() <= 1e-12);
        }
        let mut whole = a.left.clone();
        whole.extend(&a.right).unwrap();
        let diff = whole.canonicalize().max_atom_difference(&mu.canonicalize());
        prop_assert!(diff.is_some_and(|d| d <= 1e-12));

        let lhs = wasserstein1_1d(&mu, &nu).unwrap();
        let rhs = wasserstein1_1d(&a.left, &b.left).unwrap() + wasserstein1_1d(&a.right, &b.right).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }
}
