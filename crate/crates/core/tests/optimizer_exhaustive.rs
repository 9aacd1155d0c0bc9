mod common;

use dhnet_core::modularity::{build_oracle, modularity};
use dhnet_core::optimizer::{dhnet_detect, DhnetConfig, OptimizerError};
use dhnet_core::Assignment;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn toy_net_recovers_three_communities() {
    let net = common::toy_net();
    let (best_q, best) = common::exhaustive_max(&net);
    assert_eq!(Assignment::from_labels(best), Assignment::from_labels(common::TOY_LABELS));
    let d = dhnet_detect(&net, &DhnetConfig::default().with_kappa(50)).unwrap();
    assert_eq!(d.num_communities(), 3);
    assert_eq!(d.assignment, Assignment::from_labels(common::TOY_LABELS));
    assert!((d.modularity - best_q).abs() < 1e-10);
}

#[test]
fn small_random_networks_reach_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 12 {
        let n_types = 1 + checked % 2;
        let sizes = common::random_sizes(&mut rng, n_types, 7);
        let net = common::random_net(&mut rng, sizes, 1 + checked % 3, 0.35);
        if net.is_empty() {
            continue;
        }
        let (best_q, _) = common::exhaustive_max(&net);
        let d = dhnet_detect(&net, &DhnetConfig::default().with_kappa(50).with_seed(checked as u64)).unwrap();
        assert!(d.modularity >= best_q - 1e-10, "net {checked}: {} < {best_q}", d.modularity);
        checked += 1;
    }
}

#[test]
fn reported_q_matches_rescore_and_audit_is_clean() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let net = common::random_net(&mut rng, vec![40, 25], 4, 0.1);
    let cfg = DhnetConfig { kappa: 8, audit: true, ..DhnetConfig::default() };
    let d = dhnet_detect(&net, &cfg).unwrap();
    let oracle = build_oracle(&net);
    assert!((modularity(&oracle, &d.assignment) - d.modularity).abs() < 1e-8);
    assert!(d.audit.is_sound(1e-8), "{:?}", d.audit);
    assert!(d.audit.accepted_moves > 0);
}

#[test]
fn same_seed_same_result() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let net = common::random_net(&mut rng, vec![30, 10], 3, 0.15);
    let cfg = DhnetConfig::default().with_kappa(6).with_seed(77);
    let a = dhnet_detect(&net, &cfg).unwrap();
    let b = dhnet_detect(&net, &DhnetConfig { parallel_restarts: false, ..cfg.clone() }).unwrap();
    assert_eq!(a.assignment, b.assignment);
    assert_eq!(a.modularity, b.modularity);
}

#[test]
fn edgeless_network_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let net = common::random_net(&mut rng, vec![5], 2, 0.0);
    assert_eq!(dhnet_detect(&net, &DhnetConfig::default()).unwrap_err(), OptimizerError::NoEdges);
    assert!(dhnet_detect(&common::toy_net(), &DhnetConfig::default().with_kappa(0)).is_err());
}
