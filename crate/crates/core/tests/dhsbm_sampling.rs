use std::collections::HashSet;

use dhnet_core::dhsbm::{
    assortativity_check, constant_activity, sample, scenario_builder, DhsbmConfig, ScenarioParams,
};
use dhnet_core::hetnet::TypeLayout;
use proptest::prelude::*;

#[test]
fn balanced_labels_are_exact() {
    let mut p = ScenarioParams::scenario1(0.1);
    p.sizes = [30, 12];
    p.snapshots = 2;
    p.balanced = true;
    let s = sample(&scenario_builder("setting1", &p).unwrap()).unwrap();
    let counts = |r: std::ops::Range<usize>| {
        let mut c = [0; 3];
        for &k in &s.communities[r] {
            c[k] += 1;
        }
        c
    };
    assert_eq!(counts(0..30), [10, 10, 10]);
    assert_eq!(counts(30..42), [4, 4, 4]);
}

#[test]
fn strong_persistence_rarely_flips() {
    // 1770 pairs, 4 transitions, flip rate (1 - α) 2θ(1 - θ): about 3 flips expected
    let mut cfg = DhsbmConfig::new(TypeLayout::new(vec![60]).unwrap(), 1, 5);
    cfg.set_theta_all(0, 0, &[0.3]);
    cfg.set_alpha_all(0.999);
    let s = sample(&cfg).unwrap();
    let snaps = s.net.snapshots();
    let flips: usize = snaps
        .windows(2)
        .map(|w| {
            let a: HashSet<_> = w[0].stored(0, 0).iter().collect();
            let b: HashSet<_> = w[1].stored(0, 0).iter().collect();
            a.symmetric_difference(&b).count()
        })
        .sum();
    assert!(flips <= 20, "{flips} flips");
    assert!(snaps[0].edge_count() > 400);
}

#[test]
fn constant_activity_setting3_is_constant() {
    let mut p = ScenarioParams::scenario1(0.1);
    p.snapshots = 6;
    p.alpha = 0.4;
    p.activity = Some(constant_activity(6, 0.1));
    let cfg = scenario_builder("setting3", &p).unwrap();
    for s in 1..6 {
        assert_eq!(cfg.theta(s, 0, 1), cfg.theta(0, 0, 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn two_community_criterion(t11 in 0.01f64..1.0, t22 in 0.01f64..1.0, t12 in 0.0f64..1.0, p in 0.05f64..0.95) {
        let mut cfg = DhsbmConfig::new(TypeLayout::new(vec![10]).unwrap(), 2, 2);
        cfg.pi = vec![vec![p, 1.0 - p]];
        cfg.set_theta_all(0, 0, &[t11, t12, t12, t22]);
        let det = t11 * t22 - t12 * t12;
        prop_assume!(det.abs() > 1e-9);
        prop_assert_eq!(assortativity_check(&cfg).unwrap().holds, det > 0.0);
    }

    #[test]
    fn scenario1_is_assortative_for_positive_r3(r3 in 0.01f64..0.2) {
        let cfg = scenario_builder("setting1", &ScenarioParams::scenario1(r3)).unwrap();
        prop_assert!(assortativity_check(&cfg).unwrap().holds);
    }
}
