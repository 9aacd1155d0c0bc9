use dhnet_demo::{check, simulate_and_detect, sweep, DemoParams};

#[test]
fn dense_setting1_is_recovered() {
    let out = simulate_and_detect(&DemoParams::default()).unwrap();
    assert_eq!(out.labels.len(), 225);
    assert_eq!(out.edges_per_snapshot.len(), 10);
    assert!(out.nmi > 0.9, "nmi {}", out.nmi);
    assert_eq!(out.nmi_per_type.len(), 2);
    assert!(out.misclassification < 0.1);
}

#[test]
fn same_params_give_same_json() {
    let p = r#"{"preset":"sparse","setting":"setting3","alpha":0.3,"sizes":[40,20],"seed":9}"#;
    let a = dhnet_demo::simulate_and_detect_json(p).ok().unwrap();
    let b = dhnet_demo::simulate_and_detect_json(p).ok().unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["truth"].as_array().unwrap().len(), 60);
}

#[test]
fn check_reports_holds_for_presets() {
    for preset in ["dense", "sparse"] {
        let out = check(&DemoParams { preset: preset.into(), ..DemoParams::default() }).unwrap();
        assert!(out.holds);
        assert!(out.diagonal_margin > 0.0 && out.off_diagonal_margin < 0.0);
        assert_eq!(out.aggregate.len(), 9);
    }
}

#[test]
fn sweep_returns_one_point_per_value() {
    let p = DemoParams { sizes: [30, 15], snapshots: 4, kappa: 3, ..DemoParams::default() };
    let pts = sweep(&p, &[0.05, 0.2]).unwrap();
    assert_eq!(pts.len(), 2);
    assert_eq!(pts[1].r3, 0.2);
    assert!(pts.iter().all(|p| (0.0..=1.0).contains(&p.nmi_dhnet)));
}
