use std::path::Path;
use std::process::{Command, Output};

use dhnet_core::hetnet::{parse_network, serialize_network};
use dhnet_core::metrics::nmi;
use dhnet_core::Assignment;

const TOY_NET: &str = "L=2 sizes=6,3 S=2\n\
1 0:0 0:1\n1 0:2 0:3\n1 0:4 0:5\n1 0:1 0:2\n\
1 0:0 1:0\n1 0:1 1:0\n1 0:2 1:1\n1 0:3 1:1\n1 0:4 1:2\n1 0:5 1:2\n\
2 0:0 0:1\n2 0:2 0:3\n2 0:4 0:5\n2 0:3 0:4\n\
2 0:0 1:0\n2 0:1 1:0\n2 0:2 1:1\n2 0:3 1:1\n2 0:4 1:2\n2 0:5 1:2\n";

const SIM_CONFIG: &str = "seed = 11\nsizes = [30, 15]\nsnapshots = 4\n\
[scenario]\nsetting = \"setting1\"\nr3 = 0.15\n";

fn dhnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dhnet")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn simulate_writes_parsable_files_and_stable_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("model.toml");
    std::fs::write(&cfg, SIM_CONFIG).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = dhnet(&["simulate", p(&cfg), "--out", p(out)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = std::fs::read_to_string(a.join("network.txt")).unwrap();
    let net = parse_network(&text).unwrap();
    assert_eq!(serialize_network(&net), text);
    assert_eq!(net.num_nodes(), 45);
    for f in ["network.txt", "labels.txt", "manifest.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn simulate_rejects_invalid_model_with_cell_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "sizes = [4]\ncommunities = 1\nsnapshots = 2\nalpha = 0.5\n\
         [[block]]\ntypes = [0, 0]\ntheta_snapshots = [[[0.8]], [[0.3]]]\n",
    )
    .unwrap();
    let o = dhnet(&["simulate", p(&cfg), "--out", p(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s=2 block=(0,0) cell=(0,0)"), "{}", stderr(&o));
}

#[test]
fn detect_toy_net_and_repeatability() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.txt");
    std::fs::write(&net, TOY_NET).unwrap();
    let (l1, l2) = (dir.path().join("l1.txt"), dir.path().join("l2.txt"));
    for out in [&l1, &l2] {
        let o = dhnet(&["detect", p(&net), "--kappa", "20", "--seed", "5", "--out", p(out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let line = stdout(&o);
        assert!(line.starts_with("Q="), "{line}");
        assert!(line.contains(" K=3 restarts=20 seconds="), "{line}");
    }
    assert_eq!(std::fs::read(&l1).unwrap(), std::fs::read(&l2).unwrap());
    let labels = std::fs::read_to_string(&l1).unwrap();
    assert_eq!(labels.lines().count(), 9);
    assert!(labels.starts_with("0 0 0\n0 1 0\n0 2 1\n"));
    assert!(dir.path().join("l1.txt.manifest.json").exists());
}

#[test]
fn method2_on_single_snapshot_matches_dhnet() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.txt");
    let single: String = TOY_NET.replace("S=2", "S=1").lines().filter(|l| !l.starts_with('2')).map(|l| format!("{l}\n")).collect();
    std::fs::write(&net, single).unwrap();
    let out = |m: &str| {
        let path = dir.path().join(format!("{m}.txt"));
        let o = dhnet(&["detect", p(&net), "--kappa", "10", "--method", m, "--out", p(&path)]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read_to_string(path).unwrap()
    };
    assert_eq!(out("dhnet"), out("m2"));
    let o = dhnet(&["detect", p(&net), "--kappa", "5", "--method", "m4", "--out", p(&dir.path().join("m4.txt"))]);
    let text = stdout(&o);
    assert!(text.contains("type=0 Q="), "{text}");
    assert!(text.contains("type=1 Q=0.0000000000 K=1") && text.contains("degenerate"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "L=1 sizes=4 S=2\n").unwrap();
    assert_eq!(dhnet(&["detect", p(&empty), "--out", p(&dir.path().join("x"))]).status.code(), Some(3));
    let missing = dir.path().join("missing.txt");
    assert_eq!(dhnet(&["detect", p(&missing)]).status.code(), Some(4));
    let broken = dir.path().join("broken.txt");
    std::fs::write(&broken, "L=1 sizes=4 S=1\n1 0:0 0:9\n").unwrap();
    assert_eq!(dhnet(&["detect", p(&broken)]).status.code(), Some(2));
}

#[test]
fn evaluate_reports_whole_and_per_type() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, labels: &[u32]| {
        let path = dir.path().join(name);
        let text: String = labels
            .iter()
            .enumerate()
            .map(|(g, l)| if g < 6 { format!("0 {g} {l}\n") } else { format!("1 {} {l}\n", g - 6) })
            .collect();
        std::fs::write(&path, text).unwrap();
        path
    };
    let truth = [0, 0, 1, 1, 2, 2, 0, 1, 2];
    let est = [5, 5, 1, 1, 1, 2, 5, 1, 2];
    let t = write("t.txt", &truth);
    let permuted = write("p.txt", &[2, 2, 0, 0, 1, 1, 2, 0, 1]);
    let e = write("e.txt", &est);

    let o = dhnet(&["evaluate", p(&permuted), p(&t)]);
    assert!(stdout(&o).starts_with("NMI=1.000000 MISCLASS=0.000000\n"), "{}", stdout(&o));

    let o = dhnet(&["evaluate", p(&e), p(&t)]);
    let text = stdout(&o);
    let want = |r: std::ops::Range<usize>| {
        nmi(&Assignment::from_labels(est[r.clone()].iter().copied()), &Assignment::from_labels(truth[r].iter().copied()))
            .unwrap()
    };
    assert!(text.contains(&format!("type=0 NMI={:.6}", want(0..6))), "{text}");
    assert!(text.contains(&format!("type=1 NMI={:.6}", want(6..9))), "{text}");

    let short = write("s.txt", &truth[..8]);
    assert_eq!(dhnet(&["evaluate", p(&short), p(&t)]).status.code(), Some(2));
}

#[test]
fn benchmark_writes_schema_stable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bench.toml");
    std::fs::write(
        &spec,
        "name = \"tiny\"\nkappa = 3\nseed = 2\nmethods = [\"dhnet\", \"m1\"]\n\
         [base]\nsizes = [15, 9]\nsnapshots = 3\n[base.scenario]\nsetting = \"setting1\"\n\
         [sweep]\nparam = \"r3\"\nvalues = [0.05, 0.15]\n",
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let o = dhnet(&["benchmark", p(&spec), "--replicates", "2", "--out", p(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scenario,param,replicate,method,node_type,nmi,q,seconds,seed"));
    // 2 values x 2 replicates x 2 methods x 2 types, plus 2 x 2 x 2 means
    assert_eq!(lines.count(), 16 + 8);
    assert!(text.contains("tiny,0.15,mean,dhnet,1,"));

    std::fs::write(&spec, "[base]\nsizes = [4, 4]\n[base.scenario]\nsetting = \"setting1\"\n[sweep]\nparam = \"beta\"\nvalues = [1.0]\n")
        .unwrap();
    assert_eq!(dhnet(&["benchmark", p(&spec)]).status.code(), Some(2));
}

#[test]
fn check_reports_condition() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, "[scenario]\nsetting = \"setting1\"\nr3 = 0.15\n").unwrap();
    let o = dhnet(&["check", p(&good)]);
    assert!(stdout(&o).starts_with("holds\n"), "{}", stdout(&o));
    assert!(stdout(&o).contains("a=0 b=1 W="));

    let uniform = dir.path().join("uniform.toml");
    std::fs::write(&uniform, "sizes = [5]\ncommunities = 2\n[[block]]\ntypes = [0, 0]\ntheta = [[0.3, 0.3], [0.3, 0.3]]\n")
        .unwrap();
    assert!(stdout(&dhnet(&["check", p(&uniform)])).starts_with("fails\n"));

    let degenerate = dir.path().join("zero.toml");
    std::fs::write(&degenerate, "sizes = [5]\ncommunities = 2\n").unwrap();
    assert_eq!(dhnet(&["check", p(&degenerate)]).status.code(), Some(2));
}

#[test]
fn predict_flags_cold_start() {
    let dir = tempfile::tempdir().unwrap();
    // users 0..4, businesses 0..2, categories 0..2; communities {u0,u1,b0,c0}, {u2,u3,b1,c1}
    let net = "L=3 sizes=4,2,2 S=1\n1 0:0 0:1\n1 0:2 0:3\n1 0:0 1:0\n1 0:1 1:0\n1 0:2 1:1\n1 0:3 1:1\n1 0:3 1:0\n1 1:0 2:0\n1 1:1 2:1\n";
    let labels = "0 0 0\n0 1 0\n0 2 1\n0 3 1\n1 0 0\n1 1 1\n2 0 0\n2 1 1\n";
    let test = "friend a 2\nfriend a 3\nreview a 1\nreview nobody 0\n";
    let paths: Vec<_> = [("net.txt", net), ("labels.txt", labels), ("test.txt", test)]
        .iter()
        .map(|(n, t)| {
            let path = dir.path().join(n);
            std::fs::write(&path, t).unwrap();
            path
        })
        .collect();
    let o = dhnet(&[
        "predict",
        p(&paths[0]),
        p(&paths[1]),
        p(&paths[2]),
        "--user-type",
        "0",
        "--business-type",
        "1",
        "--category-type",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "user,jsd_dhnet,jsd_naive,cold_start");
    assert!(rows[1].starts_with("a,0.000000,"), "{csv}");
    assert!(rows[1].ends_with(",0"));
    assert_eq!(rows[2], "nobody,,,1");
    assert!(stderr(&o).contains("cold_start=1"));
}
