use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use dhnet_core::baselines::{self, Method};
use dhnet_core::bench::{run_benchmark, BenchError};
use dhnet_core::config::{BenchmarkSpec, ConfigError, ModelFile, Overrides};
use dhnet_core::dhsbm::{self, DhsbmError};
use dhnet_core::hetnet::{parse_network, serialize_network, DynHetNet};
use dhnet_core::metrics::{misclassification, nmi};
use dhnet_core::optimizer::{dhnet_detect, DhnetConfig, OptimizerError};
use dhnet_core::predict::{parse_test_file, predict, PredictTypes};
use dhnet_core::{seeds, Assignment};
use sha2::{Digest, Sha256};
use thiserror::Error;

mod labels;

// stdout writes that tolerate a closed pipe (`dhnet check x | head`)
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "dhnet", version, about = "Common community detection in dynamic heterogeneous networks")]
struct Cli {
    /// Worker threads for restarts (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Dhnet,
    M1,
    M2,
    M3,
    M4,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Dhnet => Method::Dhnet,
            MethodArg::M1 => Method::Method1,
            MethodArg::M2 => Method::Method2,
            MethodArg::M3 => Method::Method3,
            MethodArg::M4 => Method::Method4,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a network from a DHSBM config.
    Simulate {
        config: PathBuf,
        /// Output directory for network.txt, labels.txt and manifest.json.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Detect communities.
    Detect {
        network: PathBuf,
        #[arg(long, default_value_t = 100)]
        kappa: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "dhnet")]
        method: MethodArg,
        /// Label file to write.
        #[arg(long, short, default_value = "labels.txt")]
        out: PathBuf,
    },
    /// Compare estimated labels with true labels.
    Evaluate { estimated: PathBuf, truth: PathBuf },
    /// Run a replicated parameter sweep and write CSV.
    Benchmark {
        spec: PathBuf,
        #[arg(long)]
        replicates: Option<usize>,
        /// CSV path; stdout if omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Report whether a model satisfies the assortativity condition.
    Check { config: PathBuf },
    /// Predict category interests of new users.
    Predict {
        train: PathBuf,
        labels: PathBuf,
        test: PathBuf,
        #[arg(long)]
        user_type: usize,
        #[arg(long)]
        business_type: usize,
        #[arg(long)]
        category_type: usize,
        /// CSV path; stdout if omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Empty(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Empty(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            ConfigError::Model(DhsbmError::Invalid(v)) => CliError::Config(violation_list(&v)),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<OptimizerError> for CliError {
    fn from(e: OptimizerError) -> Self {
        match e {
            OptimizerError::NoEdges => CliError::Empty(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Config(c) => c.into(),
            BenchError::Optimizer(o) => o.into(),
            BenchError::Model(DhsbmError::Invalid(v)) => CliError::Config(violation_list(&v)),
            BenchError::Model(m) => CliError::Config(m.to_string()),
        }
    }
}

fn violation_list(v: &[dhsbm::Violation]) -> String {
    let mut out = format!("invalid model ({} violations):", v.len());
    for x in v {
        out.push_str(&format!("\n  {x}"));
    }
    out
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(serde::Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    input_sha256: String,
    parameters: serde_json::Value,
    outputs: Vec<String>,
}

fn write_manifest(path: &Path, command: &str, seed: u64, input: &str, parameters: serde_json::Value, outputs: &[&Path]) -> Result<()> {
    let m = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        input_sha256: sha256_hex(input),
        parameters,
        outputs: outputs
            .iter()
            .map(|p| p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned()))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&m).expect("manifest serializes");
    text.push('\n');
    write(path, &text)
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn load_network(path: &Path) -> Result<DynHetNet> {
    let text = read(path)?;
    parse_network(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn load_model(path: &Path) -> Result<(String, dhsbm::DhsbmConfig)> {
    let text = read(path)?;
    let model = ModelFile::parse(&text)?;
    let cfg = model.resolve(&base_dir(path), &Overrides::default())?;
    Ok((text, cfg))
}

fn simulate(config: &Path, out: &Path) -> Result<()> {
    let (text, cfg) = load_model(config)?;
    dhsbm::validate_config(&cfg).map_err(|v| CliError::Config(violation_list(&v)))?;
    let sampled = dhsbm::sample(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let (net_path, label_path) = (out.join("network.txt"), out.join("labels.txt"));
    write(&net_path, &serialize_network(&sampled.net))?;
    write(&label_path, &labels::format_raw_labels(&cfg.layout, &sampled.communities))?;
    write_manifest(
        &out.join("manifest.json"),
        "simulate",
        cfg.seed,
        &text,
        serde_json::json!({ "config": config.file_name().map(|f| f.to_string_lossy().into_owned()) }),
        &[&net_path, &label_path],
    )?;
    outln!(
        "nodes={} snapshots={} edges={} out={}",
        sampled.net.num_nodes(),
        sampled.net.num_snapshots(),
        sampled.net.edge_count(),
        out.display()
    );
    Ok(())
}

fn detect(network: &Path, kappa: usize, seed: u64, method: Method, out: &Path) -> Result<()> {
    let text = read(network)?;
    let net = parse_network(&text).map_err(|e| CliError::Config(format!("{}: {e}", network.display())))?;
    if net.is_empty() {
        return Err(CliError::Empty("network has no edges".into()));
    }
    let cfg = DhnetConfig::default().with_kappa(kappa).with_seed(seed);
    let t0 = Instant::now();
    let assignment = match method {
        Method::Method4 => {
            let results = baselines::method4(&net, &cfg)?;
            let secs = t0.elapsed().as_secs_f64();
            for r in &results {
                let flag = if r.degenerate { " degenerate" } else { "" };
                outln!(
                    "type={} Q={:.10} K={} restarts={kappa} seconds={secs:.3}{flag}",
                    r.node_type,
                    r.modularity,
                    r.assignment.num_communities()
                );
            }
            baselines::method4_combined(&results)
        }
        m => {
            let r = match m {
                Method::Dhnet => {
                    let d = dhnet_detect(&net, &cfg)?;
                    (d.assignment, d.modularity, d.restarts)
                }
                Method::Method1 => summary(baselines::method1(&net, &cfg)?),
                Method::Method2 => summary(baselines::method2(&net, &cfg)?),
                _ => summary(baselines::method3(&net, &cfg, seeds::derive(seed, &[seeds::tag("snapshot")]))?),
            };
            outln!(
                "Q={:.10} K={} restarts={} seconds={:.3}",
                r.1,
                r.0.num_communities(),
                r.2,
                t0.elapsed().as_secs_f64()
            );
            r.0
        }
    };
    write(out, &labels::format_labels(net.layout(), &assignment))?;
    write_manifest(
        &sidecar(out),
        "detect",
        seed,
        &text,
        serde_json::json!({ "kappa": kappa, "method": method.name() }),
        &[out],
    )
}

fn summary(r: baselines::BaselineResult) -> (Assignment, f64, usize) {
    (r.assignment, r.modularity, r.restarts)
}

fn evaluate(estimated: &Path, truth: &Path) -> Result<()> {
    let (la, a) = labels::parse_labels(&read(estimated)?).map_err(|e| CliError::Config(format!("{}: {e}", estimated.display())))?;
    let (lb, b) = labels::parse_labels(&read(truth)?).map_err(|e| CliError::Config(format!("{}: {e}", truth.display())))?;
    if la != lb {
        return Err(CliError::Config(format!(
            "label files describe different node sets: sizes {:?} vs {:?}",
            la.sizes(),
            lb.sizes()
        )));
    }
    let metrics = |x: &Assignment, y: &Assignment| -> (f64, f64) {
        (nmi(x, y).expect("equal lengths"), misclassification(x, y).expect("equal lengths"))
    };
    let (n, m) = metrics(&a, &b);
    outln!("NMI={n:.6} MISCLASS={m:.6}");
    for ty in 0..la.num_types() {
        let r = la.offset(ty)..la.offset(ty) + la.size(ty);
        let (n, m) = metrics(&a.slice(r.clone()), &b.slice(r));
        outln!("type={ty} NMI={n:.6} MISCLASS={m:.6}");
    }
    Ok(())
}

fn benchmark(spec_path: &Path, replicates: Option<usize>, out: Option<&Path>) -> Result<()> {
    let text = read(spec_path)?;
    let mut spec = BenchmarkSpec::parse(&text, &base_dir(spec_path))?;
    if let Some(r) = replicates {
        if r == 0 {
            return Err(CliError::Config("replicates must be positive".into()));
        }
        spec.replicates = r;
    }
    let report = run_benchmark(&spec)?;
    let csv = report.to_csv();
    let a = &report.audit;
    eprintln!(
        "rows={} accepted_moves={} nonpositive_moves={} max_drift={:.3e} max_rescore_error={:.3e}",
        report.rows.len(),
        a.accepted_moves,
        a.nonpositive_moves,
        a.max_drift,
        a.rescore_error
    );
    match out {
        Some(path) => {
            write(path, &csv)?;
            write_manifest(
                &sidecar(path),
                "benchmark",
                spec.seed,
                &text,
                serde_json::json!({ "replicates": spec.replicates, "kappa": spec.kappa, "sweep": spec.param.name() }),
                &[path],
            )
        }
        None => {
            out!("{csv}");
            Ok(())
        }
    }
}

fn check(config: &Path) -> Result<()> {
    let (_, cfg) = load_model(config)?;
    dhsbm::validate_config(&cfg).map_err(|v| CliError::Config(violation_list(&v)))?;
    let r = dhsbm::assortativity_check(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    outln!("{}", if r.holds { "holds" } else { "fails" });
    let k = r.communities;
    for a in 0..k {
        for b in 0..k {
            let w = r.cell(a, b);
            let (need, ok) = if a == b { (">0", w > 0.0) } else { ("<0", w < 0.0) };
            outln!("a={a} b={b} W={w:.6e} need{need} {}", if ok { "ok" } else { "violated" });
        }
    }
    outln!("min_diagonal={:.6e} max_off_diagonal={:.6e}", r.diagonal_margin, r.off_diagonal_margin);
    Ok(())
}

fn run_predict(
    train: &Path,
    label_path: &Path,
    test: &Path,
    types: PredictTypes,
    out: Option<&Path>,
) -> Result<()> {
    let net = load_network(train)?;
    let (layout, labels) =
        labels::parse_labels(&read(label_path)?).map_err(|e| CliError::Config(format!("{}: {e}", label_path.display())))?;
    if &layout != net.layout() {
        return Err(CliError::Config("label file does not cover the training network".into()));
    }
    for ty in [types.user, types.business, types.category] {
        if ty >= layout.num_types() {
            return Err(CliError::Config(format!("type {ty} out of range")));
        }
    }
    let test_text = read(test)?;
    let users = parse_test_file(&test_text, layout.size(types.user), layout.size(types.business))
        .map_err(|e| CliError::Config(format!("{}: {e}", test.display())))?;
    let report = predict(&net, &labels, &users, types).map_err(|e| CliError::Config(e.to_string()))?;
    let csv = report.to_csv();
    match out {
        Some(path) => write(path, &csv)?,
        None => out!("{csv}"),
    }
    let fmt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| format!("{x:.6}"));
    let cold = report.users.iter().filter(|u| u.cold_start).count();
    let line = format!(
        "mean_jsd_dhnet={} mean_jsd_naive={} users={} cold_start={cold} unscored={} log=natural",
        fmt(report.mean_dhnet),
        fmt(report.mean_naive),
        report.users.len(),
        report.unscored
    );
    if out.is_some() {
        outln!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::Detect { network, kappa, seed, method, out } => detect(&network, kappa, seed, method.into(), &out),
        Command::Evaluate { estimated, truth } => evaluate(&estimated, &truth),
        Command::Benchmark { spec, replicates, out } => benchmark(&spec, replicates, out.as_deref()),
        Command::Check { config } => check(&config),
        Command::Predict { train, labels, test, user_type, business_type, category_type, out } => run_predict(
            &train,
            &labels,
            &test,
            PredictTypes { user: user_type, business: business_type, category: category_type },
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
