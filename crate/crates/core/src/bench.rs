//! Replicated simulation runs over a parameter grid, producing one CSV row
//! per (grid value, replicate, method, node type) plus per-group means.

use std::fmt::Write as _;
use std::time::Instant;

use crate::baselines::{method1, method2, method3, method4, BaselineResult, Method};
use crate::config::{BenchmarkSpec, ConfigError};
use crate::dhsbm::{sample, DhsbmConfig, DhsbmError};
use crate::metrics::nmi;
use crate::optimizer::{dhnet_detect, AuditStats, DhnetConfig, OptimizerError};
use crate::seeds;

pub const CSV_HEADER: &str = "scenario,param,replicate,method,node_type,nmi,q,seconds,seed";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] DhsbmError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scenario: String,
    pub param: f64,
    /// `None` on mean rows.
    pub replicate: Option<usize>,
    pub method: Method,
    pub node_type: usize,
    pub nmi: f64,
    pub q: f64,
    pub seconds: f64,
    pub seed: u64,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        let rep = self.replicate.map_or_else(|| "mean".to_string(), |r| r.to_string());
        format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{}",
            self.scenario,
            self.param,
            rep,
            self.method.name(),
            self.node_type,
            self.nmi,
            self.q,
            self.seconds,
            self.seed
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub means: Vec<BenchRow>,
    pub audit: AuditStats,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in self.rows.iter().chain(&self.means) {
            let _ = writeln!(out, "{}", row.to_csv());
        }
        out
    }

    /// Mean NMI of `method` on `node_type` at grid value `param`.
    pub fn mean_nmi(&self, param: f64, method: Method, node_type: usize) -> Option<f64> {
        self.means
            .iter()
            .find(|r| r.param == param && r.method == method && r.node_type == node_type)
            .map(|r| r.nmi)
    }
}

/// Runs one method on a sampled replicate; returns `(per-type NMI, per-type Q)`.
pub fn evaluate_method(
    method: Method,
    sampled: &crate::dhsbm::DhsbmSample,
    cfg: &DhnetConfig,
    audit: &mut AuditStats,
) -> Result<(Vec<f64>, Vec<f64>), OptimizerError> {
    let net = &sampled.net;
    let layout = net.layout();
    let truth = sampled.assignment();
    let per_type = |r: &BaselineResult| -> Vec<f64> {
        (0..layout.num_types())
            .map(|ty| {
                let range = layout.offset(ty)..layout.offset(ty) + layout.size(ty);
                nmi(&r.assignment.slice(range.clone()), &truth.slice(range)).expect("matching lengths")
            })
            .collect()
    };
    let single = |r: BaselineResult, audit: &mut AuditStats| {
        audit.merge(&r.audit);
        let nmis = per_type(&r);
        let qs = vec![r.modularity; nmis.len()];
        (nmis, qs)
    };
    Ok(match method {
        Method::Dhnet => {
            let d = dhnet_detect(net, cfg)?;
            single(
                BaselineResult { assignment: d.assignment, modularity: d.modularity, restarts: d.restarts, audit: d.audit },
                audit,
            )
        }
        Method::Method1 => single(method1(net, cfg)?, audit),
        Method::Method2 => single(method2(net, cfg)?, audit),
        Method::Method3 => {
            let s = seeds::derive(cfg.seed, &[seeds::tag("snapshot")]);
            single(method3(net, cfg, s)?, audit)
        }
        Method::Method4 => {
            let results = method4(net, cfg)?;
            let mut nmis = Vec::new();
            let mut qs = Vec::new();
            for r in results {
                audit.merge(&r.audit);
                let ty = r.node_type;
                let range = layout.offset(ty)..layout.offset(ty) + layout.size(ty);
                nmis.push(nmi(&r.assignment, &truth.slice(range)).expect("matching lengths"));
                qs.push(r.modularity);
            }
            (nmis, qs)
        }
    })
}

/// Seed of replicate `r` at grid index `g`.
pub fn replicate_seed(root: u64, grid_index: usize, replicate: usize) -> u64 {
    seeds::derive(root, &[seeds::tag("replicate"), grid_index as u64, replicate as u64])
}

/// Runs the grid `models` (name, value, model-for-seed) directly; used by
/// [`run_benchmark`] and by in-process experiments.
pub fn run_grid<F>(
    scenario: &str,
    values: &[f64],
    replicates: usize,
    methods: &[Method],
    detect: &DhnetConfig,
    root_seed: u64,
    mut model_at: F,
) -> Result<BenchReport, BenchError>
where
    F: FnMut(f64, u64) -> Result<DhsbmConfig, BenchError>,
{
    let mut report = BenchReport::default();
    for (g, &value) in values.iter().enumerate() {
        let start = report.rows.len();
        for r in 0..replicates {
            let seed = replicate_seed(root_seed, g, r);
            let model = model_at(value, seed)?;
            let sampled = sample(&model)?;
            for &method in methods {
                let cfg = DhnetConfig { seed: seeds::derive(seed, &[seeds::tag("detect")]), ..detect.clone() };
                let t0 = Instant::now();
                let (nmis, qs) = evaluate_method(method, &sampled, &cfg, &mut report.audit)?;
                let seconds = t0.elapsed().as_secs_f64();
                for (ty, (nmi, q)) in nmis.into_iter().zip(qs).enumerate() {
                    report.rows.push(BenchRow {
                        scenario: scenario.to_string(),
                        param: value,
                        replicate: Some(r),
                        method,
                        node_type: ty,
                        nmi,
                        q,
                        seconds,
                        seed,
                    });
                }
            }
        }
        let group = &report.rows[start..];
        let mut means = Vec::new();
        for &method in methods {
            let types = group.iter().filter(|row| row.method == method).map(|row| row.node_type).max();
            for ty in 0..=types.unwrap_or(0) {
                let sel: Vec<&BenchRow> = group.iter().filter(|row| row.method == method && row.node_type == ty).collect();
                if sel.is_empty() {
                    continue;
                }
                let n = sel.len() as f64;
                means.push(BenchRow {
                    scenario: scenario.to_string(),
                    param: value,
                    replicate: None,
                    method,
                    node_type: ty,
                    nmi: sel.iter().map(|r| r.nmi).sum::<f64>() / n,
                    q: sel.iter().map(|r| r.q).sum::<f64>() / n,
                    seconds: sel.iter().map(|r| r.seconds).sum::<f64>() / n,
                    seed: root_seed,
                });
            }
        }
        report.means.extend(means);
    }
    Ok(report)
}

/// Runs a parsed benchmark spec with auditing switched on.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchReport, BenchError> {
    let detect = DhnetConfig { kappa: spec.kappa, audit: true, ..DhnetConfig::default() };
    run_grid(&spec.name, &spec.values, spec.replicates, &spec.methods, &detect, spec.seed, |v, s| {
        Ok(spec.model_at(v, s)?)
    })
}
