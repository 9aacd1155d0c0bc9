//! Reference pipelines that reduce the network before running the same
//! optimizer: drop type information, collapse time, pick one snapshot, or
//! split by type.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::Assignment;
use crate::hetnet::{aggregate_max, flatten_types, project_type, select_snapshot, DynHetNet};
use crate::optimizer::{dhnet_detect, AuditStats, DhnetConfig, OptimizerError};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Dhnet,
    Method1,
    Method2,
    Method3,
    Method4,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Dhnet, Method::Method1, Method::Method2, Method::Method3, Method::Method4];

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "dhnet" => Some(Method::Dhnet),
            "m1" => Some(Method::Method1),
            "m2" => Some(Method::Method2),
            "m3" => Some(Method::Method3),
            "m4" => Some(Method::Method4),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Dhnet => "dhnet",
            Method::Method1 => "m1",
            Method::Method2 => "m2",
            Method::Method3 => "m3",
            Method::Method4 => "m4",
        }
    }
}

/// Plain detection result of a baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub assignment: Assignment,
    pub modularity: f64,
    pub restarts: usize,
    pub audit: AuditStats,
}

fn run(net: &DynHetNet, cfg: &DhnetConfig) -> Result<BaselineResult, OptimizerError> {
    let d = dhnet_detect(net, cfg)?;
    Ok(BaselineResult { assignment: d.assignment, modularity: d.modularity, restarts: d.restarts, audit: d.audit })
}

/// Ignores node types.
pub fn method1(net: &DynHetNet, cfg: &DhnetConfig) -> Result<BaselineResult, OptimizerError> {
    run(&flatten_types(net), cfg)
}

/// Unions all snapshots into one.
pub fn method2(net: &DynHetNet, cfg: &DhnetConfig) -> Result<BaselineResult, OptimizerError> {
    run(&aggregate_max(net), cfg)
}

/// 1-based snapshot picked by method 3 for `snapshot_seed`.
pub fn method3_snapshot(net: &DynHetNet, snapshot_seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(snapshot_seed, &[seeds::tag("method3")]));
    rng.random_range(1..=net.num_snapshots().max(1))
}

/// Uses one uniformly chosen snapshot.
pub fn method3(net: &DynHetNet, cfg: &DhnetConfig, snapshot_seed: u64) -> Result<BaselineResult, OptimizerError> {
    let s = method3_snapshot(net, snapshot_seed);
    run(&select_snapshot(net, s).expect("index within range"), cfg)
}

/// Per-type outcome of method 4.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeResult {
    pub node_type: usize,
    pub assignment: Assignment,
    pub modularity: f64,
    /// The type has no same-type edge; `assignment` is a single community.
    pub degenerate: bool,
    pub audit: AuditStats,
}

/// Runs detection on each type's same-type subnetwork.
pub fn method4(net: &DynHetNet, cfg: &DhnetConfig) -> Result<Vec<TypeResult>, OptimizerError> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(net.num_types());
    for ty in 0..net.num_types() {
        let sub = project_type(net, ty).expect("type within range");
        let n = sub.num_nodes();
        match dhnet_detect(&sub, cfg) {
            Ok(d) => out.push(TypeResult {
                node_type: ty,
                assignment: d.assignment,
                modularity: d.modularity,
                degenerate: false,
                audit: d.audit,
            }),
            Err(OptimizerError::NoEdges) => out.push(TypeResult {
                node_type: ty,
                assignment: Assignment::single(n),
                modularity: 0.0,
                degenerate: true,
                audit: AuditStats::default(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Concatenates per-type labels into one global vector with disjoint label
/// ranges per type.
pub fn method4_combined(results: &[TypeResult]) -> Assignment {
    let mut next = 0u64;
    let mut labels = Vec::new();
    for r in results {
        labels.extend(r.assignment.labels().iter().map(|&l| next + u64::from(l)));
        next += r.assignment.num_communities() as u64;
    }
    Assignment::from_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetnet::{NetBuilder, TypeLayout};

    fn two_type_net() -> DynHetNet {
        let mut b = NetBuilder::new(TypeLayout::new(vec![4, 2]).unwrap(), 3).unwrap();
        for s in 1..=3 {
            b.add_edge(s, 0, 0, 0, 1).unwrap();
            b.add_edge(s, 0, 2, 0, 3).unwrap();
            b.add_edge(s, 0, 0, 1, 0).unwrap();
            b.add_edge(s, 0, 3, 1, 1).unwrap();
        }
        b.build()
    }

    #[test]
    fn shapes_match_input() {
        let net = two_type_net();
        let cfg = DhnetConfig::default().with_kappa(5);
        for r in [method1(&net, &cfg).unwrap(), method2(&net, &cfg).unwrap(), method3(&net, &cfg, 4).unwrap()] {
            assert_eq!(r.assignment.len(), 6);
        }
        let per_type = method4(&net, &cfg).unwrap();
        assert_eq!(per_type.len(), 2);
        assert!(!per_type[0].degenerate);
        assert!(per_type[1].degenerate);
        assert_eq!(per_type[1].assignment.num_communities(), 1);
        assert_eq!(method4_combined(&per_type).len(), 6);
    }

    #[test]
    fn method3_snapshot_is_reproducible() {
        let net = two_type_net();
        let s = method3_snapshot(&net, 11);
        assert!((1..=3).contains(&s));
        assert_eq!(s, method3_snapshot(&net, 11));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.name()), Some(m));
        }
        assert_eq!(Method::parse("m5"), None);
    }
}
