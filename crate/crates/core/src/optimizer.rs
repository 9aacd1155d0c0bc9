//! Louvain-type maximization of the integrated modularity over units: sets
//! of nodes holding at most one meta-node per node type.
//!
//! A restart alternates a local-move phase (each unit jumps to the
//! neighboring community with the largest strictly positive gain, sweeping
//! until nothing moves) with a merge phase that turns every community into a
//! single unit. It stops when an outer iteration no longer raises Q by more
//! than the tolerance. Several restarts with different unit orderings are
//! run and the best assignment is kept.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::assignment::Assignment;
use crate::hetnet::DynHetNet;
use crate::modularity::{build_oracle, modularity, ModularityError, ModularityOracle};
use crate::seeds;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("network has no edges")]
    NoEdges,
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
    #[error("no modularity fixed point after {0} outer iterations")]
    IterationCap(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DhnetConfig {
    /// Number of random-ordering restarts.
    pub kappa: usize,
    pub seed: u64,
    /// Minimum Q improvement for a move or an outer iteration to count.
    pub tolerance: f64,
    pub max_outer_iters: usize,
    pub parallel_restarts: bool,
    /// Re-evaluate Q from scratch every [`AUDIT_INTERVAL`] accepted moves.
    pub audit: bool,
}

impl Default for DhnetConfig {
    fn default() -> Self {
        Self {
            kappa: 100,
            seed: 0,
            tolerance: 1e-10,
            max_outer_iters: 200,
            parallel_restarts: true,
            audit: false,
        }
    }
}

impl DhnetConfig {
    pub fn with_kappa(mut self, kappa: usize) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.kappa == 0 {
            return Err(OptimizerError::InvalidConfig("kappa must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(OptimizerError::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_outer_iters == 0 {
            return Err(OptimizerError::InvalidConfig("max_outer_iters must be at least 1".into()));
        }
        Ok(())
    }
}

pub const AUDIT_INTERVAL: usize = 1000;

/// Nodes of one type inside a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaNode {
    pub node_type: usize,
    /// Global node ids, ascending.
    pub nodes: Vec<u32>,
}

/// At most one meta-node per type, ordered by type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    pub meta_nodes: Vec<MetaNode>,
}

impl Unit {
    pub fn nodes(&self) -> impl Iterator<Item = u32> + '_ {
        self.meta_nodes.iter().flat_map(|m| m.nodes.iter().copied())
    }
}

/// The modularity network over units. Edge weights are summed observed
/// oracle weights between the units' node sets; null mass is carried by the
/// units' summed null vectors.
#[derive(Debug, Clone)]
pub struct UnitGraph<'o> {
    oracle: &'o ModularityOracle,
    units: Vec<Unit>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    self_weights: Vec<f64>,
    null: Vec<f64>,
}

impl<'o> UnitGraph<'o> {
    /// One unit per node.
    pub fn from_oracle(oracle: &'o ModularityOracle) -> Self {
        let n = oracle.num_nodes();
        let units = (0..n)
            .map(|i| Unit {
                meta_nodes: vec![MetaNode { node_type: oracle.node_type(i), nodes: vec![i as u32] }],
            })
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for i in 0..n {
            let (t, w) = oracle.neighbors(i);
            targets.extend_from_slice(t);
            weights.extend_from_slice(w);
            offsets.push(targets.len());
        }
        let width = oracle.null_width();
        let mut null = Vec::with_capacity(n * width);
        for i in 0..n {
            null.extend_from_slice(oracle.null_vector(i));
        }
        Self { oracle, units, offsets, targets, weights, self_weights: vec![0.0; n], null }
    }

    pub fn oracle(&self) -> &'o ModularityOracle {
        self.oracle
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn neighbors(&self, unit: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[unit]..self.offsets[unit + 1];
        (&self.targets[r.clone()], &self.weights[r])
    }

    pub fn self_weight(&self, unit: usize) -> f64 {
        self.self_weights[unit]
    }

    pub fn null_vector(&self, unit: usize) -> &[f64] {
        let w = self.oracle.null_width();
        &self.null[unit * w..(unit + 1) * w]
    }

    /// Q of the node assignment induced by `membership` (unit → community).
    pub fn modularity(&self, membership: &[u32]) -> f64 {
        let state = CommunityState::with_membership(self, membership.to_vec());
        state.modularity()
    }

    /// Original-node assignment induced by `membership`.
    pub fn node_assignment(&self, membership: &[u32]) -> Assignment {
        let mut labels = vec![0u32; self.oracle.num_nodes()];
        for (u, unit) in self.units.iter().enumerate() {
            for node in unit.nodes() {
                labels[node as usize] = membership[u];
            }
        }
        Assignment::from_labels(labels)
    }

    /// One unit per community; `membership` must use ids `0..k`.
    pub fn merge(&self, membership: &[u32]) -> UnitGraph<'o> {
        let k = membership.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let num_types = self.oracle.num_types();
        let width = self.oracle.null_width();

        let mut groups: Vec<Vec<u32>> = vec![Vec::new(); k];
        for (u, &c) in membership.iter().enumerate() {
            groups[c as usize].push(u as u32);
        }

        let mut units = Vec::with_capacity(k);
        let mut offsets = Vec::with_capacity(k + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        let mut self_weights = vec![0.0; k];
        let mut null = vec![0.0; k * width];
        let mut link = vec![0.0; k];
        let mut touched: Vec<u32> = Vec::new();
        offsets.push(0);

        for (c, members) in groups.iter().enumerate() {
            let mut by_type: Vec<Vec<u32>> = vec![Vec::new(); num_types];
            let acc = &mut null[c * width..(c + 1) * width];
            for &u in members {
                let u = u as usize;
                for meta in &self.units[u].meta_nodes {
                    by_type[meta.node_type].extend_from_slice(&meta.nodes);
                }
                self_weights[c] += self.self_weights[u];
                for (a, x) in acc.iter_mut().zip(self.null_vector(u)) {
                    *a += x;
                }
                let (t, w) = self.neighbors(u);
                for (&v, &wv) in t.iter().zip(w) {
                    let cv = membership[v as usize];
                    if cv as usize == c {
                        self_weights[c] += wv;
                    } else {
                        if link[cv as usize] == 0.0 {
                            touched.push(cv);
                        }
                        link[cv as usize] += wv;
                    }
                }
            }
            units.push(Unit {
                meta_nodes: by_type
                    .into_iter()
                    .enumerate()
                    .filter(|(_, nodes)| !nodes.is_empty())
                    .map(|(node_type, mut nodes)| {
                        nodes.sort_unstable();
                        MetaNode { node_type, nodes }
                    })
                    .collect(),
            });
            touched.sort_unstable();
            for &cv in &touched {
                targets.push(cv);
                weights.push(link[cv as usize]);
                link[cv as usize] = 0.0;
            }
            touched.clear();
            offsets.push(targets.len());
        }

        UnitGraph { oracle: self.oracle, units, offsets, targets, weights, self_weights, null }
    }
}

/// Community membership over a [`UnitGraph`] with per-community null-vector
/// accumulators, giving O(deg + width) move gains.
#[derive(Debug, Clone)]
pub struct CommunityState<'g, 'o> {
    graph: &'g UnitGraph<'o>,
    membership: Vec<u32>,
    totals: Vec<f64>,
    sizes: Vec<u32>,
    link: Vec<f64>,
    linked: Vec<bool>,
    touched: Vec<u32>,
    projected: Vec<f64>,
}

impl<'g, 'o> CommunityState<'g, 'o> {
    /// Every unit in its own community (community id = unit id).
    pub fn singletons(graph: &'g UnitGraph<'o>) -> Self {
        Self::with_membership(graph, (0..graph.num_units() as u32).collect())
    }

    /// Community ids must be below the unit count.
    pub fn with_membership(graph: &'g UnitGraph<'o>, membership: Vec<u32>) -> Self {
        let n = graph.num_units();
        assert_eq!(membership.len(), n);
        let width = graph.oracle.null_width();
        let mut totals = vec![0.0; n * width];
        let mut sizes = vec![0u32; n];
        for (u, &c) in membership.iter().enumerate() {
            let c = c as usize;
            assert!(c < n, "community id {c} out of range");
            sizes[c] += 1;
            for (a, x) in totals[c * width..(c + 1) * width].iter_mut().zip(graph.null_vector(u)) {
                *a += x;
            }
        }
        Self {
            graph,
            membership,
            totals,
            sizes,
            link: vec![0.0; n],
            linked: vec![false; n],
            touched: Vec::new(),
            projected: vec![0.0; width],
        }
    }

    pub fn graph(&self) -> &'g UnitGraph<'o> {
        self.graph
    }

    pub fn membership(&self) -> &[u32] {
        &self.membership
    }

    pub fn community_of(&self, unit: usize) -> usize {
        self.membership[unit] as usize
    }

    pub fn num_communities(&self) -> usize {
        self.sizes.iter().filter(|&&s| s > 0).count()
    }

    fn total(&self, c: usize) -> &[f64] {
        let w = self.graph.oracle.null_width();
        &self.totals[c * w..(c + 1) * w]
    }

    /// Q from scratch on the unit graph.
    pub fn modularity(&self) -> f64 {
        let g = self.graph;
        let mut observed = 0.0;
        for u in 0..g.num_units() {
            observed += g.self_weight(u);
            let c = self.membership[u];
            let (t, w) = g.neighbors(u);
            for (&v, &wv) in t.iter().zip(w) {
                if self.membership[v as usize] == c {
                    observed += wv;
                }
            }
        }
        let mut expected = 0.0;
        for c in 0..self.sizes.len() {
            if self.sizes[c] > 0 {
                let t = self.total(c);
                expected += g.oracle.null_pairing(t, t);
            }
        }
        (observed - expected) / g.oracle.normalizer()
    }

    /// Exact change in Q if `unit` moved to community `target`.
    pub fn delta_q(&self, unit: usize, target: usize) -> Result<f64, ModularityError> {
        let g = self.graph;
        if unit >= g.num_units() {
            return Err(ModularityError::UnknownUnit(unit));
        }
        if target >= self.sizes.len() || self.sizes[target] == 0 {
            return Err(ModularityError::UnknownCommunity(target));
        }
        let current = self.community_of(unit);
        if target == current {
            return Ok(0.0);
        }
        let (mut to_target, mut to_current) = (0.0, 0.0);
        let (t, w) = g.neighbors(unit);
        for (&v, &wv) in t.iter().zip(w) {
            let cv = self.community_of(v as usize);
            if cv == target {
                to_target += wv;
            } else if cv == current {
                to_current += wv;
            }
        }
        let oracle = g.oracle;
        let own = g.null_vector(unit);
        let null_target = oracle.null_pairing(own, self.total(target));
        let null_current = oracle.null_pairing(own, self.total(current)) - oracle.null_pairing(own, own);
        let gain = (to_target - null_target) - (to_current - null_current);
        Ok(2.0 * gain / oracle.normalizer())
    }

    /// Moves `unit` to `target`, which may be an empty community id.
    pub fn move_unit(&mut self, unit: usize, target: usize) {
        let width = self.graph.oracle.null_width();
        let current = self.community_of(unit);
        if current == target {
            return;
        }
        let own = self.graph.null_vector(unit);
        for (a, x) in self.totals[current * width..(current + 1) * width].iter_mut().zip(own) {
            *a -= x;
        }
        for (a, x) in self.totals[target * width..(target + 1) * width].iter_mut().zip(own) {
            *a += x;
        }
        self.sizes[current] -= 1;
        self.sizes[target] += 1;
        self.membership[unit] = target as u32;
    }

    /// Chooses the best destination for `unit` and moves it there. Returns
    /// the accepted ΔQ, or `None` when the unit stays.
    fn relocate(&mut self, unit: usize, priority: &[u32], tolerance: f64) -> Option<f64> {
        let g = self.graph;
        let oracle = g.oracle;
        let width = oracle.null_width();
        let current = self.community_of(unit);

        let (t, w) = g.neighbors(unit);
        for (&v, &wv) in t.iter().zip(w) {
            let cv = self.membership[v as usize];
            if !self.linked[cv as usize] {
                self.linked[cv as usize] = true;
                self.touched.push(cv);
            }
            self.link[cv as usize] += wv;
        }

        let own = g.null_vector(unit);
        oracle.project_null(own, &mut self.projected);
        for (a, x) in self.totals[current * width..(current + 1) * width].iter_mut().zip(own) {
            *a -= x;
        }

        let scale = 2.0 / oracle.normalizer();
        let gain_of = |c: usize, link: f64, totals: &[f64], projected: &[f64]| -> f64 {
            let tot = &totals[c * width..(c + 1) * width];
            let null: f64 = projected.iter().zip(tot).map(|(p, x)| p * x).sum();
            link - null
        };
        let stay = gain_of(current, self.link[current], &self.totals, &self.projected);

        let mut best = current;
        let mut best_dq = 0.0;
        for &c in &self.touched {
            let c = c as usize;
            if c == current {
                continue;
            }
            let dq = scale * (gain_of(c, self.link[c], &self.totals, &self.projected) - stay);
            if dq <= tolerance {
                continue;
            }
            let tie = (dq - best_dq).abs() <= TIE_EPSILON;
            if (dq > best_dq && !tie) || (tie && priority[c] < priority[best]) {
                best = c;
                best_dq = dq;
            }
        }

        for &c in &self.touched {
            self.link[c as usize] = 0.0;
            self.linked[c as usize] = false;
        }
        self.touched.clear();

        for (a, x) in self.totals[best * width..(best + 1) * width].iter_mut().zip(own) {
            *a += x;
        }
        if best == current {
            return None;
        }
        self.sizes[current] -= 1;
        self.sizes[best] += 1;
        self.membership[unit] = best as u32;
        Some(best_dq)
    }

    /// Membership relabeled to `0..k` in order of first appearance.
    pub fn compact_membership(&self) -> Vec<u32> {
        let mut map = vec![u32::MAX; self.sizes.len()];
        let mut next = 0;
        self.membership
            .iter()
            .map(|&c| {
                if map[c as usize] == u32::MAX {
                    map[c as usize] = next;
                    next += 1;
                }
                map[c as usize]
            })
            .collect()
    }
}

/// Gains closer than this are treated as equal and resolved by priority.
const TIE_EPSILON: f64 = 1e-13;

/// Free-function form of [`CommunityState::delta_q`].
pub fn delta_q(state: &CommunityState<'_, '_>, unit: usize, target: usize) -> Result<f64, ModularityError> {
    state.delta_q(unit, target)
}

/// Bookkeeping checks gathered while optimizing.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditStats {
    pub accepted_moves: usize,
    /// Accepted moves whose ΔQ was not strictly positive.
    pub nonpositive_moves: usize,
    pub min_accepted_gain: f64,
    pub checks: usize,
    /// Largest |running Q − recomputed Q| seen at checkpoints.
    pub max_drift: f64,
    /// |reported Q − Q of the final assignment evaluated on the oracle|.
    pub rescore_error: f64,
    /// Outer-iteration Q values were strictly increasing.
    pub trace_increasing: bool,
}

impl Default for AuditStats {
    fn default() -> Self {
        Self {
            accepted_moves: 0,
            nonpositive_moves: 0,
            min_accepted_gain: f64::INFINITY,
            checks: 0,
            max_drift: 0.0,
            rescore_error: 0.0,
            trace_increasing: true,
        }
    }
}

impl AuditStats {
    pub fn merge(&mut self, other: &AuditStats) {
        self.accepted_moves += other.accepted_moves;
        self.nonpositive_moves += other.nonpositive_moves;
        self.min_accepted_gain = self.min_accepted_gain.min(other.min_accepted_gain);
        self.checks += other.checks;
        self.max_drift = self.max_drift.max(other.max_drift);
        self.rescore_error = self.rescore_error.max(other.rescore_error);
        self.trace_increasing &= other.trace_increasing;
    }

    /// True when every recorded check is within `tol`.
    pub fn is_sound(&self, tol: f64) -> bool {
        self.nonpositive_moves == 0 && self.max_drift <= tol && self.rescore_error <= tol && self.trace_increasing
    }
}

/// Sweeps units in `order` until a full sweep moves nothing. Returns the
/// number of accepted moves.
pub fn local_move_pass(
    state: &mut CommunityState<'_, '_>,
    order: &[u32],
    priority: &[u32],
    tolerance: f64,
    mut audit: Option<(&mut AuditStats, &mut f64)>,
) -> usize {
    let mut total = 0;
    loop {
        let mut moved = 0;
        for &u in order {
            if let Some(dq) = state.relocate(u as usize, priority, tolerance) {
                moved += 1;
                if let Some((stats, running)) = audit.as_mut() {
                    **running += dq;
                    stats.accepted_moves += 1;
                    stats.min_accepted_gain = stats.min_accepted_gain.min(dq);
                    if dq <= 0.0 {
                        stats.nonpositive_moves += 1;
                    }
                    if stats.accepted_moves % AUDIT_INTERVAL == 0 {
                        stats.checks += 1;
                        let fresh = state.modularity();
                        stats.max_drift = stats.max_drift.max((fresh - **running).abs());
                    }
                }
            }
        }
        total += moved;
        if moved == 0 {
            return total;
        }
    }
}

#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub assignment: Assignment,
    pub modularity: f64,
    /// Q at the start of each outer iteration, then the final value.
    pub trace: Vec<f64>,
    pub moves: usize,
    pub audit: AuditStats,
}

/// One restart on `oracle`; a pure function of its arguments.
pub fn run_restart(
    oracle: &ModularityOracle,
    order_seed: u64,
    config: &DhnetConfig,
) -> Result<RestartOutcome, OptimizerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
    let mut graph = UnitGraph::from_oracle(oracle);
    let mut node_unit: Vec<u32> = (0..oracle.num_nodes() as u32).collect();
    let mut q_prev = CommunityState::singletons(&graph).modularity();
    let mut trace = vec![q_prev];
    let mut audit = AuditStats::default();
    let mut moves = 0;

    for _ in 0..config.max_outer_iters {
        let n_units = graph.num_units();
        let mut order: Vec<u32> = (0..n_units as u32).collect();
        order.shuffle(&mut rng);
        let mut priority: Vec<u32> = (0..n_units as u32).collect();
        priority.shuffle(&mut rng);

        let (q_new, compact) = {
            let mut state = CommunityState::singletons(&graph);
            let mut running = q_prev;
            let tracker = config.audit.then_some((&mut audit, &mut running));
            moves += local_move_pass(&mut state, &order, &priority, config.tolerance, tracker);
            let q_new = state.modularity();
            if config.audit {
                audit.max_drift = audit.max_drift.max((q_new - running).abs());
            }
            (q_new, state.compact_membership())
        };

        if q_new - q_prev <= config.tolerance {
            let assignment = Assignment::from_labels(node_unit.iter().copied());
            if config.audit {
                audit.rescore_error = (modularity(oracle, &assignment) - q_prev).abs();
                audit.trace_increasing = trace.windows(2).all(|w| w[1] > w[0]);
            }
            trace.push(q_prev);
            return Ok(RestartOutcome { assignment, modularity: q_prev, trace, moves, audit });
        }

        for u in node_unit.iter_mut() {
            *u = compact[*u as usize];
        }
        graph = graph.merge(&compact);
        q_prev = q_new;
        trace.push(q_new);
    }
    Err(OptimizerError::IterationCap(config.max_outer_iters))
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub assignment: Assignment,
    pub modularity: f64,
    pub restarts: usize,
    pub best_restart: usize,
    /// Merged over all restarts.
    pub audit: AuditStats,
}

impl Detection {
    pub fn num_communities(&self) -> usize {
        self.assignment.num_communities()
    }
}

pub fn restart_seed(root: u64, restart: usize) -> u64 {
    seeds::derive(root, &[seeds::tag("restart"), restart as u64])
}

/// Best of `config.kappa` restarts on a prebuilt oracle.
pub fn detect_with_oracle(oracle: &ModularityOracle, config: &DhnetConfig) -> Result<Detection, OptimizerError> {
    config.validate()?;
    if !oracle.has_edges() {
        return Err(OptimizerError::NoEdges);
    }
    let run = |r: usize| run_restart(oracle, restart_seed(config.seed, r), config);
    let outcomes: Vec<RestartOutcome> = if config.parallel_restarts {
        (0..config.kappa).into_par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        (0..config.kappa).map(run).collect::<Result<_, _>>()?
    };

    let mut audit = AuditStats::default();
    let mut best = 0;
    for (r, o) in outcomes.iter().enumerate() {
        audit.merge(&o.audit);
        let b = &outcomes[best];
        if o.modularity > b.modularity
            || (o.modularity == b.modularity && o.assignment.labels() < b.assignment.labels())
        {
            best = r;
        }
    }
    let winner = outcomes.into_iter().nth(best).expect("kappa >= 1");
    Ok(Detection {
        assignment: winner.assignment,
        modularity: winner.modularity,
        restarts: config.kappa,
        best_restart: best,
        audit,
    })
}

/// Builds the oracle for `net` and runs [`detect_with_oracle`].
pub fn dhnet_detect(net: &DynHetNet, config: &DhnetConfig) -> Result<Detection, OptimizerError> {
    let oracle = build_oracle(net);
    detect_with_oracle(&oracle, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetnet::parse_network;

    fn oracle(text: &str) -> ModularityOracle {
        build_oracle(&parse_network(text).unwrap())
    }

    #[test]
    fn two_node_merge() {
        let o = oracle("L=1 sizes=2 S=1\n1 0:0 0:1\n");
        let graph = UnitGraph::from_oracle(&o);
        let mut state = CommunityState::singletons(&graph);
        assert!((state.modularity() + 0.5).abs() < 1e-15);
        assert!((state.delta_q(1, 0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(state.delta_q(1, 1).unwrap(), 0.0);
        assert_eq!(state.delta_q(2, 0), Err(ModularityError::UnknownUnit(2)));
        let moves = local_move_pass(&mut state, &[0, 1], &[0, 1], 1e-10, None);
        assert_eq!(moves, 1);
        assert_eq!(state.num_communities(), 1);
        assert!(state.modularity().abs() < 1e-15);
        assert_eq!(local_move_pass(&mut state, &[0, 1], &[0, 1], 1e-10, None), 0);
    }

    #[test]
    fn unknown_community_is_rejected() {
        let o = oracle("L=1 sizes=3 S=1\n1 0:0 0:1\n1 0:1 0:2\n");
        let graph = UnitGraph::from_oracle(&o);
        let mut state = CommunityState::singletons(&graph);
        state.move_unit(1, 0);
        assert_eq!(state.delta_q(2, 1), Err(ModularityError::UnknownCommunity(1)));
        assert_eq!(state.delta_q(2, 7), Err(ModularityError::UnknownCommunity(7)));
    }

    #[test]
    fn isolated_node_never_moves() {
        let o = oracle("L=1 sizes=4 S=1\n1 0:0 0:1\n1 0:1 0:2\n1 0:0 0:2\n");
        let graph = UnitGraph::from_oracle(&o);
        let mut state = CommunityState::singletons(&graph);
        local_move_pass(&mut state, &[3, 2, 1, 0], &[0, 1, 2, 3], 1e-10, None);
        assert_eq!(state.community_of(3), 3);
        assert_eq!(state.graph().neighbors(3).0.len(), 0);
    }

    #[test]
    fn merge_preserves_modularity_and_meta_nodes() {
        let o = oracle(
            "L=2 sizes=4,2 S=2\n1 0:0 0:1\n1 0:0 1:0\n1 0:1 1:0\n1 0:2 0:3\n2 0:2 1:1\n2 0:3 1:1\n2 0:1 0:2\n",
        );
        let graph = UnitGraph::from_oracle(&o);
        let membership = vec![0, 0, 1, 1, 0, 1];
        let q = graph.modularity(&membership);
        let merged = graph.merge(&membership);
        assert_eq!(merged.num_units(), 2);
        assert!((merged.modularity(&[0, 1]) - q).abs() < 1e-12);
        assert!((modularity(&o, &graph.node_assignment(&membership)) - q).abs() < 1e-12);
        let u0 = &merged.units()[0];
        assert_eq!(u0.meta_nodes.len(), 2);
        assert_eq!(u0.meta_nodes[0], MetaNode { node_type: 0, nodes: vec![0, 1] });
        assert_eq!(u0.meta_nodes[1], MetaNode { node_type: 1, nodes: vec![4] });

        let single = graph.merge(&[0; 6]);
        assert_eq!(single.num_units(), 1);
        assert!(single.units()[0].meta_nodes.len() <= 2);
        assert!(single.modularity(&[0]).abs() < 1e-12);
    }

    #[test]
    fn empty_network_is_an_error() {
        let net = parse_network("L=2 sizes=2,2 S=2\n").unwrap();
        assert_eq!(dhnet_detect(&net, &DhnetConfig::default()).unwrap_err(), OptimizerError::NoEdges);
        let bad = DhnetConfig { kappa: 0, ..DhnetConfig::default() };
        let net = parse_network("L=1 sizes=2 S=1\n1 0:0 0:1\n").unwrap();
        assert!(matches!(dhnet_detect(&net, &bad), Err(OptimizerError::InvalidConfig(_))));
    }

    #[test]
    fn complete_graph_is_one_community() {
        let net = parse_network("L=1 sizes=4 S=1\n1 0:0 0:1\n1 0:0 0:2\n1 0:0 0:3\n1 0:1 0:2\n1 0:1 0:3\n1 0:2 0:3\n")
            .unwrap();
        let d = dhnet_detect(&net, &DhnetConfig::default().with_kappa(10)).unwrap();
        assert_eq!(d.num_communities(), 1);
        assert!(d.modularity.abs() < 1e-12);
    }

    #[test]
    fn restarts_are_deterministic() {
        let net = parse_network(
            "L=1 sizes=6 S=2\n1 0:0 0:1\n1 0:1 0:2\n1 0:0 0:2\n1 0:3 0:4\n1 0:4 0:5\n2 0:3 0:5\n2 0:2 0:3\n",
        )
        .unwrap();
        let o = build_oracle(&net);
        let cfg = DhnetConfig { audit: true, ..DhnetConfig::default() };
        let a = run_restart(&o, 11, &cfg).unwrap();
        let b = run_restart(&o, 11, &cfg).unwrap();
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.modularity.to_bits(), b.modularity.to_bits());
        assert!(a.audit.is_sound(1e-8));
        let serial = DhnetConfig { parallel_restarts: false, kappa: 8, ..cfg.clone() };
        let parallel = DhnetConfig { parallel_restarts: true, kappa: 8, ..cfg };
        let (x, y) = (detect_with_oracle(&o, &serial).unwrap(), detect_with_oracle(&o, &parallel).unwrap());
        assert_eq!(x.assignment, y.assignment);
        assert_eq!(x.best_restart, y.best_restart);
    }
}
