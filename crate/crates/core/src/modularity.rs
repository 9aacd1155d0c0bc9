//! The heterogeneous Chung-Lu null model and the integrated modularity
//! matrix, kept implicit as a sparse observed part plus one rank-1 null
//! correction per active block and snapshot.

use thiserror::Error;

use crate::assignment::Assignment;
use crate::hetnet::{compute_degrees, DegreeTensor, DynHetNet, TypeLayout};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModularityError {
    #[error("empty block")]
    EmptyBlock,
    #[error("unknown unit {0}")]
    UnknownUnit(usize),
    #[error("unknown community {0}")]
    UnknownCommunity(usize),
}

/// Expected edge count `d_i d_j / m` between two nodes under the null.
/// The value is an expectation and can exceed 1.
pub fn null_expectation(d_i: f64, d_j: f64, m: f64) -> Result<f64, ModularityError> {
    if m <= 0.0 {
        return Err(ModularityError::EmptyBlock);
    }
    Ok(d_i * d_j / m)
}

/// An ordered block `(l1, l2)` with at least one edge over all snapshots.
#[derive(Debug, Clone)]
pub struct ActiveBlock {
    pub l1: usize,
    pub l2: usize,
    /// Index of `(l2, l1)` in the active block list.
    pub transpose: usize,
    pub aggregate_edges: u64,
}

/// Implicit integrated modularity matrix of a dynamic heterogeneous network.
///
/// For nodes `i` of type `l1` and `j` of type `l2`
///
/// ```text
/// M_ij = Σ_s [A_ij(t_s) − d_i(t_s) d_j(t_s) / m(t_s)] / m̄
/// ```
///
/// with all quantities taken on block `(l1, l2)`. The observed part is a
/// weighted adjacency summed over snapshots; the null part is stored as
/// per-node degree vectors ("null vectors") of width `active blocks × S`
/// together with the scalars `1 / (m(t_s) m̄)`.
#[derive(Debug, Clone)]
pub struct ModularityOracle {
    layout: TypeLayout,
    node_types: Vec<u32>,
    num_snapshots: usize,
    blocks: Vec<ActiveBlock>,
    slots: Vec<Option<usize>>,
    /// `[b * S + s]`, zero when `m(t_s) = 0`.
    coefficients: Vec<f64>,
    adj_offsets: Vec<usize>,
    adj_targets: Vec<u32>,
    adj_weights: Vec<f64>,
    null_vectors: Vec<f64>,
    width: usize,
    degrees: DegreeTensor,
}

impl ModularityOracle {
    pub fn new(net: &DynHetNet) -> Self {
        let layout = net.layout().clone();
        let num_types = layout.num_types();
        let num_snapshots = net.num_snapshots();
        let degrees = compute_degrees(net);

        let mut slots = vec![None; num_types * num_types];
        let mut blocks = Vec::new();
        for l1 in 0..num_types {
            for l2 in 0..num_types {
                let agg = degrees.aggregate_edges(l1, l2);
                if agg > 0 {
                    slots[l1 * num_types + l2] = Some(blocks.len());
                    blocks.push(ActiveBlock { l1, l2, transpose: 0, aggregate_edges: agg });
                }
            }
        }
        for block in &mut blocks {
            block.transpose = slots[block.l2 * num_types + block.l1].expect("aggregate edges are symmetric");
        }

        let width = blocks.len() * num_snapshots;
        let mut coefficients = vec![0.0; width];
        for (b, block) in blocks.iter().enumerate() {
            let agg = block.aggregate_edges as f64;
            for s in 0..num_snapshots {
                let m = degrees.edges(block.l1, block.l2, s);
                if m > 0 {
                    coefficients[b * num_snapshots + s] = 1.0 / (m as f64 * agg);
                }
            }
        }

        let n = layout.num_nodes();
        let mut null_vectors = vec![0.0; n * width];
        for (b, block) in blocks.iter().enumerate() {
            let offset = layout.offset(block.l1);
            for s in 0..num_snapshots {
                for (i, &d) in degrees.degrees(block.l1, block.l2, s).iter().enumerate() {
                    null_vectors[(offset + i) * width + b * num_snapshots + s] = d as f64;
                }
            }
        }

        let (adj_offsets, adj_targets, adj_weights) = build_adjacency(net, &layout, &slots, &blocks);
        let node_types = layout.node_types().into_iter().map(|t| t as u32).collect();

        Self {
            layout,
            node_types,
            num_snapshots,
            blocks,
            slots,
            coefficients,
            adj_offsets,
            adj_targets,
            adj_weights,
            null_vectors,
            width,
            degrees,
        }
    }

    pub fn layout(&self) -> &TypeLayout {
        &self.layout
    }

    pub fn num_nodes(&self) -> usize {
        self.layout.num_nodes()
    }

    pub fn num_types(&self) -> usize {
        self.layout.num_types()
    }

    pub fn num_snapshots(&self) -> usize {
        self.num_snapshots
    }

    pub fn node_type(&self, node: usize) -> usize {
        self.node_types[node] as usize
    }

    pub fn degrees(&self) -> &DegreeTensor {
        &self.degrees
    }

    pub fn active_blocks(&self) -> &[ActiveBlock] {
        &self.blocks
    }

    pub fn is_active(&self, l1: usize, l2: usize) -> bool {
        self.slots[l1 * self.num_types() + l2].is_some()
    }

    pub fn has_edges(&self) -> bool {
        !self.blocks.is_empty()
    }

    /// `L²`, applied once when evaluating Q.
    pub fn normalizer(&self) -> f64 {
        let l = self.num_types() as f64;
        l * l
    }

    /// Length of each null vector.
    pub fn null_width(&self) -> usize {
        self.width
    }

    pub fn null_vector(&self, node: usize) -> &[f64] {
        &self.null_vectors[node * self.width..(node + 1) * self.width]
    }

    /// Observed neighbors of `node` and their weights `Σ_s A_ij(t_s) / m̄`.
    pub fn neighbors(&self, node: usize) -> (&[u32], &[f64]) {
        let range = self.adj_offsets[node]..self.adj_offsets[node + 1];
        (&self.adj_targets[range.clone()], &self.adj_weights[range])
    }

    /// Writes `out` such that `dot(out, y) == self.null_pairing(x, y)`.
    pub fn project_null(&self, x: &[f64], out: &mut [f64]) {
        let s_count = self.num_snapshots;
        for (b, block) in self.blocks.iter().enumerate() {
            let src = b * s_count;
            let dst = block.transpose * s_count;
            for s in 0..s_count {
                out[dst + s] = self.coefficients[src + s] * x[src + s];
            }
        }
    }

    /// `Σ_b Σ_s c_b(t_s) x[b][s] y[bᵀ][s]`: the null mass between two node
    /// sets whose summed null vectors are `x` and `y`.
    pub fn null_pairing(&self, x: &[f64], y: &[f64]) -> f64 {
        let s_count = self.num_snapshots;
        let mut acc = 0.0;
        for (b, block) in self.blocks.iter().enumerate() {
            let src = b * s_count;
            let dst = block.transpose * s_count;
            for s in 0..s_count {
                acc += self.coefficients[src + s] * x[src + s] * y[dst + s];
            }
        }
        acc
    }

    /// Entry `M_ij` of the integrated modularity matrix, global indices.
    pub fn eval(&self, i: usize, j: usize) -> f64 {
        if self.slots[self.node_type(i) * self.num_types() + self.node_type(j)].is_none() {
            return 0.0;
        }
        let (targets, weights) = self.neighbors(i);
        let observed = match targets.binary_search(&(j as u32)) {
            Ok(pos) => weights[pos],
            Err(_) => 0.0,
        };
        observed - self.null_pairing(self.null_vector(i), self.null_vector(j))
    }
}

fn build_adjacency(
    net: &DynHetNet,
    layout: &TypeLayout,
    slots: &[Option<usize>],
    blocks: &[ActiveBlock],
) -> (Vec<usize>, Vec<u32>, Vec<f64>) {
    let n = layout.num_nodes();
    let num_types = layout.num_types();
    let mut counts = vec![0usize; n + 1];
    for snap in net.snapshots() {
        for ((l1, l2), coords) in snap.blocks() {
            for &(i, j) in coords {
                counts[layout.global(l1, i as usize) + 1] += 1;
                counts[layout.global(l2, j as usize) + 1] += 1;
            }
        }
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let mut cursor = counts.clone();
    let mut raw: Vec<(u32, f64)> = vec![(0, 0.0); counts[n]];
    for snap in net.snapshots() {
        for ((l1, l2), coords) in snap.blocks() {
            let b = slots[l1 * num_types + l2].expect("block with edges is active");
            let w = 1.0 / blocks[b].aggregate_edges as f64;
            for &(i, j) in coords {
                let gi = layout.global(l1, i as usize);
                let gj = layout.global(l2, j as usize);
                raw[cursor[gi]] = (gj as u32, w);
                cursor[gi] += 1;
                raw[cursor[gj]] = (gi as u32, w);
                cursor[gj] += 1;
            }
        }
    }

    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    offsets.push(0);
    for i in 0..n {
        let row = &mut raw[counts[i]..counts[i + 1]];
        row.sort_unstable_by_key(|&(t, _)| t);
        let mut last = u32::MAX;
        for &(t, w) in row.iter() {
            if t == last {
                *weights.last_mut().expect("row started") += w;
            } else {
                targets.push(t);
                weights.push(w);
                last = t;
            }
        }
        offsets.push(targets.len());
    }
    (offsets, targets, weights)
}

pub fn build_oracle(net: &DynHetNet) -> ModularityOracle {
    ModularityOracle::new(net)
}

/// `Q = (1/L²) Σ_{l1,l2} Σ_{i,j} M_ij 1(e_i = e_j)` over active blocks,
/// diagonal terms included.
pub fn modularity(oracle: &ModularityOracle, assignment: &Assignment) -> f64 {
    assert_eq!(
        assignment.len(),
        oracle.num_nodes(),
        "assignment length must equal the node count"
    );
    let width = oracle.null_width();
    let k = assignment.num_communities();
    let mut totals = vec![0.0; k * width];
    let mut observed = 0.0;
    for node in 0..oracle.num_nodes() {
        let c = assignment.label(node);
        let (targets, weights) = oracle.neighbors(node);
        for (&t, &w) in targets.iter().zip(weights) {
            if assignment.label(t as usize) == c {
                observed += w;
            }
        }
        let acc = &mut totals[c * width..(c + 1) * width];
        for (a, x) in acc.iter_mut().zip(oracle.null_vector(node)) {
            *a += x;
        }
    }
    let expected: f64 = totals
        .chunks_exact(width.max(1))
        .take(if width == 0 { 0 } else { k })
        .map(|t| oracle.null_pairing(t, t))
        .sum();
    (observed - expected) / oracle.normalizer()
}

pub use crate::optimizer::delta_q;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetnet::parse_network;

    fn one_edge() -> ModularityOracle {
        build_oracle(&parse_network("L=1 sizes=2 S=1\n1 0:0 0:1\n").unwrap())
    }

    #[test]
    fn null_expectation_values() {
        assert_eq!(null_expectation(2.0, 3.0, 6.0).unwrap(), 1.0);
        assert_eq!(null_expectation(0.0, 5.0, 7.0).unwrap(), 0.0);
        assert_eq!(null_expectation(1.0, 1.0, 2.0).unwrap(), 0.5);
        assert_eq!(null_expectation(1.0, 1.0, 0.0), Err(ModularityError::EmptyBlock));
    }

    #[test]
    fn single_edge_matrix() {
        let o = one_edge();
        let expected = [[-0.25, 0.25], [0.25, -0.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((o.eval(i, j) - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_edge_modularity() {
        let o = one_edge();
        assert!((modularity(&o, &Assignment::from_labels([0u32, 1])) + 0.5).abs() < 1e-15);
        assert!(modularity(&o, &Assignment::from_labels([0u32, 0])).abs() < 1e-15);
    }

    #[test]
    fn inactive_blocks_evaluate_to_zero() {
        // only the cross block carries edges
        let net = parse_network("L=2 sizes=2,2 S=2\n1 0:0 1:0\n2 0:1 1:1\n").unwrap();
        let o = build_oracle(&net);
        assert!(!o.is_active(0, 0));
        assert!(!o.is_active(1, 1));
        assert!(o.is_active(0, 1) && o.is_active(1, 0));
        assert_eq!(o.eval(0, 1), 0.0);
        assert_eq!(o.eval(2, 3), 0.0);
        assert!(modularity(&o, &Assignment::single(4)).abs() < 1e-15);
    }

    #[test]
    fn empty_snapshot_contributes_nothing() {
        let a = parse_network("L=1 sizes=3 S=1\n1 0:0 0:1\n").unwrap();
        let b = parse_network("L=1 sizes=3 S=2\n1 0:0 0:1\n").unwrap();
        let (oa, ob) = (build_oracle(&a), build_oracle(&b));
        for i in 0..3 {
            for j in 0..3 {
                assert!((oa.eval(i, j) - ob.eval(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn block_sums_vanish() {
        let net = parse_network(
            "L=2 sizes=3,2 S=2\n1 0:0 0:1\n1 0:1 1:0\n1 1:0 1:1\n2 0:2 1:1\n2 0:0 0:2\n",
        )
        .unwrap();
        let o = build_oracle(&net);
        let layout = o.layout().clone();
        for block in o.active_blocks() {
            let mut sum = 0.0;
            for i in 0..layout.size(block.l1) {
                for j in 0..layout.size(block.l2) {
                    sum += o.eval(layout.global(block.l1, i), layout.global(block.l2, j));
                }
            }
            assert!(sum.abs() < 1e-12, "block {:?} sums to {sum}", (block.l1, block.l2));
        }
    }
}
