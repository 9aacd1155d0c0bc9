//! Independent reference implementations used by integration tests and the
//! acceptance runner. Everything here works on dense matrices straight from
//! the modularity definition and shares no code with the library's oracle.
#![allow(dead_code)]

use dhnet_core::hetnet::{DynHetNet, NetBuilder, TypeLayout};
use rand::Rng;

/// Dense `n × n` integrated modularity matrix, already divided by `L²`.
pub fn dense_matrix(net: &DynHetNet) -> Vec<Vec<f64>> {
    let layout = net.layout();
    let n = layout.num_nodes();
    let l = layout.num_types();
    let mut out = vec![vec![0.0; n]; n];
    for l1 in 0..l {
        for l2 in 0..l {
            let (n1, n2) = (layout.size(l1), layout.size(l2));
            let mut total = vec![vec![0.0; n2]; n1];
            let mut mass = 0.0;
            for snap in net.snapshots() {
                let a: Vec<Vec<f64>> = (0..n1)
                    .map(|i| (0..n2).map(|j| if snap.contains(l1, i, l2, j) { 1.0 } else { 0.0 }).collect())
                    .collect();
                let m: f64 = a.iter().flatten().sum();
                if m == 0.0 {
                    continue;
                }
                mass += m;
                let rows: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
                let cols: Vec<f64> = (0..n2).map(|j| (0..n1).map(|i| a[i][j]).sum()).collect();
                for i in 0..n1 {
                    for j in 0..n2 {
                        total[i][j] += a[i][j] - rows[i] * cols[j] / m;
                    }
                }
            }
            if mass == 0.0 {
                continue;
            }
            for i in 0..n1 {
                for j in 0..n2 {
                    out[layout.global(l1, i)][layout.global(l2, j)] = total[i][j] / mass / (l * l) as f64;
                }
            }
        }
    }
    out
}

pub fn dense_q(matrix: &[Vec<f64>], labels: &[u32]) -> f64 {
    let mut q = 0.0;
    for (i, row) in matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if labels[i] == labels[j] {
                q += v;
            }
        }
    }
    q
}

/// Calls `f` with every set partition of `0..n` as a restricted growth string.
pub fn for_each_partition(n: usize, mut f: impl FnMut(&[u32])) {
    fn rec(pos: usize, max: u32, labels: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if pos == labels.len() {
            f(labels);
            return;
        }
        for c in 0..=max + 1 {
            labels[pos] = c;
            rec(pos + 1, max.max(c), labels, f);
        }
    }
    if n == 0 {
        f(&[]);
        return;
    }
    let mut labels = vec![0u32; n];
    rec(1, 0, &mut labels, &mut f);
}

/// Largest Q over all set partitions and one partition attaining it.
pub fn exhaustive_max(net: &DynHetNet) -> (f64, Vec<u32>) {
    let m = dense_matrix(net);
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for_each_partition(net.num_nodes(), |labels| {
        let q = dense_q(&m, labels);
        if q > best.0 {
            best = (q, labels.to_vec());
        }
    });
    best
}

/// Random network: each potential edge present with probability `p` in
/// every snapshot independently.
pub fn random_net<R: Rng>(rng: &mut R, sizes: Vec<usize>, snapshots: usize, p: f64) -> DynHetNet {
    let layout = TypeLayout::new(sizes).unwrap();
    let l = layout.num_types();
    let mut b = NetBuilder::new(layout.clone(), snapshots).unwrap();
    for s in 1..=snapshots {
        for l1 in 0..l {
            for l2 in l1..l {
                for i in 0..layout.size(l1) {
                    let start = if l1 == l2 { i + 1 } else { 0 };
                    for j in start..layout.size(l2) {
                        if rng.random::<f64>() < p {
                            b.add_edge(s, l1, i, l2, j).unwrap();
                        }
                    }
                }
            }
        }
    }
    b.build()
}

/// Random sizes summing to at most `max_nodes`, with `types` entries ≥ 1.
pub fn random_sizes<R: Rng>(rng: &mut R, types: usize, max_nodes: usize) -> Vec<usize> {
    let per = (max_nodes / types).max(1);
    (0..types).map(|_| rng.random_range(1..=per)).collect()
}

/// Two node types: six of the first (0..6) and three of the second
/// (0..3). Communities are {0,1 | 0}, {2,3 | 1}, {4,5 | 2}, with one weak
/// link between neighboring communities in the first type.
pub fn toy_net() -> DynHetNet {
    let mut b = NetBuilder::new(TypeLayout::new(vec![6, 3]).unwrap(), 2).unwrap();
    for s in 1..=2 {
        for (i, j) in [(0, 1), (2, 3), (4, 5)] {
            b.add_edge(s, 0, i, 0, j).unwrap();
        }
        for (i, j) in [(0, 0), (1, 0), (2, 1), (3, 1), (4, 2), (5, 2)] {
            b.add_edge(s, 0, i, 1, j).unwrap();
        }
    }
    b.add_edge(1, 0, 1, 0, 2).unwrap();
    b.add_edge(2, 0, 3, 0, 4).unwrap();
    b.build()
}

/// Planted labels of [`toy_net`] in global order.
pub const TOY_LABELS: [u32; 9] = [0, 0, 1, 1, 2, 2, 0, 1, 2];
