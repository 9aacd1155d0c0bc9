//! Dynamic heterogeneous networks: typed node layouts, sparse binary
//! snapshots, degree tabulation, the text exchange format and the
//! structural transforms used by the baseline pipelines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("type index {ty} out of range (L={num_types})")]
    TypeOutOfRange { ty: usize, num_types: usize },
    #[error("node index {index} out of range for type {ty} (size {size})")]
    NodeOutOfRange { ty: usize, index: usize, size: usize },
    #[error("snapshot index {s} out of range (S={snapshots})")]
    SnapshotOutOfRange { s: usize, snapshots: usize },
    #[error("self-loop forbidden: type {ty} node {index}")]
    SelfLoop { ty: usize, index: usize },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: malformed edge: {msg}")]
    MalformedEdge { line: usize, msg: String },
    #[error("line {line}: snapshot {s} out of order (previous {previous})")]
    SnapshotOrder { line: usize, s: usize, previous: usize },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<NetError>,
    },
    #[error("layout mismatch between snapshots")]
    LayoutMismatch,
}

pub type Result<T> = std::result::Result<T, NetError>;

/// Node types and the mapping between global and per-type indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeLayout {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    n: usize,
}

impl TypeLayout {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(NetError::InvalidLayout("at least one node type required".into()));
        }
        if let Some(l) = sizes.iter().position(|&s| s == 0) {
            return Err(NetError::InvalidLayout(format!("type {l} has no nodes")));
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0usize;
        for &s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        if acc > u32::MAX as usize {
            return Err(NetError::InvalidLayout("too many nodes".into()));
        }
        Ok(Self { sizes, offsets, n: acc })
    }

    pub fn num_types(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, ty: usize) -> usize {
        self.sizes[ty]
    }

    pub fn offset(&self, ty: usize) -> usize {
        self.offsets[ty]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn global(&self, ty: usize, index: usize) -> usize {
        debug_assert!(index < self.sizes[ty]);
        self.offsets[ty] + index
    }

    /// Inverse of [`TypeLayout::global`].
    pub fn local(&self, global: usize) -> (usize, usize) {
        debug_assert!(global < self.n);
        let ty = self.offsets.partition_point(|&o| o <= global) - 1;
        (ty, global - self.offsets[ty])
    }

    pub fn type_of(&self, global: usize) -> usize {
        self.local(global).0
    }

    /// Type of every global node, in global order.
    pub fn node_types(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        for (ty, &s) in self.sizes.iter().enumerate() {
            out.extend(std::iter::repeat_n(ty, s));
        }
        out
    }

    pub fn check(&self, ty: usize, index: usize) -> Result<()> {
        if ty >= self.num_types() {
            return Err(NetError::TypeOutOfRange { ty, num_types: self.num_types() });
        }
        if index >= self.sizes[ty] {
            return Err(NetError::NodeOutOfRange { ty, index, size: self.sizes[ty] });
        }
        Ok(())
    }
}

/// One observation of the network. Blocks are keyed by `(l1, l2)` with
/// `l1 <= l2`; the opposite orientation is a transposed view. Same-type
/// blocks store each undirected edge once as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    time_index: usize,
    blocks: BTreeMap<(usize, usize), Vec<(u32, u32)>>,
}

impl Snapshot {
    /// 1-based position of this snapshot in its network.
    pub fn time_index(&self) -> usize {
        self.time_index
    }

    /// Stored coordinates of block `(l1, l2)`, `l1 <= l2`, in canonical order.
    pub fn stored(&self, l1: usize, l2: usize) -> &[(u32, u32)] {
        debug_assert!(l1 <= l2);
        self.blocks.get(&(l1, l2)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every nonzero entry `(i, j)` of `A^{[l1 l2]}`, both orientations for
    /// same-type blocks.
    pub fn entries(&self, l1: usize, l2: usize) -> Vec<(usize, usize)> {
        let lo = l1.min(l2);
        let hi = l1.max(l2);
        let stored = self.stored(lo, hi);
        let mut out = Vec::with_capacity(if l1 == l2 { 2 * stored.len() } else { stored.len() });
        for &(i, j) in stored {
            let (i, j) = (i as usize, j as usize);
            if l1 == l2 {
                out.push((i, j));
                out.push((j, i));
            } else if l1 < l2 {
                out.push((i, j));
            } else {
                out.push((j, i));
            }
        }
        out
    }

    pub fn contains(&self, l1: usize, i: usize, l2: usize, j: usize) -> bool {
        let key = normalize(l1, i, l2, j);
        self.stored(key.0, key.2)
            .binary_search(&(key.1 as u32, key.3 as u32))
            .is_ok()
    }

    /// Non-empty stored blocks as `((l1, l2), coordinates)`.
    pub fn blocks(&self) -> impl Iterator<Item = ((usize, usize), &[(u32, u32)])> {
        self.blocks
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(&k, v)| (k, v.as_slice()))
    }

    /// Number of undirected edges across all blocks.
    pub fn edge_count(&self) -> usize {
        self.blocks.values().map(Vec::len).sum()
    }
}

fn normalize(l1: usize, i: usize, l2: usize, j: usize) -> (usize, usize, usize, usize) {
    if l1 < l2 || (l1 == l2 && i < j) {
        (l1, i, l2, j)
    } else {
        (l2, j, l1, i)
    }
}

/// A sequence of snapshots over one shared [`TypeLayout`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynHetNet {
    layout: TypeLayout,
    snapshots: Vec<Snapshot>,
}

impl DynHetNet {
    pub fn layout(&self) -> &TypeLayout {
        &self.layout
    }

    pub fn num_types(&self) -> usize {
        self.layout.num_types()
    }

    pub fn num_nodes(&self) -> usize {
        self.layout.num_nodes()
    }

    pub fn num_snapshots(&self) -> usize {
        self.snapshots.len()
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// Snapshot by 1-based time index.
    pub fn snapshot(&self, s: usize) -> Result<&Snapshot> {
        if s == 0 || s > self.snapshots.len() {
            return Err(NetError::SnapshotOutOfRange { s, snapshots: self.snapshots.len() });
        }
        Ok(&self.snapshots[s - 1])
    }

    pub fn edge_count(&self) -> usize {
        self.snapshots.iter().map(Snapshot::edge_count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_count() == 0
    }
}

type BlockEdges = BTreeMap<(usize, usize), Vec<(u32, u32)>>;

/// Incremental construction; duplicates are dropped at [`NetBuilder::build`].
#[derive(Debug, Clone)]
pub struct NetBuilder {
    layout: TypeLayout,
    snapshots: Vec<BlockEdges>,
}

impl NetBuilder {
    pub fn new(layout: TypeLayout, snapshots: usize) -> Result<Self> {
        if snapshots == 0 {
            return Err(NetError::InvalidLayout("at least one snapshot required".into()));
        }
        Ok(Self { layout, snapshots: vec![BTreeMap::new(); snapshots] })
    }

    pub fn layout(&self) -> &TypeLayout {
        &self.layout
    }

    /// Adds edge `(l1:i) - (l2:j)` to snapshot `s` (1-based).
    pub fn add_edge(&mut self, s: usize, l1: usize, i: usize, l2: usize, j: usize) -> Result<()> {
        if s == 0 || s > self.snapshots.len() {
            return Err(NetError::SnapshotOutOfRange { s, snapshots: self.snapshots.len() });
        }
        self.layout.check(l1, i)?;
        self.layout.check(l2, j)?;
        if l1 == l2 && i == j {
            return Err(NetError::SelfLoop { ty: l1, index: i });
        }
        let (a, i, b, j) = normalize(l1, i, l2, j);
        self.snapshots[s - 1]
            .entry((a, b))
            .or_default()
            .push((i as u32, j as u32));
        Ok(())
    }

    /// Appends a whole block of pre-validated, canonically oriented
    /// coordinates (`l1 <= l2`, and `i < j` when `l1 == l2`).
    pub(crate) fn extend_block(&mut self, s: usize, l1: usize, l2: usize, coords: Vec<(u32, u32)>) {
        debug_assert!(l1 <= l2);
        let entry = self.snapshots[s - 1].entry((l1, l2)).or_default();
        if entry.is_empty() {
            *entry = coords;
        } else {
            entry.extend(coords);
        }
    }

    pub fn build(self) -> DynHetNet {
        let snapshots = self
            .snapshots
            .into_iter()
            .enumerate()
            .map(|(idx, mut blocks)| {
                blocks.retain(|_, v| {
                    v.sort_unstable();
                    v.dedup();
                    !v.is_empty()
                });
                Snapshot { time_index: idx + 1, blocks }
            })
            .collect();
        DynHetNet { layout: self.layout, snapshots }
    }
}

/// Degree vectors `d^{[l1 l2]}(t_s)` and edge totals for every ordered
/// block pair and snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeTensor {
    num_types: usize,
    num_snapshots: usize,
    blocks: Vec<BlockDegrees>,
}

#[derive(Debug, Clone, PartialEq)]
struct BlockDegrees {
    /// `[s][i]`, length `n_{l1}` per snapshot.
    degrees: Vec<Vec<u32>>,
    totals: Vec<u64>,
    aggregate: u64,
}

impl DegreeTensor {
    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn num_snapshots(&self) -> usize {
        self.num_snapshots
    }

    fn block(&self, l1: usize, l2: usize) -> &BlockDegrees {
        &self.blocks[l1 * self.num_types + l2]
    }

    /// Degrees of type-`l1` nodes toward type `l2` at snapshot `s` (0-based).
    pub fn degrees(&self, l1: usize, l2: usize, s: usize) -> &[u32] {
        &self.block(l1, l2).degrees[s]
    }

    /// `m^{[l1 l2]}(t_s) = Σ_{i,j} A_ij`, both orientations for same-type blocks.
    pub fn edges(&self, l1: usize, l2: usize, s: usize) -> u64 {
        self.block(l1, l2).totals[s]
    }

    /// `m̄^{[l1 l2]} = Σ_s m^{[l1 l2]}(t_s)`.
    pub fn aggregate_edges(&self, l1: usize, l2: usize) -> u64 {
        self.block(l1, l2).aggregate
    }
}

pub fn compute_degrees(net: &DynHetNet) -> DegreeTensor {
    let layout = net.layout();
    let num_types = layout.num_types();
    let num_snapshots = net.num_snapshots();
    let mut blocks = Vec::with_capacity(num_types * num_types);
    for l1 in 0..num_types {
        for _l2 in 0..num_types {
            blocks.push(BlockDegrees {
                degrees: vec![vec![0; layout.size(l1)]; num_snapshots],
                totals: vec![0; num_snapshots],
                aggregate: 0,
            });
        }
    }
    for (s, snap) in net.snapshots().iter().enumerate() {
        for ((l1, l2), coords) in snap.blocks() {
            let e = coords.len() as u64;
            if l1 == l2 {
                let b = &mut blocks[l1 * num_types + l1];
                let deg = &mut b.degrees[s];
                for &(i, j) in coords {
                    deg[i as usize] += 1;
                    deg[j as usize] += 1;
                }
                b.totals[s] += 2 * e;
            } else {
                {
                    let b = &mut blocks[l1 * num_types + l2];
                    for &(i, _) in coords {
                        b.degrees[s][i as usize] += 1;
                    }
                    b.totals[s] += e;
                }
                let b = &mut blocks[l2 * num_types + l1];
                for &(_, j) in coords {
                    b.degrees[s][j as usize] += 1;
                }
                b.totals[s] += e;
            }
        }
    }
    for b in &mut blocks {
        b.aggregate = b.totals.iter().sum();
    }
    DegreeTensor { num_types, num_snapshots, blocks }
}

// ---------------------------------------------------------------------------
// Text format

/// Parses the line-oriented network format.
///
/// ```text
/// L=2 sizes=3,2 S=1
/// # snapshot type:index type:index
/// 1 0:0 1:1
/// ```
pub fn parse_network(text: &str) -> Result<DynHetNet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, raw)| (n + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (_, header) = lines
        .next()
        .ok_or_else(|| NetError::MalformedHeader("missing header line".into()))?;
    let (layout, snapshots) = parse_header(header)?;
    let mut builder = NetBuilder::new(layout, snapshots)?;

    let mut previous = 1usize;
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(NetError::MalformedEdge {
                line,
                msg: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let s: usize = fields[0].parse().map_err(|_| NetError::MalformedEdge {
            line,
            msg: format!("bad snapshot index {:?}", fields[0]),
        })?;
        let (l1, i) = parse_endpoint(fields[1], line)?;
        let (l2, j) = parse_endpoint(fields[2], line)?;
        if s < previous {
            return Err(NetError::SnapshotOrder { line, s, previous });
        }
        previous = s;
        builder
            .add_edge(s, l1, i, l2, j)
            .map_err(|e| NetError::AtLine { line, source: Box::new(e) })?;
    }
    Ok(builder.build())
}

fn parse_header(header: &str) -> Result<(TypeLayout, usize)> {
    let mut num_types = None;
    let mut sizes = None;
    let mut snapshots = None;
    for tok in header.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| NetError::MalformedHeader(format!("token {tok:?} is not key=value")))?;
        let bad = || NetError::MalformedHeader(format!("bad value in {tok:?}"));
        match key {
            "L" => num_types = Some(value.parse::<usize>().map_err(|_| bad())?),
            "S" => snapshots = Some(value.parse::<usize>().map_err(|_| bad())?),
            "sizes" => {
                sizes = Some(
                    value
                        .split(',')
                        .map(|v| v.parse::<usize>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            _ => return Err(NetError::MalformedHeader(format!("unknown key {key:?}"))),
        }
    }
    let num_types = num_types.ok_or_else(|| NetError::MalformedHeader("missing L".into()))?;
    let sizes = sizes.ok_or_else(|| NetError::MalformedHeader("missing sizes".into()))?;
    let snapshots = snapshots.ok_or_else(|| NetError::MalformedHeader("missing S".into()))?;
    if sizes.len() != num_types {
        return Err(NetError::MalformedHeader(format!(
            "L={num_types} but {} sizes given",
            sizes.len()
        )));
    }
    if snapshots == 0 {
        return Err(NetError::MalformedHeader("S must be at least 1".into()));
    }
    let layout = TypeLayout::new(sizes).map_err(|e| NetError::MalformedHeader(e.to_string()))?;
    Ok((layout, snapshots))
}

fn parse_endpoint(field: &str, line: usize) -> Result<(usize, usize)> {
    let bad = || NetError::MalformedEdge { line, msg: format!("bad endpoint {field:?}") };
    let (ty, idx) = field.split_once(':').ok_or_else(bad)?;
    Ok((ty.parse().map_err(|_| bad())?, idx.parse().map_err(|_| bad())?))
}

pub fn format_header(layout: &TypeLayout, snapshots: usize) -> String {
    let sizes: Vec<String> = layout.sizes().iter().map(ToString::to_string).collect();
    format!("L={} sizes={} S={}", layout.num_types(), sizes.join(","), snapshots)
}

/// Canonical serialization: lines sorted by `(s, l1, l2, i, j)`.
pub fn serialize_network(net: &DynHetNet) -> String {
    let mut out = String::with_capacity(16 * net.edge_count() + 64);
    out.push_str(&format_header(net.layout(), net.num_snapshots()));
    out.push('\n');
    for snap in net.snapshots() {
        for ((l1, l2), coords) in snap.blocks() {
            for &(i, j) in coords {
                let _ = writeln!(out, "{} {l1}:{i} {l2}:{j}", snap.time_index());
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Transforms

/// Collapses all node types into one, using global indices.
pub fn flatten_types(net: &DynHetNet) -> DynHetNet {
    let layout = net.layout();
    if layout.num_types() == 1 {
        return net.clone();
    }
    let flat = TypeLayout::new(vec![layout.num_nodes()]).expect("non-empty layout");
    let mut builder = NetBuilder::new(flat, net.num_snapshots()).expect("S >= 1");
    for snap in net.snapshots() {
        let mut coords = Vec::with_capacity(snap.edge_count());
        for ((l1, l2), block) in snap.blocks() {
            let (o1, o2) = (layout.offset(l1) as u32, layout.offset(l2) as u32);
            // l1 <= l2 keeps every mapped pair in ascending global order.
            coords.extend(block.iter().map(|&(i, j)| (o1 + i, o2 + j)));
        }
        builder.extend_block(snap.time_index(), 0, 0, coords);
    }
    builder.build()
}

/// Single snapshot holding the union of all snapshots' edges.
pub fn aggregate_max(net: &DynHetNet) -> DynHetNet {
    let mut builder = NetBuilder::new(net.layout().clone(), 1).expect("S >= 1");
    for snap in net.snapshots() {
        for ((l1, l2), coords) in snap.blocks() {
            builder.extend_block(1, l1, l2, coords.to_vec());
        }
    }
    builder.build()
}

/// The network restricted to snapshot `s` (1-based).
pub fn select_snapshot(net: &DynHetNet, s: usize) -> Result<DynHetNet> {
    let snap = net.snapshot(s)?;
    Ok(DynHetNet {
        layout: net.layout().clone(),
        snapshots: vec![Snapshot { time_index: 1, blocks: snap.blocks.clone() }],
    })
}

/// The homogeneous dynamic network of type `ty` (0-based), dropping every
/// other block.
pub fn project_type(net: &DynHetNet, ty: usize) -> Result<DynHetNet> {
    let layout = net.layout();
    if ty >= layout.num_types() {
        return Err(NetError::TypeOutOfRange { ty, num_types: layout.num_types() });
    }
    let single = TypeLayout::new(vec![layout.size(ty)])?;
    let mut builder = NetBuilder::new(single, net.num_snapshots())?;
    for snap in net.snapshots() {
        let coords = snap.stored(ty, ty);
        if !coords.is_empty() {
            builder.extend_block(snap.time_index(), 0, 0, coords.to_vec());
        }
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(header: &str, edges: &[&str]) -> DynHetNet {
        let mut text = String::from(header);
        text.push('\n');
        for e in edges {
            text.push_str(e);
            text.push('\n');
        }
        parse_network(&text).unwrap()
    }

    #[test]
    fn layout_bijection() {
        let layout = TypeLayout::new(vec![3, 1, 4]).unwrap();
        assert_eq!(layout.offsets(), &[0, 3, 4]);
        assert_eq!(layout.num_nodes(), 8);
        for g in 0..8 {
            let (ty, i) = layout.local(g);
            assert_eq!(layout.global(ty, i), g);
        }
        assert!(TypeLayout::new(vec![]).is_err());
        assert!(TypeLayout::new(vec![2, 0]).is_err());
    }

    #[test]
    fn degrees_single_edge() {
        let n = net("L=1 sizes=2 S=1", &["1 0:0 0:1"]);
        let d = compute_degrees(&n);
        assert_eq!(d.degrees(0, 0, 0), &[1, 1]);
        assert_eq!(d.edges(0, 0, 0), 2);
        assert_eq!(d.aggregate_edges(0, 0), 2);
    }

    #[test]
    fn degrees_cross_edge() {
        let n = net("L=2 sizes=1,1 S=1", &["1 0:0 1:0"]);
        let d = compute_degrees(&n);
        assert_eq!(d.degrees(0, 1, 0), &[1]);
        assert_eq!(d.degrees(1, 0, 0), &[1]);
        assert_eq!(d.edges(0, 1, 0), 1);
        assert_eq!(d.edges(1, 0, 0), 1);
        assert_eq!(d.edges(0, 0, 0), 0);
    }

    #[test]
    fn degrees_empty() {
        let n = net("L=3 sizes=2,2,2 S=4", &[]);
        let d = compute_degrees(&n);
        for l1 in 0..3 {
            for l2 in 0..3 {
                assert_eq!(d.aggregate_edges(l1, l2), 0);
                for s in 0..4 {
                    assert!(d.degrees(l1, l2, s).iter().all(|&x| x == 0));
                }
            }
        }
    }

    #[test]
    fn parse_cross_edge() {
        let n = net("L=2 sizes=3,2 S=1", &["1 0:0 1:1"]);
        assert_eq!(n.edge_count(), 1);
        let snap = n.snapshot(1).unwrap();
        assert!(snap.contains(0, 0, 1, 1));
        assert!(snap.contains(1, 1, 0, 0));
        assert_eq!(snap.entries(1, 0), vec![(1, 0)]);
    }

    #[test]
    fn parse_errors_are_distinct() {
        let err = |t: &str| parse_network(t).unwrap_err();
        assert!(err("L=1 sizes=2 S=1\n1 0:0 0:0\n").to_string().contains("self-loop forbidden"));
        assert!(matches!(err("L=1 sizes=2\n"), NetError::MalformedHeader(_)));
        assert!(matches!(err("L=2 sizes=2 S=1\n"), NetError::MalformedHeader(_)));
        assert!(matches!(
            err("L=1 sizes=2 S=1\n1 0:0 0:2\n"),
            NetError::AtLine { source, .. } if matches!(*source, NetError::NodeOutOfRange { .. })
        ));
        assert!(matches!(
            err("L=1 sizes=2 S=1\n1 1:0 0:1\n"),
            NetError::AtLine { source, .. } if matches!(*source, NetError::TypeOutOfRange { .. })
        ));
        assert!(matches!(
            err("L=1 sizes=2 S=1\n2 0:0 0:1\n"),
            NetError::AtLine { source, .. } if matches!(*source, NetError::SnapshotOutOfRange { .. })
        ));
        assert!(matches!(
            err("L=1 sizes=3 S=2\n2 0:0 0:1\n1 0:1 0:2\n"),
            NetError::SnapshotOrder { line: 3, .. }
        ));
        assert!(matches!(err("L=1 sizes=3 S=1\n1 0:0\n"), NetError::MalformedEdge { .. }));
    }

    #[test]
    fn duplicates_and_orientation_collapse() {
        let n = net(
            "L=2 sizes=3,2 S=1",
            &["1 0:0 0:1", "1 0:1 0:0", "1 1:1 0:2", "1 0:2 1:1 # again"],
        );
        assert_eq!(n.edge_count(), 2);
        assert_eq!(serialize_network(&n), "L=2 sizes=3,2 S=1\n1 0:0 0:1\n1 0:2 1:1\n");
    }

    #[test]
    fn flatten_cross_edge() {
        let n = net("L=2 sizes=3,2 S=2", &["1 0:0 1:1", "2 0:1 0:2", "2 1:0 1:1"]);
        let flat = flatten_types(&n);
        assert_eq!(flat.num_types(), 1);
        assert_eq!(flat.num_nodes(), 5);
        assert_eq!(flat.num_snapshots(), 2);
        assert!(flat.snapshot(1).unwrap().contains(0, 0, 0, 4));
        assert!(flat.snapshot(2).unwrap().contains(0, 1, 0, 2));
        assert!(flat.snapshot(2).unwrap().contains(0, 3, 0, 4));
        let d = compute_degrees(&n);
        let df = compute_degrees(&flat);
        for s in 0..2 {
            let expected = d.edges(0, 0, s) + d.edges(1, 1, s) + 2 * d.edges(0, 1, s);
            assert_eq!(df.edges(0, 0, s), expected);
        }
        let single = net("L=1 sizes=3 S=1", &["1 0:0 0:2"]);
        assert_eq!(flatten_types(&single), single);
    }

    #[test]
    fn aggregate_is_union() {
        let n = net("L=1 sizes=4 S=3", &["1 0:0 0:1", "2 0:0 0:1", "2 0:2 0:3", "3 0:1 0:2"]);
        let agg = aggregate_max(&n);
        assert_eq!(agg.num_snapshots(), 1);
        assert_eq!(agg.edge_count(), 3);
        let empty = net("L=2 sizes=1,1 S=3", &[]);
        assert!(aggregate_max(&empty).is_empty());
    }

    #[test]
    fn select_and_project() {
        let n = net("L=2 sizes=3,2 S=2", &["1 0:0 0:1", "2 0:1 0:2", "2 0:0 1:1"]);
        assert!(select_snapshot(&n, 0).is_err());
        assert!(select_snapshot(&n, 3).is_err());
        let last = select_snapshot(&n, 2).unwrap();
        assert_eq!(last.edge_count(), 2);
        assert_eq!(last.snapshot(1).unwrap().time_index(), 1);

        let p0 = project_type(&n, 0).unwrap();
        assert_eq!(p0.num_nodes(), 3);
        assert_eq!(p0.edge_count(), 2);
        let p1 = project_type(&n, 1).unwrap();
        assert!(p1.is_empty());
        assert_eq!(p1.num_snapshots(), 2);
        assert!(project_type(&n, 2).is_err());
    }
}
