//! Partition agreement, distribution divergence and community-profile
//! interest prediction.

use thiserror::Error;

use crate::assignment::Assignment;
use crate::hetnet::DynHetNet;

/// Tolerance on `Σ p = 1` for [`Distribution`].
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Largest cluster count for which misclassification enumerates label
/// permutations instead of solving an assignment problem.
pub const EXHAUSTIVE_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("support mismatch: {0} vs {1} categories")]
    SupportMismatch(usize, usize),
    #[error("not a probability vector: {0}")]
    NotDistribution(String),
    #[error("cold start unresolvable")]
    ColdStart,
    #[error("node type {0} out of range")]
    InvalidType(usize),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Contingency table between an estimated (rows) and a true (columns)
/// partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl ConfusionMatrix {
    pub fn new(est: &Assignment, truth: &Assignment) -> Result<Self> {
        if est.len() != truth.len() {
            return Err(MetricsError::LengthMismatch(est.len(), truth.len()));
        }
        if est.is_empty() {
            return Err(MetricsError::Empty);
        }
        let (rows, cols) = (est.num_communities(), truth.num_communities());
        let mut counts = vec![0u64; rows * cols];
        for (&a, &b) in est.labels().iter().zip(truth.labels()) {
            counts[a as usize * cols + b as usize] += 1;
        }
        let row_sums = (0..rows).map(|i| counts[i * cols..(i + 1) * cols].iter().sum()).collect();
        let col_sums = (0..cols).map(|j| (0..rows).map(|i| counts[i * cols + j]).sum()).collect();
        Ok(Self { rows, cols, counts, row_sums, col_sums, total: est.len() as u64 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

fn entropy_term(count: u64, total: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        let c = count as f64;
        c * (c / total).ln()
    }
}

/// Normalized mutual information. If either partition has a single
/// cluster the value is 1 when both do and 0 otherwise.
pub fn nmi(a: &Assignment, b: &Assignment) -> Result<f64> {
    let cm = ConfusionMatrix::new(a, b)?;
    if cm.rows == 1 || cm.cols == 1 {
        return Ok(if cm.rows == cm.cols { 1.0 } else { 0.0 });
    }
    let n = cm.total as f64;
    let mut num = 0.0;
    for i in 0..cm.rows {
        for j in 0..cm.cols {
            let c = cm.get(i, j);
            if c > 0 {
                let c = c as f64;
                num += c * (c * n / (cm.row_sums[i] as f64 * cm.col_sums[j] as f64)).ln();
            }
        }
    }
    let den: f64 = cm.row_sums.iter().map(|&c| entropy_term(c, n)).sum::<f64>()
        + cm.col_sums.iter().map(|&c| entropy_term(c, n)).sum::<f64>();
    Ok((-2.0 * num / den).clamp(0.0, 1.0))
}

/// Square profit matrix padded with zeros to `max(rows, cols)`.
fn padded(cm: &ConfusionMatrix) -> (usize, Vec<u64>) {
    let k = cm.rows.max(cm.cols);
    let mut m = vec![0u64; k * k];
    for i in 0..cm.rows {
        for j in 0..cm.cols {
            m[i * k + j] = cm.get(i, j);
        }
    }
    (k, m)
}

/// Largest total of `m[i][σ(i)]` over all permutations σ.
pub fn max_matching_exhaustive(k: usize, m: &[u64]) -> u64 {
    fn go(row: usize, k: usize, m: &[u64], used: &mut [bool]) -> u64 {
        if row == k {
            return 0;
        }
        let mut best = 0;
        for c in 0..k {
            if !used[c] {
                used[c] = true;
                best = best.max(m[row * k + c] + go(row + 1, k, m, used));
                used[c] = false;
            }
        }
        best
    }
    go(0, k, m, &mut vec![false; k])
}

/// Largest total of `m[i][σ(i)]` via the Hungarian algorithm on the cost
/// `max(m) - m`.
pub fn max_matching_hungarian(k: usize, m: &[u64]) -> u64 {
    if k == 0 {
        return 0;
    }
    let top = *m.iter().max().unwrap_or(&0) as i64;
    let cost = |i: usize, j: usize| top - m[i * k + j] as i64;
    // potentials and matching are 1-based; index 0 is the virtual column
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=k).map(|j| m[(p[j] - 1) * k + (j - 1)]).sum()
}

/// Fraction of nodes whose labels disagree under the best matching of
/// labels between the two partitions.
pub fn misclassification(a: &Assignment, b: &Assignment) -> Result<f64> {
    let cm = ConfusionMatrix::new(a, b)?;
    let (k, m) = padded(&cm);
    let matched = if k <= EXHAUSTIVE_LIMIT { max_matching_exhaustive(k, &m) } else { max_matching_hungarian(k, &m) };
    Ok(1.0 - matched as f64 / cm.total as f64)
}

/// Same as [`misclassification`] but always through the Hungarian path.
pub fn misclassification_hungarian(a: &Assignment, b: &Assignment) -> Result<f64> {
    let cm = ConfusionMatrix::new(a, b)?;
    let (k, m) = padded(&cm);
    Ok(1.0 - max_matching_hungarian(k, &m) as f64 / cm.total as f64)
}

/// A probability vector over a fixed category index.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    p: Vec<f64>,
}

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(MetricsError::Empty);
        }
        if let Some(x) = p.iter().find(|x| !(**x >= 0.0)) {
            return Err(MetricsError::NotDistribution(format!("entry {x}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(MetricsError::NotDistribution(format!("sum {sum}")));
        }
        Ok(Self { p })
    }

    /// Normalized counts; errors if all counts are zero.
    pub fn from_counts(counts: &[f64]) -> Result<Self> {
        let total: f64 = counts.iter().sum();
        if !(total > 0.0) {
            return Err(MetricsError::NotDistribution("no mass".into()));
        }
        Self::new(counts.iter().map(|c| c / total).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn support(&self) -> usize {
        self.p.len()
    }
}

fn kl_to_mixture(p: &[f64], m: &[f64]) -> f64 {
    p.iter().zip(m).filter(|(&x, _)| x > 0.0).map(|(&x, &y)| x * (x / y).ln()).sum()
}

/// Jensen-Shannon divergence in nats.
pub fn jsd(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.support() != q.support() {
        return Err(MetricsError::SupportMismatch(p.support(), q.support()));
    }
    let m: Vec<f64> = p.p.iter().zip(&q.p).map(|(a, b)| 0.5 * (a + b)).collect();
    let v = 0.5 * kl_to_mixture(&p.p, &m) + 0.5 * kl_to_mixture(&q.p, &m);
    Ok(v.clamp(0.0, std::f64::consts::LN_2))
}

pub fn mean_jsd(predictions: &[Distribution], truths: &[Distribution]) -> Result<f64> {
    if predictions.len() != truths.len() {
        return Err(MetricsError::LengthMismatch(predictions.len(), truths.len()));
    }
    if predictions.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut total = 0.0;
    for (p, t) in predictions.iter().zip(truths) {
        total += jsd(p, t)?;
    }
    Ok(total / predictions.len() as f64)
}

/// Category distribution of each community, counted over distinct
/// business-category pairs seen in any snapshot. `None` marks a community
/// whose businesses have no category edge.
pub fn community_profiles(
    net: &DynHetNet,
    assignment: &Assignment,
    category_type: usize,
    business_type: usize,
) -> Result<Vec<Option<Distribution>>> {
    let layout = net.layout();
    for ty in [category_type, business_type] {
        if ty >= layout.num_types() {
            return Err(MetricsError::InvalidType(ty));
        }
    }
    if assignment.len() != layout.num_nodes() {
        return Err(MetricsError::LengthMismatch(assignment.len(), layout.num_nodes()));
    }
    let n_cat = layout.size(category_type);
    let k = assignment.num_communities();
    let b_off = layout.offset(business_type);
    let mut pairs: Vec<(usize, usize)> = net
        .snapshots()
        .iter()
        .flat_map(|s| s.entries(business_type, category_type))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut counts = vec![vec![0.0; n_cat]; k];
    for (b, c) in pairs {
        counts[assignment.label(b_off + b)][c] += 1.0;
    }
    Ok(counts.iter().map(|row| Distribution::from_counts(row).ok()).collect())
}

/// `g = Σ_j w_j f_j` with `w_j ∝ n_j`; communities without a profile get
/// zero weight and the rest are renormalized.
pub fn predict_interest(friend_counts: &[u64], profiles: &[Option<Distribution>]) -> Result<Distribution> {
    if friend_counts.len() != profiles.len() {
        return Err(MetricsError::LengthMismatch(friend_counts.len(), profiles.len()));
    }
    let mut support = None;
    let mut total = 0u64;
    for (&n, f) in friend_counts.iter().zip(profiles) {
        if let Some(f) = f {
            if *support.get_or_insert(f.support()) != f.support() {
                return Err(MetricsError::SupportMismatch(support.unwrap(), f.support()));
            }
            total += n;
        }
    }
    let (Some(width), true) = (support, total > 0) else {
        return Err(MetricsError::ColdStart);
    };
    let mut g = vec![0.0; width];
    for (&n, f) in friend_counts.iter().zip(profiles) {
        if let (Some(f), true) = (f, n > 0) {
            let w = n as f64 / total as f64;
            for (acc, p) in g.iter_mut().zip(f.probs()) {
                *acc += w * p;
            }
        }
    }
    let sum: f64 = g.iter().sum();
    g.iter_mut().for_each(|x| *x /= sum);
    Distribution::new(g)
}
