//! Dynamic heterogeneous stochastic block model.
//!
//! Labels are drawn per type from a multinomial with probabilities `π^{[l]}`.
//! For a pair in communities `(k1, k2)` of block `(l1, l2)` the first
//! snapshot is Bernoulli(ρθ(t_1)); later snapshots follow
//!
//! ```text
//! A(t_s) = u A(t_{s-1}) + (1 - u) v,   u ~ Bern(α),
//! v ~ Bern((ρθ(t_s) - α ρθ(t_{s-1})) / (1 - α))
//! ```
//!
//! which keeps the marginal at ρθ(t_s) and gives lag-k correlation α^k when
//! Θ is constant.

use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::assignment::Assignment;
use crate::hetnet::{DynHetNet, NetBuilder, TypeLayout};
use crate::seeds;

/// Slack for the validity inequalities and probability checks.
const VALIDITY_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DhsbmError {
    #[error("invalid DHSBM config: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("degenerate model: every block has zero edge mass")]
    Degenerate,
    #[error("unknown setting {0:?} (expected setting1, setting2 or setting3)")]
    UnknownSetting(String),
    #[error("scenario parameters: {0}")]
    Scenario(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// One failed check. Snapshot indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Shape(String),
    PiNegative { ty: usize, k: usize, value: f64 },
    PiSum { ty: usize, sum: f64 },
    ThetaRange { s: usize, l1: usize, l2: usize, k1: usize, k2: usize, value: f64 },
    Asymmetric { s: usize, l1: usize, l2: usize, k1: usize, k2: usize },
    AlphaRange { l1: usize, l2: usize, alpha: f64 },
    /// `α θ(t_{s-1}) > θ(t_s)`
    Persistence { s: usize, l1: usize, l2: usize, k1: usize, k2: usize, lhs: f64, rhs: f64 },
    /// `α (1 - θ(t_{s-1})) > 1 - θ(t_s)`
    Complement { s: usize, l1: usize, l2: usize, k1: usize, k2: usize, lhs: f64, rhs: f64 },
    FixedLabels(String),
    Rho(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(msg) => write!(f, "shape: {msg}"),
            Violation::PiNegative { ty, k, value } => write!(f, "pi[{ty}][{k}] = {value} < 0"),
            Violation::PiSum { ty, sum } => write!(f, "pi[{ty}] sums to {sum}"),
            Violation::ThetaRange { s, l1, l2, k1, k2, value } => {
                write!(f, "s={s} block=({l1},{l2}) cell=({k1},{k2}): rho*theta = {value} outside [0,1]")
            }
            Violation::Asymmetric { s, l1, l2, k1, k2 } => {
                write!(f, "s={s} block=({l1},{l2}) cell=({k1},{k2}): theta not symmetric")
            }
            Violation::AlphaRange { l1, l2, alpha } => {
                write!(f, "block=({l1},{l2}): alpha = {alpha} outside [0,1)")
            }
            Violation::Persistence { s, l1, l2, k1, k2, lhs, rhs } => write!(
                f,
                "s={s} block=({l1},{l2}) cell=({k1},{k2}): alpha*theta(s-1) = {lhs} > theta(s) = {rhs}"
            ),
            Violation::Complement { s, l1, l2, k1, k2, lhs, rhs } => write!(
                f,
                "s={s} block=({l1},{l2}) cell=({k1},{k2}): alpha*(1-theta(s-1)) = {lhs} > 1-theta(s) = {rhs}"
            ),
            Violation::FixedLabels(msg) => write!(f, "fixed labels: {msg}"),
            Violation::Rho(r) => write!(f, "rho = {r} must be positive"),
        }
    }
}

/// Parameters of a DHSBM. `theta` holds all `L²` ordered blocks; the
/// setters keep `(l2, l1)` equal to the transpose of `(l1, l2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DhsbmConfig {
    pub layout: TypeLayout,
    pub communities: usize,
    pub snapshots: usize,
    pub pi: Vec<Vec<f64>>,
    /// `[s][l1 * L + l2]`, each a row-major `K × K` matrix.
    pub theta: Vec<Vec<Vec<f64>>>,
    /// `[l1 * L + l2]`.
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub seed: u64,
    /// Pin exact label counts `round(n_l π_k)` instead of a multinomial draw.
    pub balanced: bool,
    /// Community index per global node, overriding the label draw.
    pub fixed_labels: Option<Vec<usize>>,
}

impl DhsbmConfig {
    /// Uniform π, all-zero Θ, α = 0, ρ = 1.
    pub fn new(layout: TypeLayout, communities: usize, snapshots: usize) -> Self {
        let l = layout.num_types();
        let k = communities.max(1);
        Self {
            pi: vec![vec![1.0 / k as f64; communities]; l],
            theta: vec![vec![vec![0.0; communities * communities]; l * l]; snapshots],
            alpha: vec![0.0; l * l],
            rho: 1.0,
            seed: 0,
            balanced: false,
            fixed_labels: None,
            layout,
            communities,
            snapshots,
        }
    }

    pub fn num_types(&self) -> usize {
        self.layout.num_types()
    }

    fn slot(&self, l1: usize, l2: usize) -> usize {
        l1 * self.num_types() + l2
    }

    /// Θ^{[l1 l2]}(t_s) for 0-based `s`.
    pub fn theta(&self, s: usize, l1: usize, l2: usize) -> &[f64] {
        &self.theta[s][self.slot(l1, l2)]
    }

    pub fn alpha(&self, l1: usize, l2: usize) -> f64 {
        self.alpha[self.slot(l1, l2)]
    }

    /// Sets Θ^{[l1 l2]}(t_s) (0-based `s`) from a row-major matrix and its
    /// transpose into `(l2, l1)`.
    pub fn set_theta(&mut self, s: usize, l1: usize, l2: usize, matrix: &[f64]) {
        let k = self.communities;
        assert_eq!(matrix.len(), k * k, "theta matrix must be K x K");
        let (a, b) = (self.slot(l1, l2), self.slot(l2, l1));
        self.theta[s][a] = matrix.to_vec();
        if a != b {
            let t = &mut self.theta[s][b];
            for r in 0..k {
                for c in 0..k {
                    t[c * k + r] = matrix[r * k + c];
                }
            }
        }
    }

    pub fn set_theta_all(&mut self, l1: usize, l2: usize, matrix: &[f64]) {
        for s in 0..self.snapshots {
            self.set_theta(s, l1, l2, matrix);
        }
    }

    pub fn set_alpha(&mut self, l1: usize, l2: usize, alpha: f64) {
        let (a, b) = (self.slot(l1, l2), self.slot(l2, l1));
        self.alpha[a] = alpha;
        self.alpha[b] = alpha;
    }

    pub fn set_alpha_all(&mut self, alpha: f64) {
        self.alpha.iter_mut().for_each(|a| *a = alpha);
    }
}

/// Every violated condition, or `Ok(())`.
pub fn validate_config(cfg: &DhsbmConfig) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let l = cfg.num_types();
    let k = cfg.communities;
    if k == 0 {
        out.push(Violation::Shape("K must be at least 1".into()));
    }
    if cfg.snapshots == 0 {
        out.push(Violation::Shape("S must be at least 1".into()));
    }
    if cfg.pi.len() != l {
        out.push(Violation::Shape(format!("pi has {} rows, expected L={l}", cfg.pi.len())));
    }
    if cfg.theta.len() != cfg.snapshots || cfg.theta.iter().any(|t| t.len() != l * l) {
        out.push(Violation::Shape("theta must hold S snapshots of L*L blocks".into()));
    }
    if cfg.theta.iter().flatten().any(|m| m.len() != k * k) {
        out.push(Violation::Shape("every theta block must be K x K".into()));
    }
    if cfg.alpha.len() != l * l {
        out.push(Violation::Shape("alpha must hold L*L entries".into()));
    }
    if !out.is_empty() {
        return Err(out);
    }
    if !(cfg.rho > 0.0) {
        out.push(Violation::Rho(cfg.rho));
    }

    for (ty, pi) in cfg.pi.iter().enumerate() {
        if pi.len() != k {
            out.push(Violation::Shape(format!("pi[{ty}] has length {}, expected K={k}", pi.len())));
            continue;
        }
        for (c, &p) in pi.iter().enumerate() {
            if p < 0.0 {
                out.push(Violation::PiNegative { ty, k: c, value: p });
            }
        }
        let sum: f64 = pi.iter().sum();
        if (sum - 1.0).abs() > VALIDITY_SLACK {
            out.push(Violation::PiSum { ty, sum });
        }
    }

    for l1 in 0..l {
        for l2 in 0..l {
            let a = cfg.alpha(l1, l2);
            if l1 <= l2 && !(0.0..1.0).contains(&a) {
                out.push(Violation::AlphaRange { l1, l2, alpha: a });
            }
        }
    }

    for s in 0..cfg.snapshots {
        for l1 in 0..l {
            for l2 in l1..l {
                let m = cfg.theta(s, l1, l2);
                let mt = cfg.theta(s, l2, l1);
                for k1 in 0..k {
                    for k2 in 0..k {
                        let value = cfg.rho * m[k1 * k + k2];
                        if !(-VALIDITY_SLACK..=1.0 + VALIDITY_SLACK).contains(&value) || value.is_nan() {
                            out.push(Violation::ThetaRange { s: s + 1, l1, l2, k1, k2, value });
                        }
                        let mirrored = if l1 == l2 { m[k2 * k + k1] } else { mt[k2 * k + k1] };
                        if (m[k1 * k + k2] - mirrored).abs() > VALIDITY_SLACK && (l1 != l2 || k1 < k2) {
                            out.push(Violation::Asymmetric { s: s + 1, l1, l2, k1, k2 });
                        }
                        if s > 0 {
                            let alpha = cfg.alpha(l1, l2);
                            let prev = cfg.rho * cfg.theta(s - 1, l1, l2)[k1 * k + k2];
                            let lhs = alpha * prev;
                            if lhs > value + VALIDITY_SLACK {
                                out.push(Violation::Persistence { s: s + 1, l1, l2, k1, k2, lhs, rhs: value });
                            }
                            let lhs = alpha * (1.0 - prev);
                            if lhs > 1.0 - value + VALIDITY_SLACK {
                                out.push(Violation::Complement {
                                    s: s + 1,
                                    l1,
                                    l2,
                                    k1,
                                    k2,
                                    lhs,
                                    rhs: 1.0 - value,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    if let Some(fixed) = &cfg.fixed_labels {
        if fixed.len() != cfg.layout.num_nodes() {
            out.push(Violation::FixedLabels(format!(
                "{} labels for {} nodes",
                fixed.len(),
                cfg.layout.num_nodes()
            )));
        } else if let Some(bad) = fixed.iter().find(|&&c| c >= k) {
            out.push(Violation::FixedLabels(format!("label {bad} >= K={k}")));
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// A sampled network with its planted communities.
#[derive(Debug, Clone)]
pub struct DhsbmSample {
    pub net: DynHetNet,
    /// Planted community index in `0..K` per global node.
    pub communities: Vec<usize>,
}

impl DhsbmSample {
    pub fn assignment(&self) -> Assignment {
        Assignment::from_usize(&self.communities)
    }
}

/// Largest-remainder rounding of `n π` to integer counts summing to `n`.
pub fn balanced_counts(n: usize, pi: &[f64]) -> Vec<usize> {
    let raw: Vec<f64> = pi.iter().map(|p| p * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut rest = n - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..pi.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (raw[a] - raw[a].floor(), raw[b] - raw[b].floor());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &k in order.iter().cycle() {
        if rest == 0 {
            break;
        }
        counts[k] += 1;
        rest -= 1;
    }
    counts
}

fn draw_labels(cfg: &DhsbmConfig) -> Vec<usize> {
    if let Some(fixed) = &cfg.fixed_labels {
        return fixed.clone();
    }
    let mut labels = Vec::with_capacity(cfg.layout.num_nodes());
    for (ty, &n) in cfg.layout.sizes().iter().enumerate() {
        if cfg.balanced {
            for (k, c) in balanced_counts(n, &cfg.pi[ty]).into_iter().enumerate() {
                labels.extend(std::iter::repeat_n(k, c));
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(cfg.seed, &[seeds::tag("labels"), ty as u64]));
            let dist = WeightedIndex::new(&cfg.pi[ty]).expect("validated pi");
            labels.extend((0..n).map(|_| dist.sample(&mut rng)));
        }
    }
    labels
}

/// Per-snapshot marginal and innovation probabilities of one cell.
struct CellChain {
    marginal: Vec<f64>,
    innovation: Vec<f64>,
}

fn sample_block(cfg: &DhsbmConfig, labels: &[usize], l1: usize, l2: usize) -> Vec<Vec<(u32, u32)>> {
    let k = cfg.communities;
    let alpha = cfg.alpha(l1, l2);
    let chains: Vec<CellChain> = (0..k * k)
        .map(|cell| {
            let marginal: Vec<f64> =
                (0..cfg.snapshots).map(|s| (cfg.rho * cfg.theta(s, l1, l2)[cell]).clamp(0.0, 1.0)).collect();
            let innovation = (0..cfg.snapshots)
                .map(|s| {
                    if s == 0 || alpha == 0.0 {
                        marginal[s]
                    } else {
                        ((marginal[s] - alpha * marginal[s - 1]) / (1.0 - alpha)).clamp(0.0, 1.0)
                    }
                })
                .collect();
            CellChain { marginal, innovation }
        })
        .collect();

    let layout = &cfg.layout;
    let (o1, o2) = (layout.offset(l1), layout.offset(l2));
    let (n1, n2) = (layout.size(l1), layout.size(l2));
    let mut rng =
        ChaCha8Rng::seed_from_u64(seeds::derive(cfg.seed, &[seeds::tag("edges"), l1 as u64, l2 as u64]));
    let mut out: Vec<Vec<(u32, u32)>> = vec![Vec::new(); cfg.snapshots];
    for i in 0..n1 {
        let ki = labels[o1 + i];
        let start = if l1 == l2 { i + 1 } else { 0 };
        for j in start..n2 {
            let chain = &chains[ki * k + labels[o2 + j]];
            let mut present = rng.random::<f64>() < chain.marginal[0];
            if present {
                out[0].push((i as u32, j as u32));
            }
            for (s, edges) in out.iter_mut().enumerate().skip(1) {
                let keep = alpha > 0.0 && rng.random::<f64>() < alpha;
                if !keep {
                    present = rng.random::<f64>() < chain.innovation[s];
                }
                if present {
                    edges.push((i as u32, j as u32));
                }
            }
        }
    }
    out
}

/// Draws one network. Each block `(l1 <= l2)` uses its own RNG stream keyed
/// by `(seed, l1, l2)`, so block-parallel sampling equals sequential sampling.
pub fn sample(cfg: &DhsbmConfig) -> Result<DhsbmSample, DhsbmError> {
    validate_config(cfg).map_err(DhsbmError::Invalid)?;
    let labels = draw_labels(cfg);
    let l = cfg.num_types();
    let pairs: Vec<(usize, usize)> = (0..l).flat_map(|a| (a..l).map(move |b| (a, b))).collect();
    let sampled: Vec<Vec<Vec<(u32, u32)>>> =
        pairs.par_iter().map(|&(l1, l2)| sample_block(cfg, &labels, l1, l2)).collect();

    let mut builder = NetBuilder::new(cfg.layout.clone(), cfg.snapshots).expect("validated S");
    for (&(l1, l2), per_snapshot) in pairs.iter().zip(sampled) {
        for (s, coords) in per_snapshot.into_iter().enumerate() {
            if !coords.is_empty() {
                builder.extend_block(s + 1, l1, l2, coords);
            }
        }
    }
    Ok(DhsbmSample { net: builder.build(), communities: labels })
}

/// Result of checking the assortativity condition on `Σ_s Σ_{l1,l2} W`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssortativityReport {
    pub holds: bool,
    pub communities: usize,
    /// Row-major `K × K` sum of `W` over snapshots and ordered blocks.
    pub aggregate: Vec<f64>,
    /// `Σ_s W^{[l1 l2]}(t_s)` per contributing ordered block.
    pub per_block: Vec<((usize, usize), Vec<f64>)>,
    /// `min_a` of the aggregated diagonal; must be positive.
    pub diagonal_margin: f64,
    /// `max_{a≠b}` of the aggregated off-diagonal; must be negative.
    pub off_diagonal_margin: f64,
}

impl AssortativityReport {
    pub fn cell(&self, a: usize, b: usize) -> f64 {
        self.aggregate[a * self.communities + b]
    }
}

/// `T_ab = π_a π_b θ_ab / Σ π π θ` and `W_ab = T_ab − T_a· T_b·` per block
/// and snapshot; ρ cancels.
pub fn assortativity_check(cfg: &DhsbmConfig) -> Result<AssortativityReport, DhsbmError> {
    let k = cfg.communities;
    let l = cfg.num_types();
    let mut aggregate = vec![0.0; k * k];
    let mut per_block = Vec::new();
    let mut any = false;
    for l1 in 0..l {
        for l2 in 0..l {
            let mut block_sum = vec![0.0; k * k];
            let mut contributed = false;
            for s in 0..cfg.snapshots {
                let theta = cfg.theta(s, l1, l2);
                let (p1, p2) = (&cfg.pi[l1], &cfg.pi[l2]);
                let mut t = vec![0.0; k * k];
                let mut denom = 0.0;
                for a in 0..k {
                    for b in 0..k {
                        t[a * k + b] = p1[a] * p2[b] * theta[a * k + b];
                        denom += t[a * k + b];
                    }
                }
                if denom <= 0.0 {
                    continue;
                }
                contributed = true;
                t.iter_mut().for_each(|x| *x /= denom);
                let rows: Vec<f64> = (0..k).map(|a| t[a * k..(a + 1) * k].iter().sum()).collect();
                for a in 0..k {
                    for b in 0..k {
                        block_sum[a * k + b] += t[a * k + b] - rows[a] * rows[b];
                    }
                }
            }
            if contributed {
                any = true;
                for (acc, w) in aggregate.iter_mut().zip(&block_sum) {
                    *acc += w;
                }
                per_block.push(((l1, l2), block_sum));
            }
        }
    }
    if !any {
        return Err(DhsbmError::Degenerate);
    }
    let diagonal_margin = (0..k).map(|a| aggregate[a * k + a]).fold(f64::INFINITY, f64::min);
    let off_diagonal_margin = (0..k)
        .flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)))
        .map(|(a, b)| aggregate[a * k + b])
        .fold(f64::NEG_INFINITY, f64::max);
    let holds = diagonal_margin > 0.0 && (k == 1 || off_diagonal_margin < 0.0);
    Ok(AssortativityReport {
        holds: holds && k > 1,
        communities: k,
        aggregate,
        per_block,
        diagonal_margin,
        off_diagonal_margin,
    })
}

// ---------------------------------------------------------------------------
// Simulation settings

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    /// Time-homogeneous Θ, independent snapshots.
    Setting1,
    /// Time-varying cross-block bonuses, independent snapshots.
    Setting2,
    /// Time-varying cross-block bonuses with temporal correlation α.
    Setting3,
}

impl Setting {
    pub fn parse(name: &str) -> Result<Self, DhsbmError> {
        match name {
            "setting1" => Ok(Setting::Setting1),
            "setting2" => Ok(Setting::Setting2),
            "setting3" => Ok(Setting::Setting3),
            other => Err(DhsbmError::UnknownSetting(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Setting::Setting1 => "setting1",
            Setting::Setting2 => "setting2",
            Setting::Setting3 => "setting3",
        }
    }
}

/// Parameters of the two-type, three-community simulation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub r1: f64,
    pub r2: f64,
    /// Constant cross-block bonus (setting1).
    pub r3: f64,
    /// Per-snapshot `[r31, r32, r33]` tables (settings 2 and 3).
    pub activity: Option<[Vec<f64>; 3]>,
    pub alpha: f64,
    pub sizes: [usize; 2],
    pub snapshots: usize,
    pub communities: usize,
    pub rho: f64,
    pub seed: u64,
    pub balanced: bool,
}

impl ScenarioParams {
    /// Dense case: θ1 = .5, θ2 = .6, θ3 = .3, r1 = r2 = 0.
    pub fn scenario1(r3: f64) -> Self {
        Self::with_thetas(0.5, 0.6, 0.3, r3)
    }

    /// Sparse case: θ1 = .1, θ2 = .2, θ3 = .05, r1 = r2 = 0.
    pub fn scenario2(r3: f64) -> Self {
        Self::with_thetas(0.1, 0.2, 0.05, r3)
    }

    fn with_thetas(theta1: f64, theta2: f64, theta3: f64, r3: f64) -> Self {
        Self {
            theta1,
            theta2,
            theta3,
            r1: 0.0,
            r2: 0.0,
            r3,
            activity: None,
            alpha: 0.0,
            sizes: [300, 150],
            snapshots: 20,
            communities: 3,
            rho: 1.0,
            seed: 0,
            balanced: false,
        }
    }
}

/// Snapshot times equally spaced on `[0, 1]`.
pub fn snapshot_times(snapshots: usize) -> Vec<f64> {
    match snapshots {
        0 => Vec::new(),
        1 => vec![0.0],
        s => (0..s).map(|i| i as f64 / (s - 1) as f64).collect(),
    }
}

/// An illustrative activity schedule for settings 2 and 3: community 1 is active at t = 0 and t = 1,
/// community 2 only around t = 0.5, community 3 from t = 0.5 on. Values
/// are piecewise linear in t and scaled by `amplitude`.
pub fn piecewise_activity(snapshots: usize, amplitude: f64) -> [Vec<f64>; 3] {
    let times = snapshot_times(snapshots);
    let r31 = times.iter().map(|&t| amplitude * (1.0 - 2.0 * t).abs()).collect();
    let r32 = times.iter().map(|&t| amplitude * (1.0 - (1.0 - 2.0 * t).abs())).collect();
    let r33 = times.iter().map(|&t| amplitude * (2.0 * t).min(1.0)).collect();
    [r31, r32, r33]
}

/// Constant activity tables, turning settings 2/3 into a constant-Θ model.
pub fn constant_activity(snapshots: usize, r3: f64) -> [Vec<f64>; 3] {
    [vec![r3; snapshots], vec![r3; snapshots], vec![r3; snapshots]]
}

/// The block structure of the named simulation setting.
pub fn scenario_builder(name: &str, params: &ScenarioParams) -> Result<DhsbmConfig, DhsbmError> {
    let setting = Setting::parse(name)?;
    if params.communities != 3 {
        return Err(DhsbmError::Scenario(format!(
            "the setting matrices are defined for K=3, got K={}",
            params.communities
        )));
    }
    let k = 3;
    let s_count = params.snapshots;
    let layout = TypeLayout::new(params.sizes.to_vec()).map_err(|e| DhsbmError::Scenario(e.to_string()))?;
    let mut cfg = DhsbmConfig::new(layout, k, s_count);
    cfg.rho = params.rho;
    cfg.seed = params.seed;
    cfg.balanced = params.balanced;

    let homogeneous = |base: f64, bonus: f64| -> Vec<f64> {
        (0..k * k).map(|i| if i / k == i % k { base + bonus } else { base }).collect()
    };
    cfg.set_theta_all(0, 0, &homogeneous(params.theta1, params.r1));
    cfg.set_theta_all(1, 1, &homogeneous(params.theta2, params.r2));

    match setting {
        Setting::Setting1 => {
            if params.alpha != 0.0 {
                return Err(DhsbmError::Scenario("setting1 samples independent snapshots; alpha must be 0".into()));
            }
            cfg.set_theta_all(0, 1, &homogeneous(params.theta3, params.r3));
        }
        Setting::Setting2 | Setting::Setting3 => {
            if setting == Setting::Setting2 && params.alpha != 0.0 {
                return Err(DhsbmError::Scenario("setting2 samples independent snapshots; alpha must be 0".into()));
            }
            let tables = params
                .activity
                .as_ref()
                .ok_or_else(|| DhsbmError::Scenario(format!("{} needs r31, r32, r33 tables", setting.name())))?;
            if tables.iter().any(|t| t.len() != s_count) {
                return Err(DhsbmError::Scenario(format!("activity tables must have S={s_count} entries")));
            }
            for s in 0..s_count {
                let mut m = vec![params.theta3; k * k];
                for (c, table) in tables.iter().enumerate() {
                    m[c * k + c] += table[s];
                }
                cfg.set_theta(s, 0, 1, &m);
            }
            cfg.set_alpha_all(params.alpha);
        }
    }
    Ok(cfg)
}

/// Shuffles `labels` within each type; used to decouple planted labels from
/// node order in fixtures.
pub fn shuffle_within_types(layout: &TypeLayout, labels: &mut [usize], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for ty in 0..layout.num_types() {
        let r = layout.offset(ty)..layout.offset(ty) + layout.size(ty);
        labels[r].shuffle(&mut rng);
    }
}
