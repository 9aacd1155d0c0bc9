//! TOML descriptions of DHSBM models and benchmark grids.
//!
//! A model either names a simulation setting:
//!
//! ```toml
//! seed = 1
//! sizes = [150, 75]
//! snapshots = 20
//! [scenario]
//! setting = "setting1"
//! preset = "scenario1"
//! r3 = 0.15
//! ```
//!
//! or lists blocks explicitly:
//!
//! ```toml
//! sizes = [40]
//! communities = 2
//! snapshots = 3
//! alpha = 0.2
//! [[block]]
//! types = [0, 0]
//! theta = [[0.3, 0.05], [0.05, 0.3]]
//! ```
//!
//! A block may instead give `theta_snapshots` (one matrix per snapshot) or
//! `theta_csv`, a path whose `{s}` is replaced by the 1-based snapshot.
//! For settings 2 and 3 the activity tables come from `activity`
//! (three rows of length S), `activity_csv` (S rows `r31,r32,r33`) or
//! `activity_amplitude`, which uses [`piecewise_activity`]. Relative paths
//! are resolved against the config's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::baselines::Method;
use crate::dhsbm::{piecewise_activity, scenario_builder, DhsbmConfig, DhsbmError, ScenarioParams, Setting};
use crate::hetnet::TypeLayout;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {msg}")]
    Csv { path: PathBuf, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] DhsbmError),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub seed: Option<u64>,
    pub sizes: Option<Vec<usize>>,
    pub snapshots: Option<usize>,
    pub communities: Option<usize>,
    pub rho: Option<f64>,
    pub balanced: Option<bool>,
    pub alpha: Option<f64>,
    pub pi: Option<Vec<Vec<f64>>>,
    pub scenario: Option<ScenarioFile>,
    #[serde(default)]
    pub block: Vec<BlockFile>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub setting: String,
    /// `scenario1` or `scenario2`; individual values below override it.
    pub preset: Option<String>,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub theta3: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub r3: Option<f64>,
    pub activity: Option<Vec<Vec<f64>>>,
    pub activity_csv: Option<String>,
    pub activity_amplitude: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BlockFile {
    pub types: [usize; 2],
    pub theta: Option<Vec<Vec<f64>>>,
    pub theta_snapshots: Option<Vec<Vec<Vec<f64>>>>,
    pub theta_csv: Option<String>,
    pub alpha: Option<f64>,
}

/// Values a benchmark sweep may substitute into a model.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub r3: Option<f64>,
    pub snapshots: Option<usize>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
}

/// Reads a numeric CSV; `#` lines are comments and a non-numeric first
/// row is treated as a header.
pub fn read_numeric_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    parse_numeric_csv(&text).map_err(|msg| ConfigError::Csv { path: path.into(), msg })
}

pub fn parse_numeric_csv(text: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(format!("row {}: {e}", i + 1)),
        }
    }
    Ok(rows)
}

fn square(rows: &[Vec<f64>], k: usize, what: &str) -> Result<Vec<f64>> {
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return invalid(format!("{what}: expected a {k}x{k} matrix"));
    }
    Ok(rows.concat())
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Builds the model, resolving relative paths against `base_dir`.
    pub fn resolve(&self, base_dir: &Path, ov: &Overrides) -> Result<DhsbmConfig> {
        let mut cfg = match &self.scenario {
            Some(sc) => self.resolve_scenario(sc, base_dir, ov)?,
            None => self.resolve_blocks(base_dir, ov)?,
        };
        if let Some(pi) = &self.pi {
            cfg.pi = pi.clone();
        }
        cfg.seed = ov.seed.or(self.seed).unwrap_or(0);
        cfg.rho = self.rho.unwrap_or(1.0);
        cfg.balanced = self.balanced.unwrap_or(false);
        Ok(cfg)
    }

    fn resolve_scenario(&self, sc: &ScenarioFile, base_dir: &Path, ov: &Overrides) -> Result<DhsbmConfig> {
        if !self.block.is_empty() {
            return invalid("[scenario] and [[block]] are mutually exclusive");
        }
        let setting = Setting::parse(&sc.setting)?;
        let mut p = match sc.preset.as_deref() {
            None | Some("scenario1") => ScenarioParams::scenario1(0.0),
            Some("scenario2") => ScenarioParams::scenario2(0.0),
            Some(other) => return invalid(format!("unknown preset {other:?}")),
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut p.theta1, sc.theta1);
        set(&mut p.theta2, sc.theta2);
        set(&mut p.theta3, sc.theta3);
        set(&mut p.r1, sc.r1);
        set(&mut p.r2, sc.r2);
        set(&mut p.r3, sc.r3);
        set(&mut p.r3, ov.r3);
        set(&mut p.alpha, self.alpha);
        set(&mut p.alpha, ov.alpha);
        if let Some(sizes) = &self.sizes {
            let [a, b] = sizes[..] else {
                return invalid("simulation settings have exactly two node types");
            };
            p.sizes = [a, b];
        }
        p.snapshots = ov.snapshots.or(self.snapshots).unwrap_or(p.snapshots);
        p.communities = self.communities.unwrap_or(3);

        if setting != Setting::Setting1 {
            let sources =
                [sc.activity.is_some(), sc.activity_csv.is_some(), sc.activity_amplitude.is_some()];
            if sources.iter().filter(|&&b| b).count() > 1 {
                return invalid("give only one of activity, activity_csv, activity_amplitude");
            }
            let swept = ov.snapshots.is_some() || ov.r3.is_some();
            let tables: Option<Vec<Vec<f64>>> = if let Some(rows) = &sc.activity {
                Some(rows.clone())
            } else if let Some(path) = &sc.activity_csv {
                let rows = read_numeric_csv(&base_dir.join(path))?;
                if rows.iter().any(|r| r.len() != 3) {
                    return invalid("activity_csv rows must be r31,r32,r33");
                }
                Some((0..3).map(|c| rows.iter().map(|r| r[c]).collect()).collect())
            } else {
                None
            };
            match tables {
                Some(_) if swept => {
                    return invalid("r3 and S sweeps need activity_amplitude, not fixed tables");
                }
                Some(t) => {
                    let [a, b, c] = <[Vec<f64>; 3]>::try_from(t)
                        .map_err(|_| ConfigError::Invalid("activity needs three rows".into()))?;
                    p.activity = Some([a, b, c]);
                }
                None => {
                    let amp = ov.r3.or(sc.activity_amplitude).unwrap_or(p.r3);
                    p.activity = Some(piecewise_activity(p.snapshots, amp));
                }
            }
        }
        Ok(scenario_builder(setting.name(), &p)?)
    }

    fn resolve_blocks(&self, base_dir: &Path, ov: &Overrides) -> Result<DhsbmConfig> {
        if ov.r3.is_some() {
            return invalid("an r3 sweep needs a [scenario] model");
        }
        let (Some(sizes), Some(k)) = (&self.sizes, self.communities) else {
            return invalid("explicit models need sizes and communities");
        };
        let snapshots = ov.snapshots.or(self.snapshots).unwrap_or(1);
        let layout = TypeLayout::new(sizes.clone()).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let l = layout.num_types();
        let mut cfg = DhsbmConfig::new(layout, k, snapshots);
        cfg.set_alpha_all(ov.alpha.or(self.alpha).unwrap_or(0.0));
        let mut seen = std::collections::BTreeSet::new();
        for b in &self.block {
            let [l1, l2] = b.types;
            if l1 >= l || l2 >= l {
                return invalid(format!("block {:?}: type out of range", b.types));
            }
            if !seen.insert((l1.min(l2), l1.max(l2))) {
                return invalid(format!("block {:?} listed twice", b.types));
            }
            let what = format!("block {:?}", b.types);
            match (&b.theta, &b.theta_snapshots, &b.theta_csv) {
                (Some(m), None, None) => cfg.set_theta_all(l1, l2, &square(m, k, &what)?),
                (None, Some(ms), None) => {
                    if ms.len() != snapshots {
                        return invalid(format!("{what}: {} matrices for S={snapshots}", ms.len()));
                    }
                    for (s, m) in ms.iter().enumerate() {
                        cfg.set_theta(s, l1, l2, &square(m, k, &what)?);
                    }
                }
                (None, None, Some(pattern)) => {
                    for s in 0..snapshots {
                        let path = base_dir.join(pattern.replace("{s}", &(s + 1).to_string()));
                        let rows = read_numeric_csv(&path)?;
                        cfg.set_theta(s, l1, l2, &square(&rows, k, &what)?);
                    }
                }
                _ => return invalid(format!("{what}: give exactly one of theta, theta_snapshots, theta_csv")),
            }
            if let (Some(a), None) = (b.alpha, ov.alpha) {
                cfg.set_alpha(l1, l2, a);
            }
        }
        Ok(cfg)
    }
}

/// Loads a model file from disk.
pub fn load_model(path: &Path) -> Result<(ModelFile, PathBuf)> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((ModelFile::parse(&text)?, base))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    R3,
    Snapshots,
    Alpha,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::R3 => "r3",
            SweepParam::Snapshots => "S",
            SweepParam::Alpha => "alpha",
        }
    }

    pub fn apply(self, value: f64, ov: &mut Overrides) {
        match self {
            SweepParam::R3 => ov.r3 = Some(value),
            SweepParam::Snapshots => ov.snapshots = Some(value as usize),
            SweepParam::Alpha => ov.alpha = Some(value),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchmarkFile {
    name: Option<String>,
    replicates: Option<usize>,
    kappa: Option<usize>,
    seed: Option<u64>,
    methods: Option<Vec<String>>,
    base: ModelFile,
    sweep: SweepFile,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    param: String,
    values: Vec<f64>,
}

/// A parameter grid: one base model, one swept parameter, replicates per
/// grid point.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub name: String,
    pub model: ModelFile,
    pub base_dir: PathBuf,
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub replicates: usize,
    pub kappa: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
}

pub const DEFAULT_REPLICATES: usize = 20;

impl BenchmarkSpec {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let f: BenchmarkFile = toml::from_str(text)?;
        let param = match f.sweep.param.as_str() {
            "r3" => SweepParam::R3,
            "S" | "snapshots" => SweepParam::Snapshots,
            "alpha" => SweepParam::Alpha,
            other => return invalid(format!("unknown sweep parameter {other:?}")),
        };
        if f.sweep.values.is_empty() {
            return invalid("sweep has no values");
        }
        if param == SweepParam::Snapshots && f.sweep.values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
            return invalid("S values must be positive integers");
        }
        let methods = match f.methods {
            None => Method::ALL.to_vec(),
            Some(names) => names
                .iter()
                .map(|n| Method::parse(n).ok_or_else(|| ConfigError::Invalid(format!("unknown method {n:?}"))))
                .collect::<Result<_>>()?,
        };
        let spec = Self {
            name: f.name.unwrap_or_else(|| "benchmark".into()),
            model: f.base,
            base_dir: base_dir.to_path_buf(),
            param,
            values: f.sweep.values,
            replicates: f.replicates.unwrap_or(DEFAULT_REPLICATES),
            kappa: f.kappa.unwrap_or(100),
            seed: f.seed.unwrap_or(0),
            methods,
        };
        if spec.replicates == 0 || spec.kappa == 0 {
            return invalid("replicates and kappa must be positive");
        }
        // every grid point must describe a valid model
        for &v in &spec.values {
            let cfg = spec.model_at(v, spec.seed)?;
            crate::dhsbm::validate_config(&cfg).map_err(|e| ConfigError::Model(DhsbmError::Invalid(e)))?;
        }
        Ok(spec)
    }

    pub fn model_at(&self, value: f64, seed: u64) -> Result<DhsbmConfig> {
        let mut ov = Overrides { seed: Some(seed), ..Overrides::default() };
        self.param.apply(value, &mut ov);
        self.model.resolve(&self.base_dir, &ov)
    }
}
