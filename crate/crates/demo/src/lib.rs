//! Browser bindings. Each exported function takes and returns a JSON string
//! so the page needs no generated glue beyond the wasm-bindgen shim.

use dhnet_core::baselines::method3;
use dhnet_core::dhsbm::{
    assortativity_check, constant_activity, piecewise_activity, sample, scenario_builder, DhsbmConfig,
    ScenarioParams,
};
use dhnet_core::metrics::{misclassification, nmi};
use dhnet_core::seeds::{derive, tag};
use dhnet_core::{dhnet_detect, Assignment, DhnetConfig};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoParams {
    /// "dense" or "sparse" base probabilities.
    pub preset: String,
    pub setting: String,
    pub r3: f64,
    pub alpha: f64,
    /// With settings 2 and 3: use the time-varying schedule instead of a
    /// constant r3 on every snapshot.
    pub varying: bool,
    pub sizes: [usize; 2],
    pub snapshots: usize,
    pub seed: u64,
    pub kappa: usize,
}

impl Default for DemoParams {
    fn default() -> Self {
        Self {
            preset: "dense".into(),
            setting: "setting1".into(),
            r3: 0.15,
            alpha: 0.0,
            varying: true,
            sizes: [150, 75],
            snapshots: 10,
            seed: 1,
            kappa: 10,
        }
    }
}

impl DemoParams {
    pub fn model(&self) -> Result<DhsbmConfig, String> {
        let mut p = match self.preset.as_str() {
            "dense" => ScenarioParams::scenario1(self.r3),
            "sparse" => ScenarioParams::scenario2(self.r3),
            other => return Err(format!("unknown preset {other:?}")),
        };
        if self.snapshots == 0 || self.sizes.contains(&0) {
            return Err("sizes and snapshots must be positive".into());
        }
        p.sizes = self.sizes;
        p.snapshots = self.snapshots;
        p.seed = self.seed;
        p.alpha = self.alpha;
        if self.setting != "setting1" {
            p.activity = Some(if self.varying {
                piecewise_activity(self.snapshots, self.r3)
            } else {
                constant_activity(self.snapshots, self.r3)
            });
        }
        scenario_builder(&self.setting, &p).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectOutput {
    pub edges_per_snapshot: Vec<usize>,
    pub modularity: f64,
    pub communities: usize,
    pub restarts: usize,
    pub nmi: f64,
    pub nmi_per_type: Vec<f64>,
    pub misclassification: f64,
    pub labels: Vec<u32>,
    pub truth: Vec<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutput {
    pub holds: bool,
    pub communities: usize,
    pub aggregate: Vec<f64>,
    pub diagonal_margin: f64,
    pub off_diagonal_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub r3: f64,
    pub nmi_dhnet: f64,
    pub nmi_single_snapshot: f64,
}

fn detect_config(params: &DemoParams) -> DhnetConfig {
    DhnetConfig { kappa: params.kappa.max(1), seed: derive(params.seed, &[tag("detect")]), ..DhnetConfig::default() }
}

pub fn simulate_and_detect(params: &DemoParams) -> Result<DetectOutput, String> {
    let model = params.model()?;
    let drawn = sample(&model).map_err(|e| e.to_string())?;
    let truth = drawn.assignment();
    let found = dhnet_detect(&drawn.net, &detect_config(params)).map_err(|e| e.to_string())?;
    let layout = drawn.net.layout();
    let per_type = (0..layout.num_types())
        .map(|ty| {
            let r = layout.offset(ty)..layout.offset(ty) + layout.size(ty);
            nmi(&found.assignment.slice(r.clone()), &truth.slice(r))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(DetectOutput {
        edges_per_snapshot: drawn.net.snapshots().iter().map(|s| s.edge_count()).collect(),
        modularity: found.modularity,
        communities: found.num_communities(),
        restarts: found.restarts,
        nmi: nmi(&found.assignment, &truth).map_err(|e| e.to_string())?,
        nmi_per_type: per_type,
        misclassification: misclassification(&found.assignment, &truth).map_err(|e| e.to_string())?,
        labels: found.assignment.labels().to_vec(),
        truth: truth.labels().to_vec(),
    })
}

pub fn check(params: &DemoParams) -> Result<CheckOutput, String> {
    let report = assortativity_check(&params.model()?).map_err(|e| e.to_string())?;
    Ok(CheckOutput {
        holds: report.holds,
        communities: report.communities,
        aggregate: report.aggregate,
        diagonal_margin: report.diagonal_margin,
        off_diagonal_margin: report.off_diagonal_margin,
    })
}

/// DHNet against a single randomly chosen snapshot, one draw per value.
pub fn sweep(params: &DemoParams, values: &[f64]) -> Result<Vec<SweepPoint>, String> {
    values
        .iter()
        .enumerate()
        .map(|(i, &r3)| {
            let point = DemoParams { r3, seed: derive(params.seed, &[tag("sweep"), i as u64]), ..params.clone() };
            let drawn = sample(&point.model()?).map_err(|e| e.to_string())?;
            let truth = drawn.assignment();
            let cfg = detect_config(&point);
            let score = |a: &Assignment| nmi(a, &truth).map_err(|e| e.to_string());
            let full = dhnet_detect(&drawn.net, &cfg).map_err(|e| e.to_string())?;
            let single = method3(&drawn.net, &cfg, derive(cfg.seed, &[tag("snapshot")])).map_err(|e| e.to_string())?;
            Ok(SweepPoint { r3, nmi_dhnet: score(&full.assignment)?, nmi_single_snapshot: score(&single.assignment)? })
        })
        .collect()
}

fn parse(json: &str) -> Result<DemoParams, JsError> {
    serde_json::from_str(json).map_err(|e| JsError::new(&e.to_string()))
}

fn emit<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = simulateAndDetect)]
pub fn simulate_and_detect_json(params: &str) -> Result<String, JsError> {
    emit(simulate_and_detect(&parse(params)?))
}

#[wasm_bindgen(js_name = checkAssortativity)]
pub fn check_json(params: &str) -> Result<String, JsError> {
    emit(check(&parse(params)?))
}

#[wasm_bindgen(js_name = sweepR3)]
pub fn sweep_json(params: &str, values: &str) -> Result<String, JsError> {
    let values: Vec<f64> = serde_json::from_str(values).map_err(|e| JsError::new(&e.to_string()))?;
    emit(sweep(&parse(params)?, &values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_build_a_three_community_model() {
        let m = DemoParams::default().model().unwrap();
        assert_eq!(m.communities, 3);
        assert_eq!(m.snapshots, 10);
    }

    #[test]
    fn rejects_unknown_preset_and_alpha_in_setting1() {
        let bad = DemoParams { preset: "medium".into(), ..DemoParams::default() };
        assert!(bad.model().unwrap_err().contains("preset"));
        let bad = DemoParams { alpha: 0.5, ..DemoParams::default() };
        assert!(bad.model().is_err());
    }
}
