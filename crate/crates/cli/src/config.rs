//! Run configuration: strict JSON, validated into a [`Plan`] before anything runs.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use lagpath::kernelalg::Model;
use serde::{Deserialize, Serialize};

use crate::scenarios::Scenario;
use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: String,
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub regularization_delta: Option<f64>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub radius_bound: RadiusBoundConfig,
}

/// A built-in scenario tag, or an analytic field sampled on a grid.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum ScenarioSpec {
    Named(String),
    Field(FieldSpec),
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    /// `A·exp(−|a − c|²/w²)`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// `−A·tanh((a₂ − ε sin πa₁)/w)`: a layer with a sinusoidal interface.
    Layer {
        amplitude: f64,
        thickness: f64,
        #[serde(default)]
        perturbation: f64,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// `[lo, hi]` along every axis.
    pub extent: [f64; 2],
    pub n_per_axis: usize,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorKind {
    Rk4,
    Taylor,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub kind: IntegratorKind,
    /// RK4 step, or the step cap of the Taylor integrator.
    pub dt: f64,
    pub t_end: f64,
    pub taylor_order: usize,
    pub safety: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { kind: IntegratorKind::Rk4, dt: 0.01, t_end: 1.0, taylor_order: 12, safety: 0.5 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    pub pair_samples: usize,
    pub output_every: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self { pair_samples: 1000, output_every: 10 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("output") }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RadiusBoundConfig {
    pub gamma: f64,
    pub lambda: f64,
    pub c_k: f64,
}

impl Default for RadiusBoundConfig {
    fn default() -> Self {
        Self { gamma: 0.5, lambda: 1.5, c_k: 32.0 }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// A validated configuration with every default resolved.
#[derive(Clone, Debug)]
pub struct Plan {
    pub model: Model,
    pub scenario: Scenario,
    /// `None` for point-vortex scenarios.
    pub grid: Option<GridConfig>,
    pub delta: f64,
    pub integrator: IntegratorConfig,
    pub diagnostics: DiagnosticsConfig,
    pub output: PathBuf,
    pub seed: u64,
    pub radius_bound: RadiusBoundConfig,
}

const MAX_STEPS: f64 = 1e7;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

impl Plan {
    pub fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        let model = Model::from_str(&cfg.model).map_err(|e| CliError::Config(e.to_string()))?;
        let scenario = Scenario::resolve(&cfg.scenario, model)?;

        let grid = match (scenario.default_grid(), cfg.grid) {
            (None, Some(_)) => return Err(CliError::Config(format!("scenario {} takes no grid", scenario.tag()))),
            (None, None) => None,
            (Some(d), g) => Some(g.unwrap_or(d)),
        };
        if let Some(g) = grid {
            let [lo, hi] = g.extent;
            check(lo.is_finite() && hi.is_finite() && hi > lo, || format!("grid extent [{lo}, {hi}] is empty"))?;
            let cap = if model.dim() == 3 { 48 } else { 512 };
            check((2..=cap).contains(&g.n_per_axis), || format!("grid.n_per_axis must lie in 2..={cap}"))?;
        }
        let delta = match cfg.regularization_delta {
            Some(d) => d,
            None => grid.map_or(0.0, |g| 2.0 * (g.extent[1] - g.extent[0]) / g.n_per_axis as f64),
        };
        check(delta.is_finite() && delta >= 0.0, || format!("regularization_delta = {delta}"))?;

        let it = &cfg.integrator;
        check(it.dt.is_finite() && it.dt > 0.0, || format!("integrator.dt = {}", it.dt))?;
        check(it.t_end.is_finite() && it.t_end >= 0.0, || format!("integrator.t_end = {}", it.t_end))?;
        check(it.t_end / it.dt <= MAX_STEPS, || "integrator.t_end/dt exceeds 1e7 steps".into())?;
        check(it.safety > 0.0 && it.safety < 1.0, || format!("integrator.safety = {} not in (0, 1)", it.safety))?;
        check((4..=25).contains(&it.taylor_order), || format!("integrator.taylor_order = {} not in 4..=25", it.taylor_order))?;
        if it.kind == IntegratorKind::Taylor {
            check(matches!(model, Model::Euler2D | Model::Sqg | Model::Ipm), || {
                format!("the Taylor integrator does not support {model}")
            })?;
        }

        let d = &cfg.diagnostics;
        check(d.pair_samples >= 1, || "diagnostics.pair_samples must be positive".into())?;
        check(d.output_every >= 1, || "diagnostics.output_every must be positive".into())?;

        let rb = &cfg.radius_bound;
        check(rb.gamma > 0.0 && rb.gamma < 1.0, || format!("radius_bound.gamma = {} not in (0, 1)", rb.gamma))?;
        check(rb.lambda > 1.0 && rb.lambda <= 1.5, || format!("radius_bound.lambda = {} not in (1, 3/2]", rb.lambda))?;
        check(rb.c_k.is_finite() && rb.c_k > 0.0, || format!("radius_bound.c_k = {}", rb.c_k))?;
        check(!cfg.output.directory.as_os_str().is_empty(), || "output.directory is empty".into())?;

        Ok(Self {
            model,
            scenario,
            grid,
            delta,
            integrator: it.clone(),
            diagnostics: d.clone(),
            output: cfg.output.directory.clone(),
            seed: cfg.seed,
            radius_bound: rb.clone(),
        })
    }
}
