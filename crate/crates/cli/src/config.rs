//! Scenario configuration, loaded from a single JSON document.
//!
//! Environment states are numbered from 1 in configuration files (type
//! regions and `analysis.focus_state`), matching how the states are usually
//! drawn; they are converted to zero-based indices internally.

use std::path::{Path, PathBuf};

use codevo::analysis::DEFAULT_CLUSTER_TOLERANCE;
use codevo::model::{
    type_sensor, Agent, AgentType, Code, EnvironmentSpec, PopulationModel, PopulationStructure,
    SensorSpec,
};
use codevo::optim::{CmaEsConfig, ParamCodec, Refinement};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    WellMixed,
    Grid,
    Flexible,
    Heterogeneous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDims {
    pub width: usize,
    pub height: usize,
}

/// Either `states` (uniform) or an explicit `distribution`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeConfig {
    pub id: String,
    /// One-based environment states the type can detect; empty = blind.
    pub region: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SensorConfig {
    /// Independent binary symmetric channels, one per bit of the state.
    FactoredSymmetric { components: u32, epsilon: f64 },
    /// One channel over all states; errors spread evenly.
    Symmetric { epsilon: f64 },
    /// Binary region sensors, `agents_per_type` agents of each type.
    AgentTypes {
        types: Vec<TypeConfig>,
        agents_per_type: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub max_evaluations: usize,
    /// λ; `4 + ⌊3 ln d⌋` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub population_size: Option<usize>,
    pub initial_step: f64,
    /// 10 for heterogeneous scenarios, 3 otherwise, when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    pub target_tolerance: f64,
    pub stagnation_generations: usize,
    pub refinement: Refinement,
    /// Which restart is kept; blind information for heterogeneous
    /// scenarios, code similarity otherwise, when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub select: Option<Selection>,
}

/// Criterion for picking the reported restart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    CodeSimilarity,
    BlindInfo,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let base = CmaEsConfig::new(1, 0);
        Self {
            max_evaluations: base.max_evaluations,
            population_size: None,
            initial_step: base.initial_step,
            restarts: None,
            target_tolerance: base.target_tolerance,
            stagnation_generations: base.stagnation_generations,
            refinement: Refinement::default(),
            select: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Codes closer than this (√JSD) share a cluster.
    pub cluster_tolerance: f64,
    /// Structure-graph edges need a symmetrized weight above this.
    pub structure_threshold: f64,
    /// One-based environment state whose best posterior is reported.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub focus_state: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            cluster_tolerance: DEFAULT_CLUSTER_TOLERANCE,
            structure_threshold: 1e-3,
            focus_state: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Required for well-mixed and flexible; implied by the grid or the
    /// type counts otherwise (checked when given).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDims>,
    pub environment: EnvironmentConfig,
    pub sensor: SensorConfig,
    pub output_states: usize,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let config: Self = serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn restarts(&self) -> usize {
        self.optimizer.restarts.unwrap_or(match self.kind {
            ScenarioKind::Heterogeneous => 10,
            _ => 3,
        })
    }

    pub fn selection(&self) -> Selection {
        self.optimizer.select.unwrap_or(match self.kind {
            ScenarioKind::Heterogeneous => Selection::BlindInfo,
            _ => Selection::CodeSimilarity,
        })
    }

    pub fn agent_count(&self) -> Result<usize> {
        let implied = match (&self.kind, &self.sensor) {
            (
                _,
                SensorConfig::AgentTypes {
                    types,
                    agents_per_type,
                },
            ) => Some(types.len() * agents_per_type),
            (ScenarioKind::Grid, _) => self.grid.as_ref().map(|g| g.width * g.height),
            _ => None,
        };
        match (implied, self.agents) {
            (Some(i), Some(a)) if i != a => Err(invalid(format!(
                "`agents` is {a} but the scenario implies {i}"
            ))),
            (Some(i), _) => Ok(i),
            (None, Some(a)) => Ok(a),
            (None, None) => Err(invalid(format!("{:?} scenario needs `agents`", self.kind))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let agents = self.agent_count()?;
        if agents == 0 {
            return Err(invalid("the population needs at least one agent"));
        }
        if self.output_states == 0 {
            return Err(invalid("`output_states` must be positive"));
        }
        match self.kind {
            ScenarioKind::Grid if self.grid.is_none() => {
                return Err(invalid("grid scenario needs `grid: {width, height}`"))
            }
            ScenarioKind::Grid => {}
            _ if self.grid.is_some() => {
                return Err(invalid("`grid` is only meaningful for the grid scenario"))
            }
            _ => {}
        }
        let typed = matches!(self.sensor, SensorConfig::AgentTypes { .. });
        if typed != (self.kind == ScenarioKind::Heterogeneous) {
            return Err(invalid(
                "`agent_types` sensors go with (and only with) the heterogeneous scenario",
            ));
        }
        let o = &self.optimizer;
        if o.max_evaluations == 0 {
            return Err(invalid("`optimizer.max_evaluations` must be positive"));
        }
        if o.select == Some(Selection::BlindInfo) && self.kind != ScenarioKind::Heterogeneous {
            return Err(invalid(
                "`optimizer.select: blind_info` needs the heterogeneous scenario",
            ));
        }
        if o.population_size.is_some_and(|l| l < 2) {
            return Err(invalid("`optimizer.population_size` must be at least 2"));
        }
        if !(o.initial_step > 0.0 && o.initial_step.is_finite()) {
            return Err(invalid("`optimizer.initial_step` must be positive"));
        }
        if self.restarts() == 0 {
            return Err(invalid("`optimizer.restarts` must be positive"));
        }
        if !(o.refinement.floor > 0.0 && o.refinement.floor < 1.0) {
            return Err(invalid("`optimizer.refinement.floor` must lie in (0, 1)"));
        }
        let a = &self.analysis;
        if !(a.cluster_tolerance >= 0.0) || !(a.structure_threshold >= 0.0) {
            return Err(invalid("analysis tolerances must be non-negative"));
        }
        let states = self.environment()?.states();
        if let Some(f) = a.focus_state {
            if f == 0 || f > states {
                return Err(invalid(format!(
                    "`analysis.focus_state` {f} outside 1..={states}"
                )));
            }
        }
        // builds every piece once so model-level errors surface here
        self.template()?;
        Ok(())
    }

    pub fn environment(&self) -> Result<EnvironmentSpec> {
        let env = &self.environment;
        let spec = match (env.states, &env.distribution) {
            (None, None) => return Err(invalid("environment needs `states` or `distribution`")),
            (Some(n), None) => EnvironmentSpec::uniform(n)?,
            (states, Some(d)) => {
                if states.is_some_and(|n| n != d.len()) {
                    return Err(invalid(format!(
                        "environment `states` disagrees with a distribution of length {}",
                        d.len()
                    )));
                }
                EnvironmentSpec::new(d.clone())?
            }
        };
        Ok(spec)
    }

    /// Agent types with zero-based regions, in configuration order.
    pub fn agent_types(&self) -> Option<Vec<AgentType>> {
        match &self.sensor {
            SensorConfig::AgentTypes { types, .. } => Some(
                types
                    .iter()
                    .map(|t| {
                        AgentType::new(
                            t.id.clone(),
                            t.region.iter().map(|s| s.wrapping_sub(1)).collect(),
                        )
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn structure(&self) -> Result<PopulationStructure> {
        Ok(match (&self.kind, &self.grid) {
            (ScenarioKind::Grid, Some(g)) => PopulationStructure::grid(g.width, g.height)?,
            _ => PopulationStructure::well_mixed(self.agent_count()?)?,
        })
    }

    /// The population before optimization: uniform codes everywhere.
    pub fn template(&self) -> Result<PopulationModel> {
        let env = self.environment()?;
        let n = self.agent_count()?;
        let structure = self.structure()?;
        let xs = self.output_states;
        let model = match &self.sensor {
            SensorConfig::FactoredSymmetric {
                components,
                epsilon,
            } => {
                let sensor = SensorSpec::factored_symmetric(*components, *epsilon)?;
                if sensor.environment_states() != env.states() {
                    return Err(invalid(format!(
                        "{components} binary components describe {} states, environment has {}",
                        sensor.environment_states(),
                        env.states()
                    )));
                }
                let codes = vec![Code::uniform(sensor.sensor_states(), xs)?; n];
                PopulationModel::homogeneous(env, sensor, codes, structure)?
            }
            SensorConfig::Symmetric { epsilon } => {
                let sensor = SensorSpec::symmetric(env.states(), *epsilon)?;
                let codes = vec![Code::uniform(sensor.sensor_states(), xs)?; n];
                PopulationModel::homogeneous(env, sensor, codes, structure)?
            }
            SensorConfig::AgentTypes {
                types,
                agents_per_type,
            } => {
                if types.iter().any(|t| t.region.contains(&0)) {
                    return Err(invalid("type regions use one-based environment states"));
                }
                let mut agents = Vec::with_capacity(n);
                for t in self.agent_types().unwrap_or_default() {
                    let sensor = type_sensor(&t, &env)?;
                    let code = Code::uniform(sensor.sensor_states(), xs)?;
                    for _ in 0..*agents_per_type {
                        agents.push(Agent {
                            sensor: sensor.clone(),
                            code: code.clone(),
                            agent_type: Some(t.clone()),
                        });
                    }
                }
                debug_assert_eq!(agents.len(), types.len() * agents_per_type);
                PopulationModel::new(env, agents, structure, xs)?
            }
        };
        Ok(model)
    }

    pub fn codec(&self, template: &PopulationModel) -> Result<ParamCodec> {
        Ok(ParamCodec::for_model(
            template,
            self.kind == ScenarioKind::Flexible,
        )?)
    }

    pub fn cma_config(&self, dimension: usize) -> CmaEsConfig {
        let o = &self.optimizer;
        let mut c = CmaEsConfig::new(dimension, self.seed);
        if let Some(l) = o.population_size {
            c.population_size = l;
        }
        c.initial_step = o.initial_step;
        c.max_evaluations = o.max_evaluations;
        c.target_tolerance = o.target_tolerance;
        c.stagnation_generations = o.stagnation_generations;
        c
    }
}
