use codevo::analysis::{
    concept_table, connected_components, distance_matrix, group_codes, structure_graph,
};
use codevo::model::{Code, PopulationModel};
use codevo::optim::{ScenarioOutcome, StopReason};
use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub seed: u64,
    pub initial_value: f64,
    pub best_value: f64,
    pub generations: usize,
    pub evaluations: usize,
    pub stop_reason: StopReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blind_info: Option<f64>,
}

impl RestartSummary {
    pub fn new(index: usize, outcome: &ScenarioOutcome, with_blind_info: bool) -> Self {
        Self {
            index,
            seed: outcome.seed,
            initial_value: outcome.trace.initial_value,
            best_value: outcome.trace.best_value,
            generations: outcome.trace.generations.len(),
            evaluations: outcome.trace.evaluations,
            stop_reason: outcome.trace.stop_reason,
            blind_info: with_blind_info.then(|| outcome.model.blind_info()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub members: Vec<usize>,
    pub count: usize,
    /// Representative rows all above 0.999 with distinct argmax columns.
    pub one_to_one: bool,
    /// Argmax output of each sensor state in the representative.
    pub mapping: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureSummary {
    pub threshold: f64,
    pub links: usize,
    pub self_loops: usize,
    pub components: Vec<Vec<usize>>,
    /// Largest code distance inside any component of two or more agents.
    pub max_component_distance: f64,
}

/// Best posterior any output pair assigns to the configured focus state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocusPosterior {
    /// One-based, as in the configuration.
    pub state: usize,
    pub output: usize,
    pub partner_output: usize,
    pub posterior: f64,
}

/// Information-theoretic and structural summary of one population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub initial_code_similarity: f64,
    pub final_code_similarity: f64,
    pub similarity_bound: f64,
    pub env_info_pair: f64,
    pub sensor_info: f64,
    pub side_information: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blind_info: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus_posterior: Option<FocusPosterior>,
    pub agent_output_info: Vec<f64>,
    pub max_code_distance: f64,
    pub clusters: Vec<ClusterSummary>,
    pub structure: StructureSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub restarts: Vec<RestartSummary>,
    pub best_restart: usize,
    /// Objective evaluations summed over all restarts.
    pub evaluations: usize,
    #[serde(flatten)]
    pub metrics: Metrics,
    /// File names written next to this report.
    pub artifacts: Vec<String>,
}

/// Output of `analyze`: the metrics of a saved population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config: ScenarioConfig,
    #[serde(flatten)]
    pub metrics: Metrics,
    pub artifacts: Vec<String>,
}

pub fn is_one_to_one(code: &Code) -> bool {
    let mapping = argmax_mapping(code);
    let mut seen = vec![false; code.output_states()];
    (0..code.sensor_states()).all(|y| code.row(y)[mapping[y]] > 0.999)
        && mapping
            .iter()
            .all(|&x| !std::mem::replace(&mut seen[x], true))
}

pub fn argmax_mapping(code: &Code) -> Vec<usize> {
    (0..code.sensor_states())
        .map(|y| {
            code.row(y)
                .iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (x, &p)| if p > acc.1 { (x, p) } else { acc },
                )
                .0
        })
        .collect()
}

pub fn compute_metrics(
    config: &ScenarioConfig,
    initial: &PopulationModel,
    model: &PopulationModel,
) -> Result<Metrics> {
    let codes = model.codes();
    let distances = distance_matrix(&codes)?;
    let clusters = group_codes(&codes, config.analysis.cluster_tolerance)?
        .into_iter()
        .map(|c| ClusterSummary {
            one_to_one: is_one_to_one(&c.representative),
            mapping: argmax_mapping(&c.representative),
            members: c.members,
            count: c.count,
        })
        .collect();
    let graph = structure_graph(model.structure(), config.analysis.structure_threshold);
    let components = connected_components(&graph);
    let max_component_distance = components
        .iter()
        .filter(|c| c.len() > 1)
        .flat_map(|c| c.iter().flat_map(move |&i| c.iter().map(move |&j| (i, j))))
        .map(|(i, j)| distances.get(i, j))
        .fold(0.0, f64::max);
    let focus_posterior = config.analysis.focus_state.and_then(|state| {
        let table = concept_table(model);
        table
            .best_posterior_for(state - 1)
            .map(|(row, p)| FocusPosterior {
                state,
                output: row.output,
                partner_output: row.partner_output,
                posterior: p,
            })
    });
    Ok(Metrics {
        initial_code_similarity: initial.code_similarity(),
        final_code_similarity: model.code_similarity(),
        similarity_bound: model.similarity_bound(),
        env_info_pair: model.env_info_pair(),
        sensor_info: model.sensor_info(),
        side_information: model.side_information(),
        blind_info: (config.kind == ScenarioKind::Heterogeneous).then(|| model.blind_info()),
        focus_posterior,
        agent_output_info: (0..model.agents().len())
            .map(|i| model.agent_output_info(i))
            .collect::<codevo::Result<_>>()?,
        max_code_distance: distances.values().iter().copied().fold(0.0, f64::max),
        clusters,
        structure: StructureSummary {
            threshold: config.analysis.structure_threshold,
            links: graph.links(),
            self_loops: graph.self_loops(),
            components,
            max_component_distance,
        },
    })
}
