//! Evolutionary optimization of agent codes.

mod cmaes;
mod codec;

pub use cmaes::{
    cma_es_maximize, default_population_size, CmaEsConfig, GenerationRecord, OptimizationTrace,
    StopReason,
};
pub use codec::{softmax, Decoded, ParamCodec, RowDescriptor};

use serde::{Deserialize, Serialize};

use crate::model::{code_similarity_of, PopulationModel};
use crate::{Error, Execution, Result};

/// Warm restarts from a tempered copy of the best candidate.
///
/// Softmax rows that saturate early sit on plateaus the search cannot
/// leave, so a run may stagnate with a few agents holding a stray symbol.
/// Each round restarts CMA-ES (fresh covariance, `initial_step`, a derived
/// seed) at [`ParamCodec::tempered`] of the best parameters so far. Rounds
/// stop once one fails to improve by `target_tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Refinement {
    pub rounds: usize,
    pub floor: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            rounds: 2,
            floor: 1e-2,
        }
    }
}

impl Refinement {
    pub fn none() -> Self {
        Self {
            rounds: 0,
            ..Self::default()
        }
    }
}

/// Result of one optimization run.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioOutcome {
    /// Population decoded from the best candidate of the first generation.
    pub initial: PopulationModel,
    /// Population decoded from the best candidate overall.
    pub model: PopulationModel,
    pub trace: OptimizationTrace,
    pub seed: u64,
}

/// Maximizes code similarity over the codec's parameters, starting from the
/// template's sensors, environment and (unless the codec frees it) structure.
pub fn optimize_scenario(
    template: &PopulationModel,
    codec: &ParamCodec,
    config: &CmaEsConfig,
) -> Result<ScenarioOutcome> {
    if codec.dimension() != config.dimension {
        return Err(Error::InvalidConfig(format!(
            "codec dimension {} differs from optimizer dimension {}",
            codec.dimension(),
            config.dimension
        )));
    }
    // fails early on a layout mismatch
    codec.apply(template, &vec![0.0; codec.dimension()])?;

    let sensors = template.sensors();
    let objective = |params: &[f64]| -> f64 {
        let Ok(decoded) = codec.decode(params) else {
            return f64::NAN;
        };
        let structure = decoded.structure.as_ref().unwrap_or(template.structure());
        code_similarity_of(template.environment(), &sensors, &decoded.codes, structure)
    };
    let trace = cma_es_maximize(objective, config)?;
    Ok(ScenarioOutcome {
        initial: codec.apply(template, &trace.initial_parameters)?,
        model: codec.apply(template, &trace.best_parameters)?,
        trace,
        seed: config.seed,
    })
}

/// [`optimize_scenario`] followed by the rounds of `refinement`. The trace
/// concatenates all rounds; generation and evaluation counters continue
/// across them and the per-round budget is `config.max_evaluations`.
pub fn optimize_refined(
    template: &PopulationModel,
    codec: &ParamCodec,
    config: &CmaEsConfig,
    refinement: &Refinement,
) -> Result<ScenarioOutcome> {
    let mut outcome = optimize_scenario(template, codec, config)?;
    for round in 0..refinement.rounds {
        let mut c = config.clone();
        c.initial_mean = Some(codec.tempered(&outcome.trace.best_parameters, refinement.floor)?);
        c.seed = restart_seed(!config.seed, round);
        let next = optimize_scenario(template, codec, &c)?;
        let improved = next.trace.best_value - outcome.trace.best_value >= config.target_tolerance;
        append_trace(&mut outcome.trace, next.trace);
        if !improved {
            break;
        }
    }
    outcome.model = codec.apply(template, &outcome.trace.best_parameters)?;
    Ok(outcome)
}

fn append_trace(trace: &mut OptimizationTrace, next: OptimizationTrace) {
    let generation = trace.generations.len();
    let evaluations = trace.evaluations;
    let mut best = trace.best_value;
    for mut g in next.generations {
        g.generation += generation;
        g.evaluations += evaluations;
        best = best.max(g.best);
        g.best = best;
        trace.generations.push(g);
    }
    if next.best_value > trace.best_value {
        trace.best_value = next.best_value;
        trace.best_parameters = next.best_parameters;
    }
    trace.evaluations += next.evaluations;
    trace.stop_reason = next.stop_reason;
}

/// Seed of restart `index`, derived from the base seed with SplitMix64 so
/// neighbouring base seeds do not share restart streams.
pub fn restart_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `restarts` independent refined optimizations, one seeded stream
/// each. Outcomes are returned in restart order.
pub fn optimize_restarts(
    template: &PopulationModel,
    codec: &ParamCodec,
    config: &CmaEsConfig,
    refinement: &Refinement,
    restarts: usize,
    execution: Execution,
) -> Result<Vec<ScenarioOutcome>> {
    if restarts == 0 {
        return Err(Error::InvalidConfig(
            "at least one restart is required".into(),
        ));
    }
    execution
        .map_range(restarts, |r| {
            let mut c = config.clone();
            c.seed = restart_seed(config.seed, r);
            optimize_refined(template, codec, &c, refinement)
        })
        .into_iter()
        .collect()
}

/// Index of the outcome with the highest final code similarity; ties go to
/// the earliest restart.
pub fn best_outcome(outcomes: &[ScenarioOutcome]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if best.is_none_or(|b| o.trace.best_value > outcomes[b].trace.best_value) {
            best = Some(i);
        }
    }
    best
}
