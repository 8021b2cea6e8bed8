use serde::{Deserialize, Serialize};

use crate::infotheory::ZERO_PROBABILITY;
use crate::model::PopulationModel;

/// What a pair of perceived outputs says about the environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConceptRow {
    /// Output of the perceiving agent.
    pub output: usize,
    /// Output of the perceived agent.
    pub partner_output: usize,
    /// `p(x, x′)`.
    pub marginal: f64,
    /// `p(μ | x, x′)`.
    pub posterior: Vec<f64>,
}

impl ConceptRow {
    /// The most probable environment state and its posterior.
    pub fn mode(&self) -> (usize, f64) {
        self.posterior
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, p)| if p > acc.1 { (i, p) } else { acc },
            )
    }
}

/// Posterior over the environment for every output pair that occurs.
/// Pairs with zero probability have no row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConceptTable {
    pub environment_states: usize,
    pub output_states: usize,
    pub rows: Vec<ConceptRow>,
}

impl ConceptTable {
    pub fn get(&self, output: usize, partner_output: usize) -> Option<&ConceptRow> {
        self.rows
            .iter()
            .find(|r| r.output == output && r.partner_output == partner_output)
    }

    pub fn total_marginal(&self) -> f64 {
        self.rows.iter().map(|r| r.marginal).sum()
    }

    /// Highest posterior any present pair assigns to `state`.
    pub fn best_posterior_for(&self, state: usize) -> Option<(&ConceptRow, f64)> {
        self.rows
            .iter()
            .map(|r| (r, r.posterior[state]))
            .fold(None, |acc, (r, p)| match acc {
                Some((_, q)) if q >= p => acc,
                _ => Some((r, p)),
            })
    }
}

pub fn concept_table(model: &PopulationModel) -> ConceptTable {
    let triple = model.output_triple();
    let (ms, xs) = (triple.environment_states, model.output_states());
    let mut rows = Vec::new();
    for x in 0..xs {
        for xp in 0..xs {
            let joint: Vec<f64> = (0..ms).map(|mu| triple.get(mu, x, xp)).collect();
            let marginal: f64 = joint.iter().sum();
            if marginal <= ZERO_PROBABILITY {
                continue;
            }
            rows.push(ConceptRow {
                output: x,
                partner_output: xp,
                marginal,
                posterior: joint.iter().map(|p| p / marginal).collect(),
            });
        }
    }
    ConceptTable {
        environment_states: ms,
        output_states: xs,
        rows,
    }
}
