//! The population model: a shared environment `μ`, per-agent sensors
//! `p(y|μ,θ)`, per-agent codes `p(x|y,θ)` and an interaction structure
//! `p(θ,θ′)` choosing which agent perceives which agent's output.
//!
//! Objectives are evaluated two ways. [`PopulationModel::build_joint`]
//! assembles the full joint over `(Θ, Θ′, μ, Y_Θ, Y_Θ′, X_Θ, X_Θ′)`, which is
//! exact but large. The objective methods instead contract the factorization
//! directly into `p(μ, a, b)` tables in `O(|μ|·(n²·|B| + n·|A|·|B|))` time,
//! which is what the optimizer calls in its inner loop.

use serde::{Deserialize, Serialize};

use crate::infotheory::{
    product_and_normalize, shannon_entropy, ConditionalTable, Factor, JointTable, Variable,
    NORMALIZATION_TOLERANCE,
};
use crate::{Error, Result};

/// Variable names used in the assembled joint.
pub mod vars {
    pub const AGENT: &str = "theta";
    pub const PARTNER: &str = "theta'";
    pub const ENVIRONMENT: &str = "mu";
    pub const SENSOR: &str = "y";
    pub const PARTNER_SENSOR: &str = "y'";
    pub const OUTPUT: &str = "x";
    pub const PARTNER_OUTPUT: &str = "x'";
}

fn check_rows(table: &[f64], row_len: usize, what: &str) -> Result<()> {
    if let Some(bad) = table.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{what}: entry {bad} is negative or not finite"
        )));
    }
    for (r, row) in table.chunks(row_len).enumerate() {
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "{what}: row {r} sums to {total}"
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    distribution: Vec<f64>,
}

impl EnvironmentSpec {
    pub fn new(distribution: Vec<f64>) -> Result<Self> {
        if distribution.is_empty() {
            return Err(Error::InvalidDistribution(
                "environment needs at least one state".into(),
            ));
        }
        check_rows(&distribution, distribution.len(), "environment")?;
        Ok(Self { distribution })
    }

    pub fn uniform(states: usize) -> Result<Self> {
        if states == 0 {
            return Err(Error::InvalidDistribution(
                "environment needs at least one state".into(),
            ));
        }
        Self::new(vec![1.0 / states as f64; states])
    }

    pub fn states(&self) -> usize {
        self.distribution.len()
    }

    pub fn distribution(&self) -> &[f64] {
        &self.distribution
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.distribution)
    }
}

/// A sensor `p(y|μ)`, one row per environment state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    environment_states: usize,
    sensor_states: usize,
    table: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<f64>,
}

impl SensorSpec {
    pub fn new(environment_states: usize, sensor_states: usize, table: Vec<f64>) -> Result<Self> {
        if environment_states == 0 || sensor_states == 0 {
            return Err(Error::InvalidModel(
                "sensor dimensions must be positive".into(),
            ));
        }
        if table.len() != environment_states * sensor_states {
            return Err(Error::LengthMismatch {
                left: environment_states * sensor_states,
                right: table.len(),
            });
        }
        check_rows(&table, sensor_states, "sensor")?;
        Ok(Self {
            environment_states,
            sensor_states,
            table,
            noise: None,
        })
    }

    fn check_noise(epsilon: f64) -> Result<()> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidModel(format!(
                "sensor noise {epsilon} outside [0, 1)"
            )));
        }
        Ok(())
    }

    /// `k`-ary symmetric channel: `1-ε` on the diagonal, `ε/(k-1)` elsewhere.
    pub fn symmetric(states: usize, epsilon: f64) -> Result<Self> {
        Self::check_noise(epsilon)?;
        let off = if states > 1 {
            epsilon / (states - 1) as f64
        } else {
            0.0
        };
        let mut table = vec![off; states * states];
        for s in 0..states {
            table[s * states + s] = if states > 1 { 1.0 - epsilon } else { 1.0 };
        }
        let mut sensor = Self::new(states, states, table)?;
        sensor.noise = Some(epsilon);
        Ok(sensor)
    }

    pub fn binary_symmetric(epsilon: f64) -> Result<Self> {
        Self::symmetric(2, epsilon)
    }

    /// Environment of `2^components` states read as independent bits, each
    /// observed through its own binary symmetric channel with flip
    /// probability `ε`. Sensor states are labelled like environment states.
    pub fn factored_symmetric(components: u32, epsilon: f64) -> Result<Self> {
        Self::check_noise(epsilon)?;
        if components == 0 || components > 16 {
            return Err(Error::InvalidModel(format!(
                "factored sensor needs 1..=16 components, got {components}"
            )));
        }
        let states = 1usize << components;
        let mut table = vec![0.0; states * states];
        for mu in 0..states {
            for y in 0..states {
                let flips = (mu ^ y).count_ones();
                table[mu * states + y] =
                    epsilon.powi(flips as i32) * (1.0 - epsilon).powi((components - flips) as i32);
            }
        }
        let mut sensor = Self::new(states, states, table)?;
        sensor.noise = Some(epsilon);
        Ok(sensor)
    }

    pub fn environment_states(&self) -> usize {
        self.environment_states
    }

    pub fn sensor_states(&self) -> usize {
        self.sensor_states
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn noise(&self) -> Option<f64> {
        self.noise
    }

    pub fn row(&self, mu: usize) -> &[f64] {
        &self.table[mu * self.sensor_states..(mu + 1) * self.sensor_states]
    }

    /// `I(μ;Y)` under the given environment.
    pub fn information(&self, environment: &EnvironmentSpec) -> f64 {
        channel_information(environment.distribution(), &self.table, self.sensor_states)
    }
}

/// `I(μ;Z)` for a channel `p(z|μ)` given row-major.
fn channel_information(prior: &[f64], channel: &[f64], outputs: usize) -> f64 {
    let mut marginal = vec![0.0; outputs];
    let mut joint = Vec::with_capacity(channel.len());
    for (mu, row) in channel.chunks(outputs).enumerate() {
        for (z, &c) in row.iter().enumerate() {
            let p = prior[mu] * c;
            marginal[z] += p;
            joint.push(p);
        }
    }
    (shannon_entropy(prior) + shannon_entropy(&marginal) - shannon_entropy(&joint)).max(0.0)
}

/// An agent's code `p(x|y)`: one row per sensor state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Code {
    sensor_states: usize,
    output_states: usize,
    table: Vec<f64>,
}

impl Code {
    pub fn new(sensor_states: usize, output_states: usize, table: Vec<f64>) -> Result<Self> {
        if sensor_states == 0 || output_states == 0 {
            return Err(Error::InvalidModel(
                "code dimensions must be positive".into(),
            ));
        }
        if table.len() != sensor_states * output_states {
            return Err(Error::LengthMismatch {
                left: sensor_states * output_states,
                right: table.len(),
            });
        }
        check_rows(&table, output_states, "code")?;
        Ok(Self {
            sensor_states,
            output_states,
            table,
        })
    }

    /// Deterministic code sending sensor state `y` to `mapping[y]`.
    pub fn deterministic(mapping: &[usize], output_states: usize) -> Result<Self> {
        let mut table = vec![0.0; mapping.len() * output_states];
        for (y, &x) in mapping.iter().enumerate() {
            if x >= output_states {
                return Err(Error::InvalidModel(format!(
                    "code maps sensor state {y} to output {x} of {output_states}"
                )));
            }
            table[y * output_states + x] = 1.0;
        }
        Self::new(mapping.len(), output_states, table)
    }

    pub fn identity(states: usize) -> Result<Self> {
        Self::deterministic(&(0..states).collect::<Vec<_>>(), states)
    }

    pub fn constant(sensor_states: usize, output_states: usize, symbol: usize) -> Result<Self> {
        Self::deterministic(&vec![symbol; sensor_states], output_states)
    }

    pub fn uniform(sensor_states: usize, output_states: usize) -> Result<Self> {
        Self::new(
            sensor_states,
            output_states,
            vec![1.0 / output_states as f64; sensor_states * output_states],
        )
    }

    pub fn sensor_states(&self) -> usize {
        self.sensor_states
    }

    pub fn output_states(&self) -> usize {
        self.output_states
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.table[y * self.output_states..(y + 1) * self.output_states]
    }

    /// The same code with output symbols relabelled: symbol `x` becomes
    /// `permutation[x]`.
    pub fn relabel_outputs(&self, permutation: &[usize]) -> Result<Self> {
        if permutation.len() != self.output_states {
            return Err(Error::LengthMismatch {
                left: self.output_states,
                right: permutation.len(),
            });
        }
        let mut table = vec![0.0; self.table.len()];
        for y in 0..self.sensor_states {
            for x in 0..self.output_states {
                table[y * self.output_states + permutation[x]] = self.row(y)[x];
            }
        }
        Self::new(self.sensor_states, self.output_states, table)
    }
}

/// A kind of agent that can only tell whether the environment lies inside
/// its region. An empty region is the blind type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentType {
    pub id: String,
    /// Zero-based environment states.
    pub region: Vec<usize>,
}

impl AgentType {
    pub fn new(id: impl Into<String>, region: Vec<usize>) -> Self {
        Self {
            id: id.into(),
            region,
        }
    }

    pub fn is_blind(&self) -> bool {
        self.region.is_empty()
    }
}

/// Binary region sensor for an agent type: `y₁` exactly when `μ` is in the
/// region, `y₂` otherwise. The blind type sees a fair coin for every `μ`.
pub fn type_sensor(agent_type: &AgentType, environment: &EnvironmentSpec) -> Result<SensorSpec> {
    let states = environment.states();
    let mut inside = vec![false; states];
    for &s in &agent_type.region {
        if s >= states {
            return Err(Error::InvalidModel(format!(
                "type `{}` region state {s} outside {states} environment states",
                agent_type.id
            )));
        }
        inside[s] = true;
    }
    if !inside.is_empty() && inside.iter().all(|&b| b) {
        return Err(Error::InvalidModel(format!(
            "type `{}` covers every environment state and cannot distinguish anything",
            agent_type.id
        )));
    }
    let table = if agent_type.is_blind() {
        vec![0.5; states * 2]
    } else {
        inside
            .iter()
            .flat_map(|&b| if b { [1.0, 0.0] } else { [0.0, 1.0] })
            .collect()
    };
    SensorSpec::new(states, 2, table)
}

/// Interaction structure `p(θ,θ′)` over ordered agent pairs, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationStructure {
    agents: usize,
    pair_probabilities: Vec<f64>,
}

impl PopulationStructure {
    pub fn new(agents: usize, pair_probabilities: Vec<f64>) -> Result<Self> {
        if agents == 0 {
            return Err(Error::InvalidModel(
                "structure needs at least one agent".into(),
            ));
        }
        if pair_probabilities.len() != agents * agents {
            return Err(Error::LengthMismatch {
                left: agents * agents,
                right: pair_probabilities.len(),
            });
        }
        check_rows(&pair_probabilities, agents * agents, "structure")?;
        Ok(Self {
            agents,
            pair_probabilities,
        })
    }

    /// Every ordered pair, self-pairs included, with probability `1/n²`.
    pub fn well_mixed(agents: usize) -> Result<Self> {
        if agents == 0 {
            return Err(Error::InvalidModel(
                "structure needs at least one agent".into(),
            ));
        }
        let n2 = agents * agents;
        Self::new(agents, vec![1.0 / n2 as f64; n2])
    }

    /// Agents on a `width × height` grid (row-major ids). Ordered 4-neighbour
    /// pairs and self-pairs share the mass uniformly.
    pub fn grid(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidModel(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        let n = width * height;
        let mut p = vec![0.0; n * n];
        for r in 0..height {
            for c in 0..width {
                let a = r * width + c;
                p[a * n + a] = 1.0;
                if c + 1 < width {
                    p[a * n + a + 1] = 1.0;
                    p[(a + 1) * n + a] = 1.0;
                }
                if r + 1 < height {
                    p[a * n + a + width] = 1.0;
                    p[(a + width) * n + a] = 1.0;
                }
            }
        }
        let support = p.iter().filter(|&&v| v > 0.0).count() as f64;
        for v in &mut p {
            *v /= support;
        }
        Self::new(n, p)
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.pair_probabilities
    }

    pub fn get(&self, agent: usize, partner: usize) -> f64 {
        self.pair_probabilities[agent * self.agents + partner]
    }

    pub fn support_size(&self) -> usize {
        self.pair_probabilities.iter().filter(|&&p| p > 0.0).count()
    }

    /// Marginal `p(θ)` of the perceiving agent.
    pub fn agent_marginal(&self) -> Vec<f64> {
        self.pair_probabilities
            .chunks(self.agents)
            .map(|row| row.iter().sum())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub sensor: SensorSpec,
    pub code: Code,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_type: Option<AgentType>,
}

/// `p(μ, a, b)` flattened row-major, produced by the factorized contraction.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleTable {
    pub environment_states: usize,
    pub left_states: usize,
    pub right_states: usize,
    pub probabilities: Vec<f64>,
}

impl TripleTable {
    pub fn get(&self, mu: usize, a: usize, b: usize) -> f64 {
        self.probabilities[(mu * self.left_states + a) * self.right_states + b]
    }

    /// `p(a, b)`.
    pub fn pair_marginal(&self) -> Vec<f64> {
        let ab = self.left_states * self.right_states;
        let mut out = vec![0.0; ab];
        for block in self.probabilities.chunks(ab) {
            for (o, p) in out.iter_mut().zip(block) {
                *o += p;
            }
        }
        out
    }

    fn environment_marginal(&self) -> Vec<f64> {
        let ab = self.left_states * self.right_states;
        self.probabilities
            .chunks(ab)
            .map(|block| block.iter().sum())
            .collect()
    }

    fn left_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.left_states];
        for (i, p) in self.probabilities.iter().enumerate() {
            out[(i / self.right_states) % self.left_states] += p;
        }
        out
    }

    fn right_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.right_states];
        for (i, p) in self.probabilities.iter().enumerate() {
            out[i % self.right_states] += p;
        }
        out
    }

    /// `I(A;B)`.
    pub fn pair_information(&self) -> f64 {
        (shannon_entropy(&self.left_marginal()) + shannon_entropy(&self.right_marginal())
            - shannon_entropy(&self.pair_marginal()))
        .max(0.0)
    }

    /// `I(μ; A, B)`.
    pub fn environment_information(&self) -> f64 {
        (shannon_entropy(&self.environment_marginal()) + shannon_entropy(&self.pair_marginal())
            - shannon_entropy(&self.probabilities))
        .max(0.0)
    }
}

/// Per-agent channels `p(z|μ,θ)`, each a `|μ| × states` row-major block.
struct Channels<'a> {
    states: usize,
    tables: Vec<std::borrow::Cow<'a, [f64]>>,
}

/// Contracts `Σ_{θ,θ′} p(θ,θ′) p(μ) L_θ[μ,a] R_θ′[μ,b]` into `p(μ,a,b)`.
fn contract(
    environment: &EnvironmentSpec,
    structure: &[f64],
    left: &Channels<'_>,
    right: &Channels<'_>,
) -> TripleTable {
    let n = left.tables.len();
    let (la, rb) = (left.states, right.states);
    let env = environment.distribution();
    let mut out = vec![0.0; env.len() * la * rb];
    let mut partner_sum = vec![0.0; n * rb];
    for (mu, &pmu) in env.iter().enumerate() {
        // partner_sum[θ][b] = Σ_θ′ p(θ,θ′) R_θ′[μ,b]
        partner_sum.iter_mut().for_each(|v| *v = 0.0);
        for theta in 0..n {
            let acc = &mut partner_sum[theta * rb..(theta + 1) * rb];
            for (partner, r) in right.tables.iter().enumerate() {
                let s = structure[theta * n + partner];
                if s == 0.0 {
                    continue;
                }
                for (a, v) in acc.iter_mut().zip(&r[mu * rb..(mu + 1) * rb]) {
                    *a += s * v;
                }
            }
        }
        let block = &mut out[mu * la * rb..(mu + 1) * la * rb];
        for (theta, l) in left.tables.iter().enumerate() {
            let acc = &partner_sum[theta * rb..(theta + 1) * rb];
            for (a, &lv) in l[mu * la..(mu + 1) * la].iter().enumerate() {
                let w = pmu * lv;
                if w == 0.0 {
                    continue;
                }
                for (o, v) in block[a * rb..(a + 1) * rb].iter_mut().zip(acc) {
                    *o += w * v;
                }
            }
        }
    }
    TripleTable {
        environment_states: env.len(),
        left_states: la,
        right_states: rb,
        probabilities: out,
    }
}

/// `p(x|μ) = Σ_y p(y|μ) p(x|y)`.
fn compose(sensor: &SensorSpec, code: &Code) -> Vec<f64> {
    let xs = code.output_states();
    let mut out = vec![0.0; sensor.environment_states() * xs];
    for mu in 0..sensor.environment_states() {
        let row = &mut out[mu * xs..(mu + 1) * xs];
        for (y, &py) in sensor.row(mu).iter().enumerate() {
            if py == 0.0 {
                continue;
            }
            for (o, &px) in row.iter_mut().zip(code.row(y)) {
                *o += py * px;
            }
        }
    }
    out
}

/// Evaluates `I(X_Θ;X_Θ′)` from borrowed parts, without building a model.
/// This is the optimizer's inner loop.
pub fn code_similarity_of(
    environment: &EnvironmentSpec,
    sensors: &[&SensorSpec],
    codes: &[Code],
    structure: &PopulationStructure,
) -> f64 {
    let channels = Channels {
        states: codes.first().map_or(1, Code::output_states),
        tables: sensors
            .iter()
            .zip(codes)
            .map(|(s, c)| compose(s, c).into())
            .collect(),
    };
    contract(environment, structure.probabilities(), &channels, &channels).pair_information()
}

/// The complete population model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationModel {
    environment: EnvironmentSpec,
    agents: Vec<Agent>,
    structure: PopulationStructure,
    output_states: usize,
}

impl PopulationModel {
    pub fn new(
        environment: EnvironmentSpec,
        agents: Vec<Agent>,
        structure: PopulationStructure,
        output_states: usize,
    ) -> Result<Self> {
        let model = Self {
            environment,
            agents,
            structure,
            output_states,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.agents.is_empty() {
            return Err(Error::InvalidModel("population has no agents".into()));
        }
        if self.structure.agents() != self.agents.len() {
            return Err(Error::InvalidModel(format!(
                "structure covers {} agents but the population has {}",
                self.structure.agents(),
                self.agents.len()
            )));
        }
        let sensor_states = self.agents[0].sensor.sensor_states();
        for (i, agent) in self.agents.iter().enumerate() {
            if agent.sensor.environment_states() != self.environment.states() {
                return Err(Error::InvalidModel(format!(
                    "agent {i}: sensor expects {} environment states, environment has {}",
                    agent.sensor.environment_states(),
                    self.environment.states()
                )));
            }
            if agent.sensor.sensor_states() != sensor_states {
                return Err(Error::InvalidModel(format!(
                    "agent {i}: {} sensor states, agent 0 has {sensor_states}",
                    agent.sensor.sensor_states()
                )));
            }
            if agent.code.sensor_states() != sensor_states {
                return Err(Error::InvalidModel(format!(
                    "agent {i}: code reads {} sensor states, sensor has {sensor_states}",
                    agent.code.sensor_states()
                )));
            }
            if agent.code.output_states() != self.output_states {
                return Err(Error::InvalidModel(format!(
                    "agent {i}: code emits {} symbols, population uses {}",
                    agent.code.output_states(),
                    self.output_states
                )));
            }
        }
        Ok(())
    }

    /// Same sensor for every agent, codes given per agent.
    pub fn homogeneous(
        environment: EnvironmentSpec,
        sensor: SensorSpec,
        codes: Vec<Code>,
        structure: PopulationStructure,
    ) -> Result<Self> {
        let output_states = codes
            .first()
            .map(Code::output_states)
            .ok_or_else(|| Error::InvalidModel("population has no agents".into()))?;
        let agents = codes
            .into_iter()
            .map(|code| Agent {
                sensor: sensor.clone(),
                code,
                agent_type: None,
            })
            .collect();
        Self::new(environment, agents, structure, output_states)
    }

    pub fn environment(&self) -> &EnvironmentSpec {
        &self.environment
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn structure(&self) -> &PopulationStructure {
        &self.structure
    }

    pub fn output_states(&self) -> usize {
        self.output_states
    }

    pub fn sensor_states(&self) -> usize {
        self.agents[0].sensor.sensor_states()
    }

    pub fn codes(&self) -> Vec<Code> {
        self.agents.iter().map(|a| a.code.clone()).collect()
    }

    pub fn sensors(&self) -> Vec<&SensorSpec> {
        self.agents.iter().map(|a| &a.sensor).collect()
    }

    pub fn with_codes(&self, codes: Vec<Code>) -> Result<Self> {
        if codes.len() != self.agents.len() {
            return Err(Error::LengthMismatch {
                left: self.agents.len(),
                right: codes.len(),
            });
        }
        let agents = self
            .agents
            .iter()
            .zip(codes)
            .map(|(a, code)| Agent {
                sensor: a.sensor.clone(),
                code,
                agent_type: a.agent_type.clone(),
            })
            .collect();
        Self::new(
            self.environment.clone(),
            agents,
            self.structure.clone(),
            self.output_states,
        )
    }

    pub fn with_structure(&self, structure: PopulationStructure) -> Result<Self> {
        Self::new(
            self.environment.clone(),
            self.agents.clone(),
            structure,
            self.output_states,
        )
    }

    fn check_agent(&self, index: usize) -> Result<&Agent> {
        self.agents.get(index).ok_or(Error::AgentIndex {
            index,
            count: self.agents.len(),
        })
    }

    fn sensor_channels(&self) -> Channels<'_> {
        Channels {
            states: self.sensor_states(),
            tables: self
                .agents
                .iter()
                .map(|a| a.sensor.table().into())
                .collect(),
        }
    }

    fn output_channels(&self) -> Channels<'_> {
        Channels {
            states: self.output_states,
            tables: self
                .agents
                .iter()
                .map(|a| compose(&a.sensor, &a.code).into())
                .collect(),
        }
    }

    /// `p(μ, x, x′)`.
    pub fn output_triple(&self) -> TripleTable {
        let out = self.output_channels();
        contract(
            &self.environment,
            self.structure.probabilities(),
            &out,
            &out,
        )
    }

    /// `I(X_Θ;X_Θ′)`, the code similarity objective.
    pub fn code_similarity(&self) -> f64 {
        self.output_triple().pair_information()
    }

    /// `I(Y_Θ;Y_Θ′)`, the similarity ceiling for agent-independent sensors.
    pub fn similarity_bound(&self) -> f64 {
        let s = self.sensor_channels();
        contract(&self.environment, self.structure.probabilities(), &s, &s).pair_information()
    }

    /// `I(μ; Y_Θ, X_Θ′)`, environmental information available to a
    /// perceiving agent from its own sensor and the perceived output.
    pub fn env_info_pair(&self) -> f64 {
        contract(
            &self.environment,
            self.structure.probabilities(),
            &self.sensor_channels(),
            &self.output_channels(),
        )
        .environment_information()
    }

    /// `I(μ; Y_Θ)`.
    pub fn sensor_info(&self) -> f64 {
        let marginal = self.structure.agent_marginal();
        let ys = self.sensor_states();
        let mut channel = vec![0.0; self.environment.states() * ys];
        for (agent, w) in self.agents.iter().zip(&marginal) {
            for (c, s) in channel.iter_mut().zip(agent.sensor.table()) {
                *c += w * s;
            }
        }
        channel_information(self.environment.distribution(), &channel, ys)
    }

    /// `I(μ; X_Θ′ | Y_Θ)`, the side information gained from perceived outputs.
    pub fn side_information(&self) -> f64 {
        (self.env_info_pair() - self.sensor_info()).max(0.0)
    }

    /// `I(μ; X_Θ, X_Θ′)`: what an observer with no sensor of its own can learn
    /// from the outputs of both agents of a pair.
    pub fn blind_info(&self) -> f64 {
        self.output_triple().environment_information()
    }

    /// `I(μ; Y_θ)` for one agent.
    pub fn agent_env_info(&self, agent: usize) -> Result<f64> {
        let a = self.check_agent(agent)?;
        Ok(a.sensor.information(&self.environment))
    }

    /// `I(μ; X_θ)` for one agent.
    pub fn agent_output_info(&self, agent: usize) -> Result<f64> {
        let a = self.check_agent(agent)?;
        Ok(channel_information(
            self.environment.distribution(),
            &compose(&a.sensor, &a.code),
            self.output_states,
        ))
    }

    /// Assembles the full joint over `(Θ, Θ′, μ, Y_Θ, Y_Θ′, X_Θ, X_Θ′)`,
    /// in that variable order.
    pub fn build_joint(&self) -> Result<JointTable> {
        use vars::*;
        let n = self.agents.len();
        let ms = self.environment.states();
        let ys = self.sensor_states();
        let xs = self.output_states;
        fn v(name: &str, cardinality: usize) -> Result<Variable> {
            Variable::new(name, cardinality)
        }

        let structure = JointTable::new(
            vec![v(AGENT, n)?, v(PARTNER, n)?],
            self.structure.probabilities().to_vec(),
        )?;
        let environment = JointTable::new(
            vec![v(ENVIRONMENT, ms)?],
            self.environment.distribution().to_vec(),
        )?;
        let sensors: Vec<f64> = self
            .agents
            .iter()
            .flat_map(|a| a.sensor.table().iter().copied())
            .collect();
        let codes: Vec<f64> = self
            .agents
            .iter()
            .flat_map(|a| a.code.table().iter().copied())
            .collect();
        let sensor_of = |target: &str, agent: &str| -> Result<Factor> {
            Ok(ConditionalTable::new(
                vec![v(target, ys)?],
                vec![v(agent, n)?, v(ENVIRONMENT, ms)?],
                sensors.clone(),
            )?
            .into())
        };
        let code_of = |target: &str, agent: &str, sensor: &str| -> Result<Factor> {
            Ok(ConditionalTable::new(
                vec![v(target, xs)?],
                vec![v(agent, n)?, v(sensor, ys)?],
                codes.clone(),
            )?
            .into())
        };
        product_and_normalize(&[
            structure.into(),
            environment.into(),
            sensor_of(SENSOR, AGENT)?,
            sensor_of(PARTNER_SENSOR, PARTNER)?,
            code_of(OUTPUT, AGENT, SENSOR)?,
            code_of(PARTNER_OUTPUT, PARTNER, PARTNER_SENSOR)?,
        ])
    }
}
