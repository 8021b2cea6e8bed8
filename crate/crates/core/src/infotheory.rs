//! Dense joint distributions over named discrete variables and the
//! information measures computed on them.
//!
//! All logarithms are base 2, so every quantity is in bits. Probabilities at
//! or below [`ZERO_PROBABILITY`] are treated as exact zeros inside logarithms,
//! which makes `0 · log 0 = 0` hold even for deterministic tables.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Probabilities at or below this are exact zeros in log computations.
pub const ZERO_PROBABILITY: f64 = 1e-15;

/// Tolerance on the total mass of a table or a conditional row.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// `-p log2 p`, with the zero convention.
#[inline]
pub(crate) fn neg_plogp(p: f64) -> f64 {
    if p > ZERO_PROBABILITY {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits of a flat probability vector. Rounding can push
/// a near-certain entry just past 1, so the sum is clamped at zero.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .map(|&p| neg_plogp(p))
        .sum::<f64>()
        .max(0.0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    name: String,
    cardinality: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Variable {
    pub fn new(name: impl Into<String>, cardinality: usize) -> Result<Self> {
        let name = name.into();
        if cardinality == 0 {
            return Err(Error::InvalidVariable(format!(
                "`{name}` has cardinality 0"
            )));
        }
        Ok(Self {
            name,
            cardinality,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.cardinality {
            return Err(Error::InvalidVariable(format!(
                "`{}` has {} labels for cardinality {}",
                self.name,
                labels.len(),
                self.cardinality
            )));
        }
        let unique: HashSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(Error::InvalidVariable(format!(
                "`{}` has duplicate labels",
                self.name
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

fn check_unique_names(variables: &[Variable]) -> Result<()> {
    let mut seen = HashSet::new();
    for v in variables {
        if !seen.insert(v.name()) {
            return Err(Error::InvalidVariable(format!(
                "`{}` appears twice in one table",
                v.name()
            )));
        }
    }
    Ok(())
}

fn check_entries(values: &[f64]) -> Result<()> {
    if let Some(bad) = values.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "entry {bad} is negative or not finite"
        )));
    }
    Ok(())
}

/// Row-major strides, last variable fastest.
fn strides(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * cards[i + 1];
    }
    strides
}

/// A dense probability table over an ordered list of variables.
///
/// Entries are stored row-major with the last variable varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    variables: Vec<Variable>,
    probabilities: Vec<f64>,
}

impl JointTable {
    pub fn new(variables: Vec<Variable>, probabilities: Vec<f64>) -> Result<Self> {
        check_unique_names(&variables)?;
        let size: usize = variables.iter().map(Variable::cardinality).product();
        if size != probabilities.len() {
            return Err(Error::LengthMismatch {
                left: size,
                right: probabilities.len(),
            });
        }
        check_entries(&probabilities)?;
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "joint table sums to {total}"
            )));
        }
        Ok(Self {
            variables,
            probabilities,
        })
    }

    pub fn uniform(variables: Vec<Variable>) -> Result<Self> {
        let size: usize = variables.iter().map(Variable::cardinality).product();
        Self::new(variables, vec![1.0 / size as f64; size])
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn variable_names(&self) -> Vec<&str> {
        self.variables.iter().map(Variable::name).collect()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Probability of one outcome tuple, given in variable order.
    pub fn get(&self, outcome: &[usize]) -> f64 {
        let cards: Vec<usize> = self.variables.iter().map(Variable::cardinality).collect();
        let idx: usize = strides(&cards)
            .iter()
            .zip(outcome)
            .map(|(s, o)| s * o)
            .sum();
        self.probabilities[idx]
    }

    /// Sums out every variable not in `keep`. The result keeps the table's
    /// variable order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointTable> {
        let mut positions = Vec::with_capacity(keep.len());
        for name in keep {
            positions.push(self.position(name)?);
        }
        positions.sort_unstable();
        positions.dedup();

        let cards: Vec<usize> = self.variables.iter().map(Variable::cardinality).collect();
        let out_cards: Vec<usize> = positions.iter().map(|&p| cards[p]).collect();
        let out_strides = strides(&out_cards);
        // stride in the output for each input variable, 0 when summed out
        let mut map_strides = vec![0usize; cards.len()];
        for (k, &p) in positions.iter().enumerate() {
            map_strides[p] = out_strides[k];
        }

        let out_size: usize = out_cards.iter().product();
        let mut out = vec![0.0; out_size];
        let mut digits = vec![0usize; cards.len()];
        let mut target = 0usize;
        for &p in &self.probabilities {
            out[target] += p;
            // odometer increment, updating the output index incrementally
            for d in (0..cards.len()).rev() {
                digits[d] += 1;
                target += map_strides[d];
                if digits[d] < cards[d] {
                    break;
                }
                target -= map_strides[d] * cards[d];
                digits[d] = 0;
            }
        }

        Ok(JointTable {
            variables: positions
                .iter()
                .map(|&p| self.variables[p].clone())
                .collect(),
            probabilities: out,
        })
    }
}

/// A conditional distribution `p(targets | conditions)`.
///
/// Rows are indexed by the condition tuple (row-major); each row is a
/// distribution over target tuples (row-major).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalTable {
    targets: Vec<Variable>,
    conditions: Vec<Variable>,
    rows: Vec<f64>,
}

impl ConditionalTable {
    pub fn new(targets: Vec<Variable>, conditions: Vec<Variable>, rows: Vec<f64>) -> Result<Self> {
        let mut all = targets.clone();
        all.extend(conditions.iter().cloned());
        check_unique_names(&all)?;
        if targets.is_empty() {
            return Err(Error::EmptyVariableSet);
        }
        let row_len: usize = targets.iter().map(Variable::cardinality).product();
        let row_count: usize = conditions.iter().map(Variable::cardinality).product();
        if rows.len() != row_len * row_count {
            return Err(Error::LengthMismatch {
                left: row_len * row_count,
                right: rows.len(),
            });
        }
        check_entries(&rows)?;
        for (r, row) in rows.chunks(row_len).enumerate() {
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::InvalidDistribution(format!(
                    "conditional row {r} sums to {total}"
                )));
            }
        }
        Ok(Self {
            targets,
            conditions,
            rows,
        })
    }

    pub fn targets(&self) -> &[Variable] {
        &self.targets
    }

    pub fn conditions(&self) -> &[Variable] {
        &self.conditions
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn row_len(&self) -> usize {
        self.targets.iter().map(Variable::cardinality).product()
    }

    pub fn row(&self, condition_index: usize) -> &[f64] {
        let len = self.row_len();
        &self.rows[condition_index * len..(condition_index + 1) * len]
    }
}

/// One factor of a directed factorization.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Joint(JointTable),
    Conditional(ConditionalTable),
}

impl From<JointTable> for Factor {
    fn from(t: JointTable) -> Self {
        Factor::Joint(t)
    }
}

impl From<ConditionalTable> for Factor {
    fn from(t: ConditionalTable) -> Self {
        Factor::Conditional(t)
    }
}

impl Factor {
    fn targets(&self) -> &[Variable] {
        match self {
            Factor::Joint(t) => &t.variables,
            Factor::Conditional(t) => &t.targets,
        }
    }

    fn conditions(&self) -> &[Variable] {
        match self {
            Factor::Joint(_) => &[],
            Factor::Conditional(t) => &t.conditions,
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            Factor::Joint(t) => &t.probabilities,
            Factor::Conditional(t) => &t.rows,
        }
    }
}

/// Multiplies the factors of a directed factorization into one joint table.
///
/// Each variable must be the target of exactly one factor; conditions must
/// be defined by some factor and the dependency graph must be acyclic. The
/// result's variables follow the order in which factors introduce them.
pub fn product_and_normalize(factors: &[Factor]) -> Result<JointTable> {
    let mut variables: Vec<Variable> = Vec::new();
    let mut position: HashMap<String, usize> = HashMap::new();
    let mut owner: HashMap<String, usize> = HashMap::new();
    for (f, factor) in factors.iter().enumerate() {
        for v in factor.targets() {
            if owner.insert(v.name().to_string(), f).is_some() {
                return Err(Error::DuplicateTarget(v.name().to_string()));
            }
            position.insert(v.name().to_string(), variables.len());
            variables.push(v.clone());
        }
    }
    if variables.is_empty() {
        return Err(Error::EmptyVariableSet);
    }
    for factor in factors {
        for v in factor.conditions() {
            let &p = position
                .get(v.name())
                .ok_or_else(|| Error::UndefinedCondition(v.name().to_string()))?;
            if variables[p].cardinality() != v.cardinality() {
                return Err(Error::CardinalityMismatch {
                    name: v.name().to_string(),
                    expected: variables[p].cardinality(),
                    found: v.cardinality(),
                });
            }
        }
    }
    check_acyclic(factors, &owner)?;

    let cards: Vec<usize> = variables.iter().map(Variable::cardinality).collect();
    // For each factor, the stride of every joint variable inside the factor's
    // flat value array (conditions are the outer index, targets the inner).
    let factor_strides: Vec<Vec<usize>> = factors
        .iter()
        .map(|factor| {
            let target_cards: Vec<usize> =
                factor.targets().iter().map(Variable::cardinality).collect();
            let cond_cards: Vec<usize> = factor
                .conditions()
                .iter()
                .map(Variable::cardinality)
                .collect();
            let row_len: usize = target_cards.iter().product();
            let ts = strides(&target_cards);
            let cs = strides(&cond_cards);
            let mut out = vec![0usize; variables.len()];
            for (k, v) in factor.targets().iter().enumerate() {
                out[position[v.name()]] = ts[k];
            }
            for (k, v) in factor.conditions().iter().enumerate() {
                out[position[v.name()]] = cs[k] * row_len;
            }
            out
        })
        .collect();

    let size: usize = cards.iter().product();
    let mut probabilities = Vec::with_capacity(size);
    let mut digits = vec![0usize; cards.len()];
    let mut offsets = vec![0usize; factors.len()];
    for _ in 0..size {
        let mut p = 1.0;
        for (f, factor) in factors.iter().enumerate() {
            p *= factor.values()[offsets[f]];
        }
        probabilities.push(p);
        for d in (0..cards.len()).rev() {
            digits[d] += 1;
            for (f, fs) in factor_strides.iter().enumerate() {
                offsets[f] += fs[d];
            }
            if digits[d] < cards[d] {
                break;
            }
            for (f, fs) in factor_strides.iter().enumerate() {
                offsets[f] -= fs[d] * cards[d];
            }
            digits[d] = 0;
        }
    }

    let total: f64 = probabilities.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidDistribution(
            "factor product has zero total mass".into(),
        ));
    }
    for p in &mut probabilities {
        *p /= total;
    }
    Ok(JointTable {
        variables,
        probabilities,
    })
}

fn check_acyclic(factors: &[Factor], owner: &HashMap<String, usize>) -> Result<()> {
    // 0 = unvisited, 1 = on stack, 2 = done
    fn visit(
        f: usize,
        factors: &[Factor],
        owner: &HashMap<String, usize>,
        state: &mut [u8],
    ) -> Result<()> {
        state[f] = 1;
        for c in factors[f].conditions() {
            let g = owner[c.name()];
            match state[g] {
                1 => return Err(Error::CyclicFactorization(c.name().to_string())),
                0 => visit(g, factors, owner, state)?,
                _ => {}
            }
        }
        state[f] = 2;
        Ok(())
    }
    let mut state = vec![0u8; factors.len()];
    for f in 0..factors.len() {
        if state[f] == 0 {
            visit(f, factors, owner, &mut state)?;
        }
    }
    Ok(())
}

/// Shannon entropy in bits of the marginal on `over`.
pub fn entropy(joint: &JointTable, over: &[&str]) -> Result<f64> {
    if over.is_empty() {
        return Err(Error::EmptyVariableSet);
    }
    Ok(shannon_entropy(joint.marginalize(over)?.probabilities()))
}

fn check_disjoint(sets: &[&[&str]]) -> Result<()> {
    let mut seen = HashSet::new();
    for set in sets {
        for name in set.iter() {
            if !seen.insert(*name) {
                return Err(Error::OverlappingSets(name.to_string()));
            }
        }
    }
    Ok(())
}

/// `I(A;B) = H(A) + H(B) - H(A,B)`, clamped at zero.
pub fn mutual_information(joint: &JointTable, a: &[&str], b: &[&str]) -> Result<f64> {
    check_disjoint(&[a, b])?;
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    let mi = entropy(joint, a)? + entropy(joint, b)? - entropy(joint, &ab)?;
    Ok(mi.max(0.0))
}

/// `I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)`, clamped at zero.
/// An empty `given` reduces to [`mutual_information`].
pub fn conditional_mutual_information(
    joint: &JointTable,
    a: &[&str],
    b: &[&str],
    given: &[&str],
) -> Result<f64> {
    check_disjoint(&[a, b, given])?;
    if given.is_empty() {
        return mutual_information(joint, a, b);
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyVariableSet);
    }
    let ac: Vec<&str> = a.iter().chain(given).copied().collect();
    let bc: Vec<&str> = b.iter().chain(given).copied().collect();
    let abc: Vec<&str> = a.iter().chain(b).chain(given).copied().collect();
    let cmi = entropy(joint, &ac)? + entropy(joint, &bc)?
        - entropy(joint, &abc)?
        - entropy(joint, given)?;
    Ok(cmi.max(0.0))
}

/// Kullback-Leibler divergence `D(p||q)` in bits.
///
/// Fails when `q` vanishes somewhere `p` does not.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut d = 0.0;
    for (index, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi <= ZERO_PROBABILITY {
            continue;
        }
        if qi <= ZERO_PROBABILITY {
            return Err(Error::AbsoluteContinuity { index });
        }
        d += pi * (pi / qi).log2();
    }
    Ok(d.max(0.0))
}

/// Jensen-Shannon divergence in bits; lies in `[0, 1]`.
pub fn jensen_shannon_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    // Term-wise mixture form. Exact-zero checks suffice because each term is
    // bounded by its own mass, and no cancellation occurs for p close to q.
    let half_kl = |a: f64, b: f64| {
        if a > 0.0 {
            a * (2.0 * a / (a + b)).log2()
        } else {
            0.0
        }
    };
    let js: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| 0.5 * (half_kl(a, b) + half_kl(b, a)))
        .sum();
    Ok(js.clamp(0.0, 1.0))
}
