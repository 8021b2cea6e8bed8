//! (μ/μ_w, λ)-CMA-ES maximizer with rank-based weighted recombination,
//! cumulative step-size adaptation and rank-one plus rank-μ covariance
//! updates. Defaults follow Hansen's standard parameter settings.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Execution, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmaEsConfig {
    pub dimension: usize,
    /// λ, candidates per generation.
    pub population_size: usize,
    /// σ₀.
    pub initial_step: f64,
    pub max_evaluations: usize,
    /// Minimum best-so-far improvement over `stagnation_generations`.
    pub target_tolerance: f64,
    pub stagnation_generations: usize,
    pub seed: u64,
    /// Starting mean; the origin when absent.
    #[serde(default)]
    pub initial_mean: Option<Vec<f64>>,
    #[serde(default)]
    pub execution: Execution,
}

impl CmaEsConfig {
    pub fn new(dimension: usize, seed: u64) -> Self {
        Self {
            dimension,
            population_size: default_population_size(dimension),
            initial_step: 0.3,
            max_evaluations: 100_000,
            target_tolerance: 1e-9,
            stagnation_generations: 200,
            seed,
            initial_mean: None,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidConfig(
                "CMA-ES dimension must be positive".into(),
            ));
        }
        if self.population_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "population size {} < 2",
                self.population_size
            )));
        }
        if !(self.initial_step > 0.0) || !self.initial_step.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "initial step {} must be positive",
                self.initial_step
            )));
        }
        if let Some(m) = &self.initial_mean {
            if m.len() != self.dimension {
                return Err(Error::LengthMismatch {
                    left: self.dimension,
                    right: m.len(),
                });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig("initial mean must be finite".into()));
            }
        }
        Ok(())
    }
}

/// `4 + ⌊3 ln d⌋`.
pub fn default_population_size(dimension: usize) -> usize {
    4 + (3.0 * (dimension.max(1) as f64).ln()).floor() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub evaluations: usize,
    /// Best value seen so far.
    pub best: f64,
    /// Best value within this generation.
    pub generation_best: f64,
    /// Mean value over this generation's candidates.
    pub mean: f64,
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxEvaluations,
    Stagnation,
    StepCollapse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub generations: Vec<GenerationRecord>,
    pub best_parameters: Vec<f64>,
    pub best_value: f64,
    /// Best candidate of the first generation.
    pub initial_parameters: Vec<f64>,
    pub initial_value: f64,
    pub evaluations: usize,
    pub stop_reason: StopReason,
}

struct Parameters {
    mu: usize,
    weights: Vec<f64>,
    mueff: f64,
    cc: f64,
    cs: f64,
    c1: f64,
    cmu: f64,
    damps: f64,
    chi_n: f64,
}

impl Parameters {
    fn new(n: usize, lambda: usize) -> Self {
        let nf = n as f64;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mueff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let cc = (4.0 + mueff / nf) / (nf + 4.0 + 2.0 * mueff / nf);
        let cs = (mueff + 2.0) / (nf + mueff + 5.0);
        let c1 = 2.0 / ((nf + 1.3).powi(2) + mueff);
        let cmu = (1.0 - c1).min(2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nf + 2.0).powi(2) + mueff));
        let damps = 1.0 + 2.0 * (((mueff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        Self {
            mu,
            weights,
            mueff,
            cc,
            cs,
            c1,
            cmu,
            damps,
            chi_n,
        }
    }
}

/// Maximizes `objective` from mean 0 with step `σ₀`.
///
/// Candidates of a generation are sampled serially from one seeded
/// generator, then evaluated (in parallel when configured) and collected in
/// sampling order, so the run is bit-reproducible for a given seed
/// regardless of execution mode.
pub fn cma_es_maximize<F>(objective: F, config: &CmaEsConfig) -> Result<OptimizationTrace>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    config.validate()?;
    let n = config.dimension;
    let lambda = config.population_size;
    let p = Parameters::new(n, lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut mean = match &config.initial_mean {
        Some(m) => DVector::from_column_slice(m),
        None => DVector::<f64>::zeros(n),
    };
    let mut sigma = config.initial_step;
    let mut cov = DMatrix::<f64>::identity(n, n);
    let mut basis = DMatrix::<f64>::identity(n, n);
    let mut scales = DVector::<f64>::from_element(n, 1.0);
    let mut inv_sqrt = DMatrix::<f64>::identity(n, n);
    let mut path_c = DVector::<f64>::zeros(n);
    let mut path_s = DVector::<f64>::zeros(n);
    let eigen_interval = ((1.0 / ((p.c1 + p.cmu) * n as f64 * 10.0)).floor() as usize).max(1);
    let mut last_eigen = 0usize;

    let mut generations = Vec::new();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_parameters = vec![0.0; n];
    let mut initial: Option<(Vec<f64>, f64)> = None;
    let mut evaluations = 0usize;
    let mut generation = 0usize;
    let stop_reason;

    loop {
        // sample
        let mut steps: Vec<DVector<f64>> = Vec::with_capacity(lambda);
        for _ in 0..lambda {
            let z = DVector::<f64>::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            steps.push(&basis * z.component_mul(&scales));
        }
        let candidates: Vec<Vec<f64>> = steps
            .iter()
            .map(|y| (&mean + y * sigma).as_slice().to_vec())
            .collect();
        let values = config.execution.map(&candidates, |x| objective(x));
        evaluations += lambda;

        for (x, &v) in candidates.iter().zip(&values) {
            if !v.is_finite() {
                return Err(Error::NonFiniteObjective {
                    value: v,
                    params: x.clone(),
                });
            }
        }

        let mut order: Vec<usize> = (0..lambda).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let top = order[0];
        if values[top] > best_value {
            best_value = values[top];
            best_parameters.clone_from(&candidates[top]);
        }
        if initial.is_none() {
            initial = Some((candidates[top].clone(), values[top]));
        }
        generations.push(GenerationRecord {
            generation,
            evaluations,
            best: best_value,
            generation_best: values[top],
            mean: values.iter().sum::<f64>() / lambda as f64,
            sigma,
        });

        // recombination
        let mut y_w = DVector::<f64>::zeros(n);
        for (w, &i) in p.weights.iter().zip(&order[..p.mu]) {
            y_w.axpy(*w, &steps[i], 1.0);
        }
        mean.axpy(sigma, &y_w, 1.0);

        // step-size path
        let cs_norm = (p.cs * (2.0 - p.cs) * p.mueff).sqrt();
        path_s = path_s * (1.0 - p.cs) + (&inv_sqrt * &y_w) * cs_norm;
        let ps_norm = path_s.norm();
        let gen_f = (generation + 1) as f64;
        let hsig = ps_norm / (1.0 - (1.0 - p.cs).powf(2.0 * gen_f)).sqrt() / p.chi_n
            < 1.4 + 2.0 / (n as f64 + 1.0);
        let hsig_f = if hsig { 1.0 } else { 0.0 };

        // covariance path and update
        let cc_norm = (p.cc * (2.0 - p.cc) * p.mueff).sqrt();
        path_c = path_c * (1.0 - p.cc) + &y_w * (hsig_f * cc_norm);
        let old_weight = 1.0 - p.c1 - p.cmu + (1.0 - hsig_f) * p.c1 * p.cc * (2.0 - p.cc);
        cov *= old_weight;
        cov.ger(p.c1, &path_c, &path_c, 1.0);
        for (w, &i) in p.weights.iter().zip(&order[..p.mu]) {
            cov.ger(p.cmu * w, &steps[i], &steps[i], 1.0);
        }

        sigma *= ((p.cs / p.damps) * (ps_norm / p.chi_n - 1.0)).exp();
        generation += 1;

        if generation - last_eigen >= eigen_interval {
            last_eigen = generation;
            cov = (&cov + cov.transpose()) * 0.5;
            let eigen = SymmetricEigen::new(cov.clone());
            basis = eigen.eigenvectors;
            scales = eigen.eigenvalues.map(|l| l.max(1e-300).sqrt());
            let inv = scales.map(|d| 1.0 / d);
            inv_sqrt = &basis * DMatrix::from_diagonal(&inv) * basis.transpose();
        }

        if evaluations + lambda > config.max_evaluations {
            stop_reason = StopReason::MaxEvaluations;
            break;
        }
        let window = config.stagnation_generations;
        if window > 0 && generations.len() > window {
            let then = generations[generations.len() - 1 - window].best;
            if best_value - then < config.target_tolerance {
                stop_reason = StopReason::Stagnation;
                break;
            }
        }
        let spread = sigma * scales.max();
        if !spread.is_finite() || spread < 1e-15 {
            stop_reason = StopReason::StepCollapse;
            break;
        }
    }

    let (initial_parameters, initial_value) = initial.expect("at least one generation runs");
    Ok(OptimizationTrace {
        generations,
        best_parameters,
        best_value,
        initial_parameters,
        initial_value,
        evaluations,
        stop_reason,
    })
}
