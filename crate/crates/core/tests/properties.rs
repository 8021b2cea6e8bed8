//! Randomized checks of the information measures, the model assembly and the
//! analysis helpers. Each property runs 1000 cases.

use codevo::analysis::{classical_mds, code_distance, DistanceMatrix};
use codevo::infotheory::{conditional_mutual_information, entropy, mutual_information};
use codevo::model::vars::*;
use codevo::model::{
    Agent, Code, EnvironmentSpec, PopulationModel, PopulationStructure, SensorSpec,
};
use codevo::optim::ParamCodec;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 1000,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Raw weights with a good chance of exact zeros, normalized per row. An
/// all-zero row becomes uniform.
fn rows(raw: &[f64], row_len: usize) -> Vec<f64> {
    raw.chunks(row_len)
        .flat_map(|chunk| {
            let kept: Vec<f64> = chunk
                .iter()
                .map(|&v| if v < 0.2 { 0.0 } else { v })
                .collect();
            let total: f64 = kept.iter().sum();
            if total > 0.0 {
                kept.iter().map(|v| v / total).collect::<Vec<_>>()
            } else {
                vec![1.0 / row_len as f64; row_len]
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
struct Shape {
    agents: usize,
    env: usize,
    ys: usize,
    xs: usize,
    homogeneous: bool,
    product: bool,
}

/// With `independent`, every agent shares one sensor and `p(θ,θ′)` is a
/// product of marginals.
fn shape(independent: bool) -> impl Strategy<Value = Shape> {
    (
        1..=3usize,
        2..=3usize,
        2..=3usize,
        2..=3usize,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(move |(agents, env, ys, xs, homogeneous, product)| Shape {
            agents,
            env,
            ys,
            xs,
            homogeneous: homogeneous || independent,
            product: product || independent,
        })
}

fn model_from(shape: &Shape, raw: &[f64]) -> PopulationModel {
    let Shape {
        agents: n,
        env,
        ys,
        xs,
        ..
    } = *shape;
    let mut it = raw.iter().copied();
    let mut take = |k: usize| -> Vec<f64> { (&mut it).take(k).collect() };
    // environment rows never get zeroed completely: keep every state alive
    let environment = EnvironmentSpec::new(rows(
        &take(env).iter().map(|v| v + 0.2).collect::<Vec<_>>(),
        env,
    ))
    .unwrap();
    let shared = SensorSpec::new(env, ys, rows(&take(env * ys), ys)).unwrap();
    let mut agents = Vec::with_capacity(n);
    for _ in 0..n {
        let sensor = if shape.homogeneous {
            shared.clone()
        } else {
            SensorSpec::new(env, ys, rows(&take(env * ys), ys)).unwrap()
        };
        let code = Code::new(ys, xs, rows(&take(ys * xs), xs)).unwrap();
        agents.push(Agent {
            sensor,
            code,
            agent_type: None,
        });
    }
    let pairs = if shape.product {
        let a = rows(&take(n).iter().map(|v| v + 0.2).collect::<Vec<_>>(), n);
        let b = rows(&take(n).iter().map(|v| v + 0.2).collect::<Vec<_>>(), n);
        a.iter()
            .flat_map(|p| b.iter().map(move |q| p * q))
            .collect()
    } else {
        let mut p = take(n * n);
        // at least one pair must carry mass
        p[0] += 0.5;
        rows(&p, n * n)
    };
    let structure = PopulationStructure::new(n, pairs).unwrap();
    PopulationModel::new(environment, agents, structure, xs).unwrap()
}

fn random_model() -> impl Strategy<Value = (Shape, PopulationModel)> {
    models(false)
}

fn models(independent: bool) -> impl Strategy<Value = (Shape, PopulationModel)> {
    shape(independent).prop_flat_map(|s| {
        let len = s.env
            + s.env * s.ys * (s.agents + 1)
            + s.agents * s.ys * s.xs
            + s.agents * s.agents
            + 2 * s.agents;
        proptest::collection::vec(0.0..1.0f64, len)
            .prop_map(move |raw| (s.clone(), model_from(&s, &raw)))
    })
}

fn random_code(ys: usize, xs: usize) -> impl Strategy<Value = Code> {
    proptest::collection::vec(0.0..1.0f64, ys * xs)
        .prop_map(move |raw| Code::new(ys, xs, rows(&raw, xs)).unwrap())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn information_identities_hold((_shape, model) in random_model()) {
        let joint = model.build_joint().unwrap();
        let i_pair = mutual_information(&joint, &[ENVIRONMENT], &[SENSOR, PARTNER_OUTPUT]).unwrap();
        let i_sensor = mutual_information(&joint, &[ENVIRONMENT], &[SENSOR]).unwrap();
        let side = conditional_mutual_information(&joint, &[ENVIRONMENT], &[PARTNER_OUTPUT], &[SENSOR]).unwrap();
        // chain rule
        prop_assert!((i_pair - (i_sensor + side)).abs() < TOL, "{i_pair} vs {i_sensor} + {side}");
        let h_joint = entropy(&joint, &[ENVIRONMENT, SENSOR]).unwrap();
        let h_y = entropy(&joint, &[SENSOR]).unwrap();
        let h_mu = entropy(&joint, &[ENVIRONMENT]).unwrap();
        prop_assert!((h_mu + h_y - h_joint - i_sensor).abs() < TOL);
        // nonnegativity and the basic ceilings
        for v in [i_pair, i_sensor, side, h_joint, h_y, h_mu] {
            prop_assert!(v >= 0.0, "{:?}", [i_pair, i_sensor, side, h_joint, h_y, h_mu]);
        }
        prop_assert!(i_sensor <= h_mu.min(h_y) + TOL);
        // data processing: X_Θ is produced from (Y_Θ, Θ) alone
        let i_out = mutual_information(&joint, &[ENVIRONMENT], &[OUTPUT]).unwrap();
        let i_in = mutual_information(&joint, &[ENVIRONMENT], &[SENSOR, AGENT]).unwrap();
        prop_assert!(i_out <= i_in + TOL, "{i_out} > {i_in}");
        let sim = mutual_information(&joint, &[OUTPUT], &[PARTNER_OUTPUT]).unwrap();
        let sim_in = mutual_information(&joint, &[SENSOR, AGENT], &[PARTNER_SENSOR, PARTNER]).unwrap();
        prop_assert!(sim <= sim_in + TOL);
    }

    #[test]
    fn factorized_objectives_match_the_assembled_joint((_shape, model) in random_model()) {
        let joint = model.build_joint().unwrap();
        let pairs = [
            (model.code_similarity(), mutual_information(&joint, &[OUTPUT], &[PARTNER_OUTPUT]).unwrap()),
            (model.similarity_bound(), mutual_information(&joint, &[SENSOR], &[PARTNER_SENSOR]).unwrap()),
            (model.env_info_pair(), mutual_information(&joint, &[ENVIRONMENT], &[SENSOR, PARTNER_OUTPUT]).unwrap()),
            (model.blind_info(), mutual_information(&joint, &[ENVIRONMENT], &[OUTPUT, PARTNER_OUTPUT]).unwrap()),
            (model.sensor_info(), mutual_information(&joint, &[ENVIRONMENT], &[SENSOR]).unwrap()),
        ];
        for (fast, slow) in pairs {
            prop_assert!((fast - slow).abs() < TOL, "{fast} vs {slow}");
        }
    }

    #[test]
    fn joint_marginals_are_consistent((shape, model) in random_model()) {
        let joint = model.build_joint().unwrap();
        let total: f64 = joint.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < TOL);
        let env = joint.marginalize(&[ENVIRONMENT]).unwrap();
        for (a, b) in env.probabilities().iter().zip(model.environment().distribution()) {
            prop_assert!((a - b).abs() < TOL);
        }
        let pairs = joint.marginalize(&[AGENT, PARTNER]).unwrap();
        for (a, b) in pairs.probabilities().iter().zip(model.structure().probabilities()) {
            prop_assert!((a - b).abs() < TOL);
        }
        let triple = joint.marginalize(&[ENVIRONMENT, OUTPUT, PARTNER_OUTPUT]).unwrap();
        let fast = model.output_triple();
        prop_assert_eq!(triple.probabilities().len(), fast.probabilities.len());
        for (a, b) in triple.probabilities().iter().zip(&fast.probabilities) {
            prop_assert!((a - b).abs() < TOL);
        }
        // sensor given environment, for the perceiving agent
        let theta_mu_y = joint.marginalize(&[AGENT, ENVIRONMENT, SENSOR]).unwrap();
        let marginal = model.structure().agent_marginal();
        for (t, w) in marginal.iter().enumerate() {
            for mu in 0..shape.env {
                for y in 0..shape.ys {
                    let expected = w * model.environment().distribution()[mu] * model.agents()[t].sensor.row(mu)[y];
                    prop_assert!((theta_mu_y.get(&[t, mu, y]) - expected).abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn similarity_respects_the_bound_for_independent_pairs((_shape, model) in models(true)) {
        prop_assert!(model.code_similarity() <= model.similarity_bound() + TOL);
    }

    #[test]
    fn objectives_ignore_labels((shape, model) in random_model(), seed in any::<u64>()) {
        // one output relabelling shared by all agents
        let mut perm: Vec<usize> = (0..shape.xs).collect();
        perm.rotate_left((seed % shape.xs as u64) as usize);
        let relabelled = model
            .with_codes(model.codes().iter().map(|c| c.relabel_outputs(&perm).unwrap()).collect())
            .unwrap();
        // reversed agent order, structure permuted to match
        let n = shape.agents;
        let agents: Vec<Agent> = model.agents().iter().rev().cloned().collect();
        let pairs = (0..n * n)
            .map(|k| model.structure().get(n - 1 - k / n, n - 1 - k % n))
            .collect();
        let reordered = PopulationModel::new(
            model.environment().clone(),
            agents,
            PopulationStructure::new(n, pairs).unwrap(),
            shape.xs,
        )
        .unwrap();
        for other in [&relabelled, &reordered] {
            prop_assert!((model.code_similarity() - other.code_similarity()).abs() < TOL);
            prop_assert!((model.blind_info() - other.blind_info()).abs() < TOL);
            prop_assert!((model.env_info_pair() - other.env_info_pair()).abs() < TOL);
            prop_assert!((model.similarity_bound() - other.similarity_bound()).abs() < TOL);
        }
    }

    #[test]
    fn code_distance_is_a_metric(
        (a, b, c) in (1..=4usize, 2..=4usize).prop_flat_map(|(ys, xs)| {
            (random_code(ys, xs), random_code(ys, xs), random_code(ys, xs))
        })
    ) {
        let d = |p: &Code, q: &Code| code_distance(p, q).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() < 1e-12);
        prop_assert!(d(&a, &b) >= 0.0 && d(&a, &b) <= 1.0);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + TOL);
        prop_assert!(d(&b, &c) <= d(&b, &a) + d(&a, &c) + TOL);
        prop_assert!(d(&a, &b) <= d(&a, &c) + d(&c, &b) + TOL);
    }

    #[test]
    fn mds_recovers_planar_configurations(
        points in proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 2..12)
    ) {
        let n = points.len();
        let dist = |i: usize, j: usize, p: &[(f64, f64)]| {
            ((p[i].0 - p[j].0).powi(2) + (p[i].1 - p[j].1).powi(2)).sqrt()
        };
        let values: Vec<f64> = (0..n * n).map(|k| dist(k / n, k % n, &points)).collect();
        let labels = (0..n).map(|i| i.to_string()).collect();
        let d = DistanceMatrix::new(labels, values).unwrap();
        let coords = classical_mds(&d, 2);
        let embedded: Vec<(f64, f64)> = coords
            .iter()
            .map(|c| (c.first().copied().unwrap_or(0.0), c.get(1).copied().unwrap_or(0.0)))
            .collect();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((dist(i, j, &embedded) - d.get(i, j)).abs() < TOL);
            }
        }
    }

    #[test]
    fn codec_decodes_every_vector(
        (agents, ys, xs, free) in (1..=3usize, 1..=3usize, 1..=4usize, any::<bool>()),
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let codec = ParamCodec::new(agents, ys, xs).unwrap();
        let codec = if free { codec.with_free_structure() } else { codec };
        let template = PopulationModel::homogeneous(
            EnvironmentSpec::uniform(2).unwrap(),
            SensorSpec::new(2, ys, vec![1.0 / ys as f64; 2 * ys]).unwrap(),
            vec![Code::uniform(ys, xs).unwrap(); agents],
            PopulationStructure::well_mixed(agents).unwrap(),
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // 100 vectors per case, 10⁵ in total, across very different scales
        for k in 0..100 {
            let scale = [1e-3, 1.0, 30.0, 1e3, 1e300][k % 5];
            let params: Vec<f64> = (0..codec.dimension())
                .map(|_| scale * rng.random_range(-1.0..1.0))
                .collect();
            let model = codec.apply(&template, &params).unwrap();
            for code in model.codes() {
                for y in 0..ys {
                    let total: f64 = code.row(y).iter().sum();
                    prop_assert!((total - 1.0).abs() < 1e-12);
                }
            }
            let total: f64 = model.structure().probabilities().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(model.code_similarity().is_finite());
        }
    }
}
