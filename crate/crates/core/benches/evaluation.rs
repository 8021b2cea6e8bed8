use std::hint::black_box;

use codevo::model::{
    code_similarity_of, Code, EnvironmentSpec, PopulationModel, PopulationStructure, SensorSpec,
};
use codevo::optim::{cma_es_maximize, CmaEsConfig, ParamCodec};
use codevo::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn template(agents: usize) -> PopulationModel {
    PopulationModel::homogeneous(
        EnvironmentSpec::uniform(4).unwrap(),
        SensorSpec::factored_symmetric(2, 0.01).unwrap(),
        vec![Code::uniform(4, 4).unwrap(); agents],
        PopulationStructure::well_mixed(agents).unwrap(),
    )
    .unwrap()
}

/// One generation's worth of candidate evaluations.
fn population_evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("population_evaluation");
    for agents in [5, 25] {
        let model = template(agents);
        let codec = ParamCodec::for_model(&model, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let candidates: Vec<Vec<f64>> = (0..64)
            .map(|_| {
                (0..codec.dimension())
                    .map(|_| rng.random_range(-3.0..3.0))
                    .collect()
            })
            .collect();
        let sensors = model.sensors();
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, agents), &candidates, |b, cands| {
                b.iter(|| {
                    mode.map(cands, |p| {
                        let codes = codec.decode_codes(p).unwrap();
                        code_similarity_of(model.environment(), &sensors, &codes, model.structure())
                    })
                })
            });
        }
    }
    group.finish();
}

/// A short optimization, strategy updates included.
fn short_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("cma_es_short_run");
    group.sample_size(10);
    let model = template(8);
    let codec = ParamCodec::for_model(&model, false).unwrap();
    let sensors = model.sensors();
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                let mut config = CmaEsConfig::new(codec.dimension(), 3);
                config.max_evaluations = 2_000;
                config.execution = mode;
                let trace = cma_es_maximize(
                    |p| {
                        let codes = codec.decode_codes(p).unwrap();
                        code_similarity_of(model.environment(), &sensors, &codes, model.structure())
                    },
                    &config,
                )
                .unwrap();
                black_box(trace.best_value)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, population_evaluation, short_run);
criterion_main!(benches);
