use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use fuzzy_effort::evaluation::{threshold_sweep, SweepConfig};
use fuzzy_effort::induction::{effort_schema, fuzzify_training_set, grow_tree};
use fuzzy_effort::{train_effort_model, GrowthConfig, InferenceMode};
use fuzzy_effort_bench::{split_normalized, synthetic};

fn growth(c: &mut Criterion) {
    let (train, _, _) = split_normalized();
    let mut g = c.benchmark_group("grow_tree");
    g.throughput(Throughput::Elements(train.len() as u64));
    for k in [11, 16] {
        for t in [0.4, 0.9] {
            let cfg = GrowthConfig {
                fuzziness_threshold: t,
                effort_classes: k,
                ..Default::default()
            };
            let schema = effort_schema(&cfg).unwrap();
            let examples = fuzzify_training_set(&train, &schema).unwrap();
            g.bench_with_input(BenchmarkId::new(format!("k{k}"), t), &examples, |b, ex| {
                b.iter(|| grow_tree(black_box(ex), &schema, &cfg).unwrap())
            });
        }
    }
    g.finish();
}

fn prediction(c: &mut Criterion) {
    let (train, test, params) = split_normalized();
    let cfg = GrowthConfig {
        fuzziness_threshold: 0.9,
        ..Default::default()
    };
    let model = train_effort_model(&train, params, &cfg).unwrap();
    let mut g = c.benchmark_group("predict");
    g.throughput(Throughput::Elements(test.len() as u64));
    for mode in [InferenceMode::SetBased, InferenceMode::ExemplarBased] {
        g.bench_function(mode.to_string(), |b| {
            b.iter(|| {
                for r in &test {
                    black_box(model.predict_normalized(&r.features, r.platform, mode).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let ds = synthetic();
    let cfg = SweepConfig::default();
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function("default_18_cells", |b| {
        b.iter(|| threshold_sweep(black_box(&ds), &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, growth, prediction, sweep);
criterion_main!(benches);
