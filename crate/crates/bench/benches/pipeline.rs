use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hinev_core::eval::auc;
use hinev_core::synth::{generate, RandomSpec, SynthSpec, Template};
use hinev_core::{
    build_incident_matrices, generate_events, object_embeddings, train, AnchorRule, TrainConfig,
};
use std::hint::black_box;

fn network(events: usize) -> hinev_core::synth::SynthData {
    let spec = RandomSpec {
        events,
        communities: 8,
        authors_per_community: 40,
        terms_per_community: 30,
        ..Default::default()
    };
    generate(&SynthSpec {
        template: Template::Random(spec),
        seed: 1,
    })
}

fn events(c: &mut Criterion) {
    let mut g = c.benchmark_group("events");
    for n in [500, 5000] {
        let d = network(n);
        let rule = AnchorRule::new("paper");
        g.bench_with_input(BenchmarkId::new("generate", n), &d, |b, d| {
            b.iter(|| generate_events(black_box(&d.hin), &rule).unwrap())
        });
        let ev = generate_events(&d.hin, &rule).unwrap();
        g.bench_with_input(BenchmarkId::new("incidence", n), &ev, |b, ev| {
            b.iter(|| build_incident_matrices(black_box(ev), &d.hin))
        });
    }
    g.finish();
}

fn training(c: &mut Criterion) {
    let mut g = c.benchmark_group("train_epoch");
    g.sample_size(10);
    for n in [200, 1000] {
        let d = network(n);
        let ev = generate_events(&d.hin, &AnchorRule::new("paper")).unwrap();
        let m = build_incident_matrices(&ev, &d.hin);
        let cfg = TrainConfig {
            epochs: 1,
            ..Default::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| train(black_box(m), &cfg).unwrap())
        });
    }
    g.finish();
}

fn embeddings_and_metrics(c: &mut Criterion) {
    let d = network(2000);
    let ev = generate_events(&d.hin, &AnchorRule::new("paper")).unwrap();
    let m = build_incident_matrices(&ev, &d.hin);
    let model = train(
        &m,
        &TrainConfig {
            epochs: 0,
            ..Default::default()
        },
    )
    .unwrap();
    c.bench_function("object_embeddings/2000", |b| {
        b.iter(|| object_embeddings(black_box(&model.embeddings), &m).unwrap())
    });
    let pos: Vec<f64> = (0..10_000).map(|i| ((i * 7919) % 1000) as f64).collect();
    let neg: Vec<f64> = (0..10_000).map(|i| ((i * 104_729) % 900) as f64).collect();
    c.bench_function("auc/10000x10000", |b| {
        b.iter(|| auc(black_box(&pos), &neg).unwrap())
    });
}

criterion_group!(benches, events, training, embeddings_and_metrics);
criterion_main!(benches);
