use criterion::{criterion_group, criterion_main, Criterion};
use hpalab::config::ExperimentConfig;
use hpalab::experiment::{execute, execute_matrix};
use hpalab::sim::simulate;
use hpalab::AutoscalerKind;

fn scenarios(c: &mut Criterion) {
    let single = ExperimentConfig::single(5, 50.0).scenarios().unwrap().remove(0);
    let mut group = c.benchmark_group("scenario");
    group.sample_size(20);
    for kind in AutoscalerKind::ALL {
        group.bench_function(format!("simulate_5R-50%_{kind}"), |b| {
            b.iter(|| simulate(&single, kind, 0).unwrap())
        });
    }
    group.bench_function("execute_with_kb_5R-50%_smart", |b| {
        b.iter(|| execute(&single, AutoscalerKind::Smart, 0).unwrap())
    });
    group.finish();

    let matrix = ExperimentConfig::default_matrix().scenarios().unwrap();
    let mut group = c.benchmark_group("matrix");
    group.sample_size(10);
    group.bench_function("default_matrix_both", |b| {
        b.iter(|| execute_matrix(&matrix, &AutoscalerKind::ALL, 0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, scenarios);
criterion_main!(benches);
