use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hpalab::arm::{self, ArmOptions};
use hpalab::kb::NullRecorder;
use hpalab_bench::pressured_app;

fn balancer(c: &mut Criterion) {
    let mut group = c.benchmark_group("arm_run");
    for n in [11usize, 50, 200] {
        let (verdicts, specs) = pressured_app(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| arm::run(black_box(&verdicts), &specs, ArmOptions::default(), &NullRecorder).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, balancer);
criterion_main!(benches);
