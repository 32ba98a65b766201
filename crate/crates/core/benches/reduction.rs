use std::hint::black_box;
use std::time::Duration;

use conley::bench::{prepare, Preset};
use conley::reduce::{conmat, connectmat, ReduceOptions};
use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};

fn reductions(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduction");
    group
        .sample_size(10)
        .measurement_time(Duration::from_secs(5));
    let opts = ReduceOptions {
        check_input: false,
        ..ReduceOptions::default()
    };
    for preset in [Preset::Annulus, Preset::V7, Preset::V1] {
        let instance = preset.build(None).unwrap();
        let a = prepare(&instance).unwrap().matrix;
        group.bench_with_input(BenchmarkId::new("conmat", preset), &a, |b, a| {
            b.iter_batched(
                || a.clone(),
                |m| black_box(conmat(m, &opts).unwrap()),
                BatchSize::LargeInput,
            )
        });
        group.bench_with_input(BenchmarkId::new("connectmat", preset), &a, |b, a| {
            b.iter_batched(
                || a.clone(),
                |m| black_box(connectmat(m, &opts).unwrap()),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, reductions);
criterion_main!(benches);
