use criterion::{criterion_group, criterion_main, Criterion};

use uamcas::batch::{run_batch, run_batch_sequential};
use uamcas::scenario::default_pack;

fn batch(c: &mut Criterion) {
    let pack = default_pack();
    let mut g = c.benchmark_group("default_pack");
    g.sample_size(10);
    g.bench_function("sequential", |b| b.iter(|| run_batch_sequential(&pack.scenarios, None).unwrap()));
    // Without the `parallel` feature this is the same sequential loop.
    g.bench_function("rayon", |b| b.iter(|| run_batch(&pack.scenarios, None).unwrap()));
    g.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
