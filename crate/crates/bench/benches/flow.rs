use criterion::{black_box, criterion_group, criterion_main, Criterion};

use modspace_core::classical::{flow, variational_flow};
use modspace_core::{FlowOptions, Potential};

fn characteristics(c: &mut Criterion) {
    let v = Potential::harmonic_cosine(1);
    let verlet = FlowOptions::default();
    let rk4 = FlowOptions::rk4();
    c.bench_function("flow/verlet_s4", |b| {
        b.iter(|| flow(&v, 0.0, black_box(&[0.7]), &[-0.3], 4.0, &verlet).unwrap())
    });
    c.bench_function("variational/verlet_s4", |b| {
        b.iter(|| variational_flow(&v, 0.0, black_box(&[0.7]), &[-0.3], 4.0, &verlet).unwrap())
    });
    c.bench_function("variational/rk4_s4", |b| {
        b.iter(|| variational_flow(&v, 0.0, black_box(&[0.7]), &[-0.3], 4.0, &rk4).unwrap())
    });
}

criterion_group!(benches, characteristics);
criterion_main!(benches);
