use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigUint;
use parworks::bounds::{f13_bound, gowers_w_bound, grzegorczyk_e, hj_bound, ramsey_r_bound};
use parworks::{BoundConfig, WValue};

fn bounds(c: &mut Criterion) {
    let cfg = BoundConfig::default();
    c.bench_function("e2/20", |b| {
        b.iter(|| grzegorczyk_e(2, &[BigUint::from(black_box(20u32))], &cfg).unwrap())
    });
    c.bench_function("e3/2", |b| b.iter(|| grzegorczyk_e(3, &[BigUint::from(black_box(2u32))], &cfg).unwrap()));
    c.bench_function("gowers/2/3", |b| b.iter(|| gowers_w_bound(black_box(2), 3).unwrap()));
    c.bench_function("ramsey/6/3/2", |b| b.iter(|| ramsey_r_bound(black_box(6), 3, 2, &cfg).unwrap()));
    c.bench_function("f13/3/2/2", |b| b.iter(|| f13_bound(black_box(3), 2, 2, &cfg).unwrap()));
    c.bench_function("hj/1/3/2", |b| {
        b.iter(|| hj_bound(black_box(1), 3, 2, Some(WValue::Exact(9)), &cfg).unwrap())
    });
}

criterion_group!(benches, bounds);
criterion_main!(benches);
