use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use quasivar::{
    certify_geometry, dj_apply, first_eigenpair, gradient_representative, j_value,
    mountain_pass_search, seeded_test_pair, EigenOptions, Grid, ModelFunctions, MountainPassParams,
};
use quasivar_bench::{cfg_a, cfg_b};

fn energy(c: &mut Criterion) {
    let grid = Grid::new(2, 129).unwrap();
    let mf = ModelFunctions::new(cfg_a());
    let (x, d) = seeded_test_pair(&grid, 0);
    c.bench_function("j_value 2d n129", |b| {
        b.iter(|| j_value(black_box(&x), &mf).unwrap())
    });
    c.bench_function("dj_apply 2d n129", |b| {
        b.iter(|| dj_apply(black_box(&x), black_box(&d), &mf).unwrap())
    });
    c.bench_function("riesz gradient 2d n129", |b| {
        b.iter(|| gradient_representative(black_box(&x), &mf).unwrap())
    });
}

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigen");
    group.sample_size(10);
    let grid = Grid::new(2, 129).unwrap();
    group.bench_function("p=2 2d n129", |b| {
        b.iter(|| first_eigenpair(2.0, &grid, &EigenOptions::default()).unwrap())
    });
    let grid = Grid::new(1, 1025).unwrap();
    group.bench_function("p=1.5 1d n1025", |b| {
        b.iter(|| first_eigenpair(1.5, &grid, &EigenOptions::default()).unwrap())
    });
    group.finish();
}

fn mountain_pass(c: &mut Criterion) {
    let mut group = c.benchmark_group("mountain_pass");
    group.sample_size(10);
    let grid = Grid::new(1, 257).unwrap();
    let mf = ModelFunctions::new(cfg_b());
    let eig = first_eigenpair(2.0, &grid, &EigenOptions::default()).unwrap();
    let cert = certify_geometry(&mf, &eig, 0.1, 256, 0).unwrap();
    group.bench_function("cubic 1d n257", |b| {
        b.iter(|| mountain_pass_search(&mf, &cert, &MountainPassParams::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, energy, eigen, mountain_pass);
criterion_main!(benches);
