use criterion::{black_box, criterion_group, criterion_main, Criterion};

use nashdual_core::infconv::{infconv_value, projected_solve, truncation_h};
use nashdual_core::sharp::build_weighted_optimizer;
use nashdual_core::verify::{run_battery, BatterySpec, Family};
use nashdual_core::{neumann_mu1, newton_potential, VariantChoice};

fn eigen(c: &mut Criterion) {
    c.bench_function("neumann_mu1 n=3", |b| b.iter(|| neumann_mu1(black_box(3)).unwrap()));
    c.bench_function("weighted optimizer n=3", |b| {
        b.iter(|| build_weighted_optimizer(3, VariantChoice::Auto).unwrap())
    });
}

fn potential(c: &mut Criterion) {
    let g = Family::Bump.profile(3, 0.0, 4096).unwrap();
    c.bench_function("newton_potential m=4096", |b| b.iter(|| newton_potential(black_box(&g)).unwrap()));
}

fn infconv(c: &mut Criterion) {
    let g = Family::Gaussian { sigma: 1.0 }.profile(3, 0.0, 2048).unwrap();
    c.bench_function("truncation_h m=2048", |b| b.iter(|| truncation_h(&g, black_box(0.5), 0.0).unwrap()));
    c.bench_function("projected_solve m=2048", |b| {
        b.iter(|| projected_solve(&g, black_box(0.5), 0.0, 1e-10).unwrap())
    });
    c.bench_function("infconv_value gaussian n=3", |b| b.iter(|| infconv_value(black_box(&g), 0.0).unwrap()));
}

fn battery(c: &mut Criterion) {
    let mut group = c.benchmark_group("battery");
    group.sample_size(10);
    group.bench_function("dims 1,3,4", |b| {
        b.iter(|| run_battery(&BatterySpec::standard(vec![1, 3, 4], 0.0)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eigen, potential, infconv, battery);
criterion_main!(benches);
