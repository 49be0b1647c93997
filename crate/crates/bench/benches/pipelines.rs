// SPDX-License-Identifier: Apache-2.0

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use spherekit::curvature::profile_of_curve;
use spherekit::estimator::{estimate_profile, EstimatorOptions};
use spherekit::intrinsic::verify_natural_isometry;
use spherekit::reconstruct::{
    random_well_conditioned_map, round_trip, tingley_check, TingleyOptions,
};
use spherekit::{CurveOracle, NaturalCurve};
use spherekit_bench::{l4, l4_curve, l4_profile};

fn natural_curve(c: &mut Criterion) {
    let norm = l4();
    c.bench_function("natural curve l4", |b| {
        b.iter(|| NaturalCurve::build(black_box(&norm)).unwrap())
    });
}

fn curvature(c: &mut Criterion) {
    let curve = l4_curve();
    let mut group = c.benchmark_group("curvature profile l4");
    group.sample_size(20);
    for grid in [512usize, 4096] {
        group.bench_with_input(BenchmarkId::from_parameter(grid), &grid, |b, &g| {
            b.iter(|| profile_of_curve(&curve, g).unwrap())
        });
    }
    group.finish();
}

fn estimator(c: &mut Criterion) {
    let oracle = CurveOracle::new(l4_curve());
    let opts = EstimatorOptions::default();
    let mut group = c.benchmark_group("estimator");
    group.sample_size(10);
    group.bench_function("l4 1024", |b| {
        b.iter(|| estimate_profile(&oracle, &opts).unwrap())
    });
    group.finish();
}

fn reconstruct(c: &mut Criterion) {
    let curve = l4_curve();
    let profile = l4_profile(4096);
    let l = curve.half_length();
    let mut group = c.benchmark_group("reconstruct");
    group.sample_size(10);
    group.bench_function("round trip 1e-4 L", |b| {
        b.iter(|| round_trip(&curve, &profile, 1e-4 * l).unwrap())
    });
    let x = l4();
    let a = random_well_conditioned_map(1, 3.0);
    let y = x.linear_image(a).unwrap();
    let (e1, e2) = (a * x.basis().e1, a * x.basis().e2);
    group.bench_function("tingley l4", |b| {
        b.iter(|| tingley_check(&x, &y, e1, e2, &TingleyOptions::default()).unwrap())
    });
    group.finish();
}

fn intrinsic(c: &mut Criterion) {
    let curve = l4_curve();
    let l = curve.half_length();
    c.bench_function("intrinsic level 6", |b| {
        b.iter(|| verify_natural_isometry(&curve, 0.1, 0.1 + 0.8 * l, 6).unwrap())
    });
}

criterion_group!(
    benches,
    natural_curve,
    curvature,
    estimator,
    reconstruct,
    intrinsic
);
criterion_main!(benches);
