use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use frobenius_forge::calculus::EvalPoint;
use frobenius_forge::frame::frame_rates;
use frobenius_forge::genus1::G0Context;
use frobenius_forge::model::builtin_catalog;
use frobenius_forge::verify::{run_suite, SuiteSpec};
use frobenius_forge::{canonical_frame, phi, FrameOptions};

fn frames(c: &mut Criterion) {
    let line = builtin_catalog("P1", 5).unwrap();
    let plane = builtin_catalog("P2", 5).unwrap();
    let p_line = EvalPoint::from_real(&[0.1, -0.2]);
    let p_plane = EvalPoint::from_real(&[0.1, -0.2, 0.05]);
    let opts = FrameOptions::default();

    c.bench_function("canonical_frame/P1", |b| {
        b.iter(|| canonical_frame(black_box(&line), black_box(&p_line), &opts).unwrap())
    });
    c.bench_function("canonical_frame/P2", |b| {
        b.iter(|| canonical_frame(black_box(&plane), black_box(&p_plane), &opts).unwrap())
    });

    let f = canonical_frame(&plane, &p_plane, &opts).unwrap();
    c.bench_function("phi/P2", |b| b.iter(|| phi(black_box(&f))));
    c.bench_function("frame_rates/P2", |b| {
        b.iter(|| frame_rates(&plane, &f, &f.idempotent(0), 1e-5).unwrap())
    });
    c.bench_function("g0_context/P2", |b| b.iter(|| G0Context::new(&plane, &f.point).unwrap()));
}

fn suites(c: &mut Criterion) {
    let plane = builtin_catalog("P2", 5).unwrap();
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for name in ["frame-core", "rotation-derivatives", "virasoro"] {
        let spec = SuiteSpec::new(name, &plane).unwrap();
        group.bench_function(name, |b| b.iter(|| run_suite(&plane, &spec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, frames, suites);
criterion_main!(benches);
