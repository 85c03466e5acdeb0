use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zspiral::curvature::curvature_profile;
use zspiral::jensen::{count_zeros_box, jensen_mean, AnalyticTargetId, BoxRegion, ContourOptions, JensenOptions};
use zspiral::{eval_zeta_jet, eval_zeta_value, ComplexPoint, EvalConfig, LineEvaluator, VerticalSegment};

fn point_evaluation(c: &mut Criterion) {
    let cfg = EvalConfig::default();
    let mut g = c.benchmark_group("zeta");
    for t in [10.0, 1e3, 1e5] {
        let s = ComplexPoint::new(0.75, t);
        g.bench_with_input(BenchmarkId::new("value", t), &s, |b, s| {
            b.iter(|| eval_zeta_value(black_box(*s), &cfg).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("jet", t), &s, |b, s| {
            b.iter(|| eval_zeta_jet(black_box(*s), &cfg).unwrap())
        });
    }
    g.finish();
}

fn line_evaluation(c: &mut Criterion) {
    let ev = LineEvaluator::new(0.5, 1e4, EvalConfig::default());
    c.bench_function("line/jet at 1e4", |b| b.iter(|| ev.jet(black_box(9876.5)).unwrap()));
}

fn curvature(c: &mut Criterion) {
    let seg = VerticalSegment::new(0.75, 110.0, 120.0, 0.01).unwrap();
    let cfg = EvalConfig::default();
    let mut g = c.benchmark_group("curvature");
    g.sample_size(10);
    g.bench_function("profile 110..120", |b| {
        b.iter(|| curvature_profile(&seg, &cfg).unwrap())
    });
    g.finish();
}

fn zeros(c: &mut Criterion) {
    let mut g = c.benchmark_group("zeros");
    g.sample_size(10);
    let opts = JensenOptions::default();
    g.bench_function("jensen mean 0..100", |b| {
        b.iter(|| jensen_mean(&AnalyticTargetId::Zeta, 0.75, 0.0, 100.0, &opts).unwrap())
    });
    let region = BoxRegion::new(0.0, 1.0, 1.0, 30.0).unwrap();
    g.bench_function("box count below 30", |b| {
        b.iter(|| count_zeros_box(&AnalyticTargetId::Zeta, region, &ContourOptions::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, point_evaluation, line_evaluation, curvature, zeros);
criterion_main!(benches);
