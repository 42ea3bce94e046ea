use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use foxwright::hfun::{HFunction, HfunEvalConfig, HfunMethod};
use foxwright::repr::eval_with;
use foxwright::{fox_wright, ReprConfig, SeriesConfig};
use foxwright_bench::{reference_sets, SUPPORT_FRACTIONS};

fn series(c: &mut Criterion) {
    let mut group = c.benchmark_group("series");
    let cfg = SeriesConfig::default();
    for (name, set) in reference_sets() {
        for z in [-3.0, 1.0, 10.0] {
            group.bench_with_input(BenchmarkId::new(name, z), &z, |b, &z| {
                b.iter(|| fox_wright(&set, black_box(z), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn density(c: &mut Criterion) {
    let mut group = c.benchmark_group("hfun");
    for (name, set) in reference_sets() {
        // the residue and contour caches warm up on first use; keep them warm
        let h = HFunction::new(&set).unwrap();
        for method in [HfunMethod::ResidueSeries, HfunMethod::RegularizedContour] {
            let cfg = HfunEvalConfig::with_method(method);
            for f in SUPPORT_FRACTIONS {
                let t = f * h.support_end();
                if h.value(t, &cfg).is_err() {
                    continue;
                }
                let id = BenchmarkId::new(format!("{name}/{method:?}"), f);
                group.bench_with_input(id, &t, |b, &t| {
                    b.iter(|| h.value(black_box(t), &cfg).unwrap())
                });
            }
        }
    }
    group.finish();
}

fn integrals(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrals");
    group.sample_size(20);
    let cfg = ReprConfig::default();
    for (name, set) in reference_sets() {
        let h = HFunction::new(&set).unwrap();
        group.bench_function(BenchmarkId::new("moment", name), |b| {
            b.iter(|| h.moment(black_box(2.5), &cfg.hfun).unwrap())
        });
        group.bench_function(BenchmarkId::new("representation", name), |b| {
            b.iter(|| eval_with(&h, black_box(1.0), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, series, density, integrals);
criterion_main!(benches);
