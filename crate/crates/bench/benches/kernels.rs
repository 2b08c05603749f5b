use criterion::{criterion_group, criterion_main, Criterion};
use heattrace::fit::{boundary_ladder, fit_largest_valid, geometric_grid};
use heattrace::geometry::ModelGeometry;
use heattrace::predict::{full_expansion, Orders};
use heattrace::regularize::i_reg_weight;
use heattrace::special::gamma;
use heattrace::spectrum::{bessel_zero, eigenvalues, line_weights, weighted_trace};
use heattrace::symbols::{c_multiplier, symbols_report};
use heattrace::weight::{CutoffSpec, WeightProfile};
use heattrace::Complex64;
use std::hint::black_box;

fn weight(alpha: f64) -> WeightProfile {
    WeightProfile::real(alpha, vec![1.0, 0.4, -0.3], Some(CutoffSpec::new(0.5, 0.9).unwrap())).unwrap()
}

fn special(c: &mut Criterion) {
    c.bench_function("gamma complex", |b| b.iter(|| gamma(black_box(Complex64::new(-2.7, 0.4)))));
    c.bench_function("bessel zero j_40,25", |b| b.iter(|| bessel_zero(black_box(40), black_box(25)).unwrap()));
}

fn symbolic(c: &mut Criterion) {
    c.bench_function("c multiplier n=5", |b| b.iter(|| c_multiplier(black_box(5), 3, 5).unwrap()));
    c.bench_function("symbols report", |b| b.iter(|| symbols_report().unwrap()));
}

fn prediction(c: &mut Criterion) {
    let disk = ModelGeometry::disk(1.0).unwrap();
    let w = weight(0.5);
    c.bench_function("regularized integral disk", |b| b.iter(|| i_reg_weight(&disk, black_box(&w), None).unwrap()));
    c.bench_function("full expansion disk", |b| b.iter(|| full_expansion(&disk, black_box(&w), 0.0, Orders::default()).unwrap()));
}

fn spectral(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectrum");
    g.sample_size(10);
    let disk = ModelGeometry::disk(1.0).unwrap();
    g.bench_function("disk eigenvalues to 1e4", |b| b.iter(|| eigenvalues(&disk, black_box(1e4)).unwrap()));
    let lines = eigenvalues(&disk, 1e4).unwrap();
    let w = weight(0.5);
    g.bench_function("disk line weights to 1e4", |b| b.iter(|| line_weights(&disk, &w, black_box(&lines)).unwrap()));
    let iv = ModelGeometry::interval(std::f64::consts::PI).unwrap();
    let wi = WeightProfile::real(0.5, vec![1.0], Some(CutoffSpec::new(1.0, 1.5).unwrap())).unwrap();
    let ts = geometric_grid(1e-4, 1e-2, 24).unwrap();
    g.bench_function("interval trace and fit", |b| {
        b.iter(|| {
            let s = weighted_trace(&iv, &wi, &ts, 1e-9).unwrap();
            let e = full_expansion(&iv, &wi, 0.0, Orders::default()).unwrap();
            let ladder = boundary_ladder(&e, 1, 0.5, 3..6).unwrap();
            fit_largest_valid(&s, &ladder, 2).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, special, symbolic, prediction, spectral);
criterion_main!(benches);
