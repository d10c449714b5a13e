use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use twofold_bench::subcritical;
use twofold_core::critical::{critical_point_general, symmetric_bending};
use twofold_core::elliptic::ZetaB;
use twofold_core::maps::enumerate_rooted_maps;
use twofold_core::series::{gasket_fixed_point_f64, ring_series};
use twofold_core::solver::{critical_solution, solve_cuts};
use twofold_core::Rational;

fn combinatorics(c: &mut Criterion) {
    c.bench_function("rooted maps E<=3", |b| b.iter(|| enumerate_rooted_maps(black_box(3)).unwrap()));
    let (h1, h2, a) = (Rational::new(1.into(), 3.into()), Rational::new(2.into(), 5.into()), Rational::new(3.into(), 2.into()));
    c.bench_function("ring table kmax=8", |b| b.iter(|| ring_series(&h1, &h2, &a, black_box(8))));
}

fn series(c: &mut Criterion) {
    let p = subcritical();
    let mut g = c.benchmark_group("gasket f64");
    for order in [8, 16, 24] {
        g.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &o| {
            b.iter(|| gasket_fixed_point_f64(&p, 4, o).unwrap())
        });
    }
    g.finish();
}

fn zeta(c: &mut Criterion) {
    let v = Complex64::new(0.3, 0.2);
    for t in [0.5, 8.0] {
        let z = ZetaB::new(0.4, t).unwrap();
        c.bench_function(&format!("zeta eval T={t}"), |b| b.iter(|| z.eval(black_box(v))));
    }
}

fn solver(c: &mut Criterion) {
    let p = subcritical();
    c.bench_function("solve_cuts", |b| b.iter(|| solve_cuts(black_box(&p)).unwrap()));
    c.bench_function("critical point general", |b| {
        b.iter(|| critical_point_general(1.0, black_box(2.0), 1.5, 0.4).unwrap())
    });
    let cp = symmetric_bending(1.5, 0.4, 1.0).unwrap();
    c.bench_function("critical density scan 256", |b| {
        b.iter(|| critical_solution(&cp).unwrap().density_scan(256))
    });
}

criterion_group!(benches, combinatorics, series, zeta, solver);
criterion_main!(benches);
