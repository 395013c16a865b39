use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use wdvv_bench::{dense_cubic, lattice};
use wdvv_core::egoroff::correlators_from_metric;
use wdvv_core::frobenius::{associativity_residual, third_derivative_tensor};
use wdvv_core::spectral::solve_ba;
use wdvv_core::{ConstantMetric, Example1, Example2, Jet};

fn jets(c: &mut Criterion) {
    let x = Jet::variables(&[0.4, -0.3, 0.8], 3);
    let prod = &(&x[0] * &x[1]) + &x[2];
    c.bench_function("jet/mul 3 vars order 3", |b| b.iter(|| black_box(&prod) * black_box(&x[2])));
    c.bench_function("jet/atan 3 vars order 3", |b| b.iter(|| black_box(&prod).atan().unwrap()));
    let f = dense_cubic(4);
    c.bench_function("jet/third derivatives dense cubic n=4", |b| {
        b.iter(|| third_derivative_tensor(&f, black_box(&[0.1, 0.2, 0.3, 0.4])).unwrap())
    });
}

fn spectral(c: &mut Criterion) {
    let data = Example1::printed().spectral_data();
    let pts = lattice(16);
    c.bench_function("solve_ba/example1 order 2 x16", |b| {
        b.iter(|| {
            for u in &pts {
                black_box(solve_ba(&data, u, 2).unwrap());
            }
        })
    });
}

fn correlators(c: &mut Criterion) {
    let pts = lattice(16);
    let one = Example1::printed().curve_model().unwrap();
    let two = Example2::new(0.0).curve_model().unwrap();
    c.bench_function("correlators_from_metric/example1 x16", |b| {
        b.iter(|| {
            for u in &pts {
                black_box(correlators_from_metric(&one, u).unwrap());
            }
        })
    });
    c.bench_function("correlators_from_metric/example2 x16", |b| {
        b.iter(|| {
            for u in &pts {
                black_box(correlators_from_metric(&two, u).unwrap());
            }
        })
    });
    let f = Example1::printed().prepotential();
    let g = ConstantMetric::identity(2);
    c.bench_function("associativity/example1 prepotential", |b| {
        b.iter(|| associativity_residual(&third_derivative_tensor(&f, black_box(&[1.1, 0.9])).unwrap(), &g).unwrap())
    });
}

criterion_group!(benches, jets, spectral, correlators);
criterion_main!(benches);
