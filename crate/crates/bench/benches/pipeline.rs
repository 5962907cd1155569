use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use nplet_core::lattice::orthogonal_lattice;
use nplet_core::polyarith::{gcd, DensePolynomial};
use nplet_core::ranktest::{decide, ExponentTuple, MinorSystem};
use nplet_core::roots::roots;

fn tuple(e: &[u64]) -> ExponentTuple {
    ExponentTuple::new(e.to_vec()).unwrap()
}

fn bench_gcd(c: &mut Criterion) {
    let mut group = c.benchmark_group("minor_gcd");
    for e in [&[3u64, 7, 11, 19][..], &[5, 17, 29, 40], &[11, 37, 73, 101]] {
        let t = tuple(e);
        let minors: Vec<DensePolynomial> = MinorSystem::build(&t)
            .minors
            .iter()
            .map(|m| m.to_dense().unwrap())
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(t.to_string()), &minors, |b, m| {
            b.iter(|| gcd(black_box(&m[0]), black_box(&m[1])).unwrap())
        });
    }
    group.finish();
}

fn bench_decide(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide");
    for e in [&[2u64, 3, 7][..], &[13, 31, 60], &[3, 7, 11, 19], &[11, 37, 73, 101]] {
        let t = tuple(e);
        group.bench_with_input(BenchmarkId::from_parameter(t.to_string()), &t, |b, t| {
            b.iter(|| decide(black_box(t)).unwrap())
        });
    }
    group.finish();
}

fn bench_lattice(c: &mut Criterion) {
    let mut group = c.benchmark_group("orthogonal_lattice");
    for e in [&[1u64, 2, 3, 4][..], &[17, 59, 131, 199], &[1, 5, 9, 14, 22, 31]] {
        let t = tuple(e);
        group.bench_with_input(BenchmarkId::from_parameter(t.to_string()), &t, |b, t| {
            b.iter(|| orthogonal_lattice(black_box(t)).unwrap())
        });
    }
    group.finish();
}

fn bench_roots(c: &mut Criterion) {
    let mut group = c.benchmark_group("roots");
    for deg in [8usize, 32, 128] {
        let minor = MinorSystem::build(&tuple(&[1, 2, 3, deg as u64])).minors[1].to_dense().unwrap();
        let coeffs = minor.to_complex();
        group.bench_with_input(BenchmarkId::from_parameter(deg), &coeffs, |b, p| b.iter(|| roots(black_box(p))));
    }
    group.finish();
}

criterion_group!(benches, bench_gcd, bench_decide, bench_lattice, bench_roots);
criterion_main!(benches);
