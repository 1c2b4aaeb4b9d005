use ccs_core::algebra::central_primitive_idempotents;
use ccs_core::constructors::{load_fixture, FIXTURE_AS16, FIXTURE_FANO};
use ccs_core::feasibility::{table_report, ALL_RULES};
use ccs_core::scheme::{brute_force_tensor, verify_scheme};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_verify(c: &mut Criterion) {
    let matrix = load_fixture(FIXTURE_AS16).unwrap().color_matrix();
    c.bench_function("verify as16 fixture", |b| {
        b.iter(|| verify_scheme(black_box(&matrix)).unwrap())
    });
}

fn bench_brute_tensor(c: &mut Criterion) {
    let s = load_fixture(FIXTURE_AS16).unwrap();
    c.bench_function("brute-force intersection tensor", |b| {
        b.iter(|| brute_force_tensor(black_box(&s)))
    });
}

fn bench_idempotents(c: &mut Criterion) {
    let s = load_fixture(FIXTURE_FANO).unwrap();
    c.bench_function("central primitive idempotents (fano)", |b| {
        b.iter(|| central_primitive_idempotents(black_box(&s)).unwrap())
    });
}

fn bench_filter(c: &mut Criterion) {
    c.bench_function("feasibility sweep to m=11", |b| {
        b.iter(|| table_report(black_box(11), None, &ALL_RULES))
    });
}

criterion_group!(
    benches,
    bench_verify,
    bench_brute_tensor,
    bench_idempotents,
    bench_filter
);
criterion_main!(benches);
