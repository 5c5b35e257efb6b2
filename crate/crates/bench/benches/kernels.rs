use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use moikit_bench::{decomposition, operands};
use moikit_core::frechet::{matrix_function_derivative, DerivativeRequest, DerivativeStrategy};
use moikit_core::moi::{moi_evaluate, MoiOperands, MoiSymbol};
use moikit_core::scalar::divided_difference_recursive;
use moikit_core::{hermitian_eigendecompose, NodeTuple, ScalarFunction, WienerAtomic};

fn eigendecompose(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigendecompose");
    for n in [4, 8, 16] {
        let (a, _) = operands(n, 0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |bench, a| {
            bench.iter(|| hermitian_eigendecompose(black_box(a), None).unwrap())
        });
    }
    group.finish();
}

fn divided_differences(c: &mut Criterion) {
    let f: ScalarFunction = WienerAtomic::cos(1.0).into();
    let mut group = c.benchmark_group("divided_difference");
    for k in [2, 4, 8] {
        let nodes =
            NodeTuple::new((0..=k).map(|i| -1.0 + 2.0 * i as f64 / k as f64).collect()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &nodes, |bench, nodes| {
            bench.iter(|| divided_difference_recursive(&f, black_box(nodes), None).unwrap())
        });
    }
    group.finish();
}

fn moi(c: &mut Criterion) {
    let f: ScalarFunction = WienerAtomic::cos(1.0).into();
    let mut group = c.benchmark_group("moi_evaluate_n6");
    for k in [1, 2, 3] {
        let (a, b) = operands(6, k);
        let ops = MoiOperands::uniform(decomposition(&a), b).unwrap();
        let sym = MoiSymbol::divided_difference(&f, k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &ops, |bench, ops| {
            bench.iter(|| moi_evaluate(&sym, black_box(ops)).unwrap())
        });
    }
    group.finish();
}

fn derivative(c: &mut Criterion) {
    let f: ScalarFunction = WienerAtomic::sin(1.0).into();
    let (a, b) = operands(6, 3);
    let mut group = c.benchmark_group("derivative_k3_n6");
    for (name, strategy) in [
        ("moi", DerivativeStrategy::Moi),
        ("fd", DerivativeStrategy::FiniteDifference),
    ] {
        let req = DerivativeRequest::new(f.clone(), a.clone(), b.clone()).with_strategy(strategy);
        group.bench_function(name, |bench| {
            bench.iter(|| matrix_function_derivative(black_box(&req)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    eigendecompose,
    divided_differences,
    moi,
    derivative
);
criterion_main!(benches);
