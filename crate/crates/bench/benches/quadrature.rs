use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fskq::node_selection::{gauss_hermite_basis, sparse_grid_generators, NestedBasis};
use fskq::{build_s_matrix, expand, make_rule, GaussianKernel, GeneratorVector, SymmetricMeasure, SymmetricNodeSet};

fn bench_expand(c: &mut Criterion) {
    let mut group = c.benchmark_group("expand");
    for (label, raw) in [
        ("d6_distinct", vec![0.6, 0.5, 0.4, 0.3, 0.2, 0.1]),
        ("d11_two_nonzero", [vec![0.9, 0.4], vec![0.0; 9]].concat()),
        ("d20_one_nonzero", [vec![1.0], vec![0.0; 19]].concat()),
    ] {
        let g = GeneratorVector::new(&raw).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(label), &g, |b, g| b.iter(|| expand(black_box(g)).unwrap()));
    }
    group.finish();
}

fn bench_sparse_grid(c: &mut Criterion) {
    let cc = NestedBasis::clenshaw_curtis(6).unwrap();
    let mut group = c.benchmark_group("sparse_grid_generators");
    for q in [2, 3, 4, 5] {
        group.bench_with_input(BenchmarkId::new("cc_d11", q), &q, |b, &q| {
            b.iter(|| sparse_grid_generators(black_box(q), 11, &cc).unwrap())
        });
    }
    group.finish();
}

fn bench_s_matrix(c: &mut Criterion) {
    let cc = NestedBasis::clenshaw_curtis(6).unwrap();
    let k = GaussianKernel::new(0.8).unwrap();
    let mut group = c.benchmark_group("build_s_matrix");
    group.sample_size(10);
    for q in [2, 3, 4] {
        let gens = sparse_grid_generators(q, 11, &cc).unwrap();
        let nodes = SymmetricNodeSet::from_generators_default(&gens).unwrap();
        group.bench_with_input(BenchmarkId::new("cc_d11", q), &nodes, |b, nodes| {
            b.iter(|| build_s_matrix(black_box(nodes), &k).unwrap())
        });
    }
    group.finish();
}

fn bench_make_rule(c: &mut Criterion) {
    let gh = gauss_hermite_basis(2).unwrap();
    let mut group = c.benchmark_group("make_rule");
    group.sample_size(10);
    for d in [9, 29, 49] {
        let gens = sparse_grid_generators(2, d, &gh).unwrap();
        let nodes = SymmetricNodeSet::from_generators_default(&gens).unwrap().without_center();
        let k = GaussianKernel::new((d + 1) as f64).unwrap();
        let mu = SymmetricMeasure::std_gaussian(d).unwrap();
        group.bench_with_input(BenchmarkId::new("gh2", d), &nodes, |b, nodes| {
            b.iter(|| make_rule(nodes.clone(), &k, &mu).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_expand, bench_sparse_grid, bench_s_matrix, bench_make_rule);
criterion_main!(benches);
