use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gspx_bench::{signal, step_graphon, weighted_graph};
use gspx_core::graphon::AnalyticKernel;
use gspx_core::homomorphism::{cut_norm_step, hom_count, hom_density_graphon_mc, Motif};
use gspx_core::linalg::{eigen_projection, SymmetricEigen};
use gspx_core::sampling::sample_w_random_graph;
use gspx_core::spectral::gft;
use gspx_core::Graphon;
use std::hint::black_box;

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigen");
    for n in [50, 200] {
        let g = weighted_graph(n, 1);
        let x = signal(n, 2);
        group.bench_with_input(BenchmarkId::new("full", n), &g, |b, g| {
            b.iter(|| SymmetricEigen::new(black_box(g.weights())).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("projection", n), &g, |b, g| {
            b.iter(|| eigen_projection(black_box(g.weights()), x.values()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("gft", n), &g, |b, g| {
            b.iter(|| gft(black_box(g), &x).unwrap())
        });
    }
    group.finish();
}

fn homomorphisms(c: &mut Criterion) {
    let g = weighted_graph(40, 3);
    c.bench_function("hom_count/triangle/40", |b| {
        b.iter(|| hom_count(&Motif::triangle(), black_box(&g)).unwrap())
    });
    let w: Graphon = AnalyticKernel::Product.into();
    c.bench_function("hom_mc/triangle/1e5", |b| {
        b.iter(|| hom_density_graphon_mc(&Motif::triangle(), &w, 100_000, 1).unwrap())
    });
}

fn cut_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("cut_norm");
    for n in [8, 14] {
        let w = step_graphon(n, 4);
        group.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| cut_norm_step(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let w: Graphon = AnalyticKernel::soft_geometric(3.0).unwrap().into();
    c.bench_function("sample/soft_geometric/400", |b| {
        b.iter(|| sample_w_random_graph(&w, 400, 1, black_box(0)).unwrap())
    });
}

criterion_group!(benches, eigensolver, homomorphisms, cut_norm, sampling);
criterion_main!(benches);
