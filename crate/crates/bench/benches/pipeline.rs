use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qtw_bench::{cycle, fattened, grid, matched_cliques, star_layer};
use qtw_core::{matching_ppd, pipeline, verify_qi, PipelineOptions};

fn bench_pipeline(c: &mut Criterion) {
    let opts = PipelineOptions::default();
    let mut group = c.benchmark_group("pipeline");
    for n in [10, 50, 200] {
        let inst = cycle(n);
        group.bench_with_input(BenchmarkId::new("cycle", n), &inst, |b, i| {
            b.iter(|| pipeline(&i.graph, &i.decomposition, &i.cert, &opts).unwrap())
        });
    }
    for nodes in [20, 60] {
        let inst = fattened(7, nodes, 3, 2);
        group.bench_with_input(BenchmarkId::new("fattened", nodes), &inst, |b, i| {
            b.iter(|| pipeline(&i.graph, &i.decomposition, &i.cert, &opts).unwrap())
        });
    }
    let inst = grid(4, 2);
    group.bench_function("grid_4_2", |b| {
        b.iter(|| pipeline(&inst.graph, &inst.decomposition, &inst.cert, &opts).unwrap())
    });
    group.finish();
}

fn bench_matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("matching_ppd");
    for k in [2, 4, 8] {
        let matched = matched_cliques(k);
        group.bench_with_input(BenchmarkId::new("matched", k), &matched, |b, i| b.iter(|| matching_ppd(black_box(i))));
        let star = star_layer(k);
        group.bench_with_input(BenchmarkId::new("star", k), &star, |b, i| b.iter(|| matching_ppd(black_box(i))));
    }
    group.finish();
}

fn bench_qi(c: &mut Criterion) {
    let inst = cycle(200);
    let g = &inst.graph;
    let id: BTreeMap<_, _> = g.vertices().iter().map(|&v| (v, v)).collect();
    c.bench_function("verify_qi/identity_c200", |b| b.iter(|| verify_qi(g, g, &id, 1, 0).unwrap()));
}

criterion_group!(benches, bench_pipeline, bench_matching, bench_qi);
criterion_main!(benches);
