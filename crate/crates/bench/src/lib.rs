//! Fixed inputs shared by the benchmarks.

use qtw_core::gen::{gen_cycle_example, gen_fattened, gen_subdivided_grid, FattenedParams, Instance};
use qtw_core::{Graph, LayerInstance, VertexSet};

pub fn cycle(n: usize) -> Instance {
    gen_cycle_example(n).expect("n >= 4")
}

pub fn grid(m: usize, s: usize) -> Instance {
    gen_subdivided_grid(m, s).expect("m, s >= 1")
}

pub fn fattened(seed: u64, nodes: usize, k: usize, r: u64) -> Instance {
    gen_fattened(seed, FattenedParams { nodes, k, r, ball_size: 3 }).expect("parameters in range")
}

/// Two cliques of size `k` joined by a perfect matching.
pub fn matched_cliques(k: usize) -> LayerInstance {
    let a: VertexSet = (0..k).collect();
    let b: VertexSet = (k..2 * k).collect();
    let mut edges: Vec<(usize, usize)> = (0..k).map(|i| (i, k + i)).collect();
    for side in [&a, &b] {
        for &u in side {
            edges.extend(side.range(u + 1..).map(|&v| (u, v)));
        }
    }
    LayerInstance::new(Graph::new(0..2 * k, edges).unwrap(), a, b, k).unwrap()
}

/// One vertex of `A` adjacent to all of `B`, the rest of `A` isolated.
pub fn star_layer(k: usize) -> LayerInstance {
    let a: VertexSet = (0..k).collect();
    let b: VertexSet = (k..2 * k).collect();
    let edges: Vec<(usize, usize)> = b.iter().map(|&v| (0, v)).collect();
    LayerInstance::new(Graph::new(0..2 * k, edges).unwrap(), a, b, k).unwrap()
}
