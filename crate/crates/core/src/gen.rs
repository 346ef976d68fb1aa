//! Instance generators with planted ball-cover tree-decompositions.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::{self, BallCoverCert, Decomposition, IndexTree, Mode, Node};
use crate::graph::{Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Parameters(String),
    #[error("generator failed to produce a valid instance after {0} attempts")]
    Exhausted(u32),
}

/// Where an instance came from, so it can be regenerated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub params: BTreeMap<String, u64>,
    pub seed: Option<u64>,
    pub resamples: u32,
}

/// A graph with a tree-decomposition and a cover certificate for its bags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub decomposition: Decomposition,
    pub cert: BallCoverCert,
    pub provenance: Provenance,
}

impl Instance {
    pub fn is_valid(&self) -> bool {
        decomp::validate(&self.graph, &self.decomposition).is_ok_and(|r| r.is_valid())
            && decomp::validate_ball_cover(&self.graph, &self.decomposition, &self.cert).is_ok_and(|r| r.is_valid())
    }
}

fn provenance(generator: &str, params: &[(&str, u64)], seed: Option<u64>, resamples: u32) -> Provenance {
    Provenance {
        generator: generator.into(),
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        seed,
        resamples,
    }
}

/// The cycle `v1 - ... - vn - v1` with bags `{v_i, v_{i+1}, v_n}` on the path
/// `t_1 - ... - t_{n-1}`, each bag covered by `{v_i, v_{i+1}}` and `{v_n}`.
///
/// Vertex `v_i` has id `i` and node `t_i` has id `i`; the tree is rooted at `t_1`.
pub fn gen_cycle_example(n: usize) -> Result<Instance, GenError> {
    if n < 4 {
        return Err(GenError::Parameters(format!("cycle needs n >= 4, got {n}")));
    }
    let graph = Graph::new(1..=n, (1..=n).map(|i| (i, i % n + 1))).expect("cycle is simple");
    let nodes: Vec<Node> = (1..n).collect();
    let tree = IndexTree::path(&nodes).expect("path tree");
    let bags = nodes.iter().map(|&i| (i, VertexSet::from([i, i + 1, n]))).collect();
    let covers = nodes
        .iter()
        .map(|&i| (i, vec![VertexSet::from([i, i + 1]), VertexSet::from([n])]))
        .collect();
    Ok(Instance {
        graph,
        decomposition: Decomposition::new(tree, bags, Mode::Tree).expect("bags on tree nodes"),
        cert: BallCoverCert { k: 2, r: 1, covers },
        provenance: provenance("cycle", &[("n", n as u64)], None, 0),
    })
}

/// An `m x m` grid with each edge subdivided `s` times.
///
/// The decomposition is a path over consecutive column pairs. Each grid vertex
/// owns a star: itself plus the nearer half of every incident subdivided edge.
/// A bag is the union of the `2m` stars of its two columns, so `k = 2m` and
/// `r = s + 1`. Grid vertex `(row, col)` has id `row * m + col`.
pub fn gen_subdivided_grid(m: usize, s: usize) -> Result<Instance, GenError> {
    if m < 2 {
        return Err(GenError::Parameters(format!("grid needs m >= 2, got {m}")));
    }
    let id = |row: usize, col: usize| row * m + col;
    let mut stars: Vec<VertexSet> = (0..m * m).map(|v| VertexSet::from([v])).collect();
    let mut edges = Vec::new();
    let mut next = m * m;
    let mut grid_edges = Vec::new();
    for row in 0..m {
        for col in 0..m {
            if col + 1 < m {
                grid_edges.push((id(row, col), id(row, col + 1)));
            }
            if row + 1 < m {
                grid_edges.push((id(row, col), id(row + 1, col)));
            }
        }
    }
    let near_half = s.div_ceil(2);
    for (x, y) in grid_edges {
        let mut prev = x;
        for step in 0..s {
            let p = next;
            next += 1;
            edges.push((prev, p));
            stars[if step < near_half { x } else { y }].insert(p);
            prev = p;
        }
        edges.push((prev, y));
    }
    let graph = Graph::new(0..next, edges).expect("subdivided grid is simple");
    let nodes: Vec<Node> = (0..m - 1).collect();
    let tree = IndexTree::path(&nodes).expect("path tree");
    let mut bags = BTreeMap::new();
    let mut covers = BTreeMap::new();
    for &col in &nodes {
        let sets: Vec<VertexSet> = (0..m)
            .flat_map(|row| [id(row, col), id(row, col + 1)])
            .map(|v| stars[v].clone())
            .collect();
        bags.insert(col, sets.iter().flatten().copied().collect::<VertexSet>());
        covers.insert(col, sets);
    }
    Ok(Instance {
        graph,
        decomposition: Decomposition::new(tree, bags, Mode::Path).expect("bags on tree nodes"),
        cert: BallCoverCert {
            k: 2 * m,
            r: s as u64 + 1,
            covers,
        },
        provenance: provenance("grid", &[("m", m as u64), ("s", s as u64)], None, 0),
    })
}

/// Parameters of [`gen_fattened`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FattenedParams {
    /// Number of tree nodes.
    pub nodes: usize,
    /// Maximum number of balls per bag.
    pub k: usize,
    /// Diameter bound of every ball.
    pub r: u64,
    /// Maximum number of vertices per ball.
    pub ball_size: usize,
}

impl Default for FattenedParams {
    fn default() -> Self {
        FattenedParams {
            nodes: 20,
            k: 2,
            r: 2,
            ball_size: 3,
        }
    }
}

const MAX_RESAMPLES: u32 = 64;

/// Random tree with up to `k` balls of diameter at most `r` planted on every
/// node. Each ball lives on a connected subtree (it is created at one node and
/// may be carried from a parent to a child); parent and child always share a
/// ball, and every new ball is tied to an existing bag-mate by one edge, so the
/// graph is connected. Extra edges are only ever added inside a bag.
pub fn gen_fattened(seed: u64, params: FattenedParams) -> Result<Instance, GenError> {
    if params.nodes == 0 || params.k == 0 || params.ball_size == 0 {
        return Err(GenError::Parameters(format!(
            "nodes, k and ball_size must be positive: {params:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for resamples in 0..MAX_RESAMPLES {
        let mut inst = fattened_attempt(&mut rng, params);
        inst.provenance = provenance(
            "fattened",
            &[
                ("nodes", params.nodes as u64),
                ("k", params.k as u64),
                ("r", params.r),
                ("ball_size", params.ball_size as u64),
            ],
            Some(seed),
            resamples,
        );
        if inst.is_valid() {
            return Ok(inst);
        }
    }
    Err(GenError::Exhausted(MAX_RESAMPLES))
}

struct BallBuilder<'a> {
    rng: &'a mut ChaCha8Rng,
    next: Vertex,
    edges: BTreeSet<(Vertex, Vertex)>,
}

impl BallBuilder<'_> {
    fn fresh(&mut self) -> Vertex {
        self.next += 1;
        self.next - 1
    }

    fn link(&mut self, u: Vertex, v: Vertex) {
        if u != v {
            self.edges.insert((u.min(v), u.max(v)));
        }
    }

    /// A connected vertex set of diameter at most `r`.
    fn ball(&mut self, r: u64, max_size: usize) -> Vec<Vertex> {
        let size = if r == 0 { 1 } else { self.rng.gen_range(1..=max_size) };
        let mut verts = vec![self.fresh()];
        if r == 1 {
            while verts.len() < size {
                let v = self.fresh();
                for &u in &verts {
                    self.link(u, v);
                }
                verts.push(v);
            }
            return verts;
        }
        // Every vertex lies within `depth` of one of at most two adjacent
        // roots, which bounds the diameter by 2 * depth (+1 with two roots).
        let depth = (r / 2) as usize;
        let mut level = vec![0usize];
        if r % 2 == 1 && size >= 2 {
            let v = self.fresh();
            self.link(verts[0], v);
            verts.push(v);
            level.push(0);
        }
        while verts.len() < size {
            let candidates: Vec<usize> = (0..verts.len()).filter(|&i| level[i] < depth).collect();
            let &p = candidates.choose(self.rng).expect("roots have level 0 < depth");
            let v = self.fresh();
            self.link(verts[p], v);
            verts.push(v);
            level.push(level[p] + 1);
        }
        for _ in 0..verts.len() / 2 {
            let a = verts[self.rng.gen_range(0..verts.len())];
            let b = verts[self.rng.gen_range(0..verts.len())];
            self.link(a, b);
        }
        verts
    }
}

fn fattened_attempt(rng: &mut ChaCha8Rng, params: FattenedParams) -> Instance {
    let n = params.nodes;
    let parents: Vec<Node> = (1..n).map(|i| rng.gen_range(0..i)).collect();
    let tree_edges: Vec<(Node, Node)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
    let tree = IndexTree::new(0..n, tree_edges, Some(0)).expect("random recursive tree");

    let mut builder = BallBuilder {
        rng,
        next: 0,
        edges: BTreeSet::new(),
    };
    let mut balls: Vec<Vec<Vertex>> = Vec::new();
    let mut at_node: Vec<Vec<usize>> = vec![Vec::new(); n];
    // Parents precede children in id order.
    for t in 0..n {
        if t > 0 {
            let inherited: Vec<usize> = at_node[parents[t - 1]].clone();
            let mut carried: Vec<usize> = inherited.iter().copied().filter(|_| builder.rng.gen_bool(0.5)).collect();
            if carried.is_empty() {
                carried.push(*inherited.choose(builder.rng).expect("every node has a ball"));
            }
            at_node[t] = carried;
        }
        let room = params.k - at_node[t].len();
        let fresh = if at_node[t].is_empty() {
            builder.rng.gen_range(1..=room)
        } else {
            builder.rng.gen_range(0..=room)
        };
        for _ in 0..fresh {
            let ball = builder.ball(params.r, params.ball_size);
            if let Some(&other) = at_node[t].choose(builder.rng) {
                let u = *balls[other].choose(builder.rng).expect("balls are nonempty");
                let v = *ball.choose(builder.rng).expect("balls are nonempty");
                builder.link(u, v);
            }
            balls.push(ball);
            at_node[t].push(balls.len() - 1);
        }
        if at_node[t].len() >= 2 && builder.rng.gen_bool(0.3) {
            let pair: Vec<&usize> = at_node[t].choose_multiple(builder.rng, 2).collect();
            let u = *balls[*pair[0]].choose(builder.rng).expect("nonempty");
            let v = *balls[*pair[1]].choose(builder.rng).expect("nonempty");
            builder.link(u, v);
        }
    }

    let vertex_count = builder.next;
    let graph = Graph::new(0..vertex_count, builder.edges).expect("generated edges are simple");
    let mut bags = BTreeMap::new();
    let mut covers = BTreeMap::new();
    for (t, ids) in at_node.iter().enumerate() {
        let sets: Vec<VertexSet> = ids.iter().map(|&b| balls[b].iter().copied().collect()).collect();
        bags.insert(t, sets.iter().flatten().copied().collect::<VertexSet>());
        covers.insert(t, sets);
    }
    Instance {
        graph,
        decomposition: Decomposition::new(tree, bags, Mode::Tree).expect("bags on tree nodes"),
        cert: BallCoverCert {
            k: params.k,
            r: params.r,
            covers,
        },
        provenance: provenance("fattened", &[], None, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Distance;

    #[test]
    fn cycle_six_matches_fixture() {
        let inst = gen_cycle_example(6).unwrap();
        assert!(inst.is_valid());
        assert_eq!(inst.decomposition.bag(1), &VertexSet::from([1, 2, 6]));
        assert_eq!(inst.decomposition.bag(5), &VertexSet::from([5, 6]));
        assert_eq!(decomp::width(&inst.decomposition).unwrap(), 2);
        assert_eq!((inst.cert.k, inst.cert.r), (2, 1));
    }

    #[test]
    fn smallest_cycle() {
        let inst = gen_cycle_example(4).unwrap();
        assert!(inst.is_valid());
        assert_eq!(inst.decomposition.tree.len(), 3);
        assert!(gen_cycle_example(3).is_err());
    }

    #[test]
    fn large_cycle_valid() {
        assert!(gen_cycle_example(100).unwrap().is_valid());
    }

    #[test]
    fn grid_degenerates_to_four_cycle() {
        let inst = gen_subdivided_grid(2, 0).unwrap();
        assert!(inst.is_valid());
        assert_eq!(inst.graph.len(), 4);
        assert_eq!(inst.graph.edge_count(), 4);
        assert!(inst.graph.vertices().iter().all(|&v| inst.graph.degree(v) == 2));
        assert_eq!((inst.cert.k, inst.cert.r), (4, 1));
    }

    #[test]
    fn subdivided_grids_valid() {
        for (m, s) in [(3, 2), (2, 5), (4, 1), (3, 0)] {
            let inst = gen_subdivided_grid(m, s).unwrap();
            assert!(inst.is_valid(), "m={m} s={s}");
            assert_eq!(inst.graph.len(), m * m + 2 * m * (m - 1) * s);
            assert_eq!((inst.cert.k, inst.cert.r), (2 * m, s as u64 + 1));
        }
        assert!(gen_subdivided_grid(1, 3).is_err());
    }

    #[test]
    fn fattened_single_node_single_vertex() {
        let p = FattenedParams {
            nodes: 1,
            k: 1,
            r: 0,
            ball_size: 1,
        };
        let inst = gen_fattened(7, p).unwrap();
        assert_eq!(inst.graph.len(), 1);
        assert!(inst.is_valid());
    }

    #[test]
    fn fattened_many_seeds_valid_and_connected() {
        for seed in 0..60 {
            let p = FattenedParams {
                nodes: 1 + (seed as usize % 30),
                k: 1 + (seed as usize % 4),
                r: seed % 4,
                ball_size: 1 + (seed as usize % 5),
            };
            let inst = gen_fattened(seed, p).unwrap();
            assert!(inst.is_valid(), "seed {seed}");
            assert!(inst.graph.is_connected(), "seed {seed}");
            assert_eq!(inst.provenance.resamples, 0);
            for sets in inst.cert.covers.values() {
                assert!(sets.len() <= p.k);
                for s in sets {
                    assert!(inst.graph.subset_diameter(s).unwrap() <= Distance::Finite(p.r));
                }
            }
        }
    }

    #[test]
    fn fattened_is_deterministic() {
        let p = FattenedParams {
            nodes: 50,
            k: 3,
            r: 2,
            ball_size: 3,
        };
        assert_eq!(gen_fattened(42, p).unwrap(), gen_fattened(42, p).unwrap());
        assert!(gen_fattened(1, FattenedParams { k: 0, ..p }).is_err());
    }
}
