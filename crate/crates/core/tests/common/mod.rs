//! Brute-force oracles, written straight from the definitions and sharing
//! no code with the library beyond its data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use qtw_core::{CoreForest, CoreId, Graph, Vertex};
use rand::Rng;

/// All-pairs distances by Floyd–Warshall; `None` is unreachable.
pub struct Metric {
    pos: BTreeMap<Vertex, usize>,
    d: Vec<Vec<Option<u64>>>,
}

impl Metric {
    #[allow(clippy::needless_range_loop)]
    pub fn new(g: &Graph) -> Self {
        let pos: BTreeMap<Vertex, usize> = g.vertices().iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = pos.len();
        let mut d = vec![vec![None; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(0);
        }
        for (u, v) in g.edges() {
            d[pos[&u]][pos[&v]] = Some(1);
            d[pos[&v]][pos[&u]] = Some(1);
        }
        for m in 0..n {
            for i in 0..n {
                let Some(im) = d[i][m] else { continue };
                for j in 0..n {
                    if let Some(mj) = d[m][j] {
                        if d[i][j].is_none_or(|ij| im + mj < ij) {
                            d[i][j] = Some(im + mj);
                        }
                    }
                }
            }
        }
        Metric { pos, d }
    }

    pub fn get(&self, u: Vertex, v: Vertex) -> Option<u64> {
        self.d[self.pos[&u]][self.pos[&v]]
    }
}

/// The three quasi-isometry conditions checked pair by pair.
pub fn naive_qi(g: &Graph, h: &Graph, map: &BTreeMap<Vertex, Vertex>, l: u64, c: u64) -> bool {
    let dg = Metric::new(g);
    let dh = Metric::new(h);
    for &u in g.vertices() {
        for &v in g.vertices() {
            let a = dg.get(u, v);
            let b = dh.get(map[&u], map[&v]);
            if let Some(a) = a {
                if b.is_none_or(|b| b > l * a + c) {
                    return false;
                }
            }
            if let Some(b) = b {
                if a.is_none_or(|a| a > l * b + c) {
                    return false;
                }
            }
        }
    }
    h.vertices()
        .iter()
        .all(|&y| map.values().any(|&x| dh.get(x, y).is_some_and(|d| d <= c)))
}

/// Every descendant of the birthday tested against the four defining
/// conditions of a spread, using the forest's spreads for earlier cores.
pub fn definitional_spread(forest: &CoreForest, id: CoreId) -> BTreeSet<usize> {
    let tree = forest.tree();
    let core = forest.core(id);
    let t = core.birthday;
    let ancestral: Vec<&BTreeSet<usize>> = forest
        .cores()
        .iter()
        .filter(|c| tree.is_strict_ancestor(c.birthday, t))
        .map(|c| forest.spread(c.id))
        .filter(|s| s.contains(&t))
        .collect();
    let elders: Vec<&BTreeSet<usize>> = forest
        .cores()
        .iter()
        .filter(|c| c.birthday == t && c.birth_index < core.birth_index)
        .map(|c| forest.spread(c.id))
        .collect();
    tree.order()
        .iter()
        .copied()
        .filter(|&s| tree.is_ancestor(t, s))
        .filter(|&s| !forest.bag(s).is_disjoint(&core.vertices))
        .filter(|s| ancestral.iter().all(|sp| sp.contains(s)))
        .filter(|s| elders.iter().all(|sp| sp.contains(s)))
        .collect()
}

/// Checks every core's spread against [`definitional_spread`]; returns the
/// first mismatch.
pub fn spreads_match(forest: &CoreForest) -> Result<(), String> {
    for core in forest.cores() {
        let want = definitional_spread(forest, core.id);
        let got = forest.spread(core.id);
        if &want != got {
            return Err(format!("core {}: traversal {got:?}, definition {want:?}", core.id.0));
        }
    }
    Ok(())
}

/// Erdős–Rényi graph on `0..n`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(0..n, edges).unwrap()
}

/// Random tree on `0..n` plus a few chords; connected.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, chords: usize) -> Graph {
    let mut edges: BTreeSet<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..chords {
        if n < 2 {
            break;
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    Graph::new(0..n, edges).unwrap()
}

/// Random layer instance: sides of at most `k` vertices, arbitrary edges
/// inside each side and at most `k` edges across.
pub fn random_layer<R: Rng>(rng: &mut R, k: usize) -> qtw_core::LayerInstance {
    let na = rng.gen_range(0..=k);
    let nb = rng.gen_range(0..=k);
    let a: qtw_core::VertexSet = (0..na).collect();
    let b: qtw_core::VertexSet = (na..na + nb).collect();
    let density = rng.gen_range(0.0..=1.0);
    let mut edges = Vec::new();
    for side in [&a, &b] {
        for &u in side {
            for &v in side.range(u + 1..) {
                if rng.gen_bool(density) {
                    edges.push((u, v));
                }
            }
        }
    }
    let mut across: Vec<(usize, usize)> = a.iter().flat_map(|&u| b.iter().map(move |&v| (u, v))).collect();
    let want = rng.gen_range(0..=k.min(across.len()));
    for i in 0..want {
        let j = rng.gen_range(i..across.len());
        across.swap(i, j);
    }
    edges.extend(&across[..want]);
    qtw_core::LayerInstance::new(Graph::new(0..na + nb, edges).unwrap(), a, b, k).unwrap()
}

/// Validity of a two-sided pseudo-path-decomposition, from the definition.
pub fn check_ppd(inst: &qtw_core::LayerInstance, bags: &[qtw_core::VertexSet]) -> Result<(), String> {
    let (first, last) = match (bags.first(), bags.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err("no bags".into()),
    };
    if !inst.a().is_subset(first) {
        return Err(format!("A not in first bag {first:?}"));
    }
    if !inst.b().is_subset(last) {
        return Err(format!("B not in last bag {last:?}"));
    }
    if let Some(b) = bags.iter().find(|b| b.len() > inst.k()) {
        return Err(format!("bag {b:?} has more than k = {} vertices", inst.k()));
    }
    let g = inst.graph();
    for &v in g.vertices() {
        let hits: Vec<usize> = (0..bags.len()).filter(|&i| bags[i].contains(&v)).collect();
        match (hits.first(), hits.last()) {
            (Some(&lo), Some(&hi)) if hi - lo + 1 == hits.len() => {}
            (None, _) => return Err(format!("vertex {v} uncovered")),
            _ => return Err(format!("vertex {v} on a non-contiguous run")),
        }
    }
    for (u, v) in g.edges() {
        let together = bags.iter().any(|b| b.contains(&u) && b.contains(&v));
        let split = bags.windows(2).any(|w| {
            let only = |x: &qtw_core::VertexSet, y: &qtw_core::VertexSet| {
                let d: Vec<_> = x.symmetric_difference(y).copied().collect();
                d.len() == 2 && d.contains(&u) && d.contains(&v)
            };
            only(&w[0], &w[1]) && w[0].contains(&u) != w[0].contains(&v)
        });
        if !together && !split {
            return Err(format!("edge {u}-{v} realized by no bag or adjacent pair"));
        }
    }
    Ok(())
}
