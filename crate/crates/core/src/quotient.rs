//! The auxiliary graph `J` on triples `(s, t, C)`, its green/red edge
//! colouring, the contraction `H` of all green edges, and the map `psi`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::claims::{ClaimCheck, ClaimReport};
use crate::cores::{CoreForest, CoreId};
use crate::decomp::Node;
use crate::graph::{Distance, Graph, Vertex, UNREACHABLE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("{0} is not a vertex of J")]
    UnknownVertex(JVertex),
}

/// A triple `(s, t, C)`: tree node `s` in the spread of the core `C` born at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JVertex {
    pub s: Node,
    pub t: Node,
    pub core: CoreId,
}

impl fmt::Display for JVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},c{})", self.s, self.t, self.core.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Green,
    Red,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JEdge {
    pub u: JVertex,
    pub v: JVertex,
    pub color: Color,
}

#[derive(Debug, Clone)]
pub struct JGraph {
    vertices: Vec<JVertex>,
    index: HashMap<(Node, CoreId), usize>,
    adj: Vec<Vec<(usize, Color)>>,
    edges: Vec<(usize, usize, Color)>,
}

impl JGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertices sorted by `(s, t, core)`.
    pub fn vertices(&self) -> &[JVertex] {
        &self.vertices
    }

    pub fn index_of(&self, x: JVertex) -> Option<usize> {
        self.index.get(&(x.s, x.core)).copied().filter(|&i| self.vertices[i] == x)
    }

    pub fn vertex_at(&self, i: usize) -> JVertex {
        self.vertices[i]
    }

    /// The triple `(s, t, C)` of core `c` at node `s`, if present.
    pub fn triple(&self, s: Node, c: CoreId) -> Option<JVertex> {
        self.index.get(&(s, c)).map(|&i| self.vertices[i])
    }

    pub fn edges(&self) -> impl Iterator<Item = JEdge> + '_ {
        self.edges.iter().map(|&(a, b, color)| JEdge {
            u: self.vertices[a],
            v: self.vertices[b],
            color,
        })
    }

    pub fn edge_count(&self, color: Color) -> usize {
        self.edges.iter().filter(|e| e.2 == color).count()
    }

    pub fn neighbors_at(&self, i: usize) -> &[(usize, Color)] {
        &self.adj[i]
    }

    /// The uncoloured graph on dense indices `0..len`.
    pub fn to_graph(&self) -> Graph {
        Graph::new(0..self.len(), self.edges.iter().map(|&(a, b, _)| (a, b))).expect("J is simple")
    }

    /// Minimum red-edge counts from a set of dense sources (0/1 BFS).
    pub fn red_distances_from(&self, sources: &[usize]) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.len()];
        let mut deque = VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            deque.push_back(s);
        }
        while let Some(x) = deque.pop_front() {
            let d = dist[x];
            for &(y, color) in &self.adj[x] {
                let w = match color {
                    Color::Green => 0,
                    Color::Red => 1,
                };
                if d + w < dist[y] {
                    dist[y] = d + w;
                    if w == 0 {
                        deque.push_front(y);
                    } else {
                        deque.push_back(y);
                    }
                }
            }
        }
        dist
    }
}

/// Builds `J` from the cores of `gprime`.
pub fn build_j(forest: &CoreForest, gprime: &Graph) -> JGraph {
    let mut vertices: Vec<JVertex> = forest
        .cores()
        .iter()
        .flat_map(|core| {
            forest.spread(core.id).iter().map(move |&s| JVertex {
                s,
                t: core.birthday,
                core: core.id,
            })
        })
        .collect();
    vertices.sort_unstable();
    let index: HashMap<(Node, CoreId), usize> = vertices.iter().enumerate().map(|(i, x)| ((x.s, x.core), i)).collect();

    let mut owners: HashMap<Vertex, Vec<CoreId>> = HashMap::new();
    for core in forest.cores() {
        for &v in &core.vertices {
            owners.entry(v).or_default().push(core.id);
        }
    }
    // Cores within distance 3 of each core, via a truncated multi-source BFS.
    let near: Vec<BTreeSet<CoreId>> = forest
        .cores()
        .par_iter()
        .map(|core| {
            let sources: Vec<usize> = core.vertices.iter().map(|&v| gprime.index_of(v).expect("core vertex")).collect();
            let dist = gprime.bfs_from_indices(&sources, Some(3));
            let mut out = BTreeSet::new();
            for (i, &d) in dist.iter().enumerate() {
                if d != UNREACHABLE {
                    if let Some(ids) = owners.get(&gprime.vertex_at(i)) {
                        out.extend(ids.iter().copied().filter(|&c| c != core.id));
                    }
                }
            }
            out
        })
        .collect();

    let mut edges = Vec::new();
    let tree = forest.tree();
    for &s in tree.order() {
        let layer = forest.covering(s);
        for (i, &a) in layer.iter().enumerate() {
            for &b in &layer[i + 1..] {
                if near[a.0].contains(&b) {
                    edges.push(ordered(index[&(s, a)], index[&(s, b)], Color::Red));
                }
            }
        }
        let Some(p) = tree.parent(s) else { continue };
        for &a in forest.covering(p) {
            for &b in layer {
                let (ca, cb) = (&forest.core(a).vertices, &forest.core(b).vertices);
                if !ca.is_disjoint(cb) {
                    let color = if a == b { Color::Green } else { Color::Red };
                    edges.push(ordered(index[&(p, a)], index[&(s, b)], color));
                }
            }
        }
    }
    edges.sort_unstable_by_key(|&(a, b, _)| (a, b));
    let mut adj = vec![Vec::new(); vertices.len()];
    for &(a, b, color) in &edges {
        adj[a].push((b, color));
        adj[b].push((a, color));
    }
    JGraph {
        vertices,
        index,
        adj,
        edges,
    }
}

fn ordered(a: usize, b: usize, color: Color) -> (usize, usize, Color) {
    (a.min(b), a.max(b), color)
}

/// `J` with every green edge contracted: one vertex per core.
#[derive(Debug, Clone)]
pub struct QuotientH {
    /// Vertices are core ids.
    pub graph: Graph,
    /// Dense J index to core.
    pub j_to_h: Vec<CoreId>,
    pub psi: BTreeMap<Vertex, CoreId>,
}

pub fn contract_green(j: &JGraph, forest: &CoreForest) -> QuotientH {
    let j_to_h: Vec<CoreId> = j.vertices.iter().map(|x| x.core).collect();
    let red = j
        .edges
        .iter()
        .filter(|e| e.2 == Color::Red)
        .map(|&(a, b, _)| (j_to_h[a].0, j_to_h[b].0))
        .filter(|(a, b)| a != b);
    let graph = Graph::new_merging(forest.cores().iter().map(|c| c.id.0), red).expect("core ids are distinct");
    let psi = forest
        .classifications()
        .iter()
        .map(|(&v, class)| (v, class.core()))
        .collect();
    QuotientH { graph, j_to_h, psi }
}

/// The triple `(t, t, C)` for `phi(v) = (t, C)`.
pub fn psi_triple(j: &JGraph, forest: &CoreForest, v: Vertex) -> Option<JVertex> {
    let c = forest.phi(v)?;
    j.triple(forest.core(c).birthday, c)
}

/// Minimum number of red edges over all `x`-`y` paths of `J`.
pub fn red_distance(j: &JGraph, x: JVertex, y: JVertex) -> Result<Distance, QuotientError> {
    let ix = j.index_of(x).ok_or(QuotientError::UnknownVertex(x))?;
    let iy = j.index_of(y).ok_or(QuotientError::UnknownVertex(y))?;
    Ok(Distance::from_raw(j.red_distances_from(&[ix])[iy]))
}

/// Exhaustive checks of claims (7) through (12).
///
/// Claim (10) is checked as: every green edge joins two triples of one core
/// at parent and child nodes, each core's triples are green-connected, and
/// claim (9) holds.
pub fn check_quotient_claims(j: &JGraph, h: &QuotientH, forest: &CoreForest, gprime: &Graph, k: usize) -> ClaimReport {
    let k = k as u64;
    let mut report = ClaimReport::default();
    let home = |c: CoreId| j.index_of(JVertex {
        s: forest.core(c).birthday,
        t: forest.core(c).birthday,
        core: c,
    });

    let mut psi_idx: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut missing = None;
    for &v in gprime.vertices() {
        match h.psi.get(&v).and_then(|&c| home(c)) {
            Some(i) => {
                psi_idx.insert(v, i);
            }
            None => missing = missing.or(Some(v)),
        }
    }
    let sources: BTreeSet<usize> = psi_idx.values().copied().collect();
    let rows: HashMap<usize, Vec<u32>> = sources
        .par_iter()
        .map(|&s| (s, j.red_distances_from(&[s])))
        .collect();
    let fmt_red = |d: u32| Distance::from_raw(d).to_string();

    let mut c7 = ClaimCheck::new();
    if let Some(v) = missing {
        c7.check(false, || format!("vertex {v} has no psi triple"));
    }
    for core in forest.cores() {
        let Some(target) = home(core.id) else {
            c7.check(false, || format!("core {} has no home triple", core.id.0));
            continue;
        };
        for &v in &core.vertices {
            let Some(&src) = psi_idx.get(&v) else { continue };
            let d = rows[&src][target];
            c7.check(d != UNREACHABLE && u64::from(d) < k, || {
                format!(
                    "vertex {v}: red distance from psi {} to {} is {} > k-1 = {}",
                    j.vertex_at(src),
                    j.vertex_at(target),
                    fmt_red(d),
                    k - 1
                )
            });
        }
    }
    report.insert(7, c7.finish());

    let mut c8 = ClaimCheck::new();
    for (u, v) in gprime.edges() {
        let (Some(&a), Some(&b)) = (psi_idx.get(&u), psi_idx.get(&v)) else {
            c8.check(false, || format!("edge {u}-{v} has an endpoint without psi"));
            continue;
        };
        let d = rows[&a][b];
        c8.check(d != UNREACHABLE && u64::from(d) <= k, || {
            format!("edge {u}-{v}: red distance between psi triples is {} > k = {k}", fmt_red(d))
        });
    }
    report.insert(8, c8.finish());

    let mut c9 = ClaimCheck::new();
    let mut widest = 0;
    let diameters: Vec<Distance> = forest
        .cores()
        .par_iter()
        .map(|core| gprime.induced_subgraph(&core.vertices).diameter())
        .collect();
    for (core, &diam) in forest.cores().iter().zip(&diameters) {
        if let Some(d) = diam.finite() {
            widest = widest.max(d);
        }
        c9.check(diam.finite().is_some_and(|d| d < 2 * k), || {
            format!("core {}: induced diameter {diam} > 2k-1 = {}", core.id.0, 2 * k - 1)
        });
    }
    c9.note(format!("max core diameter: {widest}"));
    let c9 = c9.finish();

    let mut c10 = ClaimCheck::new();
    let tree = forest.tree();
    let mut green_per_core: BTreeMap<CoreId, usize> = BTreeMap::new();
    for e in j.edges().filter(|e| e.color == Color::Green) {
        let linked = tree.parent(e.u.s) == Some(e.v.s) || tree.parent(e.v.s) == Some(e.u.s);
        c10.check(e.u.core == e.v.core && e.u.t == e.v.t && linked, || {
            format!("green edge {}-{} does not join parent and child copies of one core", e.u, e.v)
        });
        *green_per_core.entry(e.u.core).or_default() += 1;
    }
    for core in forest.cores() {
        let triples = forest.spread(core.id).len();
        let green = green_per_core.get(&core.id).copied().unwrap_or(0);
        c10.check(triples > 0 && green + 1 == triples, || {
            format!("core {}: {triples} triples joined by {green} green edges", core.id.0)
        });
    }
    if !c9.passed {
        c10.check(false, || "core diameter bound fails".into());
    }
    report.insert(9, c9);
    report.insert(10, c10.finish());

    let mut c11 = ClaimCheck::new();
    let table = gprime.all_pairs();
    let verts = gprime.vertices();
    for (i, &v1) in verts.iter().enumerate() {
        let Some(row) = psi_idx.get(&v1).map(|s| &rows[s]) else { continue };
        for (jx, &v2) in verts.iter().enumerate() {
            let Some(&b) = psi_idx.get(&v2) else { continue };
            let n = row[b];
            if n == UNREACHABLE {
                continue;
            }
            let bound = (2 * k + 2) * u64::from(n) + 2 * k - 1;
            let d = table.get(i, jx);
            c11.check(d.finite().is_some_and(|d| d <= bound), || {
                format!("vertices {v1},{v2}: distance {d} > (2k+2)*{n}+2k-1 = {bound}")
            });
        }
    }
    report.insert(11, c11.finish());

    let mut c12 = ClaimCheck::new();
    let all_sources: Vec<usize> = sources.iter().copied().collect();
    let reach = j.red_distances_from(&all_sources);
    for (i, &d) in reach.iter().enumerate() {
        c12.check(d != UNREACHABLE && u64::from(d) < k, || {
            format!(
                "J vertex {} is at red distance {} > k-1 = {} from every psi triple",
                j.vertex_at(i),
                fmt_red(d),
                k - 1
            )
        });
    }
    report.insert(12, c12.finish());
    report
}
