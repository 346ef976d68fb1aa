//! Finite simple undirected graphs and the distance primitives the rest of
//! the crate is built on.
//!
//! Vertices carry caller-chosen integer ids. Internally every graph keeps a
//! dense index (ids sorted ascending) so that breadth-first searches can use
//! flat arrays; the `*_at` / `*_from_index` methods expose that layer for hot
//! loops, everything else speaks in ids.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Vertex identifier of a [`Graph`].
pub type Vertex = usize;

/// Ordered vertex set; ascending iteration keeps every construction reproducible.
pub type VertexSet = BTreeSet<Vertex>;

/// Marker for "unreachable" in the dense distance arrays.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(Vertex, Vertex),
    #[error("vertex set must be nonempty")]
    EmptySet,
}

/// Shortest-path length, or `Infinite` when no path exists.
///
/// `Finite` sorts before `Infinite`, so `min`/`max` behave as expected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u64),
    Infinite,
}

impl Distance {
    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    /// Converts a dense BFS entry.
    pub fn from_raw(raw: u32) -> Self {
        if raw == UNREACHABLE {
            Distance::Infinite
        } else {
            Distance::Finite(u64::from(raw))
        }
    }
}

impl std::ops::Add for Distance {
    type Output = Distance;

    fn add(self, rhs: Distance) -> Distance {
        match (self, rhs) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a + b),
            _ => Distance::Infinite,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(d) => s.serialize_u64(*d),
            Distance::Infinite => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Distance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Option::<u64>::deserialize(d)? {
            Some(v) => Distance::Finite(v),
            None => Distance::Infinite,
        })
    }
}

/// Immutable finite simple graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.ids)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    /// Builds a graph, rejecting duplicate ids, loops, parallel edges and
    /// edges with an endpoint outside the vertex list.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = Vertex>,
        E: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut ids: Vec<Vertex> = vertices.into_iter().collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateVertex(w[0]));
        }
        let index: HashMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        let mut seen = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let iu = *index.get(&u).ok_or(GraphError::UnknownVertex(u))?;
            let iv = *index.get(&v).ok_or(GraphError::UnknownVertex(v))?;
            let key = (iu.min(iv), iu.max(iv));
            if !seen.insert(key) {
                return Err(GraphError::ParallelEdge(u.min(v), u.max(v)));
            }
            adj[iu].push(iv);
            adj[iv].push(iu);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            ids,
            index,
            adj,
            edge_count: seen.len(),
        })
    }

    /// Like [`Graph::new`] but silently merges repeated edges.
    pub fn new_merging<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = Vertex>,
        E: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let canon: BTreeSet<(Vertex, Vertex)> = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        Graph::new(vertices, canon)
    }

    pub fn empty() -> Self {
        Graph::new(std::iter::empty(), std::iter::empty()).expect("empty graph is valid")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Vertex ids in ascending order; position `i` is the dense index of the id.
    pub fn vertices(&self) -> &[Vertex] {
        &self.ids
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.ids.iter().copied().collect()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.index.contains_key(&v)
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn vertex_at(&self, i: usize) -> Vertex {
        self.ids[i]
    }

    /// Dense indices of the neighbours of dense index `i`, ascending.
    pub fn neighbors_at(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let list: &[usize] = match self.index_of(v) {
            Some(i) => &self.adj[i],
            None => &[],
        };
        list.iter().map(move |&j| self.ids[j])
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.index_of(v).map_or(0, |i| self.adj[i].len())
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(iu), Some(iv)) => self.adj[iu].binary_search(&iv).is_ok(),
            _ => false,
        }
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(i, list)| {
            list.iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (self.ids[i], self.ids[j]))
        })
    }

    fn require(&self, v: Vertex) -> Result<usize, GraphError> {
        self.index_of(v).ok_or(GraphError::UnknownVertex(v))
    }

    fn indices_of(&self, set: &VertexSet) -> Result<Vec<usize>, GraphError> {
        set.iter().map(|&v| self.require(v)).collect()
    }

    /// Dense BFS from a set of dense sources, optionally stopping at depth `limit`.
    /// Entries beyond the limit (or unreachable) are [`UNREACHABLE`].
    pub fn bfs_from_indices(&self, sources: &[usize], limit: Option<u32>) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            let d = dist[x];
            if limit.is_some_and(|l| d >= l) {
                continue;
            }
            for &y in &self.adj[x] {
                if dist[y] == UNREACHABLE {
                    dist[y] = d + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn bfs_from_index(&self, i: usize) -> Vec<u32> {
        self.bfs_from_indices(&[i], None)
    }

    /// Shortest-path edge counts from `source` to every vertex.
    pub fn bfs_distances(&self, source: Vertex) -> Result<BTreeMap<Vertex, Distance>, GraphError> {
        let s = self.require(source)?;
        let dist = self.bfs_from_index(s);
        Ok(self
            .ids
            .iter()
            .zip(dist)
            .map(|(&v, d)| (v, Distance::from_raw(d)))
            .collect())
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> Result<Distance, GraphError> {
        let iu = self.require(u)?;
        let iv = self.require(v)?;
        Ok(Distance::from_raw(self.bfs_from_index(iu)[iv]))
    }

    /// `min dist(x, y)` over `x in xs`, `y in ys`; zero when the sets meet.
    pub fn set_distance(&self, xs: &VertexSet, ys: &VertexSet) -> Result<Distance, GraphError> {
        if xs.is_empty() || ys.is_empty() {
            return Err(GraphError::EmptySet);
        }
        let src = self.indices_of(xs)?;
        let dst = self.indices_of(ys)?;
        let dist = self.bfs_from_indices(&src, None);
        Ok(dst
            .iter()
            .map(|&j| Distance::from_raw(dist[j]))
            .min()
            .unwrap_or(Distance::Infinite))
    }

    /// Maximum pairwise distance within `xs`, measured in the whole graph.
    pub fn subset_diameter(&self, xs: &VertexSet) -> Result<Distance, GraphError> {
        if xs.is_empty() {
            return Err(GraphError::EmptySet);
        }
        let idx = self.indices_of(xs)?;
        let mut best = Distance::Finite(0);
        for &s in &idx {
            let dist = self.bfs_from_index(s);
            for &t in &idx {
                best = best.max(Distance::from_raw(dist[t]));
            }
            if best == Distance::Infinite {
                break;
            }
        }
        Ok(best)
    }

    /// Diameter of the graph itself; `Finite(0)` for the empty graph.
    pub fn diameter(&self) -> Distance {
        (0..self.len())
            .map(|i| {
                self.bfs_from_index(i)
                    .into_iter()
                    .map(Distance::from_raw)
                    .max()
                    .unwrap_or(Distance::Finite(0))
            })
            .max()
            .unwrap_or(Distance::Finite(0))
    }

    /// Connected components, ordered by their smallest vertex id.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut set = VertexSet::new();
            let mut stack = vec![start];
            comp[start] = id;
            while let Some(x) = stack.pop() {
                set.insert(self.ids[x]);
                for &y in &self.adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        stack.push(y);
                    }
                }
            }
            out.push(set);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// True iff the sets are disjoint and no edge joins them.
    pub fn is_anticomplete(&self, xs: &VertexSet, ys: &VertexSet) -> bool {
        if !xs.is_disjoint(ys) {
            return false;
        }
        xs.iter().all(|&x| self.neighbors(x).all(|y| !ys.contains(&y)))
    }

    /// Subgraph induced on `keep` (ids outside the graph are ignored).
    pub fn induced_subgraph(&self, keep: &VertexSet) -> Graph {
        let vertices: Vec<Vertex> = keep.iter().copied().filter(|v| self.contains(*v)).collect();
        let edges: Vec<(Vertex, Vertex)> = self
            .edges()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v))
            .collect();
        Graph::new(vertices, edges).expect("induced subgraph of a simple graph is simple")
    }

    /// All-pairs distances, one BFS per vertex, run in parallel.
    pub fn all_pairs(&self) -> DistanceTable {
        let rows: Vec<Vec<u32>> = (0..self.len())
            .into_par_iter()
            .map(|i| self.bfs_from_index(i))
            .collect();
        DistanceTable { rows }
    }
}

/// Dense all-pairs distance table indexed by dense vertex indices.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    rows: Vec<Vec<u32>>,
}

impl DistanceTable {
    pub fn get(&self, i: usize, j: usize) -> Distance {
        Distance::from_raw(self.rows[i][j])
    }

    pub fn raw(&self, i: usize, j: usize) -> u32 {
        self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
