//! Tree-, path-, pseudo-tree- and pseudo-path-decompositions: representation,
//! validation, width, and ball-cover certificates for bags.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Distance, Graph, Vertex, VertexSet};

/// Node identifier of an index tree.
pub type Node = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("index tree has no nodes")]
    EmptyTree,
    #[error("duplicate tree node {0}")]
    DuplicateNode(Node),
    #[error("unknown tree node {0}")]
    UnknownNode(Node),
    #[error("index graph is not a tree: {0}")]
    NotATree(String),
    #[error("bag of node {node} references unknown graph vertex {vertex}")]
    UnknownGraphVertex { node: Node, vertex: Vertex },
    #[error("decomposition has no bags")]
    EmptyDecomposition,
    #[error("expected a {expected} decomposition, got {actual}")]
    ModeMismatch { expected: &'static str, actual: Mode },
    #[error("cover certificate does not index the decomposition nodes (node {0})")]
    CoverIndexMismatch(Node),
}

/// Which axioms a [`Decomposition`] is meant to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Tree,
    Path,
    PseudoTree,
    PseudoPath,
}

impl Mode {
    pub fn is_pseudo(self) -> bool {
        matches!(self, Mode::PseudoTree | Mode::PseudoPath)
    }

    pub fn requires_path(self) -> bool {
        matches!(self, Mode::Path | Mode::PseudoPath)
    }

    /// The pseudo counterpart of a plain mode (identity on pseudo modes).
    pub fn relaxed(self) -> Mode {
        match self {
            Mode::Tree => Mode::PseudoTree,
            Mode::Path => Mode::PseudoPath,
            m => m,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Tree => "tree",
            Mode::Path => "path",
            Mode::PseudoTree => "pseudo_tree",
            Mode::PseudoPath => "pseudo_path",
        })
    }
}

/// A finite tree on integer node ids, with an optional distinguished root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexTree {
    nodes: Vec<Node>,
    edges: Vec<(Node, Node)>,
    root: Option<Node>,
    adj: BTreeMap<Node, Vec<Node>>,
}

impl IndexTree {
    pub fn new<N, E>(nodes: N, edges: E, root: Option<Node>) -> Result<Self, DecompError>
    where
        N: IntoIterator<Item = Node>,
        E: IntoIterator<Item = (Node, Node)>,
    {
        let mut node_list: Vec<Node> = nodes.into_iter().collect();
        node_list.sort_unstable();
        if node_list.is_empty() {
            return Err(DecompError::EmptyTree);
        }
        if let Some(w) = node_list.windows(2).find(|w| w[0] == w[1]) {
            return Err(DecompError::DuplicateNode(w[0]));
        }
        let mut adj: BTreeMap<Node, Vec<Node>> = node_list.iter().map(|&t| (t, Vec::new())).collect();
        let mut edge_set = BTreeSet::new();
        for (s, t) in edges {
            if s == t {
                return Err(DecompError::NotATree(format!("loop at node {s}")));
            }
            for x in [s, t] {
                if !adj.contains_key(&x) {
                    return Err(DecompError::UnknownNode(x));
                }
            }
            if !edge_set.insert((s.min(t), s.max(t))) {
                return Err(DecompError::NotATree(format!("repeated edge {s}-{t}")));
            }
            adj.get_mut(&s).unwrap().push(t);
            adj.get_mut(&t).unwrap().push(s);
        }
        if edge_set.len() + 1 != node_list.len() {
            return Err(DecompError::NotATree(format!(
                "{} nodes but {} edges",
                node_list.len(),
                edge_set.len()
            )));
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        // n - 1 edges plus connectivity implies acyclic.
        let mut seen = BTreeSet::from([node_list[0]]);
        let mut stack = vec![node_list[0]];
        while let Some(x) = stack.pop() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != node_list.len() {
            return Err(DecompError::NotATree("disconnected".into()));
        }
        if let Some(r) = root {
            if !adj.contains_key(&r) {
                return Err(DecompError::UnknownNode(r));
            }
        }
        Ok(IndexTree {
            nodes: node_list,
            edges: edge_set.into_iter().collect(),
            root,
            adj,
        })
    }

    /// A path `nodes[0] - nodes[1] - ...` rooted at its first node.
    pub fn path(nodes: &[Node]) -> Result<Self, DecompError> {
        IndexTree::new(
            nodes.iter().copied(),
            nodes.windows(2).map(|w| (w[0], w[1])),
            nodes.first().copied(),
        )
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Edges as `(s, t)` with `s < t`, ascending.
    pub fn edges(&self) -> &[(Node, Node)] {
        &self.edges
    }

    pub fn root(&self) -> Option<Node> {
        self.root
    }

    pub fn with_root(mut self, root: Option<Node>) -> Result<Self, DecompError> {
        if let Some(r) = root {
            if !self.contains(r) {
                return Err(DecompError::UnknownNode(r));
            }
        }
        self.root = root;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, t: Node) -> bool {
        self.adj.contains_key(&t)
    }

    pub fn neighbors(&self, t: Node) -> &[Node] {
        self.adj.get(&t).map_or(&[], |v| v.as_slice())
    }

    pub fn is_path(&self) -> bool {
        self.adj.values().all(|n| n.len() <= 2)
    }

    /// Roots the tree at its stored root, or at its smallest node id.
    pub fn rooted(&self) -> RootedTree {
        self.rooted_at(self.root.unwrap_or(self.nodes[0]))
    }

    pub fn rooted_at(&self, root: Node) -> RootedTree {
        RootedTree::new(self, root)
    }

    /// Induced subtree on `keep`; errors if the selection is not connected.
    pub fn induced(&self, keep: &BTreeSet<Node>, root: Option<Node>) -> Result<IndexTree, DecompError> {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|(s, t)| keep.contains(s) && keep.contains(t));
        IndexTree::new(keep.iter().copied(), edges, root.filter(|r| keep.contains(r)))
    }
}

/// A tree with a fixed root: parent, height, children, and ancestor queries.
#[derive(Debug, Clone)]
pub struct RootedTree {
    root: Node,
    index: HashMap<Node, usize>,
    nodes: Vec<Node>,
    parent: Vec<Option<usize>>,
    height: Vec<usize>,
    children: Vec<Vec<usize>>,
    enter: Vec<usize>,
    exit: Vec<usize>,
    order: Vec<Node>,
}

impl RootedTree {
    fn new(tree: &IndexTree, root: Node) -> Self {
        let nodes = tree.nodes.clone();
        let index: HashMap<Node, usize> = nodes.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let n = nodes.len();
        let mut parent = vec![None; n];
        let mut height = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut enter = vec![0; n];
        let mut exit = vec![0; n];
        let r = index[&root];
        // Iterative DFS for Euler enter/exit stamps.
        let mut clock = 0;
        let mut stack: Vec<(usize, usize)> = vec![(r, 0)];
        enter[r] = clock;
        clock += 1;
        while let Some(&(x, next)) = stack.last() {
            let nbrs = tree.neighbors(nodes[x]);
            if next < nbrs.len() {
                let y = index[&nbrs[next]];
                stack.last_mut().expect("nonempty").1 += 1;
                if Some(y) == parent[x] {
                    continue;
                }
                parent[y] = Some(x);
                height[y] = height[x] + 1;
                children[x].push(y);
                enter[y] = clock;
                clock += 1;
                stack.push((y, 0));
            } else {
                exit[x] = clock;
                clock += 1;
                stack.pop();
            }
        }
        let mut order = nodes.clone();
        order.sort_by_key(|t| (height[index[t]], *t));
        RootedTree {
            root,
            index,
            nodes,
            parent,
            height,
            children,
            enter,
            exit,
            order,
        }
    }

    fn idx(&self, t: Node) -> usize {
        self.index[&t]
    }

    pub fn root(&self) -> Node {
        self.root
    }

    pub fn contains(&self, t: Node) -> bool {
        self.index.contains_key(&t)
    }

    pub fn parent(&self, t: Node) -> Option<Node> {
        self.parent[self.idx(t)].map(|p| self.nodes[p])
    }

    pub fn height(&self, t: Node) -> usize {
        self.height[self.idx(t)]
    }

    /// Children in ascending id order.
    pub fn children(&self, t: Node) -> impl Iterator<Item = Node> + '_ {
        self.children[self.idx(t)].iter().map(move |&c| self.nodes[c])
    }

    /// All nodes, by nondecreasing height, ties by ascending id.
    pub fn order(&self) -> &[Node] {
        &self.order
    }

    /// True if `a` lies on the path from the root to `b` (including `a == b`).
    pub fn is_ancestor(&self, a: Node, b: Node) -> bool {
        let (ia, ib) = (self.idx(a), self.idx(b));
        self.enter[ia] <= self.enter[ib] && self.exit[ib] <= self.exit[ia]
    }

    pub fn is_strict_ancestor(&self, a: Node, b: Node) -> bool {
        a != b && self.is_ancestor(a, b)
    }

    /// Nodes on the path from the root to `t`, root first.
    pub fn path_from_root(&self, t: Node) -> Vec<Node> {
        let mut path = vec![t];
        let mut cur = t;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// `t` and all its descendants, in preorder.
    pub fn descendants(&self, t: Node) -> Vec<Node> {
        let mut out = Vec::new();
        let mut stack = vec![self.idx(t)];
        while let Some(x) = stack.pop() {
            out.push(self.nodes[x]);
            stack.extend(self.children[x].iter().rev());
        }
        out
    }
}

/// A tree-indexed family of bags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub tree: IndexTree,
    pub bags: BTreeMap<Node, VertexSet>,
    pub mode: Mode,
}

impl Decomposition {
    /// Every tree node gets a bag; nodes absent from `bags` get an empty one.
    pub fn new(tree: IndexTree, mut bags: BTreeMap<Node, VertexSet>, mode: Mode) -> Result<Self, DecompError> {
        if let Some(&t) = bags.keys().find(|t| !tree.contains(**t)) {
            return Err(DecompError::UnknownNode(t));
        }
        for &t in tree.nodes() {
            bags.entry(t).or_default();
        }
        Ok(Decomposition { tree, bags, mode })
    }

    /// A path decomposition with nodes `0..bags.len()`.
    pub fn from_bag_sequence(bags: Vec<VertexSet>, mode: Mode) -> Result<Self, DecompError> {
        let nodes: Vec<Node> = (0..bags.len()).collect();
        let tree = IndexTree::path(&nodes)?;
        Decomposition::new(tree, bags.into_iter().enumerate().collect(), mode)
    }

    /// The one-bag decomposition holding every vertex.
    pub fn trivial(g: &Graph) -> Self {
        let tree = IndexTree::new([0], [], Some(0)).expect("single node tree");
        Decomposition::new(tree, BTreeMap::from([(0, g.vertex_set())]), Mode::Tree).expect("node 0 exists")
    }

    pub fn bag(&self, t: Node) -> &VertexSet {
        &self.bags[&t]
    }

    /// Bags in the order of a path tree, starting from its root (or lowest-id end).
    pub fn bag_sequence(&self) -> Option<Vec<&VertexSet>> {
        if !self.tree.is_path() {
            return None;
        }
        let start = match self.tree.root() {
            Some(r) if self.tree.neighbors(r).len() <= 1 => r,
            _ => *self.tree.nodes().iter().find(|t| self.tree.neighbors(**t).len() <= 1)?,
        };
        let rooted = self.tree.rooted_at(start);
        let mut seq = Vec::new();
        let mut cur = Some(start);
        while let Some(t) = cur {
            seq.push(&self.bags[&t]);
            cur = rooted.children(t).next();
        }
        Some(seq)
    }

    fn check_vertices(&self, g: &Graph) -> Result<(), DecompError> {
        for (&node, bag) in &self.bags {
            if let Some(&vertex) = bag.iter().find(|v| !g.contains(**v)) {
                return Err(DecompError::UnknownGraphVertex { node, vertex });
            }
        }
        Ok(())
    }
}

/// One failed axiom, with its witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    VertexUncovered { vertex: Vertex },
    EdgeUncovered { u: Vertex, v: Vertex },
    NotSubtree { vertex: Vertex },
    NotAPath,
    TooManyCoverSets { node: Node, count: usize, k: usize },
    CoverUnionMismatch { node: Node },
    EmptyCoverSet { node: Node, index: usize },
    CoverDiameter { node: Node, index: usize, diameter: Distance, r: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::VertexUncovered { vertex } => write!(f, "vertex {vertex} uncovered"),
            Violation::EdgeUncovered { u, v } => write!(f, "edge {u}-{v} uncovered"),
            Violation::NotSubtree { vertex } => write!(f, "bags containing vertex {vertex} do not form a subtree"),
            Violation::NotAPath => f.write_str("path mode but index tree is not a path"),
            Violation::TooManyCoverSets { node, count, k } => {
                write!(f, "node {node} uses {count} cover sets, more than k = {k}")
            }
            Violation::CoverUnionMismatch { node } => write!(f, "cover sets of node {node} do not union to its bag"),
            Violation::EmptyCoverSet { node, index } => write!(f, "cover set {index} of node {node} is empty"),
            Violation::CoverDiameter { node, index, diameter, r } => {
                write!(f, "cover set {index} of node {node} has diameter {diameter} > r = {r}")
            }
        }
    }
}

/// Collected axiom violations; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

fn validate_common(g: &Graph, d: &Decomposition, pseudo: bool) -> Result<ValidationReport, DecompError> {
    d.check_vertices(g)?;
    let mut violations = Vec::new();
    if d.mode.requires_path() && !d.tree.is_path() {
        violations.push(Violation::NotAPath);
    }

    let mut occurrences: HashMap<Vertex, usize> = HashMap::new();
    for bag in d.bags.values() {
        for &v in bag {
            *occurrences.entry(v).or_default() += 1;
        }
    }
    let mut covered: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for bag in d.bags.values() {
        for &u in bag {
            for v in g.neighbors(u) {
                if u < v && bag.contains(&v) {
                    covered.insert((u, v));
                }
            }
        }
    }
    if pseudo {
        for &(s, t) in d.tree.edges() {
            let (bs, bt) = (&d.bags[&s], &d.bags[&t]);
            let only_s: Vec<_> = bs.difference(bt).take(2).collect();
            let only_t: Vec<_> = bt.difference(bs).take(2).collect();
            if let ([&u], [&v]) = (only_s.as_slice(), only_t.as_slice()) {
                covered.insert((u.min(v), u.max(v)));
            }
        }
    }
    for (u, v) in g.edges() {
        if !covered.contains(&(u, v)) {
            violations.push(Violation::EdgeUncovered { u, v });
        }
    }
    for &v in g.vertices() {
        if !occurrences.contains_key(&v) {
            violations.push(Violation::VertexUncovered { vertex: v });
        }
    }

    // The nodes holding v span a forest; it is a subtree iff it has
    // exactly (count - 1) internal tree edges.
    let mut internal: HashMap<Vertex, usize> = HashMap::new();
    for &(s, t) in d.tree.edges() {
        for &v in d.bags[&s].intersection(&d.bags[&t]) {
            *internal.entry(v).or_default() += 1;
        }
    }
    let mut split: Vec<Vertex> = occurrences
        .iter()
        .filter(|(v, &count)| internal.get(v).copied().unwrap_or(0) + 1 != count)
        .map(|(&v, _)| v)
        .collect();
    split.sort_unstable();
    violations.extend(split.into_iter().map(|vertex| Violation::NotSubtree { vertex }));

    Ok(ValidationReport { violations })
}

/// Checks the three tree-decomposition axioms (plus path shape in `Path` mode).
pub fn validate_tree_decomposition(g: &Graph, d: &Decomposition) -> Result<ValidationReport, DecompError> {
    if d.mode.is_pseudo() {
        return Err(DecompError::ModeMismatch {
            expected: "tree or path",
            actual: d.mode,
        });
    }
    validate_common(g, d, false)
}

/// As [`validate_tree_decomposition`], but an edge `uv` may instead be
/// realised by a tree edge `st` with `B_s \ B_t = {u}` and `B_t \ B_s = {v}`.
pub fn validate_pseudo_tree_decomposition(g: &Graph, d: &Decomposition) -> Result<ValidationReport, DecompError> {
    if !d.mode.is_pseudo() {
        return Err(DecompError::ModeMismatch {
            expected: "pseudo_tree or pseudo_path",
            actual: d.mode,
        });
    }
    validate_common(g, d, true)
}

/// Dispatches on the decomposition's mode.
pub fn validate(g: &Graph, d: &Decomposition) -> Result<ValidationReport, DecompError> {
    validate_common(g, d, d.mode.is_pseudo())
}

/// Largest bag size minus one; `-1` when every bag is empty.
pub fn width(d: &Decomposition) -> Result<i64, DecompError> {
    d.bags
        .values()
        .map(|b| b.len() as i64 - 1)
        .max()
        .ok_or(DecompError::EmptyDecomposition)
}

/// Presentation of every bag as a union of at most `k` sets of diameter at most `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallCoverCert {
    pub k: usize,
    pub r: u64,
    pub covers: BTreeMap<Node, Vec<VertexSet>>,
}

impl BallCoverCert {
    /// Singleton cover sets; valid with `k = width + 1`, `r = 0`.
    pub fn singletons(d: &Decomposition) -> Self {
        let covers: BTreeMap<Node, Vec<VertexSet>> = d
            .bags
            .iter()
            .map(|(&t, bag)| (t, bag.iter().map(|&v| VertexSet::from([v])).collect()))
            .collect();
        let k = d.bags.values().map(BTreeSet::len).max().unwrap_or(0).max(1);
        BallCoverCert { k, r: 0, covers }
    }
}

/// Checks that every bag is the union of its at most `k` cover sets and that
/// each cover set has diameter at most `r` in `g`.
pub fn validate_ball_cover(g: &Graph, d: &Decomposition, cert: &BallCoverCert) -> Result<ValidationReport, DecompError> {
    d.check_vertices(g)?;
    for &t in cert.covers.keys() {
        if !d.tree.contains(t) {
            return Err(DecompError::CoverIndexMismatch(t));
        }
    }
    for &t in d.tree.nodes() {
        if !cert.covers.contains_key(&t) {
            return Err(DecompError::CoverIndexMismatch(t));
        }
    }
    let mut diameters: HashMap<&VertexSet, Distance> = HashMap::new();
    let mut violations = Vec::new();
    for (&node, sets) in &cert.covers {
        if sets.len() > cert.k {
            violations.push(Violation::TooManyCoverSets {
                node,
                count: sets.len(),
                k: cert.k,
            });
        }
        let union: VertexSet = sets.iter().flatten().copied().collect();
        if &union != d.bag(node) {
            violations.push(Violation::CoverUnionMismatch { node });
        }
        for (index, set) in sets.iter().enumerate() {
            if set.is_empty() {
                violations.push(Violation::EmptyCoverSet { node, index });
                continue;
            }
            if set.iter().any(|v| !g.contains(*v)) {
                violations.push(Violation::CoverUnionMismatch { node });
                continue;
            }
            let diameter = *diameters
                .entry(set)
                .or_insert_with(|| g.subset_diameter(set).expect("nonempty set of graph vertices"));
            if diameter > Distance::Finite(cert.r) {
                violations.push(Violation::CoverDiameter {
                    node,
                    index,
                    diameter,
                    r: cert.r,
                });
            }
        }
    }
    Ok(ValidationReport { violations })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn set(xs: &[Vertex]) -> VertexSet {
        xs.iter().copied().collect()
    }

    fn path_graph() -> Graph {
        Graph::new([1, 2, 3], [(1, 2), (2, 3)]).unwrap()
    }

    pub(crate) fn cycle_decomposition(n: usize) -> (Graph, Decomposition) {
        let g = Graph::new(1..=n, (1..=n).map(|i| (i, i % n + 1))).unwrap();
        let nodes: Vec<Node> = (1..n).collect();
        let tree = IndexTree::path(&nodes).unwrap();
        let bags = nodes.iter().map(|&i| (i, set(&[i, i + 1, n]))).collect();
        (g, Decomposition::new(tree, bags, Mode::Tree).unwrap())
    }

    /// Betweenness axiom checked literally over all node triples.
    fn betweenness_oracle(d: &Decomposition) -> bool {
        let nodes = d.tree.nodes();
        for &a in nodes {
            let rooted = d.tree.rooted_at(a);
            for &c in nodes {
                let path = rooted.path_from_root(c);
                let common: VertexSet = d.bag(a).intersection(d.bag(c)).copied().collect();
                if path.iter().any(|b| !common.is_subset(d.bag(*b))) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn path_examples() {
        let g = path_graph();
        let d = Decomposition::from_bag_sequence(vec![set(&[1, 2]), set(&[2, 3])], Mode::Tree).unwrap();
        assert!(validate_tree_decomposition(&g, &d).unwrap().is_valid());
        assert_eq!(width(&d).unwrap(), 1);

        let d = Decomposition::from_bag_sequence(vec![set(&[1]), set(&[3])], Mode::Tree).unwrap();
        let report = validate_tree_decomposition(&g, &d).unwrap();
        assert!(report.violations.contains(&Violation::VertexUncovered { vertex: 2 }));
        assert!(report.violations.contains(&Violation::EdgeUncovered { u: 1, v: 2 }));
        assert_eq!(Violation::EdgeUncovered { u: 1, v: 2 }.to_string(), "edge 1-2 uncovered");
    }

    #[test]
    fn cycle_example_is_valid_width_two() {
        let (g, d) = cycle_decomposition(6);
        assert!(validate_tree_decomposition(&g, &d).unwrap().is_valid());
        assert_eq!(width(&d).unwrap(), 2);
        assert!(betweenness_oracle(&d));
    }

    #[test]
    fn pseudo_examples() {
        let k2 = Graph::new([1, 2], [(1, 2)]).unwrap();
        let d = Decomposition::from_bag_sequence(vec![set(&[1]), set(&[2])], Mode::PseudoPath).unwrap();
        assert!(validate_pseudo_tree_decomposition(&k2, &d).unwrap().is_valid());
        let plain = Decomposition { mode: Mode::Path, ..d.clone() };
        assert!(!validate_tree_decomposition(&k2, &plain).unwrap().is_valid());

        let d = Decomposition::from_bag_sequence(vec![set(&[1]), set(&[1])], Mode::PseudoPath).unwrap();
        let report = validate_pseudo_tree_decomposition(&k2, &d).unwrap();
        assert!(report.violations.contains(&Violation::VertexUncovered { vertex: 2 }));

        let g = path_graph();
        let d = Decomposition::from_bag_sequence(vec![set(&[1]), set(&[2]), set(&[3])], Mode::PseudoPath).unwrap();
        assert!(validate_pseudo_tree_decomposition(&g, &d).unwrap().is_valid());
        assert_eq!(width(&d).unwrap(), 0);
    }

    #[test]
    fn mode_and_index_errors() {
        let g = path_graph();
        let d = Decomposition::trivial(&g);
        assert!(matches!(
            validate_pseudo_tree_decomposition(&g, &d),
            Err(DecompError::ModeMismatch { .. })
        ));
        let bad = Decomposition::from_bag_sequence(vec![set(&[1, 9])], Mode::Tree).unwrap();
        assert_eq!(
            validate_tree_decomposition(&g, &bad),
            Err(DecompError::UnknownGraphVertex { node: 0, vertex: 9 })
        );
        assert!(matches!(IndexTree::new([0, 1, 2], [(0, 1), (1, 0)], None), Err(DecompError::NotATree(_))));
        assert!(matches!(
            IndexTree::new([0, 1, 2, 3], [(0, 1), (1, 2), (2, 0)], None),
            Err(DecompError::NotATree(_))
        ));
        assert_eq!(IndexTree::new([], [], None), Err(DecompError::EmptyTree));
    }

    #[test]
    fn path_mode_rejects_star() {
        let tree = IndexTree::new([0, 1, 2, 3], [(0, 1), (0, 2), (0, 3)], None).unwrap();
        let g = Graph::new([1], []).unwrap();
        let d = Decomposition::new(tree, BTreeMap::from([(0, set(&[1]))]), Mode::Path).unwrap();
        assert_eq!(validate_tree_decomposition(&g, &d).unwrap().violations, vec![Violation::NotAPath]);
    }

    #[test]
    fn subtree_violation_detected() {
        let g = Graph::new([1, 2], [(1, 2)]).unwrap();
        let d = Decomposition::from_bag_sequence(vec![set(&[1, 2]), set(&[2]), set(&[1])], Mode::Tree).unwrap();
        let report = validate_tree_decomposition(&g, &d).unwrap();
        assert_eq!(report.violations, vec![Violation::NotSubtree { vertex: 1 }]);
        assert!(!betweenness_oracle(&d));
    }

    #[test]
    fn width_edge_cases() {
        let d = Decomposition::from_bag_sequence(vec![set(&[4])], Mode::Tree).unwrap();
        assert_eq!(width(&d).unwrap(), 0);
        let d = Decomposition::from_bag_sequence(vec![set(&[])], Mode::Tree).unwrap();
        assert_eq!(width(&d).unwrap(), -1);
    }

    #[test]
    fn ball_cover_examples() {
        let (g, d) = cycle_decomposition(6);
        let covers = d
            .bags
            .keys()
            .map(|&i| (i, vec![set(&[i, i + 1]), set(&[6])]))
            .collect();
        let cert = BallCoverCert { k: 2, r: 1, covers };
        assert!(validate_ball_cover(&g, &d, &cert).unwrap().is_valid());
        let strict = BallCoverCert { r: 0, ..cert.clone() };
        let report = validate_ball_cover(&g, &d, &strict).unwrap();
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, Violation::CoverDiameter { diameter: Distance::Finite(1), .. })));
        assert!(!report.is_valid());

        let single = BallCoverCert::singletons(&d);
        assert_eq!(single.k as i64, width(&d).unwrap() + 1);
        assert!(validate_ball_cover(&g, &d, &single).unwrap().is_valid());

        let mut missing = cert.clone();
        missing.covers.remove(&1);
        assert_eq!(validate_ball_cover(&g, &d, &missing), Err(DecompError::CoverIndexMismatch(1)));
    }

    #[test]
    fn rooted_tree_queries() {
        let tree = IndexTree::new([1, 2, 3, 4, 5], [(1, 2), (1, 3), (3, 4), (3, 5)], Some(1)).unwrap();
        let r = tree.rooted();
        assert_eq!(r.height(4), 2);
        assert_eq!(r.parent(4), Some(3));
        assert!(r.is_ancestor(1, 5) && r.is_ancestor(3, 3) && !r.is_strict_ancestor(3, 3));
        assert!(!r.is_ancestor(2, 4));
        assert_eq!(r.path_from_root(5), vec![1, 3, 5]);
        assert_eq!(r.order(), &[1, 2, 3, 4, 5]);
        assert_eq!(r.descendants(3), vec![3, 4, 5]);
    }

    /// Random valid tree decomposition: each vertex lives on a random subtree,
    /// edges are drawn only between vertices whose subtrees meet.
    pub(crate) fn random_decomposition(seed: u64, max_nodes: usize, max_vertices: usize) -> (Graph, Decomposition) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = rng.gen_range(1..=max_nodes);
        let edges: Vec<(Node, Node)> = (1..nodes).map(|i| (rng.gen_range(0..i), i)).collect();
        let tree = IndexTree::new(0..nodes, edges.clone(), Some(0)).unwrap();
        let nv = rng.gen_range(1..=max_vertices);
        let mut bags: BTreeMap<Node, VertexSet> = (0..nodes).map(|t| (t, VertexSet::new())).collect();
        let mut homes: Vec<BTreeSet<Node>> = Vec::new();
        for v in 0..nv {
            let start = rng.gen_range(0..nodes);
            let mut sub = BTreeSet::from([start]);
            for _ in 0..rng.gen_range(0..3) {
                let frontier: Vec<Node> = edges
                    .iter()
                    .filter_map(|&(a, b)| match (sub.contains(&a), sub.contains(&b)) {
                        (true, false) => Some(b),
                        (false, true) => Some(a),
                        _ => None,
                    })
                    .collect();
                if frontier.is_empty() {
                    break;
                }
                sub.insert(frontier[rng.gen_range(0..frontier.len())]);
            }
            for &t in &sub {
                bags.get_mut(&t).unwrap().insert(v);
            }
            homes.push(sub);
        }
        let mut gedges = Vec::new();
        for u in 0..nv {
            for v in (u + 1)..nv {
                if !homes[u].is_disjoint(&homes[v]) && rng.gen_bool(0.4) {
                    gedges.push((u, v));
                }
            }
        }
        let g = Graph::new(0..nv, gedges).unwrap();
        (g, Decomposition::new(tree, bags, Mode::Tree).unwrap())
    }

    proptest! {
        #[test]
        fn subtree_check_matches_triple_oracle(seed in any::<u64>()) {
            let (g, mut d) = random_decomposition(seed, 8, 10);
            prop_assert!(validate_tree_decomposition(&g, &d).unwrap().is_valid());
            prop_assert!(betweenness_oracle(&d));
            // Corrupt one bag and compare the two checks again.
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
            let t = d.tree.nodes()[rng.gen_range(0..d.tree.len())];
            let v = rng.gen_range(0..g.len());
            let bag = d.bags.get_mut(&t).unwrap();
            if !bag.remove(&v) { bag.insert(v); }
            let report = validate_tree_decomposition(&g, &d).unwrap();
            let subtree_ok = !report.violations.iter().any(|x| matches!(x, Violation::NotSubtree { .. }));
            prop_assert_eq!(subtree_ok, betweenness_oracle(&d));
        }

        #[test]
        fn tree_valid_implies_pseudo_valid(seed in any::<u64>()) {
            let (g, d) = random_decomposition(seed, 12, 20);
            prop_assert!(validate_tree_decomposition(&g, &d).unwrap().is_valid());
            let relaxed = Decomposition { mode: Mode::PseudoTree, ..d };
            prop_assert!(validate_pseudo_tree_decomposition(&g, &relaxed).unwrap().is_valid());
        }

        #[test]
        fn width_invariant_under_relabel_and_reroot(seed in any::<u64>(), shift in 1usize..1000) {
            let (_, d) = random_decomposition(seed, 12, 20);
            let w = width(&d).unwrap();
            let tree = IndexTree::new(
                d.tree.nodes().iter().map(|t| t + shift),
                d.tree.edges().iter().map(|(s, t)| (s + shift, t + shift)),
                Some(d.tree.nodes()[d.tree.len() - 1] + shift),
            ).unwrap();
            let bags = d.bags.iter().map(|(t, b)| (t + shift, b.clone())).collect();
            let moved = Decomposition::new(tree, bags, Mode::Tree).unwrap();
            prop_assert_eq!(width(&moved).unwrap(), w);
        }

        #[test]
        fn trivial_decomposition_always_valid(seed in any::<u64>()) {
            let (g, _) = random_decomposition(seed, 6, 25);
            let d = Decomposition::trivial(&g);
            prop_assert!(validate_tree_decomposition(&g, &d).unwrap().is_valid());
        }
    }
}
