//! Cores, spreads and the vertex-to-core map.
//!
//! Tree nodes are processed by nondecreasing height. At a node `t`, a bag
//! vertex is *disqualified* when it lies in, or has a neighbour in, some core
//! born at a strict ancestor of `t` whose spread reaches `t`. The components of
//! the remaining vertices become the cores born at `t`, ordered by the birth
//! order. The spread of a new core `(t, C)` is the set of descendants `t'` of
//! `t` whose bag meets `C` and which lie in the spread of every ancestral core
//! reaching `t` and of every elder sibling. Each condition cuts out a subtree
//! through `t`, so the spread is collected by a pruned top-down walk.
//!
//! Once all cores exist, every vertex `v` gets a *source* (the highest node
//! whose bag holds it) and is either *central* (in a core born at its source)
//! or *peripheral* (adjacent to an ancestral core reaching its source). The map
//! `phi` sends central vertices to their core and peripheral vertices to the
//! highest, then eldest, such ancestral core.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::claims::{ClaimCheck, ClaimReport};
use crate::decomp::{self, BallCoverCert, DecompError, Decomposition, Node, RootedTree, Violation};
use crate::graph::{Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("decomposition is not a valid tree-decomposition: {0}")]
    InvalidDecomposition(Violation),
    #[error("cover set {index} of node {node} is not a clique")]
    NonCliqueCover { node: Node, index: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("root {0} is not a tree node")]
    UnknownRoot(Node),
    #[error("node {0} processed out of height order")]
    OutOfOrder(Node),
    #[error("spread dependencies of node {0} are not built yet")]
    DependencyNotReady(Node),
    #[error("vertex {0} is neither central nor peripheral")]
    Unclassifiable(Vertex),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoreId(pub usize);

/// A core `(t, C)`: birthday `t`, vertex set `C`, and its rank among the cores
/// born at `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Core {
    pub id: CoreId,
    pub birthday: Node,
    pub birth_index: usize,
    pub vertices: VertexSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "core", rename_all = "snake_case")]
pub enum Classification {
    Central(CoreId),
    Peripheral(CoreId),
}

impl Classification {
    pub fn core(self) -> CoreId {
        match self {
            Classification::Central(c) | Classification::Peripheral(c) => c,
        }
    }

    pub fn is_central(self) -> bool {
        matches!(self, Classification::Central(_))
    }
}

/// How cores born at the same node are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BirthOrder {
    /// Ascending smallest vertex id.
    #[default]
    MinVertex,
    /// A seeded random permutation at every node.
    Shuffled(u64),
}

/// The finished core structure over a rooted tree-decomposition.
#[derive(Debug, Clone)]
pub struct CoreForest {
    tree: RootedTree,
    bags: BTreeMap<Node, VertexSet>,
    k: usize,
    cores: Vec<Core>,
    spreads: Vec<BTreeSet<Node>>,
    covering: BTreeMap<Node, Vec<CoreId>>,
    by_birthday: BTreeMap<Node, Vec<CoreId>>,
    source: BTreeMap<Vertex, Node>,
    classification: BTreeMap<Vertex, Classification>,
}

impl CoreForest {
    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn root(&self) -> Node {
        self.tree.root()
    }

    pub fn bag(&self, t: Node) -> &VertexSet {
        &self.bags[&t]
    }

    pub fn bags(&self) -> &BTreeMap<Node, VertexSet> {
        &self.bags
    }

    /// Maximum number of cover cliques per bag.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub fn core(&self, id: CoreId) -> &Core {
        &self.cores[id.0]
    }

    pub fn spread(&self, id: CoreId) -> &BTreeSet<Node> {
        &self.spreads[id.0]
    }

    /// Cores whose spread contains `t`, in creation order.
    pub fn covering(&self, t: Node) -> &[CoreId] {
        self.covering.get(&t).map_or(&[], |v| v.as_slice())
    }

    /// Cores born at `t`, in birth order.
    pub fn born_at(&self, t: Node) -> &[CoreId] {
        self.by_birthday.get(&t).map_or(&[], |v| v.as_slice())
    }

    pub fn source(&self, v: Vertex) -> Option<Node> {
        self.source.get(&v).copied()
    }

    pub fn classification(&self, v: Vertex) -> Option<Classification> {
        self.classification.get(&v).copied()
    }

    pub fn classifications(&self) -> &BTreeMap<Vertex, Classification> {
        &self.classification
    }

    pub fn phi(&self, v: Vertex) -> Option<CoreId> {
        self.classification(v).map(Classification::core)
    }

    /// True if core `a` is built before core `b` (lower birthday height, or
    /// same birthday and earlier in the birth order).
    pub fn precedes(&self, a: CoreId, b: CoreId) -> bool {
        let key = |c: CoreId| {
            let core = self.core(c);
            (self.tree.height(core.birthday), core.birthday, core.birth_index)
        };
        key(a) < key(b)
    }
}

/// Central or peripheral classification with the core it maps to.
pub fn classify_vertex(forest: &CoreForest, v: Vertex) -> Result<Classification, CoreError> {
    forest.classification(v).ok_or(CoreError::UnknownVertex(v))
}

/// Incremental construction state; nodes must be processed by height.
#[derive(Debug)]
pub struct CoreBuilder<'g> {
    graph: &'g Graph,
    tree: RootedTree,
    bags: BTreeMap<Node, VertexSet>,
    k: usize,
    cores: Vec<Core>,
    spreads: Vec<BTreeSet<Node>>,
    covering: BTreeMap<Node, Vec<CoreId>>,
    by_birthday: BTreeMap<Node, Vec<CoreId>>,
    processed: HashSet<Node>,
    order: BirthOrder,
    rng: Option<ChaCha8Rng>,
}

impl<'g> CoreBuilder<'g> {
    /// Validates the input: `d` a tree-decomposition of connected `gprime`
    /// whose cover sets are all cliques.
    pub fn new(
        gprime: &'g Graph,
        d: &Decomposition,
        cert: &BallCoverCert,
        root: Node,
        order: BirthOrder,
    ) -> Result<Self, CoreError> {
        if !d.tree.contains(root) {
            return Err(CoreError::UnknownRoot(root));
        }
        let plain = Decomposition {
            mode: if d.mode.requires_path() { decomp::Mode::Path } else { decomp::Mode::Tree },
            ..d.clone()
        };
        if let Some(v) = decomp::validate_tree_decomposition(gprime, &plain)?.first() {
            return Err(CoreError::InvalidDecomposition(v.clone()));
        }
        if let Some(v) = decomp::validate_ball_cover(gprime, d, cert)?.first() {
            return Err(CoreError::InvalidDecomposition(v.clone()));
        }
        for (&node, sets) in &cert.covers {
            for (index, set) in sets.iter().enumerate() {
                let clique = set.iter().all(|&u| set.range(u + 1..).all(|&v| gprime.has_edge(u, v)));
                if !clique {
                    return Err(CoreError::NonCliqueCover { node, index });
                }
            }
        }
        if !gprime.is_connected() {
            return Err(CoreError::Disconnected);
        }
        Ok(CoreBuilder {
            graph: gprime,
            tree: d.tree.rooted_at(root),
            bags: d.bags.clone(),
            k: cert.k,
            cores: Vec::new(),
            spreads: Vec::new(),
            covering: BTreeMap::new(),
            by_birthday: BTreeMap::new(),
            processed: HashSet::new(),
            order,
            rng: match order {
                BirthOrder::MinVertex => None,
                BirthOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            },
        })
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub fn spread(&self, id: CoreId) -> Option<&BTreeSet<Node>> {
        self.spreads.get(id.0)
    }

    fn ancestors_ready(&self, t: Node) -> bool {
        let h = self.tree.height(t);
        self.tree
            .order()
            .iter()
            .take_while(|&&s| self.tree.height(s) < h)
            .all(|s| self.processed.contains(s))
    }

    /// Ancestral cores whose spread reaches `t`.
    fn active_at(&self, t: Node) -> Vec<CoreId> {
        self.covering
            .get(&t)
            .map(|ids| {
                ids.iter()
                    .copied()
                    .filter(|&c| self.tree.is_strict_ancestor(self.cores[c.0].birthday, t))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Vertices of `B_t` lying in, or adjacent to, an ancestral core that reaches `t`.
    pub fn disqualified_set(&self, t: Node) -> Result<VertexSet, CoreError> {
        if !self.tree.contains(t) {
            return Err(CoreError::UnknownRoot(t));
        }
        if !self.ancestors_ready(t) {
            return Err(CoreError::OutOfOrder(t));
        }
        let active = self.active_at(t);
        Ok(self.bags[&t]
            .iter()
            .copied()
            .filter(|&v| {
                active.iter().any(|c| {
                    let verts = &self.cores[c.0].vertices;
                    verts.contains(&v) || self.graph.neighbors(v).any(|u| verts.contains(&u))
                })
            })
            .collect())
    }

    /// Spread of a prospective core `(t, vertices)` given its elder siblings.
    pub fn compute_spread(&self, t: Node, vertices: &VertexSet, elders: &[CoreId]) -> Result<BTreeSet<Node>, CoreError> {
        if !self.ancestors_ready(t) {
            return Err(CoreError::DependencyNotReady(t));
        }
        if elders.iter().any(|e| e.0 >= self.spreads.len()) {
            return Err(CoreError::DependencyNotReady(t));
        }
        let constraints: Vec<&BTreeSet<Node>> = self
            .active_at(t)
            .into_iter()
            .chain(elders.iter().copied())
            .map(|c| &self.spreads[c.0])
            .collect();
        let admits = |s: Node| {
            !self.bags[&s].is_disjoint(vertices) && constraints.iter().all(|spread| spread.contains(&s))
        };
        let mut spread = BTreeSet::new();
        if !admits(t) {
            return Ok(spread);
        }
        let mut stack = vec![t];
        while let Some(s) = stack.pop() {
            spread.insert(s);
            stack.extend(self.tree.children(s).filter(|&c| admits(c)));
        }
        Ok(spread)
    }

    fn components_within(&self, z: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for &start in z {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = VertexSet::from([start]);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for y in self.graph.neighbors(x) {
                    if z.contains(&y) && seen.insert(y) {
                        comp.insert(y);
                        stack.push(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Creates every core born at `t`; returns their ids in birth order.
    pub fn process_node(&mut self, t: Node) -> Result<Vec<CoreId>, CoreError> {
        if self.processed.contains(&t) {
            return Err(CoreError::OutOfOrder(t));
        }
        let disqualified = self.disqualified_set(t)?;
        let z: VertexSet = self.bags[&t].difference(&disqualified).copied().collect();
        // Ascending smallest vertex: components_within visits starts in id order.
        let mut comps = self.components_within(&z);
        if let Some(rng) = self.rng.as_mut() {
            comps.shuffle(rng);
        }
        let mut born = Vec::with_capacity(comps.len());
        for (birth_index, vertices) in comps.into_iter().enumerate() {
            let spread = self.compute_spread(t, &vertices, &born)?;
            let id = CoreId(self.cores.len());
            for &s in &spread {
                self.covering.entry(s).or_default().push(id);
            }
            self.cores.push(Core {
                id,
                birthday: t,
                birth_index,
                vertices,
            });
            self.spreads.push(spread);
            born.push(id);
        }
        self.by_birthday.insert(t, born.clone());
        self.processed.insert(t);
        Ok(born)
    }

    /// Processes all remaining nodes and computes sources and `phi`.
    pub fn finish(mut self) -> Result<CoreForest, CoreError> {
        let order: Vec<Node> = self.tree.order().to_vec();
        for t in order.iter().copied().filter(|t| !self.processed.contains(t)).collect::<Vec<_>>() {
            self.process_node(t)?;
        }
        let mut source = BTreeMap::new();
        for &t in &order {
            for &v in &self.bags[&t] {
                source.entry(v).or_insert(t);
            }
        }
        let mut classification = BTreeMap::new();
        for (&v, &src) in &source {
            let central = self
                .by_birthday
                .get(&src)
                .and_then(|ids| ids.iter().copied().find(|c| self.cores[c.0].vertices.contains(&v)));
            let class = match central {
                Some(c) => Classification::Central(c),
                None => {
                    let best = self
                        .covering
                        .get(&src)
                        .into_iter()
                        .flatten()
                        .copied()
                        .filter(|c| self.cores[c.0].birthday != src)
                        .filter(|c| {
                            let verts = &self.cores[c.0].vertices;
                            self.graph.neighbors(v).any(|u| verts.contains(&u))
                        })
                        .min_by_key(|c| {
                            let core = &self.cores[c.0];
                            (self.tree.height(core.birthday), core.birth_index)
                        })
                        .ok_or(CoreError::Unclassifiable(v))?;
                    Classification::Peripheral(best)
                }
            };
            classification.insert(v, class);
        }
        Ok(CoreForest {
            tree: self.tree,
            bags: self.bags,
            k: self.k,
            cores: self.cores,
            spreads: self.spreads,
            covering: self.covering,
            by_birthday: self.by_birthday,
            source,
            classification,
        })
    }

    pub fn birth_order(&self) -> BirthOrder {
        self.order
    }
}

/// Builds the full core forest of `gprime` over `d` rooted at `root`.
pub fn build_cores(
    gprime: &Graph,
    d: &Decomposition,
    cert: &BallCoverCert,
    root: Node,
    order: BirthOrder,
) -> Result<CoreForest, CoreError> {
    CoreBuilder::new(gprime, d, cert, root, order)?.finish()
}

fn fmt_set(set: &VertexSet) -> String {
    let items: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(","))
}

/// Exhaustively checks claims (1) through (5) on a built forest.
///
/// 1. cores with intersecting spreads are anticomplete;
/// 2. at most `k` spreads contain any node;
/// 3. every vertex is exactly one of central and peripheral;
/// 4. for `v` in `B_t`, exactly one of: `v` peripheral with `t` in the spread
///    of `phi(v)`, or `t` in the spread of a core containing `v`;
/// 5. along every root path, the cores containing `v` (other than those born
///    with `phi(v)`) leave each earlier spread, start right below the previous
///    one, and number at most `k - 1`.
pub fn check_core_claims(forest: &CoreForest, gprime: &Graph) -> ClaimReport {
    let tree = forest.tree();
    let mut report = ClaimReport::default();

    let mut c1 = ClaimCheck::new();
    let mut pairs = BTreeSet::new();
    for t in tree.order() {
        let ids = forest.covering(*t);
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if pairs.insert((a.min(b), a.max(b))) {
                    let (ca, cb) = (forest.core(a), forest.core(b));
                    c1.check(gprime.is_anticomplete(&ca.vertices, &cb.vertices), || {
                        format!(
                            "cores {} {} and {} {} share node {t} but are not anticomplete",
                            ca.birthday,
                            fmt_set(&ca.vertices),
                            cb.birthday,
                            fmt_set(&cb.vertices)
                        )
                    });
                }
            }
        }
    }
    report.insert(1, c1.finish());

    let mut c2 = ClaimCheck::new();
    let mut most = 0;
    for &t in tree.order() {
        let n = forest.covering(t).len();
        most = most.max(n);
        c2.check(n <= forest.k(), || format!("node {t} lies in {n} spreads, k = {}", forest.k()));
    }
    c2.note(format!("max spreads per node: {most}"));
    report.insert(2, c2.finish());

    // Sources recomputed from the bags.
    let mut source: BTreeMap<Vertex, Node> = BTreeMap::new();
    for &t in tree.order() {
        for &v in forest.bag(t) {
            source.entry(v).or_insert(t);
        }
    }
    let adjacent_to = |v: Vertex, c: CoreId| {
        let verts = &forest.core(c).vertices;
        gprime.neighbors(v).any(|u| verts.contains(&u))
    };
    let is_peripheral = |v: Vertex| {
        let src = source[&v];
        forest
            .covering(src)
            .iter()
            .any(|&c| tree.is_strict_ancestor(forest.core(c).birthday, src) && adjacent_to(v, c))
    };

    let mut c3 = ClaimCheck::new();
    for &v in gprime.vertices() {
        let Some(&src) = source.get(&v) else {
            c3.check(false, || format!("vertex {v} is in no bag"));
            continue;
        };
        let central = forest.born_at(src).iter().any(|&c| forest.core(c).vertices.contains(&v));
        let peripheral = is_peripheral(v);
        c3.check(central != peripheral, || {
            format!("vertex {v}: central = {central}, peripheral = {peripheral}")
        });
    }
    report.insert(3, c3.finish());

    let mut c4 = ClaimCheck::new();
    for &t in tree.order() {
        for &v in forest.bag(t) {
            let Some(phi) = forest.phi(v) else {
                c4.check(false, || format!("vertex {v} has no phi"));
                continue;
            };
            let first = is_peripheral(v) && forest.spread(phi).contains(&t);
            let second = forest
                .covering(t)
                .iter()
                .any(|&c| forest.core(c).vertices.contains(&v));
            c4.check(first != second, || {
                format!("vertex {v} at node {t}: peripheral-branch = {first}, core-branch = {second}")
            });
        }
    }
    report.insert(4, c4.finish());

    let mut containing: BTreeMap<Vertex, Vec<CoreId>> = BTreeMap::new();
    for core in forest.cores() {
        for &v in &core.vertices {
            containing.entry(v).or_default().push(core.id);
        }
    }
    let mut c5 = ClaimCheck::new();
    let mut longest = 0;
    for &v in gprime.vertices() {
        let Some(phi) = forest.phi(v) else { continue };
        let t0 = forest.core(phi).birthday;
        let mine = containing.get(&v).cloned().unwrap_or_default();
        for &end in tree.order() {
            let mut chain: Vec<CoreId> = mine
                .iter()
                .copied()
                .filter(|&c| {
                    let b = forest.core(c).birthday;
                    b != t0 && tree.is_ancestor(b, end)
                })
                .collect();
            chain.sort_by_key(|&c| tree.height(forest.core(c).birthday));
            longest = longest.max(chain.len());
            let mut seq = vec![phi];
            seq.extend(chain.iter().copied());
            let mut ok = chain.len() < forest.k();
            let mut why = String::new();
            if !ok {
                why = format!("{} cores beyond phi, k = {}", chain.len(), forest.k());
            }
            for i in 1..seq.len() {
                let ti = forest.core(seq[i]).birthday;
                if ok && tree.height(ti) <= tree.height(forest.core(seq[i - 1]).birthday) {
                    ok = false;
                    why = format!("birthday heights not increasing at {ti}");
                }
                for &earlier in &seq[..i] {
                    if ok && forest.spread(earlier).contains(&ti) {
                        ok = false;
                        why = format!("node {ti} lies in spread of earlier core {}", earlier.0);
                    }
                }
                match tree.parent(ti) {
                    Some(p) if forest.spread(seq[i - 1]).contains(&p) => {}
                    _ if !ok => {}
                    _ => {
                        ok = false;
                        why = format!("parent of {ti} not in spread of core {}", seq[i - 1].0);
                    }
                }
            }
            c5.check(ok, || format!("vertex {v}, path to node {end}: {why}"));
        }
    }
    c5.note(format!("longest chain beyond phi: {longest}"));
    report.insert(5, c5.finish());

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::gen_cycle_example;

    fn set(xs: &[Vertex]) -> VertexSet {
        xs.iter().copied().collect()
    }

    fn c6_forest() -> (Graph, CoreForest) {
        let inst = gen_cycle_example(6).unwrap();
        let forest = build_cores(&inst.graph, &inst.decomposition, &inst.cert, 1, BirthOrder::MinVertex).unwrap();
        (inst.graph, forest)
    }

    #[test]
    fn c6_cores_and_spreads() {
        let (_, f) = c6_forest();
        assert_eq!(f.cores().len(), 2);
        assert_eq!((f.cores()[0].birthday, &f.cores()[0].vertices), (1, &set(&[1, 2, 6])));
        assert_eq!((f.cores()[1].birthday, &f.cores()[1].vertices), (3, &set(&[4])));
        assert_eq!(f.spread(CoreId(0)), &BTreeSet::from([1, 2, 3, 4, 5]));
        assert_eq!(f.spread(CoreId(1)), &BTreeSet::from([3, 4]));
    }

    #[test]
    fn c6_disqualified_trace() {
        let inst = gen_cycle_example(6).unwrap();
        let mut b = CoreBuilder::new(&inst.graph, &inst.decomposition, &inst.cert, 1, BirthOrder::MinVertex).unwrap();
        assert_eq!(b.disqualified_set(1).unwrap(), set(&[]));
        assert_eq!(b.disqualified_set(3), Err(CoreError::OutOfOrder(3)));
        b.process_node(1).unwrap();
        assert_eq!(b.disqualified_set(2).unwrap(), set(&[2, 3, 6]));
        assert!(b.process_node(2).unwrap().is_empty());
        assert_eq!(b.disqualified_set(3).unwrap(), set(&[3, 6]));
        assert_eq!(b.process_node(3).unwrap(), vec![CoreId(1)]);
        assert_eq!(b.process_node(3), Err(CoreError::OutOfOrder(3)));
    }

    #[test]
    fn c6_classification() {
        let (_, f) = c6_forest();
        assert_eq!(classify_vertex(&f, 4).unwrap(), Classification::Central(CoreId(1)));
        assert_eq!(classify_vertex(&f, 3).unwrap(), Classification::Peripheral(CoreId(0)));
        assert_eq!(classify_vertex(&f, 5).unwrap(), Classification::Peripheral(CoreId(0)));
        assert_eq!(classify_vertex(&f, 1).unwrap(), Classification::Central(CoreId(0)));
        assert_eq!(classify_vertex(&f, 99), Err(CoreError::UnknownVertex(99)));
        assert_eq!(f.source(3), Some(2));
    }

    #[test]
    fn c6_claims_pass() {
        let (g, f) = c6_forest();
        let report = check_core_claims(&f, &g);
        assert!(report.all_pass(), "{report}");
        assert_eq!(report.get(2).unwrap().note.as_deref(), Some("max spreads per node: 2"));
    }

    #[test]
    fn single_vertex_forest() {
        let g = Graph::new([5], []).unwrap();
        let d = Decomposition::trivial(&g);
        let cert = BallCoverCert::singletons(&d);
        let f = build_cores(&g, &d, &cert, 0, BirthOrder::MinVertex).unwrap();
        assert_eq!(f.cores().len(), 1);
        assert_eq!(f.spread(CoreId(0)), &BTreeSet::from([0]));
        assert!(classify_vertex(&f, 5).unwrap().is_central());
        assert!(check_core_claims(&f, &g).all_pass());
    }

    #[test]
    fn k2_single_clique() {
        let g = Graph::new([1, 2], [(1, 2)]).unwrap();
        let d = Decomposition::trivial(&g);
        let cert = BallCoverCert {
            k: 1,
            r: 1,
            covers: BTreeMap::from([(0, vec![set(&[1, 2])])]),
        };
        let f = build_cores(&g, &d, &cert, 0, BirthOrder::MinVertex).unwrap();
        assert_eq!(f.cores().len(), 1);
        assert_eq!(f.cores()[0].vertices, set(&[1, 2]));
        assert!(f.classification(1).unwrap().is_central() && f.classification(2).unwrap().is_central());
    }

    #[test]
    fn rejects_non_clique_cover_and_disconnected() {
        let g = Graph::new([1, 2, 3], [(1, 2), (2, 3)]).unwrap();
        let d = Decomposition::trivial(&g);
        let cert = BallCoverCert {
            k: 1,
            r: 2,
            covers: BTreeMap::from([(0, vec![set(&[1, 2, 3])])]),
        };
        assert_eq!(
            build_cores(&g, &d, &cert, 0, BirthOrder::MinVertex).unwrap_err(),
            CoreError::NonCliqueCover { node: 0, index: 0 }
        );
        let g = Graph::new([1, 2], []).unwrap();
        let d = Decomposition::trivial(&g);
        let cert = BallCoverCert::singletons(&d);
        assert_eq!(
            build_cores(&g, &d, &cert, 0, BirthOrder::MinVertex).unwrap_err(),
            CoreError::Disconnected
        );
    }

    #[test]
    fn corrupted_forest_fails_claim_one() {
        let (g, mut f) = c6_forest();
        // Pretend {5} is a core born at t4 whose spread overlaps core {4}'s.
        let id = CoreId(f.cores.len());
        f.cores.push(Core {
            id,
            birthday: 4,
            birth_index: 0,
            vertices: set(&[5]),
        });
        f.spreads.push(BTreeSet::from([4]));
        f.covering.get_mut(&4).unwrap().push(id);
        let report = check_core_claims(&f, &g);
        assert!(!report.passed(1));
        assert!(report.get(1).unwrap().witness.as_ref().unwrap().contains("not anticomplete"));
    }

    #[test]
    fn shuffled_birth_order_still_satisfies_claims() {
        let inst = crate::gen::gen_fattened(
            3,
            crate::gen::FattenedParams {
                nodes: 30,
                k: 3,
                r: 1,
                ball_size: 3,
            },
        )
        .unwrap();
        for seed in 0..5 {
            let f = build_cores(&inst.graph, &inst.decomposition, &inst.cert, 0, BirthOrder::Shuffled(seed)).unwrap();
            let report = check_core_claims(&f, &inst.graph);
            assert!(report.all_pass(), "seed {seed}: {report}");
        }
    }
}
