//! Width certification: the two-sided pseudo-path-decomposition of a graph
//! with few cross edges, and the pseudo-tree-decomposition of `J` assembled
//! from it by subdividing tree edges.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::cores::{CoreForest, CoreId};
use crate::decomp::{DecompError, Decomposition, IndexTree, Mode, Node};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::quotient::{JGraph, QuotientH};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WidthError {
    #[error("layer sides must partition the vertex set")]
    NotAPartition,
    #[error("layer side has {size} vertices, k = {k}")]
    SideTooLarge { size: usize, k: usize },
    #[error("{count} edges between the sides, k = {k}")]
    TooManyCrossEdges { count: usize, k: usize },
    #[error("tree edge {parent}-{child}: {count} J edges between layers, k = {k}")]
    LayerCrossEdges {
        parent: Node,
        child: Node,
        count: usize,
        k: usize,
    },
    #[error("node {node}: layer of {size} triples, k = {k}")]
    LayerTooLarge { node: Node, size: usize, k: usize },
    #[error("J vertex {0} is not mapped to a core")]
    Unmapped(Vertex),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

/// A graph split into sides `A` and `B` with at most `k` vertices each and
/// at most `k` edges between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerInstance {
    graph: Graph,
    a: VertexSet,
    b: VertexSet,
    k: usize,
}

impl LayerInstance {
    pub fn new(graph: Graph, a: VertexSet, b: VertexSet, k: usize) -> Result<Self, WidthError> {
        if !a.is_disjoint(&b) || a.len() + b.len() != graph.len() || !a.iter().chain(&b).all(|&v| graph.contains(v)) {
            return Err(WidthError::NotAPartition);
        }
        for side in [&a, &b] {
            if side.len() > k {
                return Err(WidthError::SideTooLarge { size: side.len(), k });
            }
        }
        let count = cross_edges(&graph, &a, &b);
        if count > k {
            return Err(WidthError::TooManyCrossEdges { count, k });
        }
        Ok(LayerInstance { graph, a, b, k })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn a(&self) -> &VertexSet {
        &self.a
    }

    pub fn b(&self) -> &VertexSet {
        &self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

fn cross_edges(g: &Graph, a: &VertexSet, b: &VertexSet) -> usize {
    a.iter().map(|&x| g.neighbors(x).filter(|y| b.contains(y)).count()).sum()
}

/// Bag sequence of a pseudo-path-decomposition of width at most `k - 1`
/// with `A` in the first bag and `B` in the last. Never empty.
pub fn matching_ppd(inst: &LayerInstance) -> Vec<VertexSet> {
    let mut bags = ppd(&inst.graph, inst.a.clone(), inst.b.clone());
    if bags.is_empty() {
        bags.push(VertexSet::new());
    }
    bags
}

fn ppd(g: &Graph, a: VertexSet, b: VertexSet) -> Vec<VertexSet> {
    if a.is_empty() && b.is_empty() {
        return Vec::new();
    }
    let across = |x: Vertex, side: &VertexSet| g.neighbors(x).filter(|y| side.contains(y)).count();

    if let Some(&x) = a.iter().find(|&&x| across(x, &b) == 0) {
        let mut rest = a.clone();
        rest.remove(&x);
        let mut bags = vec![a];
        bags.extend(ppd(g, rest, b));
        return bags;
    }
    if let Some(&y) = b.iter().find(|&&y| across(y, &a) == 0) {
        let mut rest = b.clone();
        rest.remove(&y);
        let mut bags = ppd(g, a, rest);
        bags.push(b);
        return bags;
    }

    let a_deg: Vec<(Vertex, usize)> = a.iter().map(|&x| (x, across(x, &b))).collect();
    let b_deg: Vec<(Vertex, usize)> = b.iter().map(|&y| (y, across(y, &a))).collect();
    if a_deg.iter().all(|d| d.1 == 1) && b_deg.iter().all(|d| d.1 == 1) {
        // Perfect matching: swap one matched pair per step.
        let mut bag = a.clone();
        let mut bags = vec![bag.clone()];
        for &x in &a {
            let y = g.neighbors(x).find(|y| b.contains(y)).expect("matched");
            bag.remove(&x);
            bag.insert(y);
            bags.push(bag.clone());
        }
        return bags;
    }
    // Every vertex has a neighbour across, so the smallest vertex qualifies.
    let (mut a, mut b) = (a, b);
    let removed = if a_deg.iter().any(|d| d.1 >= 2) {
        let y = *b.iter().next().expect("nonempty");
        b.remove(&y);
        y
    } else {
        let x = *a.iter().next().expect("nonempty");
        a.remove(&x);
        x
    };
    let mut bags = ppd(g, a, b);
    if bags.is_empty() {
        bags.push(VertexSet::new());
    }
    for bag in &mut bags {
        bag.insert(removed);
    }
    bags
}

/// The pseudo-tree-decomposition of `J` over the subdivided tree, with the
/// number of subdivision nodes and cross edges per original tree edge.
#[derive(Debug, Clone)]
pub struct JDecomposition {
    /// Bags hold dense J indices.
    pub decomposition: Decomposition,
    /// `(parent, child)` to `n(f)`.
    pub subdivisions: BTreeMap<(Node, Node), usize>,
    pub cross_edges: BTreeMap<(Node, Node), usize>,
}

/// Assembles the J-decomposition: layer `A_t` at every original node and the
/// bags of the layer instance of each tree edge on its subdivision path.
/// Edges without J edges between their layers are not subdivided.
pub fn build_j_decomposition(forest: &CoreForest, j: &JGraph, k: usize) -> Result<JDecomposition, WidthError> {
    let tree = forest.tree();
    let mut layers: BTreeMap<Node, VertexSet> = tree.order().iter().map(|&t| (t, VertexSet::new())).collect();
    for (i, x) in j.vertices().iter().enumerate() {
        layers.get_mut(&x.s).expect("tree node").insert(i);
    }
    for (&node, layer) in &layers {
        if layer.len() > k {
            return Err(WidthError::LayerTooLarge { node, size: layer.len(), k });
        }
    }
    let jg = j.to_graph();
    let tree_edges: Vec<(Node, Node)> = tree
        .order()
        .iter()
        .filter_map(|&t| tree.parent(t).map(|p| (p, t)))
        .collect();
    let pieces: Vec<((Node, Node), usize, Vec<VertexSet>)> = tree_edges
        .par_iter()
        .map(|&(p, t)| {
            let (a, b) = (&layers[&p], &layers[&t]);
            let count = cross_edges(&jg, a, b);
            if count > k {
                return Err(WidthError::LayerCrossEdges {
                    parent: p,
                    child: t,
                    count,
                    k,
                });
            }
            if count == 0 {
                return Ok(((p, t), 0, Vec::new()));
            }
            let union: VertexSet = a.union(b).copied().collect();
            let inst = LayerInstance::new(jg.induced_subgraph(&union), a.clone(), b.clone(), k)?;
            Ok(((p, t), count, matching_ppd(&inst)))
        })
        .collect::<Result<_, _>>()?;

    let mut next = tree.order().iter().max().map_or(0, |m| m + 1);
    let mut bags = layers.clone();
    let mut edges = Vec::new();
    let mut subdivisions = BTreeMap::new();
    let mut crossing = BTreeMap::new();
    for ((p, t), count, seq) in pieces {
        crossing.insert((p, t), count);
        subdivisions.insert((p, t), seq.len());
        let mut prev = p;
        for bag in seq {
            bags.insert(next, bag);
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, t));
    }
    let index_tree = IndexTree::new(bags.keys().copied(), edges, Some(tree.root()))?;
    Ok(JDecomposition {
        decomposition: Decomposition::new(index_tree, bags, Mode::PseudoTree)?,
        subdivisions,
        cross_edges: crossing,
    })
}

/// Replaces every J vertex by the core it contracts to.
pub fn project_decomposition(jd: &Decomposition, h: &QuotientH) -> Result<Decomposition, WidthError> {
    let project = |&x: &Vertex| h.j_to_h.get(x).map(|c: &CoreId| c.0).ok_or(WidthError::Unmapped(x));
    let bags = jd
        .bags
        .iter()
        .map(|(&t, bag)| Ok((t, bag.iter().map(project).collect::<Result<VertexSet, _>>()?)))
        .collect::<Result<BTreeMap<_, _>, WidthError>>()?;
    Ok(Decomposition::new(jd.tree.clone(), bags, Mode::PseudoTree)?)
}

/// Cross-edge counts per tree edge, for reporting when assembly fails.
pub fn layer_cross_edges(forest: &CoreForest, j: &JGraph) -> BTreeMap<(Node, Node), usize> {
    let tree = forest.tree();
    let mut out: BTreeMap<(Node, Node), usize> = BTreeMap::new();
    for e in j.edges() {
        if e.u.s != e.v.s {
            let (hi, lo) = if tree.parent(e.v.s) == Some(e.u.s) { (e.u.s, e.v.s) } else { (e.v.s, e.u.s) };
            *out.entry((hi, lo)).or_default() += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cores::{build_cores, BirthOrder};
    use crate::decomp::{validate_pseudo_tree_decomposition, width};
    use crate::gen::gen_cycle_example;
    use crate::quotient::{build_j, contract_green};

    fn set(xs: &[Vertex]) -> VertexSet {
        xs.iter().copied().collect()
    }

    fn check(inst: &LayerInstance, bags: &[VertexSet]) {
        let d = Decomposition::from_bag_sequence(bags.to_vec(), Mode::PseudoPath).unwrap();
        let report = validate_pseudo_tree_decomposition(inst.graph(), &d).unwrap();
        assert!(report.is_valid(), "{report:?} for {bags:?}");
        assert!(width(&d).unwrap() < inst.k() as i64);
        assert!(inst.a().is_subset(&bags[0]));
        assert!(inst.b().is_subset(bags.last().unwrap()));
    }

    #[test]
    fn single_pseudo_edge() {
        let inst = LayerInstance::new(Graph::new([1, 2], [(1, 2)]).unwrap(), set(&[1]), set(&[2]), 1).unwrap();
        let bags = matching_ppd(&inst);
        assert_eq!(bags, vec![set(&[1]), set(&[2])]);
        check(&inst, &bags);
    }

    #[test]
    fn two_by_two_matching() {
        // a1=1, a2=2, b1=3, b2=4
        let g = Graph::new([1, 2, 3, 4], [(1, 3), (2, 4)]).unwrap();
        let inst = LayerInstance::new(g, set(&[1, 2]), set(&[3, 4]), 2).unwrap();
        let bags = matching_ppd(&inst);
        assert_eq!(bags, vec![set(&[1, 2]), set(&[2, 3]), set(&[3, 4])]);
        check(&inst, &bags);
    }

    #[test]
    fn stripped_a_vertex() {
        let g = Graph::new([1, 2, 3], [(1, 3)]).unwrap();
        let inst = LayerInstance::new(g, set(&[1, 2]), set(&[3]), 2).unwrap();
        let bags = matching_ppd(&inst);
        assert_eq!(bags, vec![set(&[1, 2]), set(&[1]), set(&[3])]);
        check(&inst, &bags);
    }

    #[test]
    fn star_uses_deletion() {
        // a=1 adjacent to b=2,3; internal edge 2-3.
        let g = Graph::new([1, 2, 3], [(1, 2), (1, 3), (2, 3)]).unwrap();
        let inst = LayerInstance::new(g, set(&[1]), set(&[2, 3]), 2).unwrap();
        check(&inst, &matching_ppd(&inst));
        let g = Graph::new([1, 2, 3], [(1, 3), (2, 3)]).unwrap();
        let inst = LayerInstance::new(g, set(&[1, 2]), set(&[3]), 2).unwrap();
        check(&inst, &matching_ppd(&inst));
    }

    #[test]
    fn empty_instance() {
        let inst = LayerInstance::new(Graph::empty(), set(&[]), set(&[]), 1).unwrap();
        assert_eq!(matching_ppd(&inst), vec![set(&[])]);
    }

    #[test]
    fn invariants_enforced() {
        let g = Graph::new([1, 2, 3, 4], [(1, 3), (1, 4), (2, 3)]).unwrap();
        assert_eq!(
            LayerInstance::new(g.clone(), set(&[1, 2]), set(&[3, 4]), 2),
            Err(WidthError::TooManyCrossEdges { count: 3, k: 2 })
        );
        assert_eq!(
            LayerInstance::new(g.clone(), set(&[1, 2, 3]), set(&[4]), 2),
            Err(WidthError::SideTooLarge { size: 3, k: 2 })
        );
        assert_eq!(
            LayerInstance::new(g, set(&[1, 2]), set(&[2, 3, 4]), 4),
            Err(WidthError::NotAPartition)
        );
    }

    #[test]
    fn c6_j_decomposition() {
        let inst = gen_cycle_example(6).unwrap();
        let f = build_cores(&inst.graph, &inst.decomposition, &inst.cert, 1, BirthOrder::MinVertex).unwrap();
        let j = build_j(&f, &inst.graph);
        let jd = build_j_decomposition(&f, &j, 2).unwrap();
        let sizes: Vec<usize> = (1..=5).map(|t| jd.decomposition.bag(t).len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 2, 1]);
        let jg = j.to_graph();
        assert!(validate_pseudo_tree_decomposition(&jg, &jd.decomposition).unwrap().is_valid());
        assert_eq!(width(&jd.decomposition).unwrap(), 1);
        assert!(jd.cross_edges.values().all(|&c| c <= 2));
        assert_eq!(jd.cross_edges, layer_cross_edges(&f, &j));

        let h = contract_green(&j, &f);
        let hd = project_decomposition(&jd.decomposition, &h).unwrap();
        assert!(validate_pseudo_tree_decomposition(&h.graph, &hd).unwrap().is_valid());
        assert!(width(&hd).unwrap() <= 1);
    }
}
