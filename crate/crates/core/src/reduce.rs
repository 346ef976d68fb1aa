//! Preprocessing: splitting into connected components, and the radius
//! reduction that turns every diameter-`r` cover set into a clique.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::decomp::{self, BallCoverCert, DecompError, Decomposition, Node, Violation};
use crate::graph::{Graph, Vertex, VertexSet, UNREACHABLE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("input decomposition is invalid: {0}")]
    InvalidDecomposition(Violation),
    #[error("input graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("scale factor r must be at least 1")]
    ZeroScale,
}

/// One connected piece of an input, with its restricted decomposition and cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInstance {
    pub graph: Graph,
    pub decomposition: Decomposition,
    pub cert: BallCoverCert,
}

/// The graph `G'` obtained by joining every pair of bag-mates at distance at most `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionRecord {
    pub original: Graph,
    pub reduced: Graph,
    pub added_edges: Vec<(Vertex, Vertex)>,
    pub qi_scale: u64,
}

pub(crate) fn ensure_valid(g: &Graph, d: &Decomposition, cert: &BallCoverCert) -> Result<(), ReduceError> {
    let report = decomp::validate(g, d)?;
    if let Some(v) = report.first() {
        return Err(ReduceError::InvalidDecomposition(v.clone()));
    }
    let report = decomp::validate_ball_cover(g, d, cert)?;
    if let Some(v) = report.first() {
        return Err(ReduceError::InvalidDecomposition(v.clone()));
    }
    Ok(())
}

/// Restricts the instance to each connected component of `g`.
///
/// Each restriction keeps the tree nodes whose bags meet the component (these
/// induce a subtree) and is rooted at the highest such node.
pub fn split_components(
    g: &Graph,
    d: &Decomposition,
    cert: &BallCoverCert,
) -> Result<Vec<ComponentInstance>, ReduceError> {
    ensure_valid(g, d, cert)?;
    let rooted = d.tree.rooted();
    let mut out = Vec::new();
    for component in g.components() {
        let nodes: BTreeSet<Node> = d
            .bags
            .iter()
            .filter(|(_, bag)| !bag.is_disjoint(&component))
            .map(|(&t, _)| t)
            .collect();
        let root = nodes
            .iter()
            .copied()
            .min_by_key(|&t| (rooted.height(t), t))
            .expect("a valid decomposition covers every vertex");
        let tree = d.tree.induced(&nodes, Some(root))?;
        let bags: BTreeMap<Node, VertexSet> = nodes
            .iter()
            .map(|&t| (t, d.bag(t).intersection(&component).copied().collect()))
            .collect();
        let covers = nodes
            .iter()
            .map(|&t| {
                let sets = cert.covers[&t]
                    .iter()
                    .map(|s| s.intersection(&component).copied().collect::<VertexSet>())
                    .filter(|s| !s.is_empty())
                    .collect();
                (t, sets)
            })
            .collect();
        out.push(ComponentInstance {
            graph: g.induced_subgraph(&component),
            decomposition: Decomposition::new(tree, bags, d.mode)?,
            cert: BallCoverCert {
                k: cert.k,
                r: cert.r,
                covers,
            },
        });
    }
    Ok(out)
}

/// Adds an edge between every nonadjacent pair of bag-mates at distance at
/// most `cert.r` in `g`. The returned certificate has the same cover sets,
/// which are now cliques, with `r = 1`.
pub fn power_reduce(
    g: &Graph,
    d: &Decomposition,
    cert: &BallCoverCert,
) -> Result<(ReductionRecord, BallCoverCert), ReduceError> {
    ensure_valid(g, d, cert)?;
    let components = g.components().len();
    if components > 1 {
        return Err(ReduceError::Disconnected(components));
    }
    let r = u32::try_from(cert.r).unwrap_or(u32::MAX - 1);
    let mut added: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    if r >= 2 {
        let mut balls: BTreeMap<Vertex, Vec<u32>> = BTreeMap::new();
        for bag in d.bags.values() {
            for &u in bag {
                let dist = balls.entry(u).or_insert_with(|| {
                    let i = g.index_of(u).expect("validated vertex");
                    g.bfs_from_indices(&[i], Some(r))
                });
                for &v in bag.range(u + 1..) {
                    let j = g.index_of(v).expect("validated vertex");
                    if dist[j] != UNREACHABLE && dist[j] >= 2 {
                        added.insert((u, v));
                    }
                }
            }
        }
    }
    let reduced = Graph::new(g.vertices().iter().copied(), g.edges().chain(added.iter().copied()))
        .expect("added edges join distinct nonadjacent vertices");
    let record = ReductionRecord {
        original: g.clone(),
        reduced,
        added_edges: added.into_iter().collect(),
        qi_scale: cert.r.max(1),
    };
    let out = BallCoverCert {
        k: cert.k,
        r: 1,
        covers: cert.covers.clone(),
    };
    Ok((record, out))
}

/// `(rL, rC)`: the constants of a quasi-isometry precomposed with the
/// `(r, 0)` identity map from `G` to `G'`.
pub fn compose_reduction_constants(l: u64, c: u64, r: u64) -> Result<(u64, u64), ReduceError> {
    if r == 0 {
        return Err(ReduceError::ZeroScale);
    }
    Ok((r * l, r * c))
}
