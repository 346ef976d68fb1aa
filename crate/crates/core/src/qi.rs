//! Quasi-isometry certificates and the converse construction that turns a
//! quasi-isometry onto a low pseudo-tree-width graph back into a ball-cover
//! tree-decomposition.
//!
//! A map `f: V(G) -> V(H)` is an `(L, C)`-quasi-isometry when
//!
//! 1. `dist_H(f(u), f(v)) <= L dist_G(u, v) + C` whenever `dist_G(u, v)` is finite,
//! 2. `dist_G(u, v) <= L dist_H(f(u), f(v)) + C` whenever `dist_H(f(u), f(v))` is finite,
//! 3. every vertex of `H` is within distance `C` of the image.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::{self, BallCoverCert, DecompError, Decomposition, Mode, Violation};
use crate::graph::{Distance, Graph, Vertex, VertexSet, UNREACHABLE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QiError {
    #[error("vertex {0} of G has no image")]
    PartialMap(Vertex),
    #[error("vertex {0} is mapped outside H")]
    UnknownTarget(Vertex),
    #[error("map has an entry for {0}, which is not a vertex of G")]
    UnknownSource(Vertex),
    #[error("L must be at least 1")]
    ZeroMultiplier,
    #[error("map is not an ({l}, {c})-quasi-isometry: {reason}")]
    NotQuasiIsometry { l: u64, c: u64, reason: String },
    #[error("decomposition of H is invalid: {0}")]
    InvalidDecomposition(Violation),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QiWitness {
    Pair {
        u: Vertex,
        v: Vertex,
        dist_g: Distance,
        dist_h: Distance,
    },
    Uncovered {
        y: Vertex,
        dist_to_image: Distance,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub passed: bool,
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<QiWitness>,
}

/// Results of the three conditions, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QiReport {
    pub upper: ConditionOutcome,
    pub lower: ConditionOutcome,
    pub dense: ConditionOutcome,
}

impl QiReport {
    pub fn passed(&self) -> bool {
        self.upper.passed && self.lower.passed && self.dense.passed
    }

    /// Condition number (1 to 3) and witness of the first failure.
    pub fn first_failure(&self) -> Option<(u8, &QiWitness)> {
        [&self.upper, &self.lower, &self.dense]
            .into_iter()
            .zip(1..)
            .find_map(|(o, i)| o.counterexample.as_ref().map(|w| (i, w)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QiCertificate {
    pub map: BTreeMap<Vertex, Vertex>,
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(rename = "C")]
    pub c: u64,
    pub report: QiReport,
}

impl QiCertificate {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

fn dense_map(g: &Graph, h: &Graph, map: &BTreeMap<Vertex, Vertex>) -> Result<Vec<usize>, QiError> {
    if let Some(&v) = map.keys().find(|&&v| !g.contains(v)) {
        return Err(QiError::UnknownSource(v));
    }
    g.vertices()
        .iter()
        .map(|&v| {
            let y = *map.get(&v).ok_or(QiError::PartialMap(v))?;
            h.index_of(y).ok_or(QiError::UnknownTarget(y))
        })
        .collect()
}

/// Per source vertex: first failing partner for each pair condition, and
/// the pair-count examined.
type RowResult = (Option<QiWitness>, Option<QiWitness>, u64, u64);

/// Checks all three conditions exhaustively; counterexamples are the
/// lexicographically first failing pair or vertex.
pub fn verify_qi(g: &Graph, h: &Graph, map: &BTreeMap<Vertex, Vertex>, l: u64, c: u64) -> Result<QiCertificate, QiError> {
    if l == 0 {
        return Err(QiError::ZeroMultiplier);
    }
    let f = dense_map(g, h, map)?;
    let th = h.all_pairs();
    let rows: Vec<RowResult> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let dg = g.bfs_from_index(i);
            let (mut up, mut low, mut n_up, mut n_low) = (None, None, 0, 0);
            for j in i + 1..g.len() {
                let (a, b) = (dg[j], th.raw(f[i], f[j]));
                let witness = || QiWitness::Pair {
                    u: g.vertex_at(i),
                    v: g.vertex_at(j),
                    dist_g: Distance::from_raw(a),
                    dist_h: Distance::from_raw(b),
                };
                if a != UNREACHABLE {
                    n_up += 1;
                    if up.is_none() && (b == UNREACHABLE || u64::from(b) > l * u64::from(a) + c) {
                        up = Some(witness());
                    }
                }
                if b != UNREACHABLE {
                    n_low += 1;
                    if low.is_none() && (a == UNREACHABLE || u64::from(a) > l * u64::from(b) + c) {
                        low = Some(witness());
                    }
                }
            }
            (up, low, n_up, n_low)
        })
        .collect();
    let upper = ConditionOutcome {
        passed: rows.iter().all(|r| r.0.is_none()),
        checked: rows.iter().map(|r| r.2).sum(),
        counterexample: rows.iter().find_map(|r| r.0.clone()),
    };
    let lower = ConditionOutcome {
        passed: rows.iter().all(|r| r.1.is_none()),
        checked: rows.iter().map(|r| r.3).sum(),
        counterexample: rows.iter().find_map(|r| r.1.clone()),
    };
    let near = h.bfs_from_indices(&f, None);
    let uncovered = near.iter().position(|&d| d == UNREACHABLE || u64::from(d) > c);
    let dense = ConditionOutcome {
        passed: uncovered.is_none(),
        checked: h.len() as u64,
        counterexample: uncovered.map(|y| QiWitness::Uncovered {
            y: h.vertex_at(y),
            dist_to_image: Distance::from_raw(near[y]),
        }),
    };
    Ok(QiCertificate {
        map: map.clone(),
        l,
        c,
        report: QiReport { upper, lower, dense },
    })
}

/// Smallest `C` for which `map` is an `(l, C)`-quasi-isometry, or `None` if
/// no `C` works (a finite distance on one side is infinite on the other).
pub fn minimal_additive(g: &Graph, h: &Graph, map: &BTreeMap<Vertex, Vertex>, l: u64) -> Result<Option<u64>, QiError> {
    let f = dense_map(g, h, map)?;
    let th = h.all_pairs();
    let rows: Vec<Option<u64>> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let dg = g.bfs_from_index(i);
            let mut need = 0u64;
            for j in i + 1..g.len() {
                let (a, b) = (dg[j], th.raw(f[i], f[j]));
                match (a == UNREACHABLE, b == UNREACHABLE) {
                    (true, true) => {}
                    (false, false) => {
                        let (a, b) = (u64::from(a), u64::from(b));
                        need = need.max(b.saturating_sub(l * a)).max(a.saturating_sub(l * b));
                    }
                    _ => return None,
                }
            }
            Some(need)
        })
        .collect();
    let near = h.bfs_from_indices(&f, None);
    if !h.is_empty() && near.contains(&UNREACHABLE) {
        return Ok(None);
    }
    let dense = near.iter().copied().max().map_or(0, u64::from);
    Ok(rows
        .into_iter()
        .collect::<Option<Vec<u64>>>()
        .map(|r| r.into_iter().max().unwrap_or(0).max(dense)))
}

/// The pair `(L, smallest C)` for each `L` in `1..=max_l`.
pub fn additive_profile(
    g: &Graph,
    h: &Graph,
    map: &BTreeMap<Vertex, Vertex>,
    max_l: u64,
) -> Result<Vec<(u64, Option<u64>)>, QiError> {
    (1..=max_l).map(|l| Ok((l, minimal_additive(g, h, map, l)?))).collect()
}

/// Pulls a pseudo-tree-decomposition of `h` back along an `(l, c)`-quasi-
/// isometry `map: V(g) -> V(h)`.
///
/// Every node `t` of `hd` gets the bag of all `v` whose image lies within
/// `l + c` of `B_t`. Its cover sets are, for each `y` in `B_t`, the vertices
/// whose image lies within `l + c` of `y`; each has diameter at most
/// `2l(l + c) + c` in `g`. The cover count `k` is the largest bag size of `hd`.
pub fn converse_decomposition(
    g: &Graph,
    h: &Graph,
    hd: &Decomposition,
    map: &BTreeMap<Vertex, Vertex>,
    l: u64,
    c: u64,
) -> Result<(Decomposition, BallCoverCert), QiError> {
    let cert = verify_qi(g, h, map, l, c)?;
    if let Some((cond, w)) = cert.report.first_failure() {
        return Err(QiError::NotQuasiIsometry {
            l,
            c,
            reason: format!("condition {cond} fails at {w:?}"),
        });
    }
    let relaxed = Decomposition {
        mode: hd.mode.relaxed(),
        ..hd.clone()
    };
    if let Some(v) = decomp::validate_pseudo_tree_decomposition(h, &relaxed)?.first() {
        return Err(QiError::InvalidDecomposition(v.clone()));
    }
    let radius = u32::try_from(l + c).unwrap_or(u32::MAX - 1);
    let mut preimage: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for (&v, &y) in map {
        preimage.entry(y).or_default().push(v);
    }
    let used: VertexSet = hd.bags.values().flatten().copied().collect();
    let balls: BTreeMap<Vertex, VertexSet> = used
        .par_iter()
        .map(|&y| {
            let i = h.index_of(y).expect("validated bag vertex");
            let dist = h.bfs_from_indices(&[i], Some(radius));
            let set: VertexSet = dist
                .iter()
                .enumerate()
                .filter(|(_, &d)| d != UNREACHABLE)
                .flat_map(|(z, _)| preimage.get(&h.vertex_at(z)).into_iter().flatten().copied())
                .collect();
            (y, set)
        })
        .collect();
    let mut bags = BTreeMap::new();
    let mut covers = BTreeMap::new();
    for (&t, bag) in &hd.bags {
        let sets: Vec<VertexSet> = bag.iter().map(|y| balls[y].clone()).filter(|s| !s.is_empty()).collect();
        bags.insert(t, sets.iter().flatten().copied().collect::<VertexSet>());
        covers.insert(t, sets);
    }
    let k = hd.bags.values().map(VertexSet::len).max().unwrap_or(0);
    let mode = if hd.mode.requires_path() { Mode::Path } else { Mode::Tree };
    let out = Decomposition::new(hd.tree.clone(), bags, mode)?;
    Ok((
        out,
        BallCoverCert {
            k,
            r: 2 * l * (l + c) + c,
            covers,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{validate, validate_ball_cover};

    fn path(n: usize) -> Graph {
        Graph::new(0..n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn identity(g: &Graph) -> BTreeMap<Vertex, Vertex> {
        g.vertices().iter().map(|&v| (v, v)).collect()
    }

    #[test]
    fn identity_is_isometry() {
        let g = path(5);
        let cert = verify_qi(&g, &g, &identity(&g), 1, 0).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.report.upper.checked, 10);
        assert_eq!(minimal_additive(&g, &g, &identity(&g), 1), Ok(Some(0)));
    }

    #[test]
    fn constant_map_on_long_path_fails_lower_bound() {
        let g = path(100);
        let h = Graph::new([0], []).unwrap();
        let map = g.vertices().iter().map(|&v| (v, 0)).collect();
        let cert = verify_qi(&g, &h, &map, 1, 0).unwrap();
        assert!(cert.report.upper.passed && cert.report.dense.passed);
        assert_eq!(
            cert.report.lower.counterexample,
            Some(QiWitness::Pair {
                u: 0,
                v: 1,
                dist_g: Distance::Finite(1),
                dist_h: Distance::Finite(0),
            })
        );
        assert_eq!(minimal_additive(&g, &h, &map, 3), Ok(Some(99)));
    }

    #[test]
    fn density_failure() {
        let g = Graph::new([0], []).unwrap();
        let h = path(3);
        let map = BTreeMap::from([(0, 0)]);
        let cert = verify_qi(&g, &h, &map, 1, 1).unwrap();
        assert_eq!(
            cert.report.first_failure(),
            Some((
                3,
                &QiWitness::Uncovered {
                    y: 2,
                    dist_to_image: Distance::Finite(2)
                }
            ))
        );
    }

    #[test]
    fn map_errors() {
        let g = path(2);
        assert_eq!(verify_qi(&g, &g, &BTreeMap::from([(0, 0)]), 1, 0).unwrap_err(), QiError::PartialMap(1));
        assert_eq!(
            verify_qi(&g, &g, &BTreeMap::from([(0, 0), (1, 7)]), 1, 0).unwrap_err(),
            QiError::UnknownTarget(7)
        );
        assert_eq!(verify_qi(&g, &g, &identity(&g), 0, 0).unwrap_err(), QiError::ZeroMultiplier);
    }

    #[test]
    fn disconnected_sides_use_finite_guards() {
        let g = Graph::new([0, 1], []).unwrap();
        let h = Graph::new([5, 6], []).unwrap();
        let map = BTreeMap::from([(0, 5), (1, 6)]);
        assert!(verify_qi(&g, &h, &map, 1, 0).unwrap().passed());
        let merged = BTreeMap::from([(0, 5), (1, 5)]);
        let cert = verify_qi(&g, &h, &merged, 1, 5).unwrap();
        assert!(!cert.report.lower.passed);
        assert_eq!(minimal_additive(&g, &h, &merged, 1), Ok(None));
    }

    #[test]
    fn converse_on_path() {
        let g = path(3);
        let hd = Decomposition::from_bag_sequence(
            vec![[0].into_iter().collect(), [1].into_iter().collect(), [2].into_iter().collect()],
            Mode::PseudoPath,
        )
        .unwrap();
        let (d, cert) = converse_decomposition(&g, &g, &hd, &identity(&g), 1, 0).unwrap();
        let bags: Vec<Vec<Vertex>> = d.bag_sequence().unwrap().iter().map(|b| b.iter().copied().collect()).collect();
        assert_eq!(bags, vec![vec![0, 1], vec![0, 1, 2], vec![1, 2]]);
        assert!(validate(&g, &d).unwrap().is_valid());
        assert_eq!((cert.k, cert.r), (1, 2));
        assert!(validate_ball_cover(&g, &d, &cert).unwrap().is_valid());
    }

    #[test]
    fn converse_onto_single_vertex() {
        let g = path(4);
        let h = Graph::new([0], []).unwrap();
        let hd = Decomposition::trivial(&h);
        let map = g.vertices().iter().map(|&v| (v, 0)).collect();
        let (d, cert) = converse_decomposition(&g, &h, &hd, &map, 1, 3).unwrap();
        assert_eq!(d.bags[&0], g.vertex_set());
        assert_eq!(cert.covers[&0].len(), 1);
        assert!(validate_ball_cover(&g, &d, &cert).unwrap().is_valid());
        assert!(matches!(
            converse_decomposition(&g, &h, &hd, &map, 1, 2),
            Err(QiError::NotQuasiIsometry { .. })
        ));
    }
}
