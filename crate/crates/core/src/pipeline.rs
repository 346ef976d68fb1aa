//! End-to-end construction: from a graph with a ball-cover tree-decomposition
//! to the quotient `H`, its pseudo-tree-decomposition, the map `psi`, and
//! every check along the way, packaged as a self-contained certificate.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::claims::{ClaimCheck, ClaimOutcome, ClaimReport};
use crate::cores::{build_cores, check_core_claims, BirthOrder, Classification, CoreError, CoreForest};
use crate::decomp::{self, BallCoverCert, Decomposition, IndexTree, Mode, Node};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::json::{self, DecompositionJson, GraphJson};
use crate::qi::{self, QiCertificate, QiError, QiReport};
use crate::quotient::{build_j, check_quotient_claims, contract_green, Color, JGraph, QuotientH};
use crate::reduce::{self, compose_reduction_constants, power_reduce, split_components, ReduceError};
use crate::widthcert::{build_j_decomposition, layer_cross_edges, project_decomposition, JDecomposition};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("graph has {size} vertices, limit is {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("graph is empty")]
    EmptyGraph,
    #[error("cover certificate has k = 0")]
    ZeroK,
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Qi(#[from] QiError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub max_vertices: usize,
    pub birth_order: BirthOrder,
    /// Also record the smallest additive constant for each `L` up to `2k + 2`.
    pub explore: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            max_vertices: 2000,
            birth_order: BirthOrder::MinVertex,
            explore: false,
        }
    }
}

/// Where the first failed check sits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureLocus {
    pub stage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim: Option<u8>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub graph_sha256: String,
    pub decomposition_sha256: String,
    pub vertices: usize,
    pub edges: usize,
    pub k: usize,
    pub r: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(rename = "C")]
    pub c: u64,
    #[serde(rename = "L_original")]
    pub l_original: u64,
    #[serde(rename = "C_original")]
    pub c_original: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionJson {
    pub r: u64,
    pub qi_scale: u64,
    pub added_edges: Vec<(Vertex, Vertex)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreJson {
    pub id: usize,
    pub component: usize,
    pub birthday: Node,
    pub birth_index: usize,
    pub vertices: Vec<Vertex>,
    pub spread: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiJson {
    pub core: usize,
    pub central: bool,
    pub source: Node,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JVertexJson {
    pub id: usize,
    pub s: Node,
    pub t: Node,
    pub core: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JEdgeJson {
    pub u: usize,
    pub v: usize,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct JGraphJson {
    pub vertices: Vec<JVertexJson>,
    pub edges: Vec<JEdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionJson {
    pub component: usize,
    pub parent: Node,
    pub child: Node,
    pub n: usize,
    pub cross_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QiSummary {
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(rename = "C")]
    pub c: u64,
    pub passed: bool,
    pub report: QiReport,
}

impl From<&QiCertificate> for QiSummary {
    fn from(q: &QiCertificate) -> Self {
        QiSummary {
            l: q.l,
            c: q.c,
            passed: q.passed(),
            report: q.report.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileJson {
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(rename = "C")]
    pub c: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineCertificate {
    pub input: InputDigest,
    pub birth_order: Option<u64>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureLocus>,
    pub constants: Constants,
    pub claims: BTreeMap<u8, String>,
    pub claim_details: ClaimReport,
    pub h_graph: GraphJson,
    pub h_decomposition: Option<DecompositionJson>,
    pub h_width: Option<i64>,
    pub psi: BTreeMap<Vertex, usize>,
    pub phi: BTreeMap<Vertex, PhiJson>,
    pub cores: Vec<CoreJson>,
    pub j_graph: JGraphJson,
    pub j_decomposition: Option<DecompositionJson>,
    pub subdivisions: Vec<SubdivisionJson>,
    pub reduction: ReductionJson,
    pub qi_reduced: QiSummary,
    pub qi_original: QiSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploration: Option<Vec<ProfileJson>>,
}

impl PipelineCertificate {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn to_json(&self) -> String {
        json::to_pretty(self)
    }
}

/// Everything the pipeline builds, for callers that want the typed objects.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub certificate: PipelineCertificate,
    pub reduced: Graph,
    pub h: Graph,
    pub h_decomposition: Option<Decomposition>,
    pub psi: BTreeMap<Vertex, Vertex>,
    pub components: Vec<ComponentRun>,
}

#[derive(Debug, Clone)]
pub struct ComponentRun {
    pub graph: Graph,
    pub reduced: Graph,
    pub forest: CoreForest,
    pub j: JGraph,
    pub h: QuotientH,
    pub claims: ClaimReport,
    pub j_decomposition: Option<JDecomposition>,
    pub h_decomposition: Option<Decomposition>,
}

fn run_component(
    part: &reduce::ComponentInstance,
    k: usize,
    order: BirthOrder,
) -> Result<ComponentRun, PipelineError> {
    let (record, cert) = power_reduce(&part.graph, &part.decomposition, &part.cert)?;
    let root = part.decomposition.tree.root().expect("split components are rooted");
    let forest = build_cores(&record.reduced, &part.decomposition, &cert, root, order)?;
    let mut claims = check_core_claims(&forest, &record.reduced);
    let j = build_j(&forest, &record.reduced);
    let h = contract_green(&j, &forest);
    claims.extend(check_quotient_claims(&j, &h, &forest, &record.reduced, k));

    let mut c6 = ClaimCheck::new();
    let built = build_j_decomposition(&forest, &j, k);
    let most = layer_cross_edges(&forest, &j).values().copied().max().unwrap_or(0);
    let jd = match built {
        Ok(jd) => {
            for &count in jd.cross_edges.values() {
                c6.check(count <= k, || format!("{count} cross edges, k = {k}"));
            }
            let jg = j.to_graph();
            let report = decomp::validate_pseudo_tree_decomposition(&jg, &jd.decomposition).expect("mode is pseudo");
            c6.check(report.is_valid(), || {
                format!("J decomposition invalid: {}", report.first().expect("invalid"))
            });
            let w = decomp::width(&jd.decomposition).expect("decomposition is well formed");
            c6.check(w < k as i64, || format!("J decomposition has width {w}, k-1 = {}", k - 1));
            Some(jd)
        }
        Err(e) => {
            c6.check(false, || e.to_string());
            None
        }
    };
    c6.note(format!("max cross edges per tree edge: {most}"));
    claims.insert(6, c6.finish());
    let hd = jd
        .as_ref()
        .map(|jd| project_decomposition(&jd.decomposition, &h).expect("every J vertex maps to a core"));
    Ok(ComponentRun {
        graph: part.graph.clone(),
        reduced: record.reduced,
        forest,
        j,
        h,
        claims,
        j_decomposition: jd,
        h_decomposition: hd,
    })
}

/// Runs every stage on every component and checks the result.
///
/// Input errors are returned as `Err`; failed checks are recorded in the
/// certificate's `verdict` and `failure` fields.
pub fn run_pipeline(
    g: &Graph,
    d: &Decomposition,
    cert: &BallCoverCert,
    opts: &PipelineOptions,
) -> Result<PipelineRun, PipelineError> {
    if g.len() > opts.max_vertices {
        return Err(PipelineError::TooLarge {
            size: g.len(),
            limit: opts.max_vertices,
        });
    }
    if g.is_empty() {
        return Err(PipelineError::EmptyGraph);
    }
    if cert.k == 0 {
        return Err(PipelineError::ZeroK);
    }
    let k = cert.k;
    let parts = split_components(g, d, cert)?;
    let runs: Vec<ComponentRun> = parts
        .par_iter()
        .map(|p| run_component(p, k, opts.birth_order))
        .collect::<Result<_, _>>()?;

    let mut claims = ClaimReport::default();
    for run in &runs {
        claims.merge(&run.claims);
    }

    // Global numbering: cores and J vertices are offset per component.
    let mut core_offset = Vec::with_capacity(runs.len());
    let mut j_offset = Vec::with_capacity(runs.len());
    let (mut nc, mut nj) = (0, 0);
    for run in &runs {
        core_offset.push(nc);
        j_offset.push(nj);
        nc += run.forest.cores().len();
        nj += run.j.len();
    }

    let mut h_edges = Vec::new();
    let mut psi = BTreeMap::new();
    let mut phi = BTreeMap::new();
    let mut cores = Vec::new();
    let mut j_graph = JGraphJson::default();
    let mut subdivisions = Vec::new();
    let mut reduced_edges = Vec::new();
    let mut added: Vec<(Vertex, Vertex)> = Vec::new();
    for (ci, run) in runs.iter().enumerate() {
        let (co, jo) = (core_offset[ci], j_offset[ci]);
        h_edges.extend(run.h.graph.edges().map(|(a, b)| (a + co, b + co)));
        for (&v, &class) in run.forest.classifications() {
            psi.insert(v, class.core().0 + co);
            phi.insert(
                v,
                PhiJson {
                    core: class.core().0 + co,
                    central: matches!(class, Classification::Central(_)),
                    source: run.forest.source(v).expect("classified vertices have a source"),
                },
            );
        }
        for core in run.forest.cores() {
            cores.push(CoreJson {
                id: core.id.0 + co,
                component: ci,
                birthday: core.birthday,
                birth_index: core.birth_index,
                vertices: core.vertices.iter().copied().collect(),
                spread: run.forest.spread(core.id).iter().copied().collect(),
            });
        }
        for (i, x) in run.j.vertices().iter().enumerate() {
            j_graph.vertices.push(JVertexJson {
                id: i + jo,
                s: x.s,
                t: x.t,
                core: x.core.0 + co,
            });
        }
        for e in run.j.edges() {
            let u = run.j.index_of(e.u).expect("edge end") + jo;
            let v = run.j.index_of(e.v).expect("edge end") + jo;
            j_graph.edges.push(JEdgeJson { u, v, color: e.color });
        }
        if let Some(jd) = &run.j_decomposition {
            for (&(parent, child), &n) in &jd.subdivisions {
                subdivisions.push(SubdivisionJson {
                    component: ci,
                    parent,
                    child,
                    n,
                    cross_edges: jd.cross_edges[&(parent, child)],
                });
            }
        }
        reduced_edges.extend(run.reduced.edges());
        added.extend(run.reduced.edges().filter(|&(u, v)| !run.graph.has_edge(u, v)));
    }
    added.sort_unstable();
    let h = Graph::new(0..nc, h_edges).expect("component quotients are disjoint");
    let reduced = Graph::new(g.vertices().iter().copied(), reduced_edges).expect("components are disjoint");
    let psi_map: BTreeMap<Vertex, Vertex> = psi.clone();

    let h_decomposition = combine_decompositions(
        runs.iter().map(|r| r.h_decomposition.as_ref()),
        &core_offset,
    );
    let j_decomposition = combine_decompositions(
        runs.iter().map(|r| r.j_decomposition.as_ref().map(|jd| &jd.decomposition)),
        &j_offset,
    );

    let l = 2 * k as u64 + 2;
    let c = 2 * k as u64 - 1;
    let scale = cert.r.max(1);
    let (l_original, c_original) = compose_reduction_constants(l, c, scale)?;
    let qi_reduced = qi::verify_qi(&reduced, &h, &psi_map, l, c)?;
    let qi_original = qi::verify_qi(g, &h, &psi_map, l_original, c_original)?;
    let exploration = if opts.explore {
        Some(
            qi::additive_profile(g, &h, &psi_map, l)?
                .into_iter()
                .map(|(l, c)| ProfileJson { l, c })
                .collect(),
        )
    } else {
        None
    };

    let mut h_width = None;
    let mut failure = claims.first_failure().map(|(n, o)| FailureLocus {
        stage: "claims".into(),
        claim: Some(n),
        detail: o.witness.clone().unwrap_or_default(),
    });
    match &h_decomposition {
        Some(hd) => {
            let report = decomp::validate_pseudo_tree_decomposition(&h, hd).expect("mode is pseudo");
            let w = decomp::width(hd).expect("decomposition is well formed");
            h_width = Some(w);
            if failure.is_none() {
                if let Some(v) = report.first() {
                    failure = Some(locus("h_decomposition", v.to_string()));
                } else if w >= k as i64 {
                    failure = Some(locus("h_decomposition", format!("width {w} exceeds k-1 = {}", k - 1)));
                }
            }
        }
        None => {
            failure = failure.or_else(|| Some(locus("h_decomposition", "J decomposition could not be built".into())));
        }
    }
    for (stage, q) in [("qi_reduced", &qi_reduced), ("qi_original", &qi_original)] {
        if failure.is_none() {
            if let Some((cond, w)) = q.report.first_failure() {
                failure = Some(locus(
                    stage,
                    format!("({}, {}) condition {cond} fails: {}", q.l, q.c, json::to_canonical(w)),
                ));
            }
        }
    }

    let certificate = PipelineCertificate {
        input: InputDigest {
            graph_sha256: json::sha256_hex(json::to_canonical(&GraphJson::from(g)).as_bytes()),
            decomposition_sha256: json::sha256_hex(
                json::to_canonical(&DecompositionJson::new(d, Some(cert))).as_bytes(),
            ),
            vertices: g.len(),
            edges: g.edge_count(),
            k,
            r: cert.r,
        },
        birth_order: match opts.birth_order {
            BirthOrder::MinVertex => None,
            BirthOrder::Shuffled(seed) => Some(seed),
        },
        verdict: if failure.is_none() { "pass" } else { "fail" }.into(),
        failure,
        constants: Constants {
            l,
            c,
            l_original,
            c_original,
        },
        claims: claims
            .claims
            .iter()
            .map(|(&n, o): (&u8, &ClaimOutcome)| (n, o.status()))
            .collect(),
        claim_details: claims,
        h_graph: GraphJson::from(&h),
        h_decomposition: h_decomposition.as_ref().map(|hd| DecompositionJson::new(hd, None)),
        h_width,
        psi,
        phi,
        cores,
        j_graph,
        j_decomposition: j_decomposition.as_ref().map(|jd| DecompositionJson::new(jd, None)),
        subdivisions,
        reduction: ReductionJson {
            r: cert.r,
            qi_scale: scale,
            added_edges: added,
        },
        qi_reduced: QiSummary::from(&qi_reduced),
        qi_original: QiSummary::from(&qi_original),
        exploration,
    };
    Ok(PipelineRun {
        certificate,
        reduced,
        h,
        h_decomposition,
        psi: psi_map,
        components: runs,
    })
}

/// Convenience wrapper returning only the certificate.
pub fn pipeline(
    g: &Graph,
    d: &Decomposition,
    cert: &BallCoverCert,
    opts: &PipelineOptions,
) -> Result<PipelineCertificate, PipelineError> {
    Ok(run_pipeline(g, d, cert, opts)?.certificate)
}

fn locus(stage: &str, detail: String) -> FailureLocus {
    FailureLocus {
        stage: stage.into(),
        claim: None,
        detail,
    }
}

/// Disjoint union of per-component decompositions: vertex ids shifted by
/// `offsets`, node ids of later components shifted past all earlier ones,
/// and every component root joined to the first root.
fn combine_decompositions<'a>(
    parts: impl Iterator<Item = Option<&'a Decomposition>>,
    offsets: &[usize],
) -> Option<Decomposition> {
    let parts: Vec<&Decomposition> = parts.collect::<Option<_>>()?;
    if parts.len() == 1 {
        return Some(parts[0].clone());
    }
    let mut bags: BTreeMap<Node, VertexSet> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut first_root = None;
    let mut next = 0;
    for (part, &off) in parts.iter().zip(offsets) {
        let shift = next;
        for (&t, bag) in &part.bags {
            bags.insert(t + shift, bag.iter().map(|v| v + off).collect());
        }
        edges.extend(part.tree.edges().iter().map(|&(a, b)| (a + shift, b + shift)));
        let root = part.tree.root().unwrap_or(part.tree.nodes()[0]) + shift;
        match first_root {
            None => first_root = Some(root),
            Some(r0) => edges.push((r0, root)),
        }
        next = bags.keys().max().map_or(0, |m| m + 1);
    }
    let tree = IndexTree::new(bags.keys().copied(), edges, first_root).expect("joined trees form a tree");
    Some(Decomposition::new(tree, bags, Mode::PseudoTree).expect("bags are indexed by tree nodes"))
}
