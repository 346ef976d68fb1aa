//! Coarse tree-width certificates.
//!
//! Given a graph with a tree-decomposition whose bags are unions of at most
//! `k` sets of bounded diameter, this crate builds a quotient graph `H` of
//! pseudo-tree-width at most `k - 1` together with a map `psi: V(G) -> V(H)`,
//! and checks exhaustively that `psi` is a `(2k + 2, 2k - 1)`-quasi-isometry
//! (scaled by the diameter bound when it exceeds 1). Every intermediate
//! structural claim is checked along the way.

pub mod claims;
pub mod cores;
pub mod decomp;
pub mod dot;
pub mod gen;
pub mod graph;
pub mod json;
pub mod pipeline;
pub mod qi;
pub mod quotient;
pub mod reduce;
pub mod widthcert;

pub use claims::{ClaimOutcome, ClaimReport};
pub use cores::{build_cores, BirthOrder, Classification, Core, CoreForest, CoreId};
pub use decomp::{BallCoverCert, Decomposition, IndexTree, Mode, Node, RootedTree, Violation};
pub use graph::{Distance, Graph, Vertex, VertexSet};
pub use pipeline::{pipeline, run_pipeline, PipelineCertificate, PipelineError, PipelineOptions};
pub use qi::{converse_decomposition, verify_qi, QiCertificate};
pub use quotient::{build_j, contract_green, red_distance, JGraph, JVertex, QuotientH};
pub use widthcert::{build_j_decomposition, matching_ppd, project_decomposition, LayerInstance};
