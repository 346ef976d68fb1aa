//! JSON forms of graphs and decompositions.
//!
//! ```json
//! {"vertices":[0,1,2],"edges":[[0,1],[1,2]]}
//! {"mode":"path","tree_nodes":[0,1],"tree_edges":[[0,1]],"root":0,
//!  "bags":{"0":[0,1],"1":[1,2]},"covers":{"0":[[0,1]],"1":[[1,2]]},"k":1,"r":1}
//! ```

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::decomp::{BallCoverCert, DecompError, Decomposition, IndexTree, Mode, Node};
use crate::graph::{Graph, GraphError, Vertex, VertexSet};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("field `{0}` is required when covers are present")]
    MissingField(&'static str),
}

impl From<serde_json::Error> for JsonError {
    fn from(e: serde_json::Error) -> Self {
        JsonError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T, JsonError> {
    Ok(serde_json::from_str(text)?)
}

/// Compact, key-ordered serialization; byte-stable for equal values.
pub fn to_canonical<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson {
            vertices: g.vertices().to_vec(),
            edges: g.edges().collect(),
        }
    }
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<Graph, JsonError> {
        Ok(Graph::new(self.vertices.iter().copied(), self.edges.iter().copied())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub mode: Mode,
    pub tree_nodes: Vec<Node>,
    pub tree_edges: Vec<(Node, Node)>,
    pub root: Option<Node>,
    pub bags: BTreeMap<Node, Vec<Vertex>>,
    pub covers: Option<BTreeMap<Node, Vec<Vec<Vertex>>>>,
    pub k: Option<usize>,
    pub r: Option<u64>,
}

impl DecompositionJson {
    pub fn new(d: &Decomposition, cert: Option<&BallCoverCert>) -> Self {
        DecompositionJson {
            mode: d.mode,
            tree_nodes: d.tree.nodes().to_vec(),
            tree_edges: d.tree.edges().to_vec(),
            root: d.tree.root(),
            bags: d.bags.iter().map(|(&t, b)| (t, b.iter().copied().collect())).collect(),
            covers: cert.map(|c| {
                c.covers
                    .iter()
                    .map(|(&t, sets)| (t, sets.iter().map(|s| s.iter().copied().collect()).collect()))
                    .collect()
            }),
            k: cert.map(|c| c.k),
            r: cert.map(|c| c.r),
        }
    }

    pub fn decomposition(&self) -> Result<Decomposition, JsonError> {
        let tree = IndexTree::new(self.tree_nodes.iter().copied(), self.tree_edges.iter().copied(), self.root)?;
        let bags = self
            .bags
            .iter()
            .map(|(&t, b)| (t, b.iter().copied().collect::<VertexSet>()))
            .collect();
        Ok(Decomposition::new(tree, bags, self.mode)?)
    }

    /// The ball-cover certificate, if `covers` is present.
    pub fn cert(&self) -> Result<Option<BallCoverCert>, JsonError> {
        let Some(covers) = &self.covers else { return Ok(None) };
        let k = self.k.ok_or(JsonError::MissingField("k"))?;
        let r = self.r.ok_or(JsonError::MissingField("r"))?;
        let covers = covers
            .iter()
            .map(|(&t, sets)| (t, sets.iter().map(|s| s.iter().copied().collect()).collect()))
            .collect();
        Ok(Some(BallCoverCert { k, r, covers }))
    }
}
