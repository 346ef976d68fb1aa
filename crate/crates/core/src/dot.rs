//! Graphviz DOT output.

use std::fmt::Write;

use crate::graph::Graph;
use crate::pipeline::JGraphJson;

pub fn graph_to_dot(g: &Graph, name: &str) -> String {
    let mut out = format!("graph {} {{\n", quote(name));
    for &v in g.vertices() {
        writeln!(out, "  {v};").unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(out, "  {u} -- {v};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// J with triples as labels; with `color_edges`, edges get `color=green|red`.
pub fn j_to_dot(j: &JGraphJson, color_edges: bool) -> String {
    let mut out = String::from("graph J {\n");
    for x in &j.vertices {
        writeln!(out, "  {} [label=\"({},{},c{})\"];", x.id, x.s, x.t, x.core).unwrap();
    }
    for e in &j.edges {
        if color_edges {
            let color = match e.color {
                crate::quotient::Color::Green => "green",
                crate::quotient::Color::Red => "red",
            };
            writeln!(out, "  {} -- {} [color={color}];", e.u, e.v).unwrap();
        } else {
            writeln!(out, "  {} -- {};", e.u, e.v).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{JEdgeJson, JVertexJson};
    use crate::quotient::Color;

    #[test]
    fn plain_graph() {
        let g = Graph::new([1, 2], [(1, 2)]).unwrap();
        assert_eq!(graph_to_dot(&g, "G"), "graph \"G\" {\n  1;\n  2;\n  1 -- 2;\n}\n");
    }

    #[test]
    fn colored_j() {
        let j = JGraphJson {
            vertices: vec![
                JVertexJson { id: 0, s: 1, t: 1, core: 0 },
                JVertexJson { id: 1, s: 2, t: 1, core: 0 },
                JVertexJson { id: 2, s: 2, t: 2, core: 1 },
            ],
            edges: vec![
                JEdgeJson { u: 0, v: 1, color: Color::Green },
                JEdgeJson { u: 1, v: 2, color: Color::Red },
            ],
        };
        let dot = j_to_dot(&j, true);
        assert!(dot.contains("0 -- 1 [color=green];"));
        assert!(dot.contains("1 -- 2 [color=red];"));
        assert!(!j_to_dot(&j, false).contains("color"));
    }
}
