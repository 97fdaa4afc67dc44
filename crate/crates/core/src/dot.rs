//! Graphviz rendering: wire-vertices as points, node-vertices as labelled
//! circles, nonterminals as boxes, encoding edges dashed.

use std::fmt::Write;

use crate::graph::{Graph, VertexKind};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(g: &Graph, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    for (v, label) in g.vertices() {
        let attrs = match g.kind(v) {
            Some(VertexKind::Wire) => format!("shape=point, xlabel={}", quote(label)),
            Some(VertexKind::NonTerminal) => format!("shape=box, label={}", quote(label)),
            _ => format!("shape=circle, label={}", quote(label)),
        };
        writeln!(out, "  {} [{attrs}];", quote(v)).unwrap();
    }
    for e in g.edges() {
        let style = if g.alphabets().is_encoding(&e.label) { ", style=dashed" } else { "" };
        writeln!(out, "  {} -> {} [label={}{style}];", quote(&e.source), quote(&e.target), quote(&e.label)).unwrap();
    }
    out.push_str("}\n");
    out
}
