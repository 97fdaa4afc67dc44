use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Edge, Graph, VertexKind};
use crate::error::{Error, Result};

/// First reason a graph fails to be a (possibly encoded) string graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StringGraphViolation {
    NonTerminal { vertex: String },
    EncodingEdge { edge: Edge },
    /// Condition (1): two node-vertices joined directly.
    NodeNodeEdge { edge: Edge },
    /// Condition (2).
    WireInDegree { vertex: String, degree: usize },
    /// Condition (3).
    WireOutDegree { vertex: String, degree: usize },
}

impl StringGraphViolation {
    /// Which string-graph condition failed: 0 for the alphabet checks, 1..=3 otherwise.
    pub fn condition(&self) -> u8 {
        match self {
            StringGraphViolation::NonTerminal { .. } | StringGraphViolation::EncodingEdge { .. } => 0,
            StringGraphViolation::NodeNodeEdge { .. } => 1,
            StringGraphViolation::WireInDegree { .. } => 2,
            StringGraphViolation::WireOutDegree { .. } => 3,
        }
    }
}

impl fmt::Display for StringGraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StringGraphViolation::NonTerminal { vertex } => write!(f, "vertex `{vertex}` is a nonterminal"),
            StringGraphViolation::EncodingEdge { edge } => write!(f, "edge {edge} carries an encoding label"),
            StringGraphViolation::NodeNodeEdge { edge } => {
                write!(f, "condition (1): edge {edge} joins two node-vertices")
            }
            StringGraphViolation::WireInDegree { vertex, degree } => {
                write!(f, "condition (2): wire-vertex `{vertex}` has in-degree {degree}")
            }
            StringGraphViolation::WireOutDegree { vertex, degree } => {
                write!(f, "condition (3): wire-vertex `{vertex}` has out-degree {degree}")
            }
        }
    }
}

/// Inputs and outputs of a string graph. A wire-vertex may be both.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundary {
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
}

impl Boundary {
    pub fn contains(&self, v: &str) -> bool {
        self.inputs.contains(v) || self.outputs.contains(v)
    }

    pub fn vertices(&self) -> BTreeSet<String> {
        self.inputs.union(&self.outputs).cloned().collect()
    }
}

impl Graph {
    fn degree_violation(&self) -> Option<StringGraphViolation> {
        let wires: Vec<&str> = self.vertices_of_kind(VertexKind::Wire).collect();
        for v in &wires {
            let d = self.in_degree(v);
            if d > 1 {
                return Some(StringGraphViolation::WireInDegree { vertex: v.to_string(), degree: d });
            }
        }
        for v in &wires {
            let d = self.out_degree(v);
            if d > 1 {
                return Some(StringGraphViolation::WireOutDegree { vertex: v.to_string(), degree: d });
            }
        }
        None
    }

    /// The first violated string-graph condition, checked in a fixed order:
    /// nonterminals, encoding edges, then conditions (1), (2), (3).
    pub fn string_graph_violation(&self) -> Option<StringGraphViolation> {
        if let Some(v) = self.vertices_of_kind(VertexKind::NonTerminal).next() {
            return Some(StringGraphViolation::NonTerminal { vertex: v.to_string() });
        }
        if let Some(e) = self.edges().find(|e| self.alphabets.is_encoding(&e.label)) {
            return Some(StringGraphViolation::EncodingEdge { edge: e.clone() });
        }
        if let Some(e) = self
            .edges()
            .find(|e| self.is_kind(&e.source, VertexKind::Node) && self.is_kind(&e.target, VertexKind::Node))
        {
            return Some(StringGraphViolation::NodeNodeEdge { edge: e.clone() });
        }
        self.degree_violation()
    }

    pub fn is_string_graph(&self) -> bool {
        self.string_graph_violation().is_none()
    }

    pub(crate) fn require_string_graph(&self) -> Result<()> {
        match self.string_graph_violation() {
            None => Ok(()),
            Some(v) => Err(Error::NotStringGraph(v)),
        }
    }

    /// Like [`Graph::string_graph_violation`], but encoding-labelled edges
    /// are allowed between pairs of node-vertices.
    pub fn encoded_string_graph_violation(&self) -> Option<String> {
        if let Some(v) = self.vertices_of_kind(VertexKind::NonTerminal).next() {
            return Some(format!("vertex `{v}` is a nonterminal"));
        }
        for e in self.edges() {
            let nodes =
                self.is_kind(&e.source, VertexKind::Node) && self.is_kind(&e.target, VertexKind::Node);
            let enc = self.alphabets.is_encoding(&e.label);
            if enc && !nodes {
                return Some(format!("encoding edge {e} does not join two node-vertices"));
            }
            if nodes && !enc {
                return Some(format!("condition (1): edge {e} joins two node-vertices"));
            }
        }
        self.degree_violation().map(|v| v.to_string())
    }

    pub fn is_encoded_string_graph(&self) -> bool {
        self.encoded_string_graph_violation().is_none()
    }

    /// Inputs (no incoming edge) and outputs (no outgoing edge).
    pub fn boundary(&self) -> Result<Boundary> {
        self.require_string_graph()?;
        Ok(self.wire_boundary())
    }

    /// Boundary computed on any graph: wire-vertices without in- or out-edges.
    pub(crate) fn wire_boundary(&self) -> Boundary {
        let mut b = Boundary::default();
        for v in self.vertices_of_kind(VertexKind::Wire) {
            if self.in_degree(v) == 0 {
                b.inputs.insert(v.to_string());
            }
            if self.out_degree(v) == 0 {
                b.outputs.insert(v.to_string());
            }
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{alphabets, graph};

    #[test]
    fn node_node_edge_is_condition_one() {
        let g = graph(&[("f", "f"), ("g", "g")], &[("f", "e", "g")]);
        let v = g.string_graph_violation().unwrap();
        assert_eq!(v.condition(), 1);
        assert!(matches!(v, StringGraphViolation::NodeNodeEdge { ref edge } if edge.source == "f"));
    }

    #[test]
    fn double_in_degree_is_condition_two() {
        let g = graph(&[("a", "W"), ("b", "W"), ("w", "W")], &[("a", "e", "w"), ("b", "e", "w")]);
        assert_eq!(g.string_graph_violation().unwrap().condition(), 2);
    }

    #[test]
    fn condition_order_is_fixed() {
        // violates (1) and (2); (1) is reported
        let g = graph(
            &[("f", "f"), ("g", "g"), ("a", "W"), ("w", "W")],
            &[("f", "e", "g"), ("a", "e", "w"), ("f", "e", "w")],
        );
        assert_eq!(g.string_graph_violation().unwrap().condition(), 1);
    }

    #[test]
    fn nonterminals_and_encoding_edges_reject() {
        let g = graph(&[("s", "S")], &[]);
        assert!(matches!(g.string_graph_violation(), Some(StringGraphViolation::NonTerminal { .. })));
        let g = graph(&[("f", "f"), ("g", "g")], &[("f", "alpha", "g")]);
        assert!(matches!(g.string_graph_violation(), Some(StringGraphViolation::EncodingEdge { .. })));
        assert!(g.is_encoded_string_graph());
    }

    #[test]
    fn encoding_edge_on_wire_vertex_is_not_encoded() {
        let g = graph(&[("f", "f"), ("w", "W")], &[("f", "alpha", "w")]);
        assert!(!g.is_encoded_string_graph());
        let plain = graph(&[("f", "f"), ("w", "W")], &[("f", "e", "w")]);
        assert!(plain.is_encoded_string_graph());
    }

    #[test]
    fn boundary_examples() {
        let chain = graph(&[("w1", "W"), ("f", "f"), ("w2", "W")], &[("w1", "e", "f"), ("f", "e", "w2")]);
        let b = chain.boundary().unwrap();
        assert_eq!(b.inputs, ["w1".to_string()].into());
        assert_eq!(b.outputs, ["w2".to_string()].into());

        let circle = graph(&[("a", "W"), ("b", "W")], &[("a", "e", "b"), ("b", "e", "a")]);
        let b = circle.boundary().unwrap();
        assert!(b.inputs.is_empty() && b.outputs.is_empty());

        let lone = graph(&[("w", "W")], &[]);
        let b = lone.boundary().unwrap();
        assert!(b.inputs.contains("w") && b.outputs.contains("w"));

        let bad = graph(&[("f", "f"), ("g", "g")], &[("f", "e", "g")]);
        assert!(bad.boundary().is_err());
        let _ = alphabets();
    }
}
