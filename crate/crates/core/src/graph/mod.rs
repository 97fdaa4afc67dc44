//! Labelled directed graphs and the string-graph layer built on them.
//!
//! A [`Graph`] is a set of named vertices, each carrying one label from the
//! vertex alphabet, plus a set of labelled edge triples. Self-loops are
//! rejected and parallel edges are only possible when label or direction
//! differs, since edges form a set.

mod iso;
mod string_graph;
mod wire;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use iso::{graph_isomorphic, invariant_hash, IsoClasses};
pub use string_graph::{Boundary, StringGraphViolation};
pub use wire::{
    merge_wire_vertices, min_wire_len, minimal_representative, split_wire_vertex, wire_homeomorphic, wires,
    Wire, WireKind,
};
pub(crate) use wire::{body_wires, fresh_name, split_in_place};

/// The label alphabets every graph, grammar and rule is drawn over.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alphabets {
    pub node_labels: BTreeSet<String>,
    pub wire_labels: BTreeSet<String>,
    pub nonterminal_labels: BTreeSet<String>,
    pub edge_labels: BTreeSet<String>,
    pub encoding_labels: BTreeSet<String>,
}

impl Alphabets {
    pub fn validate(&self) -> Result<()> {
        for n in &self.node_labels {
            if self.wire_labels.contains(n) || self.nonterminal_labels.contains(n) {
                return Err(Error::Alphabets(format!("label `{n}` is in more than one vertex alphabet")));
            }
        }
        if let Some(w) = self.wire_labels.intersection(&self.nonterminal_labels).next() {
            return Err(Error::Alphabets(format!("label `{w}` is both a wire and a nonterminal label")));
        }
        if let Some(e) = self.encoding_labels.difference(&self.edge_labels).next() {
            return Err(Error::Alphabets(format!("encoding label `{e}` is not an edge label")));
        }
        Ok(())
    }

    pub fn kind_of(&self, label: &str) -> Option<VertexKind> {
        if self.node_labels.contains(label) {
            Some(VertexKind::Node)
        } else if self.wire_labels.contains(label) {
            Some(VertexKind::Wire)
        } else if self.nonterminal_labels.contains(label) {
            Some(VertexKind::NonTerminal)
        } else {
            None
        }
    }

    pub fn is_encoding(&self, edge_label: &str) -> bool {
        self.encoding_labels.contains(edge_label)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    Node,
    Wire,
    NonTerminal,
}

/// A directed labelled edge `(source, label, target)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: String,
    pub label: String,
    pub target: String,
}

impl Edge {
    pub fn new(source: impl Into<String>, label: impl Into<String>, target: impl Into<String>) -> Self {
        Edge { source: source.into(), label: label.into(), target: target.into() }
    }

    pub fn touches(&self, v: &str) -> bool {
        self.source == v || self.target == v
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.source, self.label, self.target)
    }
}

#[derive(Clone, Debug)]
pub struct Graph {
    alphabets: Arc<Alphabets>,
    vertices: BTreeMap<String, String>,
    edges: BTreeSet<Edge>,
    // (target, label, source), kept in sync with `edges`
    incoming: BTreeSet<(String, String, String)>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges && self.alphabets == other.alphabets
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new(alphabets: Arc<Alphabets>) -> Self {
        Graph { alphabets, vertices: BTreeMap::new(), edges: BTreeSet::new(), incoming: BTreeSet::new() }
    }

    /// Builds a graph from raw parts, checking every label and endpoint.
    pub fn from_parts<V, E>(alphabets: Arc<Alphabets>, vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = (String, String)>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let mut g = Graph::new(alphabets);
        for (name, label) in vertices {
            g.add_vertex(name, label)?;
        }
        for (s, l, t) in edges {
            g.add_edge(s, l, t)?;
        }
        Ok(g)
    }

    pub fn alphabets(&self) -> &Arc<Alphabets> {
        &self.alphabets
    }

    /// Replaces the alphabet handle; labels must still be covered.
    pub fn with_alphabets(mut self, alphabets: Arc<Alphabets>) -> Result<Self> {
        self.alphabets = alphabets;
        for label in self.vertices.values() {
            if self.alphabets.kind_of(label).is_none() {
                return Err(Error::BadLabel { label: label.clone(), expected: "vertex" });
            }
        }
        for e in &self.edges {
            if !self.alphabets.edge_labels.contains(&e.label) {
                return Err(Error::BadLabel { label: e.label.clone(), expected: "edge" });
            }
        }
        Ok(self)
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, label: impl Into<String>) -> Result<()> {
        let name = name.into();
        let label = label.into();
        if self.alphabets.kind_of(&label).is_none() {
            return Err(Error::BadLabel { label, expected: "vertex" });
        }
        if self.vertices.contains_key(&name) {
            return Err(Error::DuplicateVertex(name));
        }
        self.vertices.insert(name, label);
        Ok(())
    }

    /// Inserts an edge; returns `false` when it was already present.
    pub fn add_edge(
        &mut self,
        source: impl Into<String>,
        label: impl Into<String>,
        target: impl Into<String>,
    ) -> Result<bool> {
        let (source, label, target) = (source.into(), label.into(), target.into());
        if !self.alphabets.edge_labels.contains(&label) {
            return Err(Error::BadLabel { label, expected: "edge" });
        }
        for v in [&source, &target] {
            if !self.vertices.contains_key(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        if source == target {
            return Err(Error::SelfLoop(source));
        }
        self.incoming.insert((target.clone(), label.clone(), source.clone()));
        Ok(self.edges.insert(Edge { source, label, target }))
    }

    pub fn remove_edge(&mut self, e: &Edge) -> bool {
        self.incoming.remove(&(e.target.clone(), e.label.clone(), e.source.clone()));
        self.edges.remove(e)
    }

    /// Removes a vertex together with its incident edges.
    pub fn remove_vertex(&mut self, v: &str) -> Option<String> {
        let label = self.vertices.remove(v)?;
        for e in self.incident_edges(v) {
            self.remove_edge(&e);
        }
        Some(label)
    }

    pub fn contains(&self, v: &str) -> bool {
        self.vertices.contains_key(v)
    }

    pub fn contains_edge(&self, source: &str, label: &str, target: &str) -> bool {
        self.edges.contains(&Edge::new(source, label, target))
    }

    pub fn label(&self, v: &str) -> Option<&str> {
        self.vertices.get(v).map(String::as_str)
    }

    pub fn kind(&self, v: &str) -> Option<VertexKind> {
        self.label(v).and_then(|l| self.alphabets.kind_of(l))
    }

    pub fn is_kind(&self, v: &str, kind: VertexKind) -> bool {
        self.kind(v) == Some(kind)
    }

    /// Classifies a vertex by the alphabet its label belongs to.
    pub fn classify_vertex(&self, v: &str) -> Result<VertexKind> {
        self.kind(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertex count plus edge count.
    pub fn size(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&str, &str)> {
        self.vertices.iter().map(|(n, l)| (n.as_str(), l.as_str()))
    }

    pub fn vertex_names(&self) -> impl Iterator<Item = &str> {
        self.vertices.keys().map(String::as_str)
    }

    pub fn vertices_of_kind(&self, kind: VertexKind) -> impl Iterator<Item = &str> {
        self.vertices
            .iter()
            .filter(move |(_, l)| self.alphabets.kind_of(l) == Some(kind))
            .map(|(n, _)| n.as_str())
    }

    pub fn count_kind(&self, kind: VertexKind) -> usize {
        self.vertices_of_kind(kind).count()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    /// Outgoing `(label, target)` pairs of `v`, in order.
    pub fn out_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        let start = Edge::new(v, "", "");
        self.edges
            .range(start..)
            .take_while(move |e| e.source == v)
            .map(|e| (e.label.as_str(), e.target.as_str()))
    }

    /// Incoming `(label, source)` pairs of `v`, in order.
    pub fn in_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        let start = (v.to_string(), String::new(), String::new());
        self.incoming
            .range(start..)
            .take_while(move |(t, _, _)| t == v)
            .map(|(_, l, s)| (l.as_str(), s.as_str()))
    }

    pub fn out_degree(&self, v: &str) -> usize {
        self.out_edges(v).count()
    }

    pub fn in_degree(&self, v: &str) -> usize {
        self.in_edges(v).count()
    }

    pub fn degree(&self, v: &str) -> usize {
        self.in_degree(v) + self.out_degree(v)
    }

    pub fn incident_edges(&self, v: &str) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.out_edges(v).map(|(l, t)| Edge::new(v, l, t)).collect();
        out.extend(self.in_edges(v).map(|(l, s)| Edge::new(s, l, v)));
        out
    }

    /// Distinct neighbours in either direction.
    pub fn neighbors<'a>(&'a self, v: &'a str) -> BTreeSet<&'a str> {
        self.out_edges(v).map(|(_, t)| t).chain(self.in_edges(v).map(|(_, s)| s)).collect()
    }

    /// Subgraph induced by `keep`.
    pub fn induced(&self, keep: &BTreeSet<String>) -> Graph {
        let mut g = Graph::new(self.alphabets.clone());
        for v in keep {
            if let Some(l) = self.vertices.get(v) {
                g.vertices.insert(v.clone(), l.clone());
            }
        }
        for e in &self.edges {
            if keep.contains(&e.source) && keep.contains(&e.target) {
                g.incoming.insert((e.target.clone(), e.label.clone(), e.source.clone()));
                g.edges.insert(e.clone());
            }
        }
        g
    }

    /// Renames vertices with `f`; `f` must be injective on this graph.
    pub fn rename(&self, mut f: impl FnMut(&str) -> String) -> Result<Graph> {
        let map: BTreeMap<&str, String> = self.vertices.keys().map(|v| (v.as_str(), f(v))).collect();
        let mut g = Graph::new(self.alphabets.clone());
        for (v, l) in &self.vertices {
            g.add_vertex(map[v.as_str()].clone(), l.clone())?;
        }
        for e in &self.edges {
            g.add_edge(map[e.source.as_str()].clone(), e.label.clone(), map[e.target.as_str()].clone())?;
        }
        Ok(g)
    }
}
