//! Wires, wire-vertex merging/splitting, and minimal representatives.
//!
//! Naming scheme for vertices created or removed here:
//! * merging `u -> v` keeps `v`'s name when `v` is an output, otherwise `u`'s;
//! * splitting `v` keeps `v`'s name on the half that holds `v`'s out-edge
//!   when `v` is an output and on the first half otherwise; the other half
//!   is named `v~k` with the least `k >= 1` not already in use.
//!
//! Both rules keep every input and output name stable.

use serde::{Deserialize, Serialize};

use super::{Graph, VertexKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WireKind {
    Circle,
    Attached,
    Bare,
}

/// A maximal chain or cycle of wire-vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub kind: WireKind,
    /// From the source end; circles start at their least vertex name.
    pub vertex_path: Vec<String>,
    /// Non-wire vertex feeding the first wire-vertex.
    pub source: Option<String>,
    /// Non-wire vertex fed by the last wire-vertex.
    pub target: Option<String>,
}

impl Wire {
    pub fn len(&self) -> usize {
        self.vertex_path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_path.is_empty()
    }

    pub fn endpoints(&self) -> Vec<&str> {
        self.source.iter().chain(self.target.iter()).map(String::as_str).collect()
    }
}

/// Shortest length a wire of this kind can be contracted to.
pub fn min_wire_len(kind: WireKind) -> usize {
    match kind {
        WireKind::Attached => 1,
        WireKind::Circle | WireKind::Bare => 2,
    }
}

pub(crate) fn fresh_name(g: &Graph, base: &str) -> String {
    (1..).map(|k| format!("{base}~{k}")).find(|n| !g.contains(n)).expect("unbounded")
}

fn wire_succ<'a>(g: &'a Graph, v: &'a str) -> Option<&'a str> {
    g.out_edges(v).map(|(_, t)| t).find(|t| g.is_kind(t, VertexKind::Wire))
}

fn wire_pred<'a>(g: &'a Graph, v: &'a str) -> Option<&'a str> {
    g.in_edges(v).map(|(_, s)| s).find(|s| g.is_kind(s, VertexKind::Wire))
}

fn non_wire_source(g: &Graph, v: &str) -> Option<String> {
    g.in_edges(v).map(|(_, s)| s).find(|s| !g.is_kind(s, VertexKind::Wire)).map(str::to_string)
}

fn non_wire_target(g: &Graph, v: &str) -> Option<String> {
    g.out_edges(v).map(|(_, t)| t).find(|t| !g.is_kind(t, VertexKind::Wire)).map(str::to_string)
}

/// Wire decomposition of any graph whose wire-vertices have in- and
/// out-degree at most one. Nonterminal neighbours count as endpoints.
pub(crate) fn body_wires(g: &Graph) -> Vec<Wire> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let wire_vertices: Vec<&str> = g.vertices_of_kind(VertexKind::Wire).collect();
    for &start in &wire_vertices {
        if seen.contains(start) || wire_pred(g, start).is_some() {
            continue;
        }
        let mut path = vec![start.to_string()];
        seen.insert(start);
        let mut cur = start;
        while let Some(next) = wire_succ(g, cur) {
            if !seen.insert(next) {
                break;
            }
            path.push(next.to_string());
            cur = next;
        }
        let source = non_wire_source(g, start);
        let target = non_wire_target(g, cur);
        let kind = if source.is_some() || target.is_some() {
            WireKind::Attached
        } else if path.len() >= 2 {
            WireKind::Bare
        } else {
            continue; // isolated wire-vertex
        };
        out.push(Wire { kind, vertex_path: path, source, target });
    }
    // whatever is left lies on cycles
    for &start in &wire_vertices {
        if seen.contains(start) {
            continue;
        }
        let mut path = vec![start.to_string()];
        seen.insert(start);
        let mut cur = start;
        while let Some(next) = wire_succ(g, cur) {
            if !seen.insert(next) {
                break;
            }
            path.push(next.to_string());
            cur = next;
        }
        out.push(Wire { kind: WireKind::Circle, vertex_path: path, source: None, target: None });
    }
    out
}

/// Wires of a string graph; isolated wire-vertices belong to none.
pub fn wires(g: &Graph) -> Result<Vec<Wire>> {
    g.require_string_graph()?;
    Ok(body_wires(g))
}

fn merge_error(u: &str, v: &str, reason: &'static str) -> Error {
    Error::Merge { u: u.to_string(), v: v.to_string(), reason }
}

/// Merges adjacent wire-vertices `u -> v` in place and returns the
/// surviving name. Only the local degree conditions are required.
pub(crate) fn merge_in_place(g: &mut Graph, u: &str, v: &str) -> Result<String> {
    if !g.is_kind(u, VertexKind::Wire) || !g.is_kind(v, VertexKind::Wire) {
        return Err(merge_error(u, v, "both vertices must be wire-vertices"));
    }
    if g.label(u) != g.label(v) {
        return Err(merge_error(u, v, "wire-vertices carry different labels"));
    }
    if !g.out_edges(u).any(|(_, t)| t == v) {
        return Err(merge_error(u, v, "no edge from the first vertex to the second"));
    }
    if g.out_degree(u) != 1 || g.in_degree(v) != 1 || g.in_degree(u) > 1 || g.out_degree(v) > 1 {
        return Err(merge_error(u, v, "wire-vertex degree exceeds one"));
    }
    if g.out_edges(v).any(|(_, t)| t == u) {
        return Err(merge_error(u, v, "merging a two-vertex circle would create a self-loop"));
    }
    let in_edge: Option<(String, String)> = g.in_edges(u).next().map(|(l, s)| (l.to_string(), s.to_string()));
    let out_edge: Option<(String, String)> = g.out_edges(v).next().map(|(l, t)| (l.to_string(), t.to_string()));
    if in_edge.is_none() && out_edge.is_none() {
        return Err(merge_error(u, v, "the two vertices form an entire bare wire"));
    }
    let label = g.label(u).unwrap().to_string();
    let keep = if out_edge.is_none() { v.to_string() } else { u.to_string() };
    g.remove_vertex(u);
    g.remove_vertex(v);
    g.add_vertex(keep.clone(), label)?;
    if let Some((l, s)) = in_edge {
        g.add_edge(s, l, keep.clone())?;
    }
    if let Some((l, t)) = out_edge {
        g.add_edge(keep.clone(), l, t)?;
    }
    Ok(keep)
}

/// Splits wire-vertex `v` in place into `first -> second`.
pub(crate) fn split_in_place(g: &mut Graph, v: &str) -> Result<(String, String)> {
    let err = |reason| Error::Split { vertex: v.to_string(), reason };
    if !g.is_kind(v, VertexKind::Wire) {
        return Err(err("not a wire-vertex"));
    }
    if g.in_degree(v) > 1 || g.out_degree(v) > 1 {
        return Err(err("wire-vertex degree exceeds one"));
    }
    let in_edge: Option<(String, String)> = g.in_edges(v).next().map(|(l, s)| (l.to_string(), s.to_string()));
    let out_edge: Option<(String, String)> = g.out_edges(v).next().map(|(l, t)| (l.to_string(), t.to_string()));
    let inner_label = match (&in_edge, &out_edge) {
        (Some((l, _)), _) | (None, Some((l, _))) => l.clone(),
        (None, None) => return Err(err("isolated wire-vertices belong to no wire")),
    };
    let fresh = fresh_name(g, v);
    let (first, second) = if out_edge.is_none() { (fresh, v.to_string()) } else { (v.to_string(), fresh) };
    let label = g.label(v).unwrap().to_string();
    g.remove_vertex(v);
    g.add_vertex(first.clone(), label.clone())?;
    g.add_vertex(second.clone(), label)?;
    if let Some((l, s)) = in_edge {
        g.add_edge(s, l, first.clone())?;
    }
    g.add_edge(first.clone(), inner_label, second.clone())?;
    if let Some((l, t)) = out_edge {
        g.add_edge(second.clone(), l, t)?;
    }
    Ok((first, second))
}

/// Merges two adjacent wire-vertices `u -> v` of a string graph.
pub fn merge_wire_vertices(g: &Graph, u: &str, v: &str) -> Result<Graph> {
    g.require_string_graph()?;
    for x in [u, v] {
        if !g.contains(x) {
            return Err(Error::UnknownVertex(x.to_string()));
        }
    }
    let mut h = g.clone();
    merge_in_place(&mut h, u, v)?;
    Ok(h)
}

/// Splits a wire-vertex of a string graph into two adjacent ones.
pub fn split_wire_vertex(g: &Graph, v: &str) -> Result<Graph> {
    g.require_string_graph()?;
    if !g.contains(v) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let mut h = g.clone();
    split_in_place(&mut h, v)?;
    Ok(h)
}

/// Contracts one wire as far as its kind and labels allow.
pub(crate) fn contract_wire(g: &mut Graph, wire: &Wire) -> Result<()> {
    let mut path = wire.vertex_path.clone();
    if wire.kind == WireKind::Circle {
        // start at a label change so that runs do not wrap around
        let n = path.len();
        if let Some(i) = (0..n).find(|&i| g.label(&path[i]) != g.label(&path[(i + n - 1) % n])) {
            path.rotate_left(i);
        }
    }
    let min = min_wire_len(wire.kind);
    let mut i = 0;
    while i + 1 < path.len() && path.len() > min {
        if g.label(&path[i]) == g.label(&path[i + 1]) {
            let kept = merge_in_place(g, &path[i], &path[i + 1])?;
            path.splice(i..=i + 1, [kept]);
        } else {
            i += 1;
        }
    }
    Ok(())
}

/// The unique minimal member of `g`'s wire-homeomorphism class: attached
/// wires have one wire-vertex, circles and bare wires two (wire-vertices
/// with different labels are never merged).
pub fn minimal_representative(g: &Graph) -> Result<Graph> {
    g.require_string_graph()?;
    let mut h = g.clone();
    for wire in body_wires(g) {
        contract_wire(&mut h, &wire)?;
    }
    Ok(h)
}

/// Whether `g` and `h` are related by merges and splits of wire-vertices.
pub fn wire_homeomorphic(g: &Graph, h: &Graph) -> Result<bool> {
    let a = minimal_representative(g)?;
    let b = minimal_representative(h)?;
    Ok(super::graph_isomorphic(&a, &b).is_some())
}
