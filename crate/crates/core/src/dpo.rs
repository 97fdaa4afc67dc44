//! String graph rewrite rules and double-pushout rewriting.
//!
//! A rule is a span `L <- B -> R` where `B` is the common boundary. Spans are
//! encoded by names: the inputs and outputs of `lhs` must be inputs and
//! outputs of `rhs` under the same names and labels. Other vertices are
//! private to their side even when a name happens to occur on both.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::{check_matching, find_matchings, Matching};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub lhs: Graph,
    pub rhs: Graph,
}

impl Rule {
    pub fn new(name: impl Into<String>, lhs: Graph, rhs: Graph) -> Self {
        Rule { name: name.into(), lhs, rhs }
    }

    /// The first reason this is not a valid rule, if any.
    pub fn violation(&self) -> Option<String> {
        if self.lhs.alphabets() != self.rhs.alphabets() {
            return Some("the two sides use different alphabets".into());
        }
        for (side, g) in [("lhs", &self.lhs), ("rhs", &self.rhs)] {
            if let Some(v) = g.string_graph_violation() {
                return Some(format!("{side} is not a string graph: {v}"));
            }
        }
        let bl = self.lhs.wire_boundary();
        let br = self.rhs.wire_boundary();
        if bl.inputs != br.inputs {
            return Some(format!("inputs differ: lhs {:?}, rhs {:?}", bl.inputs, br.inputs));
        }
        if bl.outputs != br.outputs {
            return Some(format!("outputs differ: lhs {:?}, rhs {:?}", bl.outputs, br.outputs));
        }
        for v in bl.vertices() {
            if self.lhs.label(&v) != self.rhs.label(&v) {
                return Some(format!("boundary vertex `{v}` has different labels on the two sides"));
            }
        }
        None
    }

    pub fn validate(&self) -> Result<()> {
        match self.violation() {
            None => Ok(()),
            Some(m) => Err(Error::InvalidRule(m)),
        }
    }

    /// The rule read right to left.
    pub fn reversed(&self) -> Rule {
        Rule { name: format!("{}^-1", self.name), lhs: self.rhs.clone(), rhs: self.lhs.clone() }
    }
}

/// Rewrites the expanded target of `m` with `rule`.
///
/// The pushout complement deletes the images of the non-boundary vertices
/// and of every edge of the left-hand side; the pushout then adds a copy of
/// the right-hand side glued along the boundary images. Fresh vertices are
/// named `<rule>.<rhs-name>.<k>` with the least `k >= 1` free for all of them.
pub fn rewrite(rule: &Rule, m: &Matching) -> Result<Graph> {
    rewrite_avoiding(rule, m, |_| false)
}

/// As [`rewrite`], but fresh names also avoid every name `taken` accepts.
pub(crate) fn rewrite_avoiding(rule: &Rule, m: &Matching, taken: impl Fn(&str) -> bool) -> Result<Graph> {
    rule.validate()?;
    let target = &m.expanded_target;
    check_matching(&rule.lhs, target, &m.map)?;
    let boundary = rule.lhs.wire_boundary();

    let mut g = target.clone();
    for e in rule.lhs.edges() {
        g.remove_edge(&crate::graph::Edge::new(&m.map[&e.source], &e.label, &m.map[&e.target]));
    }
    for v in rule.lhs.vertex_names() {
        if !boundary.contains(v) {
            g.remove_vertex(&m.map[v]);
        }
    }

    let fresh: Vec<&str> = rule.rhs.vertex_names().filter(|v| !boundary.contains(v)).collect();
    let k = (1..)
        .find(|k| {
            fresh.iter().all(|v| {
                let name = format!("{}.{v}.{k}", rule.name);
                !g.contains(&name) && !taken(&name)
            })
        })
        .expect("unbounded");
    let mut names: BTreeMap<&str, String> = BTreeMap::new();
    for (v, label) in rule.rhs.vertices() {
        let name = if boundary.contains(v) { m.map[v].clone() } else { format!("{}.{v}.{k}", rule.name) };
        if !boundary.contains(v) {
            g.add_vertex(name.clone(), label)?;
        }
        names.insert(v, name);
    }
    for e in rule.rhs.edges() {
        g.add_edge(names[e.source.as_str()].clone(), e.label.clone(), names[e.target.as_str()].clone())?;
    }
    if let Some(v) = g.string_graph_violation() {
        return Err(Error::InvalidMatching(format!("rewrite produced a non-string graph: {v}")));
    }
    Ok(g)
}

/// Applies `rule` at the `index`-th matching class of its left-hand side in `g`.
pub fn apply_rule(rule: &Rule, g: &Graph, index: usize) -> Result<Graph> {
    rule.validate()?;
    let ms = find_matchings(&rule.lhs, g)?;
    let Some(m) = ms.get(index) else {
        return Err(Error::InvalidMatching(format!("matching index {index} out of range ({} found)", ms.len())));
    };
    rewrite(rule, m)
}
