//! edNCE grammars over graphs with embedding.
//!
//! Substituting production `X -> (D, C)` for a nonterminal `v` removes `v`,
//! adds a copy of `D` whose vertices are named `v.<body-name>`, and for every
//! edge between `v` and a neighbour `w` applies each matching connection
//! instruction `(label(w), beta/gamma, x, d)`: an in-edge `(w, beta, v)`
//! yields `(w, gamma, v.x)` when `d = in`, and an out-edge `(v, beta, w)`
//! yields `(v.x, gamma, w)` when `d = out`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Alphabets, Graph, IsoClasses, VertexKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::In => "in",
            Direction::Out => "out",
        })
    }
}

/// `(sigma, beta/gamma, x, d)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConnectionInstruction {
    pub neighbor_label: String,
    pub old_label: String,
    pub new_label: String,
    pub target: String,
    pub direction: Direction,
}

impl ConnectionInstruction {
    pub fn new(sigma: &str, beta: &str, gamma: &str, x: &str, d: Direction) -> Self {
        ConnectionInstruction {
            neighbor_label: sigma.into(),
            old_label: beta.into(),
            new_label: gamma.into(),
            target: x.into(),
            direction: d,
        }
    }
}

impl fmt::Display for ConnectionInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}/{}, {}, {})",
            self.neighbor_label, self.old_label, self.new_label, self.target, self.direction
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub name: String,
    pub head: String,
    pub body: Graph,
    pub connections: Vec<ConnectionInstruction>,
}

impl Production {
    /// Instructions whose target is `x`.
    pub fn instructions_for<'a>(&'a self, x: &'a str) -> impl Iterator<Item = &'a ConnectionInstruction> + 'a {
        self.connections.iter().filter(move |c| c.target == x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub alphabets: Arc<Alphabets>,
    pub start: String,
    pub productions: BTreeMap<String, Production>,
}

/// Sequence of `(vertex, production)` substitutions from the start graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DerivationTrace {
    pub steps: Vec<(String, String)>,
}

impl DerivationTrace {
    pub fn new(steps: Vec<(String, String)>) -> Self {
        DerivationTrace { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn then(&self, vertex: &str, production: &str) -> DerivationTrace {
        let mut t = self.clone();
        t.steps.push((vertex.to_string(), production.to_string()));
        t
    }

    /// Number of steps using `production`.
    pub fn uses(&self, production: &str) -> usize {
        self.steps.iter().filter(|(_, p)| p == production).count()
    }
}

/// Replaces nonterminal `v` of `h` by the body of `p`.
pub fn substitute(h: &Graph, v: &str, p: &Production) -> Result<Graph> {
    let label = h.label(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
    if !h.is_kind(v, VertexKind::NonTerminal) {
        return Err(Error::Substitution(format!("vertex `{v}` is not a nonterminal")));
    }
    if label != p.head {
        return Err(Error::Substitution(format!(
            "production `{}` rewrites `{}` but `{v}` is labelled `{label}`",
            p.name, p.head
        )));
    }
    let incoming: Vec<(String, String)> = h.in_edges(v).map(|(l, s)| (l.to_string(), s.to_string())).collect();
    let outgoing: Vec<(String, String)> = h.out_edges(v).map(|(l, t)| (l.to_string(), t.to_string())).collect();
    let mut g = h.clone();
    g.remove_vertex(v);
    let fresh = |x: &str| format!("{v}.{x}");
    for (x, l) in p.body.vertices() {
        let name = fresh(x);
        if g.contains(&name) {
            return Err(Error::Substitution(format!("fresh name `{name}` is already in use")));
        }
        g.add_vertex(name, l)?;
    }
    for e in p.body.edges() {
        g.add_edge(fresh(&e.source), e.label.clone(), fresh(&e.target))?;
    }
    for c in &p.connections {
        let edges = match c.direction {
            Direction::In => &incoming,
            Direction::Out => &outgoing,
        };
        for (beta, w) in edges {
            if *beta != c.old_label || h.label(w) != Some(c.neighbor_label.as_str()) {
                continue;
            }
            match c.direction {
                Direction::In => g.add_edge(w.clone(), c.new_label.clone(), fresh(&c.target))?,
                Direction::Out => g.add_edge(fresh(&c.target), c.new_label.clone(), w.clone())?,
            };
        }
    }
    Ok(g)
}

impl Grammar {
    pub fn start_graph(&self) -> Graph {
        let mut g = Graph::new(self.alphabets.clone());
        g.add_vertex(self.start.clone(), self.start.clone()).expect("start label is a nonterminal");
        g
    }

    pub fn productions_for<'a>(&'a self, head: &'a str) -> impl Iterator<Item = &'a Production> + 'a {
        self.productions.values().filter(move |p| p.head == head)
    }

    pub fn production(&self, name: &str) -> Result<&Production> {
        self.productions.get(name).ok_or_else(|| Error::InvalidGrammar(format!("no production named `{name}`")))
    }

    /// Structural well-formedness: alphabets, heads, labels, instruction targets.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGrammar(m));
        self.alphabets.validate()?;
        if !self.alphabets.nonterminal_labels.contains(&self.start) {
            return bad(format!("start symbol `{}` is not a nonterminal label", self.start));
        }
        if self.productions_for(&self.start).next().is_none() {
            return bad(format!("start symbol `{}` has no production", self.start));
        }
        for (name, p) in &self.productions {
            if *name != p.name {
                return bad(format!("production `{}` is stored under `{name}`", p.name));
            }
            if !self.alphabets.nonterminal_labels.contains(&p.head) {
                return bad(format!("production `{name}`: head `{}` is not a nonterminal label", p.head));
            }
            if **p.body.alphabets() != *self.alphabets {
                return bad(format!("production `{name}`: body uses different alphabets"));
            }
            for c in &p.connections {
                if self.alphabets.kind_of(&c.neighbor_label).is_none() {
                    return bad(format!("production `{name}`: instruction {c} has unknown neighbour label"));
                }
                for l in [&c.old_label, &c.new_label] {
                    if !self.alphabets.edge_labels.contains(l) {
                        return bad(format!("production `{name}`: instruction {c} uses unknown edge label `{l}`"));
                    }
                }
                if !p.body.contains(&c.target) {
                    return bad(format!("production `{name}`: instruction {c} targets a vertex outside the body"));
                }
            }
        }
        Ok(())
    }

    /// First violation of the boundary condition: adjacent nonterminals in a
    /// body, or an instruction keyed on a nonterminal neighbour label.
    pub fn boundary_violation(&self) -> Option<String> {
        for (name, p) in &self.productions {
            for e in p.body.edges() {
                if p.body.is_kind(&e.source, VertexKind::NonTerminal) && p.body.is_kind(&e.target, VertexKind::NonTerminal)
                {
                    return Some(format!("production `{name}`: edge {e} joins two nonterminals"));
                }
            }
            for c in &p.connections {
                if self.alphabets.nonterminal_labels.contains(&c.neighbor_label) {
                    return Some(format!("production `{name}`: instruction {c} is keyed on a nonterminal"));
                }
            }
        }
        None
    }

    pub fn is_boundary(&self) -> bool {
        self.boundary_violation().is_none()
    }

    /// First production that is empty or consists of a single nonterminal.
    pub fn reduced_violation(&self) -> Option<String> {
        for (name, p) in &self.productions {
            if p.body.is_empty() {
                return Some(format!("production `{name}` has an empty body"));
            }
            if p.body.vertex_count() == 1 && p.body.count_kind(VertexKind::NonTerminal) == 1 {
                return Some(format!("production `{name}` has a single nonterminal as its body"));
            }
        }
        None
    }

    fn step(&self, form: &Graph, i: usize, vertex: &str, production: &str) -> Result<Graph> {
        let err = |reason: String| Error::Derivation { step: i, reason };
        let p = self.productions.get(production).ok_or_else(|| err(format!("unknown production `{production}`")))?;
        match form.kind(vertex) {
            None => return Err(err(format!("vertex `{vertex}` does not exist"))),
            Some(VertexKind::NonTerminal) => {}
            Some(_) => return Err(err(format!("vertex `{vertex}` is terminal"))),
        }
        substitute(form, vertex, p).map_err(|e| err(e.to_string()))
    }

    /// Replays `trace` from the start graph.
    pub fn derive(&self, trace: &DerivationTrace) -> Result<Graph> {
        let mut g = self.start_graph();
        for (i, (v, p)) in trace.steps.iter().enumerate() {
            g = self.step(&g, i, v, p)?;
        }
        Ok(g)
    }

    /// Every sentential form along `trace`, starting with the start graph.
    pub fn derive_forms(&self, trace: &DerivationTrace) -> Result<Vec<Graph>> {
        let mut forms = vec![self.start_graph()];
        for (i, (v, p)) in trace.steps.iter().enumerate() {
            let next = self.step(forms.last().unwrap(), i, v, p)?;
            forms.push(next);
        }
        Ok(forms)
    }

    /// Breadth-first search over sentential forms up to isomorphism, keeping
    /// only forms accepted by `keep`. Requires a reduced grammar and a `keep`
    /// that bounds the vertex count, which makes the search finite.
    pub fn explore(&self, mut keep: impl FnMut(&Graph) -> bool) -> Result<Vec<(Graph, DerivationTrace)>> {
        if let Some(v) = self.reduced_violation() {
            return Err(Error::NotReduced(v));
        }
        let start = self.start_graph();
        let mut out = Vec::new();
        if !keep(&start) {
            return Ok(out);
        }
        let mut seen = IsoClasses::new();
        seen.insert(&start);
        let mut queue = VecDeque::from([(start, DerivationTrace::default())]);
        while let Some((form, trace)) = queue.pop_front() {
            let nts: Vec<String> = form.vertices_of_kind(VertexKind::NonTerminal).map(str::to_string).collect();
            for v in &nts {
                let label = form.label(v).unwrap();
                for p in self.productions_for(label) {
                    let next = substitute(&form, v, p)?;
                    if keep(&next) && seen.insert(&next) {
                        queue.push_back((next, trace.then(v, &p.name)));
                    }
                }
            }
            out.push((form, trace));
        }
        Ok(out)
    }

    /// All sentential forms with at most `max_vertices` vertices, one
    /// witness trace per isomorphism class, in breadth-first order.
    pub fn enumerate_sentential_forms(&self, max_vertices: usize) -> Result<Vec<(Graph, DerivationTrace)>> {
        self.explore(|g| g.vertex_count() <= max_vertices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_isomorphic;
    use crate::test_support::{alphabets, graph};

    fn prod(name: &str, head: &str, body: Graph, cs: Vec<ConnectionInstruction>) -> Production {
        Production { name: name.into(), head: head.into(), body, connections: cs }
    }

    #[test]
    fn substitution_follows_instructions() {
        let h = graph(&[("f", "f"), ("S", "S")], &[("f", "e", "S")]);
        let p = prod(
            "p",
            "S",
            graph(&[("x", "W")], &[]),
            vec![ConnectionInstruction::new("f", "e", "e", "x", Direction::In)],
        );
        let g = substitute(&h, "S", &p).unwrap();
        assert!(g.contains_edge("f", "e", "S.x"));
        assert_eq!(g.vertex_count(), 2);

        let out_only = prod(
            "q",
            "S",
            graph(&[("x", "W")], &[]),
            vec![ConnectionInstruction::new("f", "e", "e", "x", Direction::Out)],
        );
        let g = substitute(&h, "S", &out_only).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn isolated_nonterminal_gives_disjoint_union() {
        let h = graph(&[("g", "g"), ("S", "S")], &[]);
        let p = prod("p", "S", graph(&[("a", "W"), ("b", "W")], &[("a", "e", "b")]), vec![]);
        let g = substitute(&h, "S", &p).unwrap();
        let expected = graph(&[("g", "g"), ("S.a", "W"), ("S.b", "W")], &[("S.a", "e", "S.b")]);
        assert_eq!(g, expected);
        assert!(substitute(&h, "g", &p).is_err());
    }

    fn tiny() -> Grammar {
        // S -> f with a nonterminal X on an output wire; X -> wire-vertex
        let s_body = graph(&[("f", "f"), ("w", "W"), ("X", "X")], &[("f", "e", "w"), ("w", "e", "X")]);
        let x_body = graph(&[("o", "W")], &[]);
        let mut productions = BTreeMap::new();
        productions.insert("s".into(), prod("s", "S", s_body, vec![]));
        productions.insert(
            "x".into(),
            prod("x", "X", x_body, vec![ConnectionInstruction::new("W", "e", "e", "o", Direction::In)]),
        );
        Grammar { alphabets: alphabets(), start: "S".into(), productions }
    }

    #[test]
    fn derive_and_errors() {
        let g = tiny();
        g.validate().unwrap();
        assert!(g.is_boundary());
        assert_eq!(g.derive(&DerivationTrace::default()).unwrap(), g.start_graph());
        let t = DerivationTrace::new(vec![("S".into(), "s".into()), ("S.X".into(), "x".into())]);
        let out = g.derive(&t).unwrap();
        assert!(out.contains_edge("S.w", "e", "S.X.o"));
        assert!(out.is_string_graph());
        let bad = DerivationTrace::new(vec![("S".into(), "s".into()), ("S.f".into(), "x".into())]);
        assert!(matches!(g.derive(&bad), Err(Error::Derivation { step: 1, .. })));
    }

    #[test]
    fn boundary_clauses() {
        let mut g = tiny();
        g.productions.get_mut("x").unwrap().connections.push(ConnectionInstruction::new("S", "e", "e", "o", Direction::In));
        assert!(g.boundary_violation().unwrap().contains("nonterminal"));
        let mut g = tiny();
        let body = graph(&[("X", "X"), ("Y", "Y")], &[("X", "e", "Y")]);
        g.productions.insert("bad".into(), prod("bad", "S", body, vec![]));
        assert!(g.boundary_violation().unwrap().contains("joins two nonterminals"));
    }

    #[test]
    fn enumeration() {
        let g = tiny();
        assert!(g.enumerate_sentential_forms(0).unwrap().is_empty());
        let forms = g.enumerate_sentential_forms(10).unwrap();
        assert_eq!(forms.len(), 3);
        for (f, t) in &forms {
            assert!(graph_isomorphic(f, &g.derive(t).unwrap()).is_some());
        }
        let mut empty = tiny();
        empty.productions.insert("e".into(), prod("e", "X", Graph::new(alphabets()), vec![]));
        assert!(matches!(empty.enumerate_sentential_forms(5), Err(Error::NotReduced(_))));
    }
}
