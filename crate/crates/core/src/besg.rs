//! Encoded string graphs, decoding systems and B-ESG grammars.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::grammar::{DerivationTrace, Direction, Grammar};
use crate::graph::{body_wires, fresh_name, Edge, Graph, IsoClasses, VertexKind};

/// Replacement of one encoding edge `(alpha, n1, n2)` by a string graph in
/// which `left` and `right` stand for the edge's source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingRule {
    pub alpha: String,
    pub n1: String,
    pub n2: String,
    pub rhs: Graph,
    pub left: String,
    pub right: String,
}

impl DecodingRule {
    pub fn key(&self) -> (String, String, String) {
        (self.alpha.clone(), self.n1.clone(), self.n2.clone())
    }

    pub fn violation(&self) -> Option<String> {
        let a = self.rhs.alphabets();
        if !a.is_encoding(&self.alpha) {
            return Some(format!("`{}` is not an encoding label", self.alpha));
        }
        if let Some(v) = self.rhs.string_graph_violation() {
            return Some(format!("rhs is not a string graph: {v}"));
        }
        let b = self.rhs.wire_boundary();
        if !b.inputs.is_empty() || !b.outputs.is_empty() {
            return Some("rhs has inputs or outputs".into());
        }
        if self.left == self.right {
            return Some("left and right endpoints coincide".into());
        }
        for (end, label) in [(&self.left, &self.n1), (&self.right, &self.n2)] {
            if !self.rhs.is_kind(end, VertexKind::Node) || self.rhs.label(end) != Some(label.as_str()) {
                return Some(format!("endpoint `{end}` is not a node-vertex labelled `{label}`"));
            }
        }
        if !is_connected(&self.rhs) {
            return Some("rhs is not connected".into());
        }
        None
    }

    /// Net size `|V| + |E|` added by decoding one edge with this rule.
    fn growth(&self) -> usize {
        self.rhs.vertex_count() - 2 + self.rhs.edge_count()
    }
}

fn is_connected(g: &Graph) -> bool {
    let Some(first) = g.vertex_names().next() else { return true };
    let mut seen = BTreeSet::from([first]);
    let mut stack = vec![first];
    while let Some(v) = stack.pop() {
        for w in g.neighbors(v) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == g.vertex_count()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecodingSystem {
    pub rules: BTreeMap<(String, String, String), DecodingRule>,
}

impl DecodingSystem {
    pub fn new(rules: impl IntoIterator<Item = DecodingRule>) -> Self {
        DecodingSystem { rules: rules.into_iter().map(|r| (r.key(), r)).collect() }
    }

    pub fn rule(&self, alpha: &str, n1: &str, n2: &str) -> Option<&DecodingRule> {
        self.rules.get(&(alpha.to_string(), n1.to_string(), n2.to_string()))
    }
}

/// Replaces the encoding edge `e` of `g` by a copy of its decoding rule.
/// New vertices are named `<source>~<alpha>~<target>.<rhs-name>`.
pub fn decode_edge(g: &Graph, t: &DecodingSystem, e: &Edge) -> Result<Graph> {
    if !g.contains_edge(&e.source, &e.label, &e.target) {
        return Err(Error::NotEncodedStringGraph(format!("edge {e} does not exist")));
    }
    let (n1, n2) = (g.label(&e.source).unwrap(), g.label(&e.target).unwrap());
    let rule = t.rule(&e.label, n1, n2).ok_or_else(|| Error::MissingDecodingRule {
        alpha: e.label.clone(),
        n1: n1.to_string(),
        n2: n2.to_string(),
    })?;
    let mut h = g.clone();
    h.remove_edge(e);
    let mut names = BTreeMap::new();
    names.insert(rule.left.as_str(), e.source.clone());
    names.insert(rule.right.as_str(), e.target.clone());
    for (x, label) in rule.rhs.vertices() {
        if names.contains_key(x) {
            continue;
        }
        let mut name = format!("{}~{}~{}.{x}", e.source, e.label, e.target);
        if h.contains(&name) {
            name = fresh_name(&h, &name);
        }
        h.add_vertex(name.clone(), label)?;
        names.insert(x, name);
    }
    for r in rule.rhs.edges() {
        h.add_edge(names[r.source.as_str()].clone(), r.label.clone(), names[r.target.as_str()].clone())?;
    }
    Ok(h)
}

/// Normalizes `g` with respect to `t`, always decoding the least encoding
/// edge first. Any other order gives an isomorphic result.
pub fn decode(g: &Graph, t: &DecodingSystem) -> Result<Graph> {
    if let Some(v) = g.encoded_string_graph_violation() {
        return Err(Error::NotEncodedStringGraph(v));
    }
    let mut h = g.clone();
    loop {
        let next = h.edges().find(|e| h.alphabets().is_encoding(&e.label)).cloned();
        match next {
            Some(e) => h = decode_edge(&h, t, &e)?,
            None => return Ok(h),
        }
    }
}

/// Whether a sentential form is an ESG-form: encoding edges exactly between
/// node-vertex pairs, and wire-vertices of in- and out-degree at most one
/// (nonterminals may sit anywhere).
pub fn esg_form_violation(g: &Graph) -> Option<String> {
    for e in g.edges() {
        let nodes = g.is_kind(&e.source, VertexKind::Node) && g.is_kind(&e.target, VertexKind::Node);
        let enc = g.alphabets().is_encoding(&e.label);
        if nodes != enc {
            return Some(format!("edge {e}: encoding labels must join exactly the node-vertex pairs"));
        }
    }
    for v in g.vertices_of_kind(VertexKind::Wire) {
        if g.in_degree(v) > 1 || g.out_degree(v) > 1 {
            return Some(format!("wire-vertex `{v}` has in- or out-degree above one"));
        }
    }
    None
}

/// One failed B-ESG condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// `grammar`, `boundary`, `decoder`, `N1`, `N2`, `W1`, `W2`, `W3` or `W4`.
    pub condition: &'static str,
    pub production: Option<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.production {
            Some(p) => write!(f, "{} in production `{p}`: {}", self.condition, self.detail),
            None => write!(f, "{}: {}", self.condition, self.detail),
        }
    }
}

/// A B-edNCE grammar paired with a decoding system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Besg {
    pub grammar: Grammar,
    pub decoder: DecodingSystem,
}

impl Besg {
    pub fn new(grammar: Grammar, decoder: DecodingSystem) -> Self {
        Besg { grammar, decoder }
    }

    /// Every failed condition, in production order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let v = |condition, production: Option<&str>, detail: String| Violation {
            condition,
            production: production.map(str::to_string),
            detail,
        };
        if let Err(e) = self.grammar.validate() {
            out.push(v("grammar", None, e.to_string()));
            return out;
        }
        for r in self.decoder.rules.values() {
            if let Some(m) = r.violation() {
                out.push(v("decoder", None, format!("rule ({}, {}, {}): {m}", r.alpha, r.n1, r.n2)));
            } else if **r.rhs.alphabets() != *self.grammar.alphabets {
                out.push(v("decoder", None, format!("rule ({}, {}, {}) uses other alphabets", r.alpha, r.n1, r.n2)));
            }
        }
        let a = &self.grammar.alphabets;
        for (name, p) in &self.grammar.productions {
            let d = &p.body;
            let prod = Some(name.as_str());
            for e in d.edges() {
                if d.is_kind(&e.source, VertexKind::NonTerminal) && d.is_kind(&e.target, VertexKind::NonTerminal) {
                    out.push(v("boundary", prod, format!("edge {e} joins two nonterminals")));
                }
                let nodes = d.is_kind(&e.source, VertexKind::Node) && d.is_kind(&e.target, VertexKind::Node);
                if nodes != a.is_encoding(&e.label) {
                    out.push(v("N1", prod, format!("edge {e}")));
                }
            }
            for x in d.vertices_of_kind(VertexKind::Wire) {
                if d.in_degree(x) > 1 || d.out_degree(x) > 1 {
                    out.push(v("W1", prod, format!("wire-vertex `{x}` has in- or out-degree above one")));
                }
            }
            let mut w3: BTreeMap<(&str, &str, Direction), usize> = BTreeMap::new();
            for c in &p.connections {
                let sigma = a.kind_of(&c.neighbor_label);
                let target = d.kind(&c.target);
                if sigma == Some(VertexKind::NonTerminal) {
                    out.push(v("boundary", prod, format!("instruction {c} is keyed on a nonterminal")));
                }
                if sigma == Some(VertexKind::Node) && target == Some(VertexKind::Node) && !a.is_encoding(&c.new_label) {
                    out.push(v("N2", prod, format!("instruction {c} must emit an encoding label")));
                }
                if target == Some(VertexKind::Wire) {
                    out.push(v("W2", prod, format!("instruction {c} targets a wire-vertex")));
                }
                if sigma == Some(VertexKind::Wire) {
                    *w3.entry((&c.neighbor_label, &c.old_label, c.direction)).or_default() += 1;
                    if a.is_encoding(&c.new_label) {
                        out.push(v("W3", prod, format!("instruction {c} emits an encoding label")));
                    }
                }
            }
            for ((w, gamma, dir), n) in w3 {
                if n > 1 {
                    out.push(v("W3", prod, format!("{n} instructions of the form ({w}, {gamma}/_, _, {dir})")));
                }
            }
            for (y, label) in d.vertices().filter(|(y, _)| d.is_kind(y, VertexKind::NonTerminal)) {
                let mut needs: BTreeSet<(String, String, Direction)> = BTreeSet::new();
                for (beta, w) in d.in_edges(y) {
                    if d.is_kind(w, VertexKind::Wire) {
                        needs.insert((d.label(w).unwrap().into(), beta.into(), Direction::In));
                    }
                }
                for (beta, w) in d.out_edges(y) {
                    if d.is_kind(w, VertexKind::Wire) {
                        needs.insert((d.label(w).unwrap().into(), beta.into(), Direction::Out));
                    }
                }
                for c in p.instructions_for(y) {
                    if a.kind_of(&c.neighbor_label) == Some(VertexKind::Wire) {
                        needs.insert((c.neighbor_label.clone(), c.new_label.clone(), c.direction));
                    }
                }
                for (w, beta, dir) in &needs {
                    for q in self.grammar.productions_for(label) {
                        let ok = q
                            .connections
                            .iter()
                            .any(|c| c.neighbor_label == *w && c.old_label == *beta && c.direction == *dir);
                        if !ok {
                            out.push(v(
                                "W4",
                                prod,
                                format!(
                                    "nonterminal `{y}` meets `{w}` via `{beta}` ({dir}) but production `{}` has no instruction ({w}, {beta}/_, _, {dir})",
                                    q.name
                                ),
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            return Ok(());
        }
        let text: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        Err(Error::InvalidGrammar(text.join("; ")))
    }

    /// Encoding triples that can occur in derivations but have no decoding
    /// rule: from encoding edges in bodies and from instructions emitting an
    /// encoding label towards a node-vertex.
    pub fn missing_decoding_rules(&self) -> Vec<(String, String, String)> {
        let a = &self.grammar.alphabets;
        let mut triples = BTreeSet::new();
        for p in self.grammar.productions.values() {
            for e in p.body.edges() {
                if a.is_encoding(&e.label) {
                    let (l1, l2) = (p.body.label(&e.source).unwrap(), p.body.label(&e.target).unwrap());
                    triples.insert((e.label.clone(), l1.to_string(), l2.to_string()));
                }
            }
            for c in &p.connections {
                if !a.is_encoding(&c.new_label) || a.kind_of(&c.neighbor_label) != Some(VertexKind::Node) {
                    continue;
                }
                let Some(x) = p.body.label(&c.target) else { continue };
                let t = match c.direction {
                    Direction::In => (c.new_label.clone(), c.neighbor_label.clone(), x.to_string()),
                    Direction::Out => (c.new_label.clone(), x.to_string(), c.neighbor_label.clone()),
                };
                triples.insert(t);
            }
        }
        triples.into_iter().filter(|(al, n1, n2)| self.decoder.rule(al, n1, n2).is_none()).collect()
    }

    /// Derivation followed by decoding.
    pub fn concrete_derive(&self, trace: &DerivationTrace) -> Result<Graph> {
        let encoded = self.grammar.derive(trace)?;
        self.decode_complete(&encoded)
    }

    fn decode_complete(&self, encoded: &Graph) -> Result<Graph> {
        if let Some(v) = encoded.vertices_of_kind(VertexKind::NonTerminal).next() {
            return Err(Error::ResidualNonterminal(v.to_string()));
        }
        decode(encoded, &self.decoder)
    }

    /// Longest wire, counted in wire-vertices, over all production bodies
    /// and decoding right-hand sides; no member of the language has a
    /// longer wire.
    pub fn max_wire_bound(&self) -> usize {
        let bodies = self.grammar.productions.values().map(|p| &p.body);
        let rhss = self.decoder.rules.values().map(|r| &r.rhs);
        bodies.chain(rhss).flat_map(body_wires).map(|w| w.len()).max().unwrap_or(0)
    }

    /// Lower bound on `|V| + |E|` of anything decoded from a completion of
    /// `form` (substitution never deletes terminals or edges between them).
    pub fn size_lower_bound(&self, form: &Graph) -> usize {
        let mut n = form.vertex_count();
        for e in form.edges() {
            if form.is_kind(&e.source, VertexKind::NonTerminal) || form.is_kind(&e.target, VertexKind::NonTerminal) {
                continue;
            }
            if form.alphabets().is_encoding(&e.label) {
                let (l1, l2) = (form.label(&e.source).unwrap(), form.label(&e.target).unwrap());
                n += self.decoder.rule(&e.label, l1, l2).map_or(0, DecodingRule::growth);
            } else {
                n += 1;
            }
        }
        n
    }

    /// Members of the language with `|V| + |E| <= max_size`, one per
    /// isomorphism class, each with its encoded form and a witness trace.
    pub fn enumerate_language(&self, max_size: usize) -> Result<Vec<LanguageMember>> {
        let forms = self.grammar.explore(|g| self.size_lower_bound(g) <= max_size)?;
        let mut seen = IsoClasses::new();
        let mut out = Vec::new();
        for (form, trace) in forms {
            if form.count_kind(VertexKind::NonTerminal) > 0 {
                continue;
            }
            let graph = self.decode_complete(&form)?;
            if graph.size() <= max_size && seen.insert(&graph) {
                out.push(LanguageMember { graph, encoded: form, trace });
            }
        }
        out.sort_by_key(|m| m.graph.size());
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct LanguageMember {
    pub graph: Graph,
    pub encoded: Graph,
    pub trace: DerivationTrace,
}
