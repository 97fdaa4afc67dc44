//! Rewrite patterns: pairs of B-ESG grammars derived in lockstep.
//!
//! Productions, nonterminals and inputs/outputs of the two grammars
//! correspond by name. Since substitution names new vertices
//! hierarchically, running one trace in both grammars gives boundary
//! vertices equal names on both sides.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::besg::Besg;
use crate::dpo::Rule;
use crate::error::{Error, Result};
use crate::grammar::{substitute, DerivationTrace};
use crate::graph::{Graph, IsoClasses, VertexKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewritePattern {
    pub b1: Besg,
    pub b2: Besg,
}

/// One failed pattern condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternViolation {
    /// `shared`, `pairing`, `NT`, `IO`, `B1` or `B2`.
    pub condition: &'static str,
    pub production: Option<String>,
    pub detail: String,
}

impl fmt::Display for PatternViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.production {
            Some(p) => write!(f, "{} in production `{p}`: {}", self.condition, self.detail),
            None => write!(f, "{}: {}", self.condition, self.detail),
        }
    }
}

fn named_nonterminals(g: &Graph) -> BTreeMap<&str, &str> {
    g.vertices().filter(|(v, _)| g.is_kind(v, VertexKind::NonTerminal)).collect()
}

fn labelled(g: &Graph, names: &BTreeSet<String>) -> BTreeMap<String, String> {
    names.iter().map(|v| (v.clone(), g.label(v).unwrap().to_string())).collect()
}

impl RewritePattern {
    pub fn new(b1: Besg, b2: Besg) -> Self {
        RewritePattern { b1, b2 }
    }

    /// Every failed condition; empty when the pattern is valid.
    pub fn violations(&self) -> Vec<PatternViolation> {
        let mut out = Vec::new();
        let v = |condition, production: Option<&str>, detail: String| PatternViolation {
            condition,
            production: production.map(str::to_string),
            detail,
        };
        let (g1, g2) = (&self.b1.grammar, &self.b2.grammar);
        if g1.alphabets != g2.alphabets {
            out.push(v("shared", None, "the grammars use different alphabets".into()));
        }
        if g1.start != g2.start {
            out.push(v("shared", None, format!("start symbols differ: `{}` vs `{}`", g1.start, g2.start)));
        }
        if self.b1.decoder != self.b2.decoder {
            out.push(v("shared", None, "the grammars use different decoders".into()));
        }
        for (side, b) in [("B1", &self.b1), ("B2", &self.b2)] {
            for x in b.violations() {
                out.push(v(side, None, x.to_string()));
            }
        }
        let names: BTreeSet<&String> = g1.productions.keys().chain(g2.productions.keys()).collect();
        for name in names {
            let prod = Some(name.as_str());
            let (Some(p1), Some(p2)) = (g1.productions.get(name), g2.productions.get(name)) else {
                out.push(v("pairing", prod, "production exists in only one grammar".into()));
                continue;
            };
            if p1.head != p2.head {
                out.push(v("pairing", prod, format!("heads differ: `{}` vs `{}`", p1.head, p2.head)));
            }
            let (n1, n2) = (named_nonterminals(&p1.body), named_nonterminals(&p2.body));
            if n1 != n2 {
                out.push(v("NT", prod, format!("nonterminals differ: {n1:?} vs {n2:?}")));
            }
            let (io1, io2) = (p1.body.wire_boundary(), p2.body.wire_boundary());
            for (what, a, b) in [("inputs", &io1.inputs, &io2.inputs), ("outputs", &io1.outputs, &io2.outputs)] {
                let (la, lb) = (labelled(&p1.body, a), labelled(&p2.body, b));
                if la != lb {
                    out.push(v("IO", prod, format!("{what} differ: {la:?} vs {lb:?}")));
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
        Err(Error::InvalidPattern(text.join("; ")))
    }

    /// Runs `trace` in both grammars and decodes, giving the rule `F => F'`.
    pub fn instantiate(&self, trace: &DerivationTrace) -> Result<Rule> {
        self.validate()?;
        let lhs = self.b1.concrete_derive(trace)?;
        let rhs = self.b2.concrete_derive(trace)?;
        let rule = Rule::new("instance", lhs, rhs);
        rule.validate()?;
        Ok(rule)
    }

    /// Every instantiation whose left-hand side has at most `max_size`
    /// vertices plus edges, one per isomorphism class of the pair of
    /// sentential forms. Requires `b1` to be reduced.
    pub fn enumerate_instantiations(&self, max_size: usize) -> Result<Vec<(DerivationTrace, Rule)>> {
        self.validate()?;
        if let Some(v) = self.b1.grammar.reduced_violation() {
            return Err(Error::NotReduced(v));
        }
        let (g1, g2) = (&self.b1.grammar, &self.b2.grammar);
        let keep = |h1: &Graph| self.b1.size_lower_bound(h1) <= max_size;
        let start = (g1.start_graph(), g2.start_graph());
        let mut out = Vec::new();
        if !keep(&start.0) {
            return Ok(out);
        }
        let link = PairLink::new(&self.b1.grammar.alphabets);
        let mut seen = IsoClasses::new();
        seen.insert(&link.join(&start.0, &start.1)?);
        let mut queue = VecDeque::from([(start.0, start.1, DerivationTrace::default())]);
        while let Some((h1, h2, trace)) = queue.pop_front() {
            let nts: Vec<(String, String)> = named_nonterminals(&h1)
                .into_iter()
                .map(|(v, l)| (v.to_string(), l.to_string()))
                .collect();
            if nts.is_empty() {
                let rule = self.instantiate(&trace)?;
                if rule.lhs.size() <= max_size {
                    out.push((trace, rule));
                }
                continue;
            }
            for (v, label) in &nts {
                for p1 in g1.productions_for(label) {
                    let p2 = g2.production(&p1.name)?;
                    let n1 = substitute(&h1, v, p1)?;
                    if !keep(&n1) {
                        continue;
                    }
                    let n2 = substitute(&h2, v, p2)?;
                    if seen.insert(&link.join(&n1, &n2)?) {
                        queue.push_back((n1, n2, trace.then(v, &p1.name)));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Joins the two sides of a pattern derivation into one graph so that
/// isomorphism of joined graphs is isomorphism of pairs respecting the
/// name correspondence.
struct PairLink {
    alphabets: Arc<crate::graph::Alphabets>,
    label: String,
}

impl PairLink {
    fn new(base: &crate::graph::Alphabets) -> Self {
        let mut label = "=".to_string();
        while base.edge_labels.contains(&label) || base.encoding_labels.contains(&label) {
            label.push('=');
        }
        let mut alphabets = base.clone();
        alphabets.edge_labels.insert(label.clone());
        PairLink { alphabets: Arc::new(alphabets), label }
    }

    fn join(&self, h1: &Graph, h2: &Graph) -> Result<Graph> {
        let mut g = Graph::new(self.alphabets.clone());
        for (side, h) in [("1:", h1), ("2:", h2)] {
            for (v, l) in h.vertices() {
                g.add_vertex(format!("{side}{v}"), l)?;
            }
            for e in h.edges() {
                g.add_edge(format!("{side}{}", e.source), e.label.clone(), format!("{side}{}", e.target))?;
            }
        }
        for (v, l) in h1.vertices() {
            if h2.label(v) == Some(l) {
                g.add_edge(format!("1:{v}"), self.label.clone(), format!("2:{v}"))?;
            }
        }
        Ok(g)
    }
}
