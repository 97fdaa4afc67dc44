//! JSON documents for graphs, rules, grammars, patterns and traces.
//!
//! Every top-level document carries `format_version`; unknown fields are
//! rejected. Maps are ordered, so equal values serialize to equal bytes.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::besg::{Besg, DecodingRule, DecodingSystem};
use crate::dpo::Rule;
use crate::error::{Error, Result};
use crate::grammar::{ConnectionInstruction, DerivationTrace, Direction, Grammar, Production};
use crate::graph::{Alphabets, Graph};
use crate::pattern::RewritePattern;

pub const FORMAT_VERSION: u32 = 1;

/// Vertices and edges of a graph whose alphabets are given elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyDoc {
    pub vertices: BTreeMap<String, String>,
    pub edges: Vec<(String, String, String)>,
}

impl BodyDoc {
    pub fn from_graph(g: &Graph) -> Self {
        BodyDoc {
            vertices: g.vertices().map(|(v, l)| (v.to_string(), l.to_string())).collect(),
            edges: g.edges().map(|e| (e.source.clone(), e.label.clone(), e.target.clone())).collect(),
        }
    }

    pub fn to_graph(&self, alphabets: &Arc<Alphabets>) -> Result<Graph> {
        Graph::from_parts(alphabets.clone(), self.vertices.clone(), self.edges.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub format_version: u32,
    pub alphabets: Alphabets,
    pub vertices: BTreeMap<String, String>,
    pub edges: Vec<(String, String, String)>,
}

impl GraphDoc {
    pub fn from_graph(g: &Graph) -> Self {
        let body = BodyDoc::from_graph(g);
        GraphDoc {
            format_version: FORMAT_VERSION,
            alphabets: (**g.alphabets()).clone(),
            vertices: body.vertices,
            edges: body.edges,
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        check_version(self.format_version)?;
        let a = alphabets(&self.alphabets)?;
        Graph::from_parts(a, self.vertices.clone(), self.edges.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    pub format_version: u32,
    pub name: String,
    pub alphabets: Alphabets,
    pub lhs: BodyDoc,
    pub rhs: BodyDoc,
}

impl RuleDoc {
    pub fn from_rule(r: &Rule) -> Self {
        RuleDoc {
            format_version: FORMAT_VERSION,
            name: r.name.clone(),
            alphabets: (**r.lhs.alphabets()).clone(),
            lhs: BodyDoc::from_graph(&r.lhs),
            rhs: BodyDoc::from_graph(&r.rhs),
        }
    }

    /// The rule as written; call [`Rule::validate`] to check it.
    pub fn to_rule(&self) -> Result<Rule> {
        check_version(self.format_version)?;
        let a = alphabets(&self.alphabets)?;
        Ok(Rule::new(self.name.clone(), self.lhs.to_graph(&a)?, self.rhs.to_graph(&a)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionDoc {
    pub head: String,
    pub body: BodyDoc,
    /// `[neighbour label, old edge label, new edge label, target, direction]`.
    #[serde(default)]
    pub connections: Vec<(String, String, String, String, Direction)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodingRuleDoc {
    pub alpha: String,
    pub n1: String,
    pub n2: String,
    pub rhs: BodyDoc,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarDoc {
    pub format_version: u32,
    pub alphabets: Alphabets,
    pub start: String,
    pub productions: BTreeMap<String, ProductionDoc>,
    #[serde(default)]
    pub decoder: Vec<DecodingRuleDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionsDoc {
    pub productions: BTreeMap<String, ProductionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternDoc {
    pub format_version: u32,
    pub alphabets: Alphabets,
    pub start: String,
    #[serde(default)]
    pub decoder: Vec<DecodingRuleDoc>,
    pub grammar1: ProductionsDoc,
    pub grammar2: ProductionsDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDoc {
    pub format_version: u32,
    /// `[nonterminal vertex, production name]` pairs.
    pub steps: Vec<(String, String)>,
}

impl TraceDoc {
    pub fn from_trace(t: &DerivationTrace) -> Self {
        TraceDoc { format_version: FORMAT_VERSION, steps: t.steps.clone() }
    }

    pub fn to_trace(&self) -> Result<DerivationTrace> {
        check_version(self.format_version)?;
        Ok(DerivationTrace::new(self.steps.clone()))
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format_version {v} (expected {FORMAT_VERSION})")));
    }
    Ok(())
}

fn alphabets(a: &Alphabets) -> Result<Arc<Alphabets>> {
    a.validate()?;
    Ok(Arc::new(a.clone()))
}

fn productions_from_docs(a: &Arc<Alphabets>, docs: &BTreeMap<String, ProductionDoc>) -> Result<BTreeMap<String, Production>> {
    let mut out = BTreeMap::new();
    for (name, p) in docs {
        let connections = p
            .connections
            .iter()
            .map(|(s, b, g, x, d)| ConnectionInstruction::new(s, b, g, x, *d))
            .collect();
        let prod = Production { name: name.clone(), head: p.head.clone(), body: p.body.to_graph(a)?, connections };
        out.insert(name.clone(), prod);
    }
    Ok(out)
}

fn productions_to_docs(ps: &BTreeMap<String, Production>) -> BTreeMap<String, ProductionDoc> {
    ps.iter()
        .map(|(name, p)| {
            let connections = p
                .connections
                .iter()
                .map(|c| {
                    let c = c.clone();
                    (c.neighbor_label, c.old_label, c.new_label, c.target, c.direction)
                })
                .collect();
            (name.clone(), ProductionDoc { head: p.head.clone(), body: BodyDoc::from_graph(&p.body), connections })
        })
        .collect()
}

fn decoder_from_docs(a: &Arc<Alphabets>, docs: &[DecodingRuleDoc]) -> Result<DecodingSystem> {
    let mut rules = Vec::new();
    for d in docs {
        rules.push(DecodingRule {
            alpha: d.alpha.clone(),
            n1: d.n1.clone(),
            n2: d.n2.clone(),
            rhs: d.rhs.to_graph(a)?,
            left: d.left.clone(),
            right: d.right.clone(),
        });
    }
    let system = DecodingSystem::new(rules);
    if system.rules.len() != docs.len() {
        return Err(Error::Format("two decoding rules share a triple".into()));
    }
    Ok(system)
}

fn decoder_to_docs(t: &DecodingSystem) -> Vec<DecodingRuleDoc> {
    t.rules
        .values()
        .map(|r| DecodingRuleDoc {
            alpha: r.alpha.clone(),
            n1: r.n1.clone(),
            n2: r.n2.clone(),
            rhs: BodyDoc::from_graph(&r.rhs),
            left: r.left.clone(),
            right: r.right.clone(),
        })
        .collect()
}

impl GrammarDoc {
    pub fn from_besg(b: &Besg) -> Self {
        GrammarDoc {
            format_version: FORMAT_VERSION,
            alphabets: (*b.grammar.alphabets).clone(),
            start: b.grammar.start.clone(),
            productions: productions_to_docs(&b.grammar.productions),
            decoder: decoder_to_docs(&b.decoder),
        }
    }

    /// The grammar as written; call [`Besg::validate`] to check it.
    pub fn to_besg(&self) -> Result<Besg> {
        check_version(self.format_version)?;
        let a = alphabets(&self.alphabets)?;
        let grammar =
            Grammar { alphabets: a.clone(), start: self.start.clone(), productions: productions_from_docs(&a, &self.productions)? };
        Ok(Besg::new(grammar, decoder_from_docs(&a, &self.decoder)?))
    }
}

impl PatternDoc {
    pub fn from_pattern(p: &RewritePattern) -> Self {
        PatternDoc {
            format_version: FORMAT_VERSION,
            alphabets: (*p.b1.grammar.alphabets).clone(),
            start: p.b1.grammar.start.clone(),
            decoder: decoder_to_docs(&p.b1.decoder),
            grammar1: ProductionsDoc { productions: productions_to_docs(&p.b1.grammar.productions) },
            grammar2: ProductionsDoc { productions: productions_to_docs(&p.b2.grammar.productions) },
        }
    }

    /// The pattern as written; call [`RewritePattern::validate`] to check it.
    pub fn to_pattern(&self) -> Result<RewritePattern> {
        check_version(self.format_version)?;
        let a = alphabets(&self.alphabets)?;
        let decoder = decoder_from_docs(&a, &self.decoder)?;
        let side = |docs: &ProductionsDoc| -> Result<Besg> {
            let g = Grammar { alphabets: a.clone(), start: self.start.clone(), productions: productions_from_docs(&a, &docs.productions)? };
            Ok(Besg::new(g, decoder.clone()))
        };
        Ok(RewritePattern::new(side(&self.grammar1)?, side(&self.grammar2)?))
    }
}

/// Parses a document, naming the expected kind in error messages.
pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{what} document: {e}")))
}

/// Pretty-printed JSON with object keys sorted and a trailing newline, so
/// equal documents always print identically.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let value = serde_json::to_value(doc).expect("documents always serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values always serialize");
    s.push('\n');
    s
}

pub fn graph_from_json(text: &str) -> Result<Graph> {
    parse::<GraphDoc>(text, "graph")?.to_graph()
}

pub fn graph_to_json(g: &Graph) -> String {
    to_json(&GraphDoc::from_graph(g))
}

pub fn rule_from_json(text: &str) -> Result<Rule> {
    parse::<RuleDoc>(text, "rule")?.to_rule()
}

pub fn rule_to_json(r: &Rule) -> String {
    to_json(&RuleDoc::from_rule(r))
}

pub fn grammar_from_json(text: &str) -> Result<Besg> {
    parse::<GrammarDoc>(text, "grammar")?.to_besg()
}

pub fn grammar_to_json(b: &Besg) -> String {
    to_json(&GrammarDoc::from_besg(b))
}

pub fn pattern_from_json(text: &str) -> Result<RewritePattern> {
    parse::<PatternDoc>(text, "pattern")?.to_pattern()
}

pub fn pattern_to_json(p: &RewritePattern) -> String {
    to_json(&PatternDoc::from_pattern(p))
}

pub fn trace_from_json(text: &str) -> Result<DerivationTrace> {
    parse::<TraceDoc>(text, "trace")?.to_trace()
}

pub fn trace_to_json(t: &DerivationTrace) -> String {
    to_json(&TraceDoc::from_trace(t))
}
