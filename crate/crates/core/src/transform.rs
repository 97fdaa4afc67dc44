//! Rewriting grammars: final subgraphs, transformation steps, induced
//! patterns and admissibility.

use std::collections::{BTreeMap, BTreeSet};

use crate::besg::Besg;
use crate::decision::is_match_exhaustive;
use crate::dpo::{rewrite, rewrite_avoiding, Rule};
use crate::error::{Error, Result};
use crate::grammar::{DerivationTrace, Production};
use crate::graph::{wire_homeomorphic, Edge, Graph, IsoClasses, VertexKind};
use crate::matching::{find_matchings, Matching};
use crate::pattern::RewritePattern;

/// The largest final subgraph of a production body: the vertices that are
/// neither nonterminals, nor adjacent to one, nor targets of a connection
/// instruction, nor endpoints of an encoding edge. Any final subgraph is
/// contained in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalSubgraph {
    pub production: String,
    pub vertices: BTreeSet<String>,
}

pub fn final_subgraph(p: &Production) -> FinalSubgraph {
    let d = &p.body;
    let mut excluded: BTreeSet<&str> = BTreeSet::new();
    for y in d.vertices_of_kind(VertexKind::NonTerminal) {
        excluded.insert(y);
        excluded.extend(d.neighbors(y));
    }
    excluded.extend(p.connections.iter().map(|c| c.target.as_str()));
    for e in d.edges().filter(|e| d.alphabets().is_encoding(&e.label)) {
        excluded.insert(&e.source);
        excluded.insert(&e.target);
    }
    let vertices = d.vertex_names().filter(|v| !excluded.contains(v)).map(str::to_string).collect();
    FinalSubgraph { production: p.name.clone(), vertices }
}

/// One way of rewriting a grammar with a rule.
#[derive(Clone, Debug)]
pub struct TransformStep {
    pub b_prime: Besg,
    pub production: String,
    /// Matching of the rule into (a homeomorphic variant of) the final
    /// subgraph of `production`.
    pub matching: Matching,
}

/// Every grammar obtained by rewriting the final subgraph of one
/// production with `rule`, over all productions and matching classes.
///
/// Wires of the final subgraph may be lengthened or shortened to host the
/// match; edges leaving the final subgraph stay attached to its node-vertices
/// and inputs/outputs, whose names survive both operations.
pub fn transform_step(b: &Besg, rule: &Rule) -> Result<Vec<TransformStep>> {
    b.validate()?;
    rule.validate()?;
    let mut out = Vec::new();
    for (name, p) in &b.grammar.productions {
        let fs = final_subgraph(p);
        if fs.vertices.is_empty() {
            continue;
        }
        let d = &p.body;
        let s = d.induced(&fs.vertices);
        let cut: Vec<Edge> =
            d.edges().filter(|e| fs.vertices.contains(&e.source) != fs.vertices.contains(&e.target)).cloned().collect();
        let inner = |v: &str| fs.vertices.contains(v);
        let outside = |v: &str| d.contains(v) && !inner(v);
        let boundary = rule.lhs.wire_boundary();
        'matching: for m in find_matchings(&rule.lhs, &s)? {
            let target = &m.expanded_target;
            if let Some(v) = target.vertex_names().find(|v| outside(v)) {
                return Err(Error::InvalidMatching(format!("expanded vertex `{v}` clashes with production `{name}`")));
            }
            let non_boundary: BTreeSet<&str> =
                m.map.iter().filter(|(l, _)| !boundary.contains(l)).map(|(_, h)| h.as_str()).collect();
            for e in &cut {
                let end = if inner(&e.source) { &e.source } else { &e.target };
                if !target.contains(end) {
                    return Err(Error::InvalidMatching(format!("vertex `{end}` with outside edges was renamed")));
                }
                if non_boundary.contains(end.as_str()) {
                    continue 'matching;
                }
            }
            let s_prime = rewrite_avoiding(rule, &m, outside)?;
            let outer: BTreeSet<String> = d.vertex_names().filter(|v| !inner(v)).map(str::to_string).collect();
            let mut body = d.induced(&outer);
            for (v, l) in s_prime.vertices() {
                body.add_vertex(v, l)?;
            }
            for e in s_prime.edges().chain(cut.iter()) {
                body.add_edge(e.source.clone(), e.label.clone(), e.target.clone())?;
            }
            let mut b_prime = b.clone();
            b_prime.grammar.productions.get_mut(name).unwrap().body = body;
            b_prime.validate()?;
            out.push(TransformStep { b_prime, production: name.clone(), matching: m });
        }
    }
    Ok(out)
}

/// The pattern `(b, b_prime)` of a transformation step.
pub fn induced_pattern(b: &Besg, b_prime: &Besg) -> Result<RewritePattern> {
    let p = RewritePattern::new(b.clone(), b_prime.clone());
    p.validate()?;
    Ok(p)
}

/// Productions whose bodies differ between the two grammars.
pub fn modified_productions(b: &Besg, b_prime: &Besg) -> Vec<String> {
    b.grammar
        .productions
        .iter()
        .filter(|(name, p)| b_prime.grammar.productions.get(*name).is_none_or(|q| q.body != p.body))
        .map(|(name, _)| name.clone())
        .collect()
}

#[derive(Clone, Debug)]
pub struct Admissibility {
    pub admissible: bool,
    /// False when the search stopped at its state budget.
    pub complete: bool,
    /// Number of rewrites required: uses of modified productions in the trace.
    pub n: usize,
    /// `F`, then each rewritten graph; ends at a graph homeomorphic to `F'`
    /// when admissible, otherwise the longest chain explored.
    pub chain: Vec<Graph>,
    pub f: Graph,
    pub f_prime: Graph,
}

/// Default number of intermediate graphs the admissibility search may visit.
pub const ADMISSIBILITY_BUDGET: usize = 100_000;

/// Searches for exactly `n` rewrites with `rule` leading from the
/// instantiation of `trace` in `b` to that in `b_prime`.
pub fn check_admissibility(
    b: &Besg,
    b_prime: &Besg,
    rule: &Rule,
    trace: &DerivationTrace,
    budget: usize,
) -> Result<Admissibility> {
    induced_pattern(b, b_prime)?;
    rule.validate()?;
    let f = b.concrete_derive(trace)?;
    let f_prime = b_prime.concrete_derive(trace)?;
    let n = modified_productions(b, b_prime).iter().map(|p| trace.uses(p)).sum();
    let mut search = ChainSearch {
        rule,
        goal: &f_prime,
        n,
        budget,
        visited: (0..=n).map(|_| IsoClasses::new()).collect(),
        states: 0,
        chain: vec![f.clone()],
        longest: vec![f.clone()],
    };
    let admissible = search.run()?;
    let complete = admissible || search.states < budget;
    let chain = if admissible { search.chain } else { search.longest };
    Ok(Admissibility { admissible, complete, n, chain, f, f_prime })
}

struct ChainSearch<'a> {
    rule: &'a Rule,
    goal: &'a Graph,
    n: usize,
    budget: usize,
    visited: Vec<IsoClasses>,
    states: usize,
    chain: Vec<Graph>,
    longest: Vec<Graph>,
}

impl ChainSearch<'_> {
    fn run(&mut self) -> Result<bool> {
        let depth = self.chain.len() - 1;
        if depth == self.n {
            return wire_homeomorphic(self.chain.last().unwrap(), self.goal);
        }
        for m in find_matchings(&self.rule.lhs, self.chain.last().unwrap())? {
            if self.states >= self.budget {
                return Ok(false);
            }
            let next = rewrite(self.rule, &m)?;
            if !self.visited[depth + 1].insert(&next) {
                continue;
            }
            self.states += 1;
            self.chain.push(next);
            if self.chain.len() > self.longest.len() {
                self.longest = self.chain.clone();
            }
            if self.run()? {
                return Ok(true);
            }
            self.chain.pop();
        }
        Ok(false)
    }
}

#[derive(Clone, Debug)]
pub struct InducedTransform {
    pub trace: DerivationTrace,
    pub rule: Rule,
    pub results: Vec<TransformStep>,
}

/// Instantiations of `p` within `max_size` whose rule rewrites some final
/// subgraph of `b`, each with the transformations it induces.
pub fn enumerate_induced(b: &Besg, p: &RewritePattern, max_size: usize) -> Result<Vec<InducedTransform>> {
    b.validate()?;
    let report = is_match_exhaustive(&p.b1);
    if !report.is_match_exhaustive() {
        let text: Vec<String> = report.failures.iter().map(|f| f.to_string()).collect();
        return Err(Error::NotMatchExhaustive(text.join("; ")));
    }
    let mut out = Vec::new();
    for (trace, rule) in p.enumerate_instantiations(max_size)? {
        let results = transform_step(b, &rule)?;
        if !results.is_empty() {
            out.push(InducedTransform { trace, rule, results });
        }
    }
    Ok(out)
}

/// Vertex names of every body, for checking that a step left everything
/// outside the rewritten final subgraph alone.
pub fn untouched_parts(b: &Besg) -> BTreeMap<String, (String, BTreeSet<String>)> {
    b.grammar
        .productions
        .iter()
        .map(|(name, p)| {
            let fs = final_subgraph(p);
            let rest = p.body.vertex_names().filter(|v| !fs.vertices.contains(*v)).map(str::to_string).collect();
            (name.clone(), (p.head.clone(), rest))
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::besg::tests::complete_graphs;
    use crate::besg::{DecodingRule, DecodingSystem};
    use crate::grammar::{ConnectionInstruction, Direction, Grammar};
    use crate::test_support::{alphabets, graph};

    /// A path of white nodes; every step also emits a detached white node
    /// with one input and one output.
    pub(crate) fn ladder() -> Besg {
        let ci = ConnectionInstruction::new;
        let gadget = [("i", "W"), ("m", "white"), ("o", "W")];
        let gadget_edges = [("i", "e", "m"), ("m", "e", "o")];
        let body = |node: &str, nt: bool| {
            let mut vs: Vec<(&str, &str)> = vec![(node, "white")];
            let mut es: Vec<(&str, &str, &str)> = vec![];
            if nt {
                vs.extend(gadget);
                es.extend(gadget_edges);
                vs.push(("X", "X"));
                es.push((node, "e", "X"));
            }
            graph(&vs, &es)
        };
        let prod = |name: &str, head: &str, body: Graph, cs| {
            (name.to_string(), Production { name: name.into(), head: head.into(), body, connections: cs })
        };
        let g = Grammar {
            alphabets: alphabets(),
            start: "S".into(),
            productions: BTreeMap::from([
                prod("start", "S", body("a", true), vec![]),
                prod("more", "X", body("b", true), vec![ci("white", "e", "alpha", "b", Direction::In)]),
                prod("end", "X", body("b", false), vec![ci("white", "e", "alpha", "b", Direction::In)]),
            ]),
        };
        let rhs = graph(&[("u", "white"), ("w", "W"), ("v", "white")], &[("u", "e", "w"), ("w", "e", "v")]);
        let t = DecodingRule { alpha: "alpha".into(), n1: "white".into(), n2: "white".into(), rhs, left: "u".into(), right: "v".into() };
        Besg::new(g, DecodingSystem::new([t]))
    }

    pub(crate) fn drop_identity() -> Rule {
        let lhs = graph(&[("i", "W"), ("m", "white"), ("o", "W")], &[("i", "e", "m"), ("m", "e", "o")]);
        let rhs = graph(&[("i", "W"), ("o", "W")], &[("i", "e", "o")]);
        Rule::new("drop", lhs, rhs)
    }

    fn trace(more: usize) -> DerivationTrace {
        let mut t = DerivationTrace::default().then("S", "start");
        let mut v = "S.X".to_string();
        for _ in 0..more {
            t = t.then(&v, "more");
            v.push_str(".X");
        }
        t.then(&v, "end")
    }

    #[test]
    fn final_subgraphs() {
        let b = ladder();
        let fs = final_subgraph(&b.grammar.productions["more"]);
        assert_eq!(fs.vertices, ["i", "m", "o"].into_iter().map(String::from).collect());
        assert!(final_subgraph(&b.grammar.productions["end"]).vertices.is_empty());
        assert!(final_subgraph(&complete_graphs().grammar.productions["end"]).vertices.is_empty());
    }

    #[test]
    fn steps_drop_identities() {
        let b = ladder();
        let steps = transform_step(&b, &drop_identity()).unwrap();
        let names: Vec<&str> = steps.iter().map(|s| s.production.as_str()).collect();
        assert_eq!(names, vec!["more", "start"]);
        for s in &steps {
            let body = &s.b_prime.grammar.productions[&s.production].body;
            assert_eq!(body.count_kind(VertexKind::Node), 1);
            assert!(body.contains_edge("i", "e", "o"));
            assert_eq!(untouched_parts(&b)[&s.production], untouched_parts(&s.b_prime)[&s.production]);
            induced_pattern(&b, &s.b_prime).unwrap();
        }
        let none = Rule::new("none", graph(&[("x", "black")], &[]), graph(&[("x", "black")], &[]));
        assert!(transform_step(&b, &none).unwrap().is_empty());
    }

    #[test]
    fn identity_rule_keeps_bodies() {
        let b = ladder();
        let id = Rule::new("id", drop_identity().lhs, drop_identity().lhs);
        for s in transform_step(&b, &id).unwrap() {
            let before = &b.grammar.productions[&s.production].body;
            let after = &s.b_prime.grammar.productions[&s.production].body;
            assert!(crate::graph::graph_isomorphic(before, after).is_some());
        }
    }

    #[test]
    fn admissible_chains() {
        let b = ladder();
        let r = drop_identity();
        let step = transform_step(&b, &r).unwrap().into_iter().find(|s| s.production == "more").unwrap();
        for k in 0..=3 {
            let a = check_admissibility(&b, &step.b_prime, &r, &trace(k), ADMISSIBILITY_BUDGET).unwrap();
            assert!(a.admissible, "k = {k}");
            assert_eq!(a.n, k);
            assert_eq!(a.chain.len(), k + 1);
        }
    }
}
