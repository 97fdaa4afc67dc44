//! Membership and match enumeration for B-ESG grammars.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::besg::{decode, Besg};
use crate::error::{Error, Result};
use crate::grammar::DerivationTrace;
use crate::graph::{body_wires, minimal_representative, wire_homeomorphic, wires, Graph, IsoClasses, VertexKind, WireKind};
use crate::matching::{find_matchings, Matching};

#[derive(Clone, Debug)]
pub struct Witness {
    /// The member of the language, wire-homeomorphic to the query.
    pub h_tilde: Graph,
    /// The complete sentential form that decodes to `h_tilde`.
    pub encoded: Graph,
    pub trace: DerivationTrace,
}

#[derive(Clone, Debug)]
pub struct MembershipAnswer {
    pub member: bool,
    pub witness: Option<Witness>,
}

/// A failed match-exhaustiveness condition (numbered 1 to 4).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveFailure {
    pub condition: u8,
    pub production: String,
    pub detail: String,
}

impl fmt::Display for ExhaustiveFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition ({}) in production `{}`: {}", self.condition, self.production, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub failures: Vec<ExhaustiveFailure>,
    /// Largest number of bare wires in any member; `None` when condition
    /// (1) fails and the number is unbounded.
    pub n_bare: Option<usize>,
}

impl ExhaustiveReport {
    pub fn is_match_exhaustive(&self) -> bool {
        self.failures.is_empty()
    }
}

fn bare_wire_count(g: &Graph) -> usize {
    body_wires(g).iter().filter(|w| w.kind == WireKind::Bare).count()
}

/// Nonterminal labels reachable from `label` in one production step.
fn successors(b: &Besg, label: &str) -> BTreeSet<String> {
    b.grammar
        .productions_for(label)
        .flat_map(|p| p.body.vertices_of_kind(VertexKind::NonTerminal).map(|v| p.body.label(v).unwrap().to_string()))
        .collect()
}

fn reachable_from(b: &Besg, roots: impl IntoIterator<Item = String>, strict: bool) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<String> = Vec::new();
    for r in roots {
        if strict {
            stack.extend(successors(b, &r));
        } else {
            stack.push(r);
        }
    }
    while let Some(x) = stack.pop() {
        if seen.insert(x.clone()) {
            stack.extend(successors(b, &x));
        }
    }
    seen
}

/// Checks the four conditions under which match enumeration is finite:
/// (1) productions with bare wires cannot be used unboundedly often, i.e.
/// their head is not reachable from any nonterminal lying on a cycle;
/// (2) no isolated wire-vertices in bodies; (3) no empty bodies;
/// (4) no bodies consisting of a single nonterminal.
pub fn is_match_exhaustive(b: &Besg) -> ExhaustiveReport {
    let nts: Vec<String> = b.grammar.alphabets.nonterminal_labels.iter().cloned().collect();
    let cyclic: BTreeSet<String> =
        nts.iter().filter(|x| reachable_from(b, [x.to_string()], true).contains(*x)).cloned().collect();
    let unbounded = reachable_from(b, cyclic, false);

    let mut failures = Vec::new();
    let mut fail = |condition, production: &str, detail: String| {
        failures.push(ExhaustiveFailure { condition, production: production.to_string(), detail })
    };
    for (name, p) in &b.grammar.productions {
        let bare = bare_wire_count(&p.body);
        if bare > 0 && unbounded.contains(&p.head) {
            fail(1, name, format!("{bare} bare wire(s) in a production of `{}`, which can be used unboundedly often", p.head));
        }
        for v in p.body.vertices_of_kind(VertexKind::Wire) {
            if p.body.degree(v) == 0 {
                fail(2, name, format!("isolated wire-vertex `{v}`"));
            }
        }
        if p.body.is_empty() {
            fail(3, name, "empty body".into());
        }
        if p.body.vertex_count() == 1 && p.body.count_kind(VertexKind::NonTerminal) == 1 {
            fail(4, name, "body is a single nonterminal".into());
        }
    }
    let n_bare = if failures.iter().any(|f| f.condition == 1) {
        None
    } else {
        let mut memo = BTreeMap::new();
        Some(max_bare(b, &b.grammar.start, &unbounded, &mut memo))
    };
    ExhaustiveReport { failures, n_bare }
}

fn max_bare(b: &Besg, label: &str, unbounded: &BTreeSet<String>, memo: &mut BTreeMap<String, usize>) -> usize {
    // under condition (1) nothing reachable from a cycle has bare wires
    if unbounded.contains(label) {
        return 0;
    }
    if let Some(&n) = memo.get(label) {
        return n;
    }
    let mut best = 0;
    for p in b.grammar.productions_for(label) {
        let mut n = bare_wire_count(&p.body);
        for v in p.body.vertices_of_kind(VertexKind::NonTerminal) {
            n += max_bare(b, p.body.label(v).unwrap(), unbounded, memo);
        }
        best = best.max(n);
    }
    memo.insert(label.to_string(), best);
    best
}

/// Lower bounds on what a sentential form decodes to once completed: total
/// vertex count and node-vertex count per label. Both only grow along a
/// derivation in a reduced grammar.
fn decoded_lower_bounds(b: &Besg, form: &Graph) -> (usize, BTreeMap<String, usize>) {
    let mut vertices = form.vertex_count();
    let mut nodes: BTreeMap<String, usize> = BTreeMap::new();
    for v in form.vertices_of_kind(VertexKind::Node) {
        *nodes.entry(form.label(v).unwrap().to_string()).or_default() += 1;
    }
    for e in form.edges() {
        if !form.alphabets().is_encoding(&e.label) {
            continue;
        }
        let (Some(l1), Some(l2)) = (form.label(&e.source), form.label(&e.target)) else { continue };
        let Some(rule) = b.decoder.rule(&e.label, l1, l2) else { continue };
        vertices += rule.rhs.vertex_count() - 2;
        for x in rule.rhs.vertices_of_kind(VertexKind::Node) {
            if x != rule.left && x != rule.right {
                *nodes.entry(rule.rhs.label(x).unwrap().to_string()).or_default() += 1;
            }
        }
    }
    (vertices, nodes)
}

fn node_counts(g: &Graph) -> BTreeMap<String, usize> {
    let mut out: BTreeMap<String, usize> = BTreeMap::new();
    for v in g.vertices_of_kind(VertexKind::Node) {
        *out.entry(g.label(v).unwrap().to_string()).or_default() += 1;
    }
    out
}

fn within(counts: &BTreeMap<String, usize>, limit: &BTreeMap<String, usize>) -> bool {
    counts.iter().all(|(l, n)| *n <= limit.get(l).copied().unwrap_or(0))
}

fn check_membership_input(h: &Graph, b: &Besg) -> Result<()> {
    h.require_string_graph()?;
    b.validate()?;
    if let Some(v) = b.grammar.reduced_violation() {
        return Err(Error::NotReduced(v));
    }
    if **h.alphabets() != *b.grammar.alphabets {
        return Err(Error::Alphabets("query graph and grammar use different alphabets".into()));
    }
    Ok(())
}

/// Decides whether some graph wire-homeomorphic to `h` is in the language.
///
/// No member has a wire longer than `max_wire_bound`, so members
/// homeomorphic to `h` have exactly `h`'s node-vertices and at most
/// `nodes + sum over wires of max(bound, minimal length)` vertices. The
/// derivation space below those limits is finite for reduced grammars and
/// is searched exhaustively.
pub fn membership(h: &Graph, b: &Besg) -> Result<MembershipAnswer> {
    check_membership_input(h, b)?;
    let hmin = minimal_representative(h)?;
    let n = b.max_wire_bound();
    let nodes = node_counts(&hmin);
    let isolated = hmin.vertices_of_kind(VertexKind::Wire).filter(|v| hmin.degree(v) == 0).count();
    let max_vertices = nodes.values().sum::<usize>()
        + isolated
        + wires(&hmin)?.iter().map(|w| w.len().max(n)).sum::<usize>();

    let forms = b.grammar.explore(|g| {
        let (v, ns) = decoded_lower_bounds(b, g);
        v <= max_vertices && within(&ns, &nodes)
    })?;
    for (form, trace) in forms {
        if form.count_kind(VertexKind::NonTerminal) > 0 {
            continue;
        }
        let decoded = decode(&form, &b.decoder)?;
        if node_counts(&decoded) == nodes && wire_homeomorphic(&decoded, h)? {
            let witness = Witness { h_tilde: decoded, encoded: form, trace };
            return Ok(MembershipAnswer { member: true, witness: Some(witness) });
        }
    }
    Ok(MembershipAnswer { member: false, witness: None })
}

#[derive(Clone, Debug)]
pub struct MatchTriple {
    pub trace: DerivationTrace,
    pub k: Graph,
    pub matching: Matching,
}

/// Every member `K` of the language (one per isomorphism class) together
/// with every matching class of `K` into graphs wire-homeomorphic to `h`.
///
/// Candidates are limited to at most as many node-vertices of each label as
/// `h` has, and at most `2W + n_bare` wires of length at most
/// `max_wire_bound`, where `W` counts the wires of `h`.
pub fn enumerate_matches(h: &Graph, b: &Besg) -> Result<Vec<MatchTriple>> {
    h.require_string_graph()?;
    b.validate()?;
    let report = is_match_exhaustive(b);
    if !report.is_match_exhaustive() {
        let text: Vec<String> = report.failures.iter().map(|f| f.to_string()).collect();
        return Err(Error::NotMatchExhaustive(text.join("; ")));
    }
    let n_bare = report.n_bare.unwrap_or(0);
    let nodes = node_counts(h);
    let w = wires(h)?.len() + h.vertices_of_kind(VertexKind::Wire).filter(|v| h.degree(v) == 0).count();
    let max_wires = 2 * w + n_bare;
    let max_vertices = nodes.values().sum::<usize>() + max_wires * b.max_wire_bound();

    let forms = b.grammar.explore(|g| {
        let (v, ns) = decoded_lower_bounds(b, g);
        v <= max_vertices && within(&ns, &nodes)
    })?;
    let mut seen = IsoClasses::new();
    let mut out = Vec::new();
    for (form, trace) in forms {
        if form.count_kind(VertexKind::NonTerminal) > 0 {
            continue;
        }
        let k = decode(&form, &b.decoder)?;
        if !within(&node_counts(&k), &nodes) || wires(&k)?.len() > max_wires || !seen.insert(&k) {
            continue;
        }
        for matching in find_matchings(&k, h)? {
            out.push(MatchTriple { trace: trace.clone(), k: k.clone(), matching });
        }
    }
    Ok(out)
}
