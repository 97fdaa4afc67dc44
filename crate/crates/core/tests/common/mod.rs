//! Fixture loading, random generators and brute-force oracles shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use besg::besg::{decode_edge, Besg, DecodingSystem};
use besg::dpo::Rule;
use besg::format;
use besg::grammar::{substitute, DerivationTrace};
use besg::graph::{minimal_representative, wires};
use besg::matching::Matching;
use besg::pattern::RewritePattern;
use besg::{Alphabets, Graph, VertexKind, WireKind};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const GRAMMARS: &[&str] = &[
    "complete.grammar.json",
    "hadamard-path.grammar.json",
    "k2-outputs.grammar.json",
    "ladder.grammar.json",
    "loops.grammar.json",
    "tree.grammar.json",
];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn graph(name: &str) -> Graph {
    format::graph_from_json(&read(name)).unwrap()
}

pub fn rule(name: &str) -> Rule {
    format::rule_from_json(&read(name)).unwrap()
}

pub fn grammar(name: &str) -> Besg {
    format::grammar_from_json(&read(name)).unwrap()
}

pub fn pattern(name: &str) -> RewritePattern {
    format::pattern_from_json(&read(name)).unwrap()
}

pub fn trace(name: &str) -> DerivationTrace {
    format::trace_from_json(&read(name)).unwrap()
}

pub fn trace_of(steps: &[(&str, &str)]) -> DerivationTrace {
    DerivationTrace::new(steps.iter().map(|(v, p)| (v.to_string(), p.to_string())).collect())
}

pub fn nonterminals(g: &Graph) -> Vec<String> {
    g.vertices_of_kind(VertexKind::NonTerminal).map(str::to_string).collect()
}

/// Fewest substitutions needed to clear a nonterminal of each label.
fn termination_costs(b: &Besg) -> BTreeMap<String, usize> {
    let mut cost: BTreeMap<String, usize> = BTreeMap::new();
    loop {
        let mut changed = false;
        for p in b.grammar.productions.values() {
            let inner: Option<usize> = p
                .body
                .vertices_of_kind(VertexKind::NonTerminal)
                .map(|v| cost.get(p.body.label(v).unwrap()).copied())
                .sum();
            if let Some(c) = inner.map(|c| c + 1) {
                if cost.get(&p.head).is_none_or(|&old| c < old) {
                    cost.insert(p.head.clone(), c);
                    changed = true;
                }
            }
        }
        if !changed {
            return cost;
        }
    }
}

/// A random complete derivation: `free` uniformly random steps, then the
/// cheapest way to finish. Returns the trace and every sentential form.
pub fn random_completing_trace(b: &Besg, rng: &mut impl Rng, free: usize) -> (DerivationTrace, Vec<Graph>) {
    let costs = termination_costs(b);
    let mut form = b.grammar.start_graph();
    let mut trace = DerivationTrace::default();
    let mut forms = vec![form.clone()];
    loop {
        let nts = nonterminals(&form);
        let Some(v) = nts.choose(rng).cloned() else { break };
        let label = form.label(&v).unwrap().to_string();
        let options: Vec<_> = b.grammar.productions_for(&label).collect();
        let p = if trace.len() < free {
            *options.choose(rng).unwrap()
        } else {
            let cost = |p: &&besg::grammar::Production| -> usize {
                p.body.vertices_of_kind(VertexKind::NonTerminal).map(|x| costs[p.body.label(x).unwrap()]).sum()
            };
            *options.iter().min_by_key(|p| (cost(p), p.name.clone())).unwrap()
        };
        form = substitute(&form, &v, p).unwrap();
        trace = trace.then(&v, &p.name);
        forms.push(form.clone());
    }
    (trace, forms)
}

/// A sentential form reached by `steps` random substitutions.
pub fn random_form(b: &Besg, rng: &mut impl Rng, steps: usize) -> Graph {
    let mut form = b.grammar.start_graph();
    for _ in 0..steps {
        let nts = nonterminals(&form);
        let Some(v) = nts.choose(rng) else { break };
        let options: Vec<_> = b.grammar.productions_for(form.label(v).unwrap()).collect();
        form = substitute(&form, v, options.choose(rng).unwrap()).unwrap();
    }
    form
}

/// Every complete trace using at most `max_steps` substitutions, always
/// expanding the least nonterminal name first.
pub fn all_traces(b: &Besg, max_steps: usize) -> Vec<DerivationTrace> {
    fn go(b: &Besg, form: &Graph, trace: &DerivationTrace, max_steps: usize, out: &mut Vec<DerivationTrace>) {
        let nts = nonterminals(form);
        let Some(v) = nts.first() else {
            out.push(trace.clone());
            return;
        };
        if trace.len() == max_steps {
            return;
        }
        for p in b.grammar.productions_for(form.label(v).unwrap()) {
            let next = substitute(form, v, p).unwrap();
            go(b, &next, &trace.then(v, &p.name), max_steps, out);
        }
    }
    let mut out = Vec::new();
    go(b, &b.grammar.start_graph(), &DerivationTrace::default(), max_steps, &mut out);
    out
}

/// Whether `g` is a wire-connected complete graph on at least two nodes,
/// all labelled `label`: exactly one wire between every pair, each wire of
/// length one, nothing else.
pub fn is_complete_graph(g: &Graph, label: &str) -> Option<usize> {
    let nodes: Vec<&str> = g.vertices_of_kind(VertexKind::Node).collect();
    if nodes.len() < 2 || nodes.iter().any(|n| g.label(n) != Some(label)) {
        return None;
    }
    let ws = wires(g).ok()?;
    let mut pairs = BTreeSet::new();
    for w in &ws {
        let (Some(s), Some(t)) = (&w.source, &w.target) else { return None };
        if w.kind != WireKind::Attached || w.len() != 1 || s == t {
            return None;
        }
        let pair = if s < t { (s.clone(), t.clone()) } else { (t.clone(), s.clone()) };
        if !pairs.insert(pair) {
            return None;
        }
    }
    let n = nodes.len();
    let expected_vertices = n + n * (n - 1) / 2;
    (pairs.len() == n * (n - 1) / 2 && g.vertex_count() == expected_vertices && g.edge_count() == n * (n - 1))
        .then_some(n)
}

/// Union of the decoding rules of every fixture grammar.
pub fn fixture_decoders() -> DecodingSystem {
    let mut rules = BTreeMap::new();
    for name in GRAMMARS {
        for (k, r) in grammar(name).decoder.rules {
            rules.entry(k).or_insert(r);
        }
    }
    DecodingSystem { rules }
}

/// Random nodes joined by up to six encoding edges for which `t` has a
/// rule, plus a few ordinary wires and open ends.
pub fn random_encoded_graph(rng: &mut impl Rng, t: &DecodingSystem, alphabets: &Arc<Alphabets>) -> Graph {
    let labels = ["white", "green", "black"];
    let n = rng.random_range(2..=5);
    let mut g = Graph::new(alphabets.clone());
    for i in 0..n {
        g.add_vertex(format!("n{i}"), *labels.choose(rng).unwrap()).unwrap();
    }
    let want = rng.random_range(1..=6);
    for _ in 0..want * 4 {
        if g.edges().filter(|e| t.rules.keys().any(|k| k.0 == e.label)).count() == want {
            break;
        }
        let (u, v) = (format!("n{}", rng.random_range(0..n)), format!("n{}", rng.random_range(0..n)));
        if u == v {
            continue;
        }
        let (lu, lv) = (g.label(&u).unwrap().to_string(), g.label(&v).unwrap().to_string());
        let alphas: Vec<&String> = t.rules.keys().filter(|k| k.1 == lu && k.2 == lv).map(|k| &k.0).collect();
        if let Some(a) = alphas.choose(rng) {
            if !g.contains_edge(&u, a, &v) {
                g.add_edge(u, a.as_str(), v).unwrap();
            }
        }
    }
    for k in 0..rng.random_range(0..=2) {
        let (u, v) = (format!("n{}", rng.random_range(0..n)), format!("n{}", rng.random_range(0..n)));
        let w = format!("plain{k}");
        g.add_vertex(&w, "W").unwrap();
        g.add_edge(u, "e", &w).unwrap();
        g.add_edge(&w, "e", v).unwrap();
    }
    if rng.random_bool(0.5) {
        g.add_vertex("in", "W").unwrap();
        g.add_edge("in", "e", "n0").unwrap();
    }
    g
}

/// Decodes encoding edges one at a time in a random order.
pub fn decode_randomly(g: &Graph, t: &DecodingSystem, rng: &mut impl Rng) -> Graph {
    let mut g = g.clone();
    loop {
        let enc: Vec<_> = g.edges().filter(|e| g.alphabets().is_encoding(&e.label)).cloned().collect();
        let Some(e) = enc.choose(rng) else { return g };
        g = decode_edge(&g, t, e).unwrap();
    }
}

// ---------------------------------------------------------------------------
// Brute-force matching oracle

pub fn matching_alphabets() -> Arc<Alphabets> {
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
    Arc::new(Alphabets {
        node_labels: set(&["f", "g"]),
        wire_labels: set(&["V", "W"]),
        nonterminal_labels: set(&[]),
        edge_labels: set(&["e"]),
        encoding_labels: set(&[]),
    })
}

#[derive(Clone, Debug)]
enum WireShape {
    Between(usize, usize),
    Input(usize),
    Output(usize),
    Bare,
    Circle,
}

fn wire_labels(rng: &mut impl Rng, len: usize) -> Vec<&'static str> {
    (0..len).map(|_| if rng.random_bool(0.7) { "W" } else { "V" }).collect()
}

fn add_wire(g: &mut Graph, tag: &str, shape: &WireShape, labels: &[&str]) {
    let names: Vec<String> = (0..labels.len()).map(|i| format!("{tag}_{i}")).collect();
    for (v, l) in names.iter().zip(labels) {
        g.add_vertex(v, *l).unwrap();
    }
    for w in names.windows(2) {
        g.add_edge(&w[0], "e", &w[1]).unwrap();
    }
    let (first, last) = (&names[0], names.last().unwrap());
    match *shape {
        WireShape::Between(s, t) => {
            g.add_edge(format!("n{s}"), "e", first).unwrap();
            g.add_edge(last, "e", format!("n{t}")).unwrap();
        }
        WireShape::Input(t) => g.add_edge(last, "e", format!("n{t}")).map(|_| ()).unwrap(),
        WireShape::Output(s) => g.add_edge(format!("n{s}"), "e", first).map(|_| ()).unwrap(),
        WireShape::Bare => {}
        WireShape::Circle => g.add_edge(last, "e", first).map(|_| ()).unwrap(),
    }
}

/// A random string graph with at most `max_size` vertices plus edges.
pub fn random_string_graph(rng: &mut impl Rng, max_size: usize) -> Graph {
    loop {
        let mut g = Graph::new(matching_alphabets());
        let n = rng.random_range(0..=3);
        for i in 0..n {
            g.add_vertex(format!("n{i}"), if rng.random_bool(0.5) { "f" } else { "g" }).unwrap();
        }
        for k in 0..rng.random_range(1..=4) {
            let shape = match (rng.random_range(0..5), n) {
                (0 | 1, n) if n > 0 => WireShape::Between(rng.random_range(0..n), rng.random_range(0..n)),
                (2, n) if n > 0 => WireShape::Input(rng.random_range(0..n)),
                (3, n) if n > 0 => WireShape::Output(rng.random_range(0..n)),
                (4, _) => WireShape::Circle,
                _ => WireShape::Bare,
            };
            let len = match shape {
                WireShape::Circle | WireShape::Bare => rng.random_range(2..=3),
                _ => rng.random_range(1..=2),
            };
            add_wire(&mut g, &format!("w{k}"), &shape, &wire_labels(rng, len));
        }
        if g.size() <= max_size && g.is_string_graph() {
            return g;
        }
    }
}

/// A pattern cut out of `h`: some of its node-vertices with every wire end,
/// wires between kept nodes copied whole, other attached wires cut to an
/// open stub, and the odd bare piece or circle.
pub fn pattern_from(rng: &mut impl Rng, h: &Graph) -> Graph {
    let mut p = Graph::new(h.alphabets().clone());
    let keep: BTreeSet<String> =
        h.vertices_of_kind(VertexKind::Node).filter(|_| rng.random_bool(0.6)).map(str::to_string).collect();
    for n in &keep {
        p.add_vertex(n.clone(), h.label(n).unwrap()).unwrap();
    }
    for (k, w) in wires(h).unwrap().iter().enumerate() {
        let labels: Vec<&str> = w.vertex_path.iter().map(|v| h.label(v).unwrap()).collect();
        let tag = format!("p{k}");
        let src = w.source.as_ref().filter(|s| keep.contains(*s));
        let tgt = w.target.as_ref().filter(|t| keep.contains(*t));
        let idx = |n: &String| n[1..].parse::<usize>().unwrap();
        match (w.kind, src, tgt) {
            (WireKind::Attached, Some(s), Some(t)) => add_wire(&mut p, &tag, &WireShape::Between(idx(s), idx(t)), &labels),
            (_, Some(s), None) => {
                let len = rng.random_range(1..=labels.len());
                add_wire(&mut p, &tag, &WireShape::Output(idx(s)), &labels[..len]);
            }
            (_, None, Some(t)) => {
                let len = rng.random_range(1..=labels.len());
                add_wire(&mut p, &tag, &WireShape::Input(idx(t)), &labels[labels.len() - len..]);
            }
            (WireKind::Circle, None, None) if rng.random_bool(0.5) => add_wire(&mut p, &tag, &WireShape::Circle, &labels),
            (_, None, None) if labels.len() >= 2 && rng.random_bool(0.3) => {
                let at = rng.random_range(0..labels.len() - 1);
                add_wire(&mut p, &tag, &WireShape::Bare, &labels[at..at + 2]);
            }
            _ => {}
        }
    }
    p
}

/// Pattern-independent identity of a matching into an expansion of `hmin`:
/// the node map, and for every wire of the expansion (named by its least
/// vertex shared with `hmin`) the pattern vertices it hosts, grouped by
/// runs of equal wire labels. Circles are read from their least rotation.
pub type ClassKey = (BTreeMap<String, String>, BTreeMap<String, Vec<(String, Vec<String>)>>);

pub fn class_key(l: &Graph, hmin: &Graph, expanded: &Graph, map: &BTreeMap<String, String>) -> ClassKey {
    let inverse: BTreeMap<&str, &str> = map.iter().map(|(k, v)| (v.as_str(), k.as_str())).collect();
    let nodes = l
        .vertices_of_kind(VertexKind::Node)
        .map(|n| (n.to_string(), map[n].clone()))
        .collect();
    let mut per_wire = BTreeMap::new();
    let mut paths: Vec<(Vec<String>, bool)> =
        wires(expanded).unwrap().into_iter().map(|w| (w.vertex_path, w.kind == WireKind::Circle)).collect();
    for v in expanded.vertices_of_kind(VertexKind::Wire).filter(|v| expanded.degree(v) == 0) {
        paths.push((vec![v.to_string()], false));
    }
    for (path, circle) in paths {
        let id = path.iter().filter(|v| hmin.contains(v)).min().expect("wire keeps a vertex of hmin").clone();
        let mut runs: Vec<(String, Vec<String>)> = Vec::new();
        for v in &path {
            let label = expanded.label(v).unwrap().to_string();
            if runs.last().is_none_or(|r| r.0 != label) {
                runs.push((label, Vec::new()));
            }
            if let Some(x) = inverse.get(v.as_str()) {
                runs.last_mut().unwrap().1.push(x.to_string());
            }
        }
        if circle {
            if runs.len() > 1 && runs[0].0 == runs.last().unwrap().0 {
                let mut last = runs.pop().unwrap();
                last.1.append(&mut runs[0].1);
                runs[0] = last;
            }
            if runs.len() == 1 {
                let names = &runs[0].1;
                let best = (0..names.len().max(1))
                    .map(|i| names.iter().cycle().skip(i).take(names.len()).cloned().collect::<Vec<_>>())
                    .min()
                    .unwrap();
                runs[0].1 = best;
            } else {
                runs = (0..runs.len())
                    .map(|i| runs.iter().cycle().skip(i).take(runs.len()).cloned().collect::<Vec<_>>())
                    .min()
                    .unwrap();
            }
        }
        per_wire.insert(id, runs);
    }
    (nodes, per_wire)
}

/// Replaces each wire-vertex `v` of `g` by a chain of `k[v]` copies.
fn expand(g: &Graph, lengths: &BTreeMap<String, usize>) -> Graph {
    let copy = |v: &str, i: usize| if i == 0 { v.to_string() } else { format!("{v}#{i}") };
    let last = |v: &str| copy(v, lengths.get(v).map_or(1, |k| *k) - 1);
    let mut out = Graph::new(g.alphabets().clone());
    for (v, label) in g.vertices() {
        for i in 0..lengths.get(v).copied().unwrap_or(1) {
            out.add_vertex(copy(v, i), label).unwrap();
        }
        for i in 1..lengths.get(v).copied().unwrap_or(1) {
            out.add_edge(copy(v, i - 1), "e", copy(v, i)).unwrap();
        }
    }
    for e in g.edges() {
        out.add_edge(last(&e.source), e.label.as_str(), e.target.as_str()).unwrap();
    }
    out
}

/// Every injective label- and edge-preserving map from `l` into `x` with
/// no edge of `x` dangling off a non-boundary pattern vertex.
fn naive_matchings(l: &Graph, x: &Graph) -> Vec<BTreeMap<String, String>> {
    let boundary = l.boundary().unwrap().vertices();
    let order: Vec<&str> = l.vertex_names().collect();
    let mut out = Vec::new();
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    fn go(
        l: &Graph,
        x: &Graph,
        order: &[&str],
        i: usize,
        map: &mut BTreeMap<String, String>,
        boundary: &BTreeSet<String>,
        out: &mut Vec<BTreeMap<String, String>>,
    ) {
        let Some(v) = order.get(i) else {
            let ok = map.iter().filter(|(v, _)| !boundary.contains(*v)).all(|(v, w)| {
                x.incident_edges(w).iter().all(|e| {
                    l.incident_edges(v).iter().any(|f| map[&f.source] == e.source && map[&f.target] == e.target)
                })
            });
            if ok {
                out.push(map.clone());
            }
            return;
        };
        for (w, label) in x.vertices() {
            if label != l.label(v).unwrap() || map.values().any(|u| u == w) {
                continue;
            }
            map.insert(v.to_string(), w.to_string());
            let consistent = l.incident_edges(v).iter().all(|e| match (map.get(&e.source), map.get(&e.target)) {
                (Some(s), Some(t)) => x.contains_edge(s, &e.label, t),
                _ => true,
            });
            if consistent {
                go(l, x, order, i + 1, map, boundary, out);
            }
            map.remove(*v);
        }
    }
    go(l, x, &order, 0, &mut map, &boundary, &mut out);
    out
}

/// Matching classes of `l` into `h` found by trying every expansion of the
/// minimal representative of `h` in which each wire-vertex becomes a chain
/// of at most `2 * |wire-vertices of l| + 1` copies. That is enough room to
/// host every pattern wire-vertex with a free vertex between any two.
pub fn brute_force_classes(l: &Graph, h: &Graph) -> BTreeSet<ClassKey> {
    let hmin = minimal_representative(h).unwrap();
    let wvs: Vec<String> = hmin.vertices_of_kind(VertexKind::Wire).map(str::to_string).collect();
    let bound = 2 * l.count_kind(VertexKind::Wire) + 1;
    let mut lengths: BTreeMap<String, usize> = wvs.iter().map(|v| (v.clone(), 1)).collect();
    let mut out = BTreeSet::new();
    loop {
        let x = expand(&hmin, &lengths);
        for m in naive_matchings(l, &x) {
            out.insert(class_key(l, &hmin, &x, &m));
        }
        // odometer over the chain lengths
        let mut i = 0;
        loop {
            let Some(v) = wvs.get(i) else { return out };
            let k = lengths.get_mut(v).unwrap();
            if *k < bound {
                *k += 1;
                break;
            }
            *k = 1;
            i += 1;
        }
    }
}

pub fn library_classes(l: &Graph, h: &Graph, found: &[Matching]) -> Vec<ClassKey> {
    let hmin = minimal_representative(h).unwrap();
    found.iter().map(|m| class_key(l, &hmin, &m.expanded_target, &m.map)).collect()
}
