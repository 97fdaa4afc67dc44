//! Label- and edge-preserving graph isomorphism.
//!
//! Vertices are first coloured by iterated neighbourhood refinement; the
//! backtracking search then only pairs vertices of equal colour and checks
//! every edge between already-mapped vertices. Search order is fixed, so
//! the returned bijection is deterministic.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::Graph;

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Index-based view of a graph with refined vertex colours.
#[derive(Clone, Debug)]
struct Prepared {
    names: Vec<String>,
    colors: Vec<u64>,
    // (neighbour, edge label hash)
    out: Vec<Vec<(usize, u64)>>,
    inn: Vec<Vec<(usize, u64)>>,
    edges: HashSet<(usize, u64, usize)>,
    hash: u64,
}

impl Prepared {
    fn new(g: &Graph) -> Self {
        let names: Vec<String> = g.vertex_names().map(str::to_string).collect();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let n = names.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut edges = HashSet::new();
        for e in g.edges() {
            let (s, t, l) = (index[e.source.as_str()], index[e.target.as_str()], hash_of(&e.label));
            out[s].push((t, l));
            inn[t].push((s, l));
            edges.insert((s, l, t));
        }
        let mut colors: Vec<u64> = names.iter().map(|v| hash_of(&g.label(v))).collect();
        let mut classes = count_classes(&colors);
        for _ in 0..n {
            let next: Vec<u64> = (0..n)
                .map(|v| {
                    let mut sig: Vec<(u8, u64, u64)> = out[v]
                        .iter()
                        .map(|&(w, l)| (0u8, l, colors[w]))
                        .chain(inn[v].iter().map(|&(w, l)| (1u8, l, colors[w])))
                        .collect();
                    sig.sort_unstable();
                    hash_of(&(colors[v], sig))
                })
                .collect();
            let c = count_classes(&next);
            colors = next;
            if c == classes {
                break;
            }
            classes = c;
        }
        let mut sorted = colors.clone();
        sorted.sort_unstable();
        let hash = hash_of(&(n, edges.len(), sorted));
        Prepared { names, colors, out, inn, edges, hash }
    }
}

fn count_classes(colors: &[u64]) -> usize {
    colors.iter().collect::<HashSet<_>>().len()
}

/// Isomorphism-invariant fingerprint; equal for isomorphic graphs.
pub fn invariant_hash(g: &Graph) -> u64 {
    Prepared::new(g).hash
}

fn search_order(p: &Prepared) -> Vec<usize> {
    let n = p.names.len();
    let mut class_size: HashMap<u64, usize> = HashMap::new();
    for &c in &p.colors {
        *class_size.entry(c).or_default() += 1;
    }
    let mut placed = vec![false; n];
    let mut connections = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        // prefer vertices tied to what is already placed, then rare colours
        let v = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (std::cmp::Reverse(connections[v]), class_size[&p.colors[v]], v))
            .unwrap();
        placed[v] = true;
        order.push(v);
        for &(w, _) in p.out[v].iter().chain(p.inn[v].iter()) {
            connections[w] += 1;
        }
    }
    order
}

fn consistent(a: &Prepared, b: &Prepared, map: &[Option<usize>], v: usize, w: usize) -> bool {
    let mut count = 0;
    for &(x, l) in &a.out[v] {
        if let Some(y) = map[x] {
            if !b.edges.contains(&(w, l, y)) {
                return false;
            }
            count += 1;
        }
    }
    for &(x, l) in &a.inn[v] {
        if let Some(y) = map[x] {
            if !b.edges.contains(&(y, l, w)) {
                return false;
            }
            count += 1;
        }
    }
    // b must not have extra edges between w and mapped vertices
    let mapped_b: usize = b.out[w]
        .iter()
        .chain(b.inn[w].iter())
        .filter(|&&(y, _)| map.contains(&Some(y)))
        .count();
    mapped_b == count
}

fn extend(
    a: &Prepared,
    b: &Prepared,
    order: &[usize],
    depth: usize,
    map: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    let Some(&v) = order.get(depth) else { return true };
    for w in 0..b.names.len() {
        if used[w] || a.colors[v] != b.colors[w] {
            continue;
        }
        if a.out[v].len() != b.out[w].len() || a.inn[v].len() != b.inn[w].len() {
            continue;
        }
        if !consistent(a, b, map, v, w) {
            continue;
        }
        map[v] = Some(w);
        used[w] = true;
        if extend(a, b, order, depth + 1, map, used) {
            return true;
        }
        map[v] = None;
        used[w] = false;
    }
    false
}

fn prepared_iso(a: &Prepared, b: &Prepared) -> Option<Vec<usize>> {
    if a.hash != b.hash || a.names.len() != b.names.len() || a.edges.len() != b.edges.len() {
        return None;
    }
    let order = search_order(a);
    let mut map = vec![None; a.names.len()];
    let mut used = vec![false; b.names.len()];
    if extend(a, b, &order, 0, &mut map, &mut used) {
        Some(map.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

/// A label- and edge-preserving bijection `g -> h`, if one exists.
pub fn graph_isomorphic(g: &Graph, h: &Graph) -> Option<BTreeMap<String, String>> {
    let a = Prepared::new(g);
    let b = Prepared::new(h);
    let map = prepared_iso(&a, &b)?;
    Some(map.iter().enumerate().map(|(i, &j)| (a.names[i].clone(), b.names[j].clone())).collect())
}

/// Set of graphs up to isomorphism, used to memoize enumerations.
#[derive(Default)]
pub struct IsoClasses {
    buckets: HashMap<u64, Vec<Prepared>>,
    len: usize,
}

impl IsoClasses {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `g` and reports whether its class was new.
    pub fn insert(&mut self, g: &Graph) -> bool {
        let p = Prepared::new(g);
        let bucket = self.buckets.entry(p.hash).or_default();
        if bucket.iter().any(|q| prepared_iso(&p, q).is_some()) {
            return false;
        }
        bucket.push(p);
        self.len += 1;
        true
    }

    pub fn contains(&self, g: &Graph) -> bool {
        let p = Prepared::new(g);
        self.buckets.get(&p.hash).is_some_and(|b| b.iter().any(|q| prepared_iso(&p, q).is_some()))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}
