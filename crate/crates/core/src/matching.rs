//! Matchings of a string graph pattern modulo wire-homeomorphism.
//!
//! A matching of `L` into `H` is an injective homomorphism `L -> H~` for
//! some `H~ ~ H` such that every edge of `H~` that touches the image of a
//! non-boundary vertex of `L` is itself the image of an edge of `L`.
//!
//! Rather than expanding every wire of `H` to a fixed length, the matcher
//! works on the minimal representative of `H` and lays pattern wires onto
//! target wires structurally:
//!
//! 1. node-vertices of `L` are mapped to node-vertices of `H` with the same
//!    label and the same multiset of wire ends, and the ends are put in
//!    bijection;
//! 2. a pattern wire attached at both ends must cover a whole target wire,
//!    a pattern wire attached at one end sits at that end of its target
//!    wire, and unattached pattern wires (bare wires, circles, isolated
//!    wire-vertices) are distributed over the remaining room;
//! 3. each target wire is split just enough to host its assigned segments,
//!    which yields `H~` and the vertex map.
//!
//! Matchings that differ only by sliding matched segments along unmatched
//! wire-vertices are identified. The class of a matching is its node map
//! together with, for every target wire, the pattern wire-vertices it
//! hosts listed run by run (a run is a maximal stretch of equal wire
//! labels; sliding never crosses a label change).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{body_wires, minimal_representative, split_in_place, Boundary, Graph, VertexKind, WireKind};

/// Canonical identity of a matching class.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MatchClass {
    /// Pattern node-vertex to target node-vertex.
    pub nodes: BTreeMap<String, String>,
    /// Target wire (named by its least vertex in the minimal
    /// representative) to the pattern wire-vertices it hosts, per run.
    pub wires: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Clone, Debug)]
pub struct Matching {
    /// The graph `H~ ~ H` the pattern is embedded into.
    pub expanded_target: Graph,
    /// Injective map from pattern vertices into `expanded_target`.
    pub map: BTreeMap<String, String>,
    pub pattern_boundary: Boundary,
    class: MatchClass,
}

impl Matching {
    pub fn class(&self) -> &MatchClass {
        &self.class
    }

    pub fn image(&self, v: &str) -> Option<&str> {
        self.map.get(v).map(String::as_str)
    }

    /// Wraps an explicit vertex map after checking it.
    pub fn from_map(l: &Graph, target: Graph, map: BTreeMap<String, String>) -> Result<Matching> {
        check_matching(l, &target, &map)?;
        let class = MatchClass { nodes: map.clone(), wires: BTreeMap::new() };
        Ok(Matching { expanded_target: target, map, pattern_boundary: l.wire_boundary(), class })
    }
}

/// Checks that `map` is an injective label- and edge-preserving map from `l`
/// into `target` and that no edge of `target` dangles off the image of a
/// non-boundary vertex of `l`.
pub fn check_matching(l: &Graph, target: &Graph, map: &BTreeMap<String, String>) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidMatching(m));
    let mut seen = BTreeSet::new();
    for (v, label) in l.vertices() {
        let Some(w) = map.get(v) else { return bad(format!("vertex `{v}` is not mapped")) };
        if target.label(w) != Some(label) {
            return bad(format!("`{v}` and its image `{w}` carry different labels"));
        }
        if !seen.insert(w.as_str()) {
            return bad(format!("two pattern vertices map to `{w}`"));
        }
    }
    if map.len() != l.vertex_count() {
        return bad("map has entries outside the pattern".into());
    }
    let mut image_edges = BTreeSet::new();
    for e in l.edges() {
        let (s, t) = (&map[&e.source], &map[&e.target]);
        if !target.contains_edge(s, &e.label, t) {
            return bad(format!("edge {e} has no image"));
        }
        image_edges.insert((s.as_str(), e.label.as_str(), t.as_str()));
    }
    let boundary = l.wire_boundary();
    for (v, w) in map {
        if boundary.contains(v) {
            continue;
        }
        for e in target.incident_edges(w) {
            if !image_edges.contains(&(e.source.as_str(), e.label.as_str(), e.target.as_str())) {
                return bad(format!("edge {e} dangles off the image of non-boundary vertex `{v}`"));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
struct Run {
    label: String,
    vertices: Vec<String>,
}

#[derive(Clone, Debug)]
struct TargetWire {
    id: String,
    kind: WireKind,
    runs: Vec<Run>,
    source: Option<String>,
    target: Option<String>,
    first: String,
}

#[derive(Clone, Debug)]
struct Segment {
    vertices: Vec<String>,
    runs: Vec<(String, usize)>,
    source: Option<String>,
    target: Option<String>,
    circle: bool,
}

fn runs_of(g: &Graph, path: &[String]) -> Vec<Run> {
    let mut runs: Vec<Run> = Vec::new();
    for v in path {
        let label = g.label(v).unwrap().to_string();
        match runs.last_mut() {
            Some(r) if r.label == label => r.vertices.push(v.clone()),
            _ => runs.push(Run { label, vertices: vec![v.clone()] }),
        }
    }
    runs
}

fn rotate_to_label_change(g: &Graph, path: &mut [String]) {
    let n = path.len();
    if let Some(i) = (0..n).find(|&i| g.label(&path[i]) != g.label(&path[(i + n - 1) % n])) {
        path.rotate_left(i);
    }
}

fn run_lengths(g: &Graph, path: &[String]) -> Vec<(String, usize)> {
    runs_of(g, path).into_iter().map(|r| (r.label, r.vertices.len())).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Dir {
    Out,
    In,
}

/// A wire end at a node-vertex: direction seen from the node, edge label,
/// wire-vertex label, and the wire it belongs to.
#[derive(Clone, Debug)]
struct End {
    sig: (Dir, String, String),
    wire: usize,
}

fn node_ends(g: &Graph, node: &str, wire_of: &BTreeMap<String, usize>) -> Vec<End> {
    let mut ends = Vec::new();
    for (label, t) in g.out_edges(node) {
        ends.push(End { sig: (Dir::Out, label.into(), g.label(t).unwrap().into()), wire: wire_of[t] });
    }
    for (label, s) in g.in_edges(node) {
        ends.push(End { sig: (Dir::In, label.into(), g.label(s).unwrap().into()), wire: wire_of[s] });
    }
    ends.sort_by(|a, b| a.sig.cmp(&b.sig));
    ends
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Item {
    name: Option<String>,
    seg: usize,
    /// pinned to the start (resp. end) of its run
    pin_start: bool,
    pin_end: bool,
}

impl Item {
    fn gap() -> Item {
        Item { name: None, seg: usize::MAX, pin_start: false, pin_end: false }
    }
}

/// A layout of one target wire: the items of each run in order.
type Layout = Vec<Vec<Item>>;

struct Problem<'a> {
    l: &'a Graph,
    hmin: &'a Graph,
    segs: Vec<Segment>,
    isolated_l: Vec<String>,
    twires: Vec<TargetWire>,
    isolated_h: Vec<String>,
    l_nodes: Vec<String>,
    l_ends: BTreeMap<String, Vec<End>>,
    h_ends: BTreeMap<String, Vec<End>>,
}

#[derive(Clone, Debug, Default)]
struct State {
    node_map: BTreeMap<String, String>,
    used_h: BTreeSet<String>,
    /// per pattern segment: target wire hosting its start / end anchor
    start_on: Vec<Option<usize>>,
    end_on: Vec<Option<usize>>,
}

/// All matching classes of `l` into `h`, in canonical order.
pub fn find_matchings(l: &Graph, h: &Graph) -> Result<Vec<Matching>> {
    l.require_string_graph()?;
    let hmin = minimal_representative(h)?;

    let lw = body_wires(l);
    let mut l_wire_of = BTreeMap::new();
    let mut segs = Vec::new();
    for w in &lw {
        let mut path = w.vertex_path.clone();
        if w.kind == WireKind::Circle {
            rotate_to_label_change(l, &mut path);
        }
        for v in &path {
            l_wire_of.insert(v.clone(), segs.len());
        }
        segs.push(Segment {
            runs: run_lengths(l, &path),
            vertices: path,
            source: w.source.clone(),
            target: w.target.clone(),
            circle: w.kind == WireKind::Circle,
        });
    }
    let isolated_l: Vec<String> =
        l.vertices_of_kind(VertexKind::Wire).filter(|v| l.degree(v) == 0).map(str::to_string).collect();

    let mut h_wire_of = BTreeMap::new();
    let mut twires = Vec::new();
    for w in body_wires(&hmin) {
        let mut path = w.vertex_path.clone();
        if w.kind == WireKind::Circle {
            rotate_to_label_change(&hmin, &mut path);
        }
        for v in &path {
            h_wire_of.insert(v.clone(), twires.len());
        }
        twires.push(TargetWire {
            id: path.iter().min().unwrap().clone(),
            kind: w.kind,
            runs: runs_of(&hmin, &path),
            source: w.source.clone(),
            target: w.target.clone(),
            first: w.vertex_path[0].clone(),
        });
    }
    let isolated_h: Vec<String> =
        hmin.vertices_of_kind(VertexKind::Wire).filter(|v| hmin.degree(v) == 0).map(str::to_string).collect();

    let mut l_nodes: Vec<String> = l.vertices_of_kind(VertexKind::Node).map(str::to_string).collect();
    l_nodes.sort_by(|a, b| l.degree(b).cmp(&l.degree(a)).then(a.cmp(b)));
    let l_ends = l_nodes.iter().map(|n| (n.clone(), node_ends(l, n, &l_wire_of))).collect();
    let h_ends = hmin
        .vertices_of_kind(VertexKind::Node)
        .map(|n| (n.to_string(), node_ends(&hmin, n, &h_wire_of)))
        .collect();

    let p = Problem { l, hmin: &hmin, segs, isolated_l, twires, isolated_h, l_nodes, l_ends, h_ends };
    let mut found: BTreeMap<MatchClass, Matching> = BTreeMap::new();
    let state = State {
        start_on: vec![None; p.segs.len()],
        end_on: vec![None; p.segs.len()],
        ..State::default()
    };
    p.map_nodes(0, state, &mut found)?;
    Ok(found.into_values().collect())
}

impl Problem<'_> {
    fn map_nodes(&self, i: usize, state: State, found: &mut BTreeMap<MatchClass, Matching>) -> Result<()> {
        let Some(n) = self.l_nodes.get(i) else {
            return self.distribute(&state, found);
        };
        let ends = &self.l_ends[n];
        let sigs: Vec<_> = ends.iter().map(|e| &e.sig).collect();
        for (m, h_ends) in &self.h_ends {
            if state.used_h.contains(m) || self.hmin.label(m) != self.l.label(n) {
                continue;
            }
            if h_ends.iter().map(|e| &e.sig).ne(sigs.iter().copied()) {
                continue;
            }
            let mut st = state.clone();
            st.node_map.insert(n.clone(), m.clone());
            st.used_h.insert(m.clone());
            let mut used = vec![false; h_ends.len()];
            self.biject_ends(i, ends, h_ends, 0, &mut used, st, found)?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn biject_ends(
        &self,
        i: usize,
        ends: &[End],
        h_ends: &[End],
        k: usize,
        used: &mut [bool],
        state: State,
        found: &mut BTreeMap<MatchClass, Matching>,
    ) -> Result<()> {
        let Some(end) = ends.get(k) else {
            return self.map_nodes(i + 1, state, found);
        };
        let seg = &self.segs[end.wire];
        for j in 0..h_ends.len() {
            if used[j] || h_ends[j].sig != end.sig {
                continue;
            }
            let hw = h_ends[j].wire;
            let mut st = state.clone();
            let slot = if end.sig.0 == Dir::Out { &mut st.start_on } else { &mut st.end_on };
            slot[end.wire] = Some(hw);
            // a pattern wire anchored at both ends must cover one target wire
            if seg.source.is_some() && seg.target.is_some() {
                if let (Some(a), Some(b)) = (st.start_on[end.wire], st.end_on[end.wire]) {
                    if a != b {
                        continue;
                    }
                }
            }
            used[j] = true;
            self.biject_ends(i, ends, h_ends, k + 1, used, st, found)?;
            used[j] = false;
        }
        Ok(())
    }

    fn distribute(&self, state: &State, found: &mut BTreeMap<MatchClass, Matching>) -> Result<()> {
        let mut hosted: Vec<Vec<usize>> = vec![Vec::new(); self.twires.len()];
        let mut exclusive = vec![false; self.twires.len()];
        let mut free = Vec::new();
        for (s, seg) in self.segs.iter().enumerate() {
            match (state.start_on[s], state.end_on[s]) {
                (Some(a), Some(_)) => {
                    exclusive[a] = true;
                    hosted[a].push(s);
                }
                (Some(a), None) | (None, Some(a)) => hosted[a].push(s),
                (None, None) => {
                    debug_assert!(seg.source.is_none() && seg.target.is_none());
                    free.push(s);
                }
            }
        }
        let frees: Vec<Free> = free
            .into_iter()
            .map(Free::Segment)
            .chain((0..self.isolated_l.len()).map(Free::Isolated))
            .collect();
        let mut on_isolated = BTreeMap::new();
        self.place_free(state, &frees, 0, &mut hosted, &mut exclusive, &mut on_isolated, found)
    }

    #[allow(clippy::too_many_arguments)]
    fn place_free(
        &self,
        state: &State,
        frees: &[Free],
        k: usize,
        hosted: &mut Vec<Vec<usize>>,
        exclusive: &mut Vec<bool>,
        on_isolated: &mut BTreeMap<usize, usize>,
        found: &mut BTreeMap<MatchClass, Matching>,
    ) -> Result<()> {
        let Some(f) = frees.get(k) else {
            return self.realize_all(state, hosted, on_isolated, found);
        };
        let (seg_id, circle) = match *f {
            Free::Segment(s) => (s, self.segs[s].circle),
            Free::Isolated(i) => (self.segs.len() + i, false),
        };
        for w in 0..self.twires.len() {
            if exclusive[w] {
                continue;
            }
            if circle && (self.twires[w].kind != WireKind::Circle || !hosted[w].is_empty()) {
                continue;
            }
            hosted[w].push(seg_id);
            exclusive[w] = circle;
            self.place_free(state, frees, k + 1, hosted, exclusive, on_isolated, found)?;
            exclusive[w] = false;
            hosted[w].pop();
        }
        if let Free::Isolated(i) = *f {
            let label = self.l.label(&self.isolated_l[i]);
            for (j, v) in self.isolated_h.iter().enumerate() {
                if on_isolated.contains_key(&j) || self.hmin.label(v) != label {
                    continue;
                }
                on_isolated.insert(j, i);
                self.place_free(state, frees, k + 1, hosted, exclusive, on_isolated, found)?;
                on_isolated.remove(&j);
            }
        }
        Ok(())
    }

    fn segment(&self, id: usize) -> Segment {
        if id < self.segs.len() {
            self.segs[id].clone()
        } else {
            let v = &self.isolated_l[id - self.segs.len()];
            Segment {
                vertices: vec![v.clone()],
                runs: vec![(self.l.label(v).unwrap().to_string(), 1)],
                source: None,
                target: None,
                circle: false,
            }
        }
    }

    fn realize_all(
        &self,
        state: &State,
        hosted: &[Vec<usize>],
        on_isolated: &BTreeMap<usize, usize>,
        found: &mut BTreeMap<MatchClass, Matching>,
    ) -> Result<()> {
        let mut options: Vec<(usize, Vec<Layout>)> = Vec::new();
        for (w, segs) in hosted.iter().enumerate() {
            if segs.is_empty() {
                continue;
            }
            let segments: Vec<(usize, Segment)> = segs.iter().map(|&s| (s, self.segment(s))).collect();
            let layouts = wire_layouts(&self.twires[w], &segments, state);
            if layouts.is_empty() {
                return Ok(());
            }
            options.push((w, layouts));
        }
        let mut choice = vec![0usize; options.len()];
        loop {
            let chosen: Vec<(usize, &Layout)> =
                options.iter().zip(&choice).map(|((w, ls), &c)| (*w, &ls[c])).collect();
            if let Some(m) = self.build(state, &chosen, on_isolated)? {
                found.entry(m.class.clone()).or_insert(m);
            }
            // advance the mixed-radix counter
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(());
                }
                choice[i] += 1;
                if choice[i] < options[i].1.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn build(
        &self,
        state: &State,
        chosen: &[(usize, &Layout)],
        on_isolated: &BTreeMap<usize, usize>,
    ) -> Result<Option<Matching>> {
        let mut g = self.hmin.clone();
        let mut map = state.node_map.clone();
        let mut class = MatchClass { nodes: state.node_map.clone(), wires: BTreeMap::new() };
        for (&j, &i) in on_isolated {
            let (lv, hv) = (&self.isolated_l[i], &self.isolated_h[j]);
            map.insert(lv.clone(), hv.clone());
            class.wires.insert(hv.clone(), vec![vec![lv.clone()]]);
        }
        for &(w, layout) in chosen {
            let tw = &self.twires[w];
            let flat = expand_wire(&mut g, tw, layout)?;
            for (item, v) in layout.iter().flatten().zip(&flat) {
                if let Some(name) = &item.name {
                    map.insert(name.clone(), v.clone());
                }
            }
            class.wires.insert(tw.id.clone(), class_entry(tw, layout));
        }
        if check_matching(self.l, &g, &map).is_err() {
            return Ok(None);
        }
        Ok(Some(Matching { expanded_target: g, map, pattern_boundary: self.l.wire_boundary(), class }))
    }
}

#[derive(Clone, Copy, Debug)]
enum Free {
    Segment(usize),
    Isolated(usize),
}

fn class_entry(tw: &TargetWire, layout: &Layout) -> Vec<Vec<String>> {
    let mut entry: Vec<Vec<String>> =
        layout.iter().map(|run| run.iter().filter_map(|i| i.name.clone()).collect()).collect();
    if tw.kind == WireKind::Circle && tw.runs.len() == 1 {
        let names = &mut entry[0];
        if let Some(i) = names.iter().enumerate().min_by_key(|(_, n)| n.as_str()).map(|(i, _)| i) {
            names.rotate_left(i);
        }
    }
    entry
}

/// Grows each run of `tw` inside `g` to its layout length and returns the
/// wire's vertices in layout order.
fn expand_wire(g: &mut Graph, tw: &TargetWire, layout: &Layout) -> Result<Vec<String>> {
    let mut counts = Vec::new();
    for (run, items) in tw.runs.iter().zip(layout) {
        let x = &run.vertices[0];
        for _ in run.vertices.len()..items.len() {
            split_in_place(g, x)?;
        }
        counts.push(items.len());
    }
    let total: usize = counts.iter().sum();
    let mut start = tw.first.clone();
    if tw.kind != WireKind::Circle {
        // splitting an output moves its name to the end; walk back
        loop {
            let pred = g.in_edges(&start).map(|(_, s)| s).find(|s| g.is_kind(s, VertexKind::Wire));
            let Some(p) = pred.map(str::to_string) else { break };
            start = p;
        }
    } else {
        start = tw.runs[0].vertices[0].clone();
    }
    let mut flat = vec![start.clone()];
    let mut cur = start;
    while flat.len() < total {
        let next = g
            .out_edges(&cur)
            .map(|(_, t)| t)
            .find(|t| g.is_kind(t, VertexKind::Wire))
            .expect("wire continues")
            .to_string();
        flat.push(next.clone());
        cur = next;
    }
    Ok(flat)
}

/// All layouts of the given segments on one target wire.
fn wire_layouts(tw: &TargetWire, segments: &[(usize, Segment)], state: &State) -> Vec<Layout> {
    if tw.kind == WireKind::Circle {
        if segments.len() == 1 && segments[0].1.circle {
            return circle_on_circle(tw, &segments[0].1, segments[0].0);
        }
        return circle_layouts(tw, segments);
    }
    let mut start = None;
    let mut end = None;
    let mut free = Vec::new();
    for (id, s) in segments {
        let on_start = *id < state.start_on.len() && state.start_on[*id].is_some();
        let on_end = *id < state.end_on.len() && state.end_on[*id].is_some();
        match (on_start, on_end) {
            (true, true) => {
                start = Some((*id, s.clone()));
                end = Some((*id, s.clone()));
            }
            (true, false) => start = Some((*id, s.clone())),
            (false, true) => end = Some((*id, s.clone())),
            (false, false) => free.push((*id, s.clone())),
        }
    }
    let mut out = Vec::new();
    let both = start.is_some() && end.is_some() && start.as_ref().unwrap().0 == end.as_ref().unwrap().0;
    for perm in permutations(&free) {
        let mut order: Vec<(usize, Segment)> = Vec::new();
        order.extend(start.clone());
        order.extend(perm);
        if !both {
            order.extend(end.clone());
        }
        let anchored_start = start.is_some();
        let anchored_end = end.is_some();
        let mut placements = Vec::new();
        linear_place(tw, &order, 0, 0, anchored_start, anchored_end, &mut Vec::new(), &mut placements);
        for placed in placements {
            if let Some(layout) = linear_layout(tw, &order, &placed, anchored_start, anchored_end) {
                out.push(layout);
            }
        }
    }
    out
}

fn permutations<T: Clone>(xs: &[T]) -> Vec<Vec<T>> {
    if xs.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

fn labels_fit(tw: &TargetWire, seg: &Segment, j: usize, cyclic: bool) -> bool {
    let m = tw.runs.len();
    seg.runs.iter().enumerate().all(|(t, (label, _))| {
        let r = j + t;
        if cyclic {
            tw.runs[r % m].label == *label
        } else {
            r < m && tw.runs[r].label == *label
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn linear_place(
    tw: &TargetWire,
    order: &[(usize, Segment)],
    k: usize,
    cursor: usize,
    anchored_start: bool,
    anchored_end: bool,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let Some((_, seg)) = order.get(k) else {
        out.push(current.clone());
        return;
    };
    let m = tw.runs.len();
    let p = seg.runs.len();
    let last = k + 1 == order.len();
    for j in cursor..m {
        if k == 0 && anchored_start && j != 0 {
            break;
        }
        if !labels_fit(tw, seg, j, false) {
            continue;
        }
        if last && anchored_end && j + p != m {
            continue;
        }
        current.push(j);
        linear_place(tw, order, k + 1, j + p - 1, anchored_start, anchored_end, current, out);
        current.pop();
    }
}

fn push_segment(runs: &mut [Vec<Item>], seg: &Segment, id: usize, j: usize, m: usize, pins: (bool, bool)) {
    let p = seg.runs.len();
    let mut names = seg.vertices.iter();
    for (t, (_, len)) in seg.runs.iter().enumerate() {
        let r = (j + t) % m;
        for idx in 0..*len {
            let first = t == 0 && idx == 0;
            let final_ = t + 1 == p && idx + 1 == *len;
            runs[r].push(Item {
                name: Some(names.next().unwrap().clone()),
                seg: id,
                pin_start: (t > 0) || (first && pins.0),
                pin_end: (t + 1 < p) || (final_ && pins.1),
            });
        }
    }
}

/// Inserts a gap somewhere legal in `run`; false when impossible.
fn insert_gap(run: &mut Vec<Item>) -> bool {
    for i in 0..=run.len() {
        let left = if i > 0 { Some(&run[i - 1]) } else { None };
        let right = run.get(i);
        if let (Some(a), Some(b)) = (left, right) {
            if a.name.is_some() && b.name.is_some() && a.seg == b.seg {
                continue;
            }
        }
        if left.is_some_and(|a| a.pin_end) || right.is_some_and(|b| b.pin_start) {
            continue;
        }
        run.insert(i, Item::gap());
        return true;
    }
    false
}

fn min_counts(tw: &TargetWire) -> Vec<usize> {
    tw.runs.iter().map(|r| r.vertices.len()).collect()
}

fn linear_layout(
    tw: &TargetWire,
    order: &[(usize, Segment)],
    placed: &[usize],
    anchored_start: bool,
    anchored_end: bool,
) -> Option<Layout> {
    let m = tw.runs.len();
    let mut runs: Layout = vec![Vec::new(); m];
    let mut prev_end: Option<usize> = None;
    let n = order.len();
    for (k, ((id, seg), &j)) in order.iter().zip(placed).enumerate() {
        let pin_s = k == 0 && anchored_start;
        let pin_e = k + 1 == n && anchored_end;
        match prev_end {
            None => {
                if !pin_s && tw.source.is_some() {
                    runs[j].push(Item::gap());
                }
            }
            Some(e) => runs[e].push(Item::gap()),
        }
        push_segment(&mut runs, seg, *id, j, m, (pin_s, pin_e));
        prev_end = Some(j + seg.runs.len() - 1);
    }
    if let Some(e) = prev_end {
        if !anchored_end && tw.target.is_some() {
            runs[e].push(Item::gap());
        }
    }
    for (run, min) in runs.iter_mut().zip(min_counts(tw)) {
        while run.len() < min {
            if !insert_gap(run) {
                return None;
            }
        }
    }
    Some(runs)
}

fn circle_layouts(tw: &TargetWire, segments: &[(usize, Segment)]) -> Vec<Layout> {
    let m = tw.runs.len();
    let mut out = Vec::new();
    let (first, rest) = segments.split_first().unwrap();
    for perm in permutations(rest) {
        let mut order = vec![first.clone()];
        order.extend(perm);
        let starts: Vec<usize> = (0..m).collect();
        for j1 in starts {
            if !labels_fit(tw, &first.1, j1, true) {
                continue;
            }
            let limit = if m == 1 { j1 } else { j1 + m };
            if first.1.runs.len() - 1 + j1 > limit {
                continue;
            }
            let mut placements = Vec::new();
            circle_place(tw, &order, 1, j1 + first.1.runs.len() - 1, limit, &mut vec![j1], &mut placements);
            for placed in placements {
                if let Some(l) = circle_layout(tw, &order, &placed) {
                    out.push(l);
                }
            }
        }
    }
    out
}

fn circle_place(
    tw: &TargetWire,
    order: &[(usize, Segment)],
    k: usize,
    cursor: usize,
    limit: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let Some((_, seg)) = order.get(k) else {
        out.push(current.clone());
        return;
    };
    let p = seg.runs.len();
    for j in cursor..=limit {
        if j + p - 1 > limit || !labels_fit(tw, seg, j, true) {
            continue;
        }
        current.push(j);
        circle_place(tw, order, k + 1, j + p - 1, limit, current, out);
        current.pop();
    }
}

fn circle_layout(tw: &TargetWire, order: &[(usize, Segment)], placed: &[usize]) -> Option<Layout> {
    let m = tw.runs.len();
    let j1 = placed[0];
    // unrolled runs j1 ..= j1 + m; physical run of unrolled u is u % m
    let mut unrolled: Vec<Vec<Item>> = vec![Vec::new(); m + 1];
    let mut prev_end: Option<usize> = None;
    for ((id, seg), &j) in order.iter().zip(placed) {
        if let Some(e) = prev_end {
            unrolled[e - j1].push(Item::gap());
        }
        let p = seg.runs.len();
        let mut tmp: Vec<Vec<Item>> = vec![Vec::new(); m + 1];
        push_segment(&mut tmp, seg, *id, j - j1, m + 1, (false, false));
        for (u, items) in tmp.into_iter().enumerate() {
            unrolled[u].extend(items);
        }
        prev_end = Some(j + p - 1);
    }
    let e = prev_end.unwrap();
    unrolled[e - j1].push(Item::gap());
    let mut runs: Layout = vec![Vec::new(); m];
    for u in (0..=m).rev() {
        let r = (u + j1) % m;
        let items = std::mem::take(&mut unrolled[u]);
        if u == m {
            runs[r] = items;
        } else {
            runs[r].extend(items);
        }
    }
    if m == 1 {
        // one cyclic run: no pins are meaningful
        for item in &mut runs[0] {
            item.pin_start = false;
            item.pin_end = false;
        }
    }
    for (run, min) in runs.iter_mut().zip(min_counts(tw)) {
        while run.len() < min {
            if !insert_gap(run) {
                return None;
            }
        }
    }
    Some(runs)
}

fn circle_on_circle(tw: &TargetWire, seg: &Segment, id: usize) -> Vec<Layout> {
    let m = tw.runs.len();
    if seg.runs.len() != m {
        return Vec::new();
    }
    let mut out = Vec::new();
    for shift in 0..m {
        if (0..m).any(|t| seg.runs[(t + shift) % m].0 != tw.runs[t].label) {
            continue;
        }
        let mut runs: Layout = vec![Vec::new(); m];
        let mut names = seg.vertices.iter();
        let mut per_run: Vec<Vec<String>> = Vec::new();
        for (_, len) in &seg.runs {
            per_run.push(names.by_ref().take(*len).cloned().collect());
        }
        for t in 0..m {
            for n in &per_run[(t + shift) % m] {
                runs[t].push(Item { name: Some(n.clone()), seg: id, pin_start: false, pin_end: false });
            }
        }
        out.push(runs);
        if m == 1 {
            break;
        }
    }
    out
}
