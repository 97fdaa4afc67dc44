//! Acceptance checks. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use besg::besg::esg_form_violation;
use besg::decision::membership;
use besg::dpo::apply_rule;
use besg::grammar::substitute;
use besg::graph::{graph_isomorphic, wire_homeomorphic, wires};
use besg::matching::find_matchings;
use besg::transform::{check_admissibility, induced_pattern, modified_productions, transform_step, ADMISSIBILITY_BUDGET};
use besg::{Graph, VertexKind};
use common::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn diagram_is_string_graph() -> Outcome {
    let t = Instant::now();
    let g = graph("diagram.graph.json");
    ensure(g.is_string_graph(), || format!("{:?}", g.string_graph_violation()))?;
    let b = g.boundary().map_err(|e| e.to_string())?;
    // the diagram has two open wire ends on each side
    ensure(b.inputs.len() == 2 && b.outputs.len() == 2, || format!("boundary {b:?}"))?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("inputs {:?}, outputs {:?}", b.inputs, b.outputs))
}

fn dpo_example() -> Outcome {
    let t = Instant::now();
    let r = rule("fg-to-h.rule.json");
    let g = graph("fg-context.graph.json");
    let expected = graph("fg-context-rewritten.graph.json");
    let out = apply_rule(&r, &g, 0).map_err(|e| e.to_string())?;
    ensure(wire_homeomorphic(&out, &expected).unwrap(), || format!("got {out:?}"))?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("result has {} vertices, homeomorphic to the expected graph", out.vertex_count()))
}

fn complete_language() -> Outcome {
    let t = Instant::now();
    let b = grammar("complete.grammar.json");
    let members = b.enumerate_language(30).map_err(|e| e.to_string())?;
    let mut ns = Vec::new();
    for m in &members {
        let n = is_complete_graph(&m.graph, "white").ok_or_else(|| format!("not complete: {:?}", m.graph))?;
        ns.push(n);
    }
    ns.sort();
    ensure(ns == [2, 3, 4], || format!("node counts {ns:?}"))?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("members are K_n for n in {ns:?}"))
}

fn complete_membership() -> Outcome {
    let t = Instant::now();
    let b = grammar("complete.grammar.json");
    for name in ["k3.graph.json", "k3-long.graph.json"] {
        let h = graph(name);
        let ans = membership(&h, &b).map_err(|e| e.to_string())?;
        let w = ans.witness.filter(|_| ans.member).ok_or_else(|| format!("{name} rejected"))?;
        let replay = b.concrete_derive(&w.trace).map_err(|e| e.to_string())?;
        ensure(wire_homeomorphic(&replay, &h).unwrap(), || format!("{name}: witness does not replay to the input"))?;
    }
    let path = membership(&graph("path3.graph.json"), &b).map_err(|e| e.to_string())?;
    ensure(!path.member, || "three-node path accepted".into())?;
    within(t, Duration::from_secs(60))?;
    Ok("K3 and split K3 accepted with replayable witnesses, path rejected".into())
}

fn derivations_give_string_graphs() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grammars: Vec<_> = GRAMMARS.iter().map(|n| (n, grammar(n))).collect();
    for i in 0..500 {
        let (name, b) = &grammars[i % grammars.len()];
        let free = rng.random_range(0..=6);
        let (trace, forms) = random_completing_trace(b, &mut rng, free);
        for f in &forms {
            if let Some(v) = esg_form_violation(f) {
                return Err(format!("{name} {trace:?}: sentential form violates {v}"));
            }
        }
        let g = b.concrete_derive(&trace).map_err(|e| format!("{name}: {e}"))?;
        ensure(g.is_string_graph(), || format!("{name} {trace:?}: {:?}", g.string_graph_violation()))?;
    }
    within(t, Duration::from_secs(120))?;
    Ok(format!("500 traces over {} grammars", grammars.len()))
}

fn wire_length_bound() -> Outcome {
    let mut checked = 0;
    for name in GRAMMARS {
        let b = grammar(name);
        let bound = b.max_wire_bound();
        for m in b.enumerate_language(30).map_err(|e| e.to_string())? {
            let longest = wires(&m.graph).unwrap().iter().map(|w| w.len()).max().unwrap_or(0);
            ensure(longest <= bound, || format!("{name}: wire of length {longest} exceeds bound {bound}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} members within their grammar's bound"))
}

fn star(n: usize, like: &Graph) -> Graph {
    let mut g = Graph::new(like.alphabets().clone());
    g.add_vertex("c", "black").unwrap();
    for i in 0..n {
        for (v, l) in [(format!("b{i}"), "white"), (format!("s{i}"), "W"), (format!("o{i}"), "W")] {
            g.add_vertex(v, l).unwrap();
        }
        g.add_edge("c", "e", format!("s{i}")).unwrap();
        g.add_edge(format!("s{i}"), "e", format!("b{i}")).unwrap();
        g.add_edge(format!("b{i}"), "e", format!("o{i}")).unwrap();
    }
    g
}

fn complete_with_outputs(n: usize, like: &Graph) -> Graph {
    let mut g = Graph::new(like.alphabets().clone());
    for i in 0..n {
        g.add_vertex(format!("b{i}"), "white").unwrap();
        g.add_vertex(format!("o{i}"), "W").unwrap();
        g.add_edge(format!("b{i}"), "e", format!("o{i}")).unwrap();
        for j in 0..i {
            let w = format!("w{j}{i}");
            g.add_vertex(&w, "W").unwrap();
            g.add_edge(format!("b{j}"), "e", &w).unwrap();
            g.add_edge(&w, "e", format!("b{i}")).unwrap();
        }
    }
    g
}

fn complete_to_star_instances() -> Outcome {
    let t = Instant::now();
    let p = pattern("complete-to-star.pattern.json");
    for n in 2..=4 {
        let mut steps = vec![("S".to_string(), "start".to_string())];
        let mut v = "S.X".to_string();
        for _ in 2..n {
            steps.push((v.clone(), "more".into()));
            v.push_str(".X");
        }
        steps.push((v, "end".into()));
        let r = p.instantiate(&besg::grammar::DerivationTrace::new(steps)).map_err(|e| e.to_string())?;
        r.validate().map_err(|e| e.to_string())?;
        ensure(graph_isomorphic(&r.lhs, &complete_with_outputs(n, &r.lhs)).is_some(), || format!("n={n}: lhs"))?;
        ensure(graph_isomorphic(&r.rhs, &star(n, &r.rhs)).is_some(), || format!("n={n}: rhs"))?;
        let (bl, br) = (r.lhs.boundary().unwrap(), r.rhs.boundary().unwrap());
        ensure(bl == br, || format!("n={n}: boundaries {bl:?} vs {br:?}"))?;
    }
    within(t, Duration::from_secs(10))?;
    Ok("n = 2, 3, 4 give complete graph => star with equal boundaries".into())
}

fn decoding_confluence() -> Outcome {
    let t_sys = fixture_decoders();
    ensure(t_sys.rules.keys().any(|k| k.0 == "had"), || "no Hadamard decoder".into())?;
    let alphabets = grammar("hadamard-path.grammar.json").grammar.alphabets;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..100 {
        let g = random_encoded_graph(&mut rng, &t_sys, &alphabets);
        let a = decode_randomly(&g, &t_sys, &mut rng);
        let b = decode_randomly(&g, &t_sys, &mut rng);
        ensure(a.is_string_graph(), || format!("case {i}: decoded graph is not a string graph"))?;
        ensure(graph_isomorphic(&a, &b).is_some(), || format!("case {i}: orders disagree on {g:?}"))?;
    }
    Ok("100 random encoded graphs".into())
}

fn derivation_confluence() -> Outcome {
    let b = grammar("tree.grammar.json");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 100 {
        let steps = rng.random_range(0..=5);
        let g = random_form(&b, &mut rng, steps);
        let nts = nonterminals(&g);
        if nts.len() < 2 {
            continue;
        }
        let picked: Vec<&String> = nts.choose_multiple(&mut rng, 2).collect();
        let (u, v) = (picked[0], picked[1]);
        let pu = *b.grammar.productions_for(g.label(u).unwrap()).collect::<Vec<_>>().choose(&mut rng).unwrap();
        let pv = *b.grammar.productions_for(g.label(v).unwrap()).collect::<Vec<_>>().choose(&mut rng).unwrap();
        let one = substitute(&substitute(&g, u, pu).unwrap(), v, pv).unwrap();
        let two = substitute(&substitute(&g, v, pv).unwrap(), u, pu).unwrap();
        ensure(graph_isomorphic(&one, &two).is_some(), || format!("{u}/{v} disagree on {g:?}"))?;
        done += 1;
    }
    Ok("100 random forms with two or more nonterminals".into())
}

fn transformations_admissible() -> Outcome {
    let t = Instant::now();
    let cases = [
        ("ladder.grammar.json", "drop-identity.rule.json"),
        ("ladder.grammar.json", "recolour.rule.json"),
        ("loops.grammar.json", "drop-circle.rule.json"),
    ];
    let mut chains = 0;
    for (gname, rname) in cases {
        let b = grammar(gname);
        let r = rule(rname);
        let steps = transform_step(&b, &r).map_err(|e| e.to_string())?;
        ensure(!steps.is_empty(), || format!("{gname} / {rname}: no transformation"))?;
        for step in steps {
            induced_pattern(&b, &step.b_prime).map_err(|e| format!("{gname} / {rname}: {e}"))?;
            let modified = modified_productions(&b, &step.b_prime);
            for trace in all_traces(&b, 6) {
                let n: usize = modified.iter().map(|p| trace.uses(p)).sum();
                if n > 3 {
                    continue;
                }
                let a = check_admissibility(&b, &step.b_prime, &r, &trace, ADMISSIBILITY_BUDGET)
                    .map_err(|e| e.to_string())?;
                ensure(a.admissible && a.n == n && a.chain.len() == n + 1, || {
                    format!("{gname} / {rname} at {}: {trace:?} not admissible", step.production)
                })?;
                chains += 1;
            }
        }
    }
    within(t, Duration::from_secs(120))?;
    Ok(format!("{} cases, {chains} admissible chains", cases.len()))
}

fn matching_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nonempty = 0;
    let mut pairs = 0;
    while pairs < 50 {
        let h = random_string_graph(&mut rng, 12);
        let l = if rng.random_bool(0.7) { pattern_from(&mut rng, &h) } else { random_string_graph(&mut rng, 8) };
        if !l.is_string_graph() || l.count_kind(VertexKind::Wire) > 3 || h.count_kind(VertexKind::Wire) > 6 {
            continue;
        }
        pairs += 1;
        let found = find_matchings(&l, &h).map_err(|e| e.to_string())?;
        let mine = library_classes(&l, &h, &found);
        let set: BTreeSet<_> = mine.iter().cloned().collect();
        ensure(set.len() == mine.len(), || format!("pair {pairs}: duplicate classes for {l:?} in {h:?}"))?;
        let oracle = brute_force_classes(&l, &h);
        ensure(set == oracle, || {
            format!("pair {pairs}: library {} classes, brute force {}; pattern {l:?} target {h:?}", set.len(), oracle.len())
        })?;
        nonempty += usize::from(!set.is_empty());
    }
    Ok(format!("50 pairs agree, {nonempty} with at least one matching"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("string diagram fixture is a string graph", diagram_is_string_graph),
        ("DPO rewrite of f;g to h", dpo_example),
        ("complete-graph grammar language", complete_language),
        ("membership in the complete-graph grammar", complete_membership),
        ("random derivations yield string graphs", derivations_give_string_graphs),
        ("wire lengths within max_wire_bound", wire_length_bound),
        ("complete-to-star pattern instantiations", complete_to_star_instances),
        ("decoding order independence", decoding_confluence),
        ("substitution order independence", derivation_confluence),
        ("transformations are admissible", transformations_admissible),
        ("find_matchings agrees with brute force", matching_oracle),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
