//! Command-line front end. Every input is a JSON file; every output is a
//! JSON document on stdout.
//!
//! Exit codes: 0 for success or a positive answer, 1 for a well-formed
//! negative answer, 2 for errors (reported as `error: <kind>: <message>`).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::besg::Besg;
use crate::decision::{enumerate_matches, is_match_exhaustive, membership};
use crate::dot::to_dot;
use crate::dpo::{apply_rule, Rule};
use crate::error::{Error, Result};
use crate::format::{self, GrammarDoc, GraphDoc, RuleDoc, TraceDoc, FORMAT_VERSION};
use crate::grammar::DerivationTrace;
use crate::graph::{graph_isomorphic, minimal_representative, wire_homeomorphic, wires, Graph};
use crate::matching::{find_matchings, Matching};
use crate::pattern::RewritePattern;
use crate::transform::{check_admissibility, enumerate_induced, transform_step, ADMISSIBILITY_BUDGET};

#[derive(Debug, Parser)]
#[command(name = "besg", version, about = "B-ESG grammars for string graphs")]
struct Cli {
    /// Also write every graph in the output as Graphviz DOT to this file.
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// String graphs and wire-homeomorphism.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Matchings modulo wire-homeomorphism.
    #[command(subcommand)]
    Match(MatchCmd),
    /// String graph rewrite rules.
    #[command(subcommand)]
    Rule(RuleCmd),
    /// B-ESG grammars.
    #[command(subcommand)]
    Grammar(GrammarCmd),
    /// Rewrite patterns.
    #[command(subcommand)]
    Pattern(PatternCmd),
    /// Grammar transformations.
    #[command(subcommand)]
    Transform(TransformCmd),
}

#[derive(Debug, Subcommand)]
enum GraphCmd {
    /// Check the string graph conditions and list the boundary and wires.
    Validate { graph: PathBuf },
    /// Contract every wire to its minimal length.
    Normalize { graph: PathBuf },
    /// Test for a label-preserving isomorphism.
    Iso { a: PathBuf, b: PathBuf },
    /// Test for wire-homeomorphism.
    Homeo { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Subcommand)]
enum MatchCmd {
    /// All matching classes of a pattern graph in a target graph.
    Find {
        pattern: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
}

#[derive(Debug, Subcommand)]
enum RuleCmd {
    Validate { rule: PathBuf },
    /// Rewrite a target at one matching class (in canonical order).
    Apply {
        rule: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
}

#[derive(Debug, Subcommand)]
enum GrammarCmd {
    /// Check the grammar conditions; lists every failure.
    Validate { grammar: PathBuf },
    /// Replay a trace; with --concrete, require completion and decode.
    Derive {
        grammar: PathBuf,
        trace: PathBuf,
        #[arg(long)]
        concrete: bool,
    },
    /// Sentential forms up to --max-size vertices, or with --language the
    /// decoded members with at most --max-size vertices plus edges.
    Enumerate {
        grammar: PathBuf,
        #[arg(long)]
        language: bool,
        #[arg(long, default_value_t = 20)]
        max_size: usize,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Decide whether a graph homeomorphic to the input is in the language.
    Member { grammar: PathBuf, graph: PathBuf },
    /// Members of the language that match into the input graph.
    Matches {
        grammar: PathBuf,
        graph: PathBuf,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Longest wire any member can have.
    Wirebound { grammar: PathBuf },
    /// Check the conditions under which match enumeration is finite.
    Exhaustive { grammar: PathBuf },
}

#[derive(Debug, Subcommand)]
enum PatternCmd {
    Validate { pattern: PathBuf },
    /// Run a trace in both grammars, giving a rewrite rule.
    Instantiate { pattern: PathBuf, trace: PathBuf },
}

#[derive(Debug, Subcommand)]
enum TransformCmd {
    /// Rewrite final subgraphs of productions with a rule. With --index,
    /// print only that resulting grammar.
    Step {
        grammar: PathBuf,
        rule: PathBuf,
        #[arg(long)]
        index: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Check that a trace's instantiations are related by the rule.
    Admissible {
        grammar: PathBuf,
        transformed: PathBuf,
        rule: PathBuf,
        trace: PathBuf,
        #[arg(long, default_value_t = ADMISSIBILITY_BUDGET)]
        budget: usize,
    },
    /// Pattern instantiations that rewrite some final subgraph of a grammar.
    Induced {
        grammar: PathBuf,
        pattern: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_size: usize,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    /// The output document (or help text), for stdout.
    pub output: String,
    /// Single-line error report, for stderr.
    pub error: Option<String>,
    /// DOT rendering of the graphs in the output, when any.
    pub dot: Option<String>,
}

struct Outcome {
    exit_code: i32,
    doc: Value,
    graphs: Vec<(String, Graph)>,
    error: Option<String>,
}

impl Outcome {
    fn new(positive: bool, doc: Value) -> Self {
        Outcome { exit_code: if positive { 0 } else { 1 }, doc, graphs: Vec::new(), error: None }
    }

    fn with_graph(mut self, name: &str, g: &Graph) -> Self {
        self.graphs.push((name.to_string(), g.clone()));
        self
    }
}

/// Parses `argv` (program name first), runs the command, and writes the
/// DOT file if requested.
pub fn run<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                return CommandResult { exit_code: 0, output: e.to_string(), error: None, dot: None };
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            return CommandResult { exit_code: 2, output: String::new(), error: Some(format!("error: usage: {first}")), dot: None };
        }
    };
    match execute(&cli.command).and_then(|o| finish(o, cli.dot.as_deref())) {
        Ok(r) => r,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            CommandResult { exit_code: 2, output: String::new(), error: Some(format!("error: {}: {msg}", e.kind())), dot: None }
        }
    }
}

fn finish(o: Outcome, dot_path: Option<&Path>) -> Result<CommandResult> {
    let dot = if o.graphs.is_empty() {
        None
    } else {
        Some(o.graphs.iter().map(|(n, g)| to_dot(g, n)).collect::<String>())
    };
    if let (Some(path), Some(text)) = (dot_path, &dot) {
        fs::write(path, text)?;
    }
    Ok(CommandResult { exit_code: o.exit_code, output: format::to_json(&o.doc), error: o.error, dot })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_graph(path: &Path) -> Result<Graph> {
    format::graph_from_json(&read(path)?)
}

fn load_rule(path: &Path) -> Result<Rule> {
    format::rule_from_json(&read(path)?)
}

fn load_grammar(path: &Path) -> Result<Besg> {
    format::grammar_from_json(&read(path)?)
}

fn load_pattern(path: &Path) -> Result<RewritePattern> {
    format::pattern_from_json(&read(path)?)
}

fn load_trace(path: &Path) -> Result<DerivationTrace> {
    format::trace_from_json(&read(path)?)
}

fn graph_value(g: &Graph) -> Value {
    serde_json::to_value(GraphDoc::from_graph(g)).expect("serializable")
}

fn trace_value(t: &DerivationTrace) -> Value {
    serde_json::to_value(TraceDoc::from_trace(t)).expect("serializable")
}

fn matching_value(m: &Matching) -> Value {
    json!({
        "class": m.class(),
        "map": m.map,
        "expanded_target": graph_value(&m.expanded_target),
    })
}

fn doc(fields: Value) -> Value {
    let mut v = fields;
    v["format_version"] = json!(FORMAT_VERSION);
    v
}

fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Graph(c) => graph_cmd(c),
        Command::Match(MatchCmd::Find { pattern, target, limit }) => {
            let (l, h) = (load_graph(pattern)?, load_graph(target)?);
            let ms = find_matchings(&l, &h)?;
            let shown: Vec<Value> = ms.iter().take(*limit).map(matching_value).collect();
            Ok(Outcome::new(!ms.is_empty(), doc(json!({ "count": ms.len(), "matchings": shown }))))
        }
        Command::Rule(c) => rule_cmd(c),
        Command::Grammar(c) => grammar_cmd(c),
        Command::Pattern(c) => pattern_cmd(c),
        Command::Transform(c) => transform_cmd(c),
    }
}

fn graph_cmd(c: &GraphCmd) -> Result<Outcome> {
    match c {
        GraphCmd::Validate { graph } => {
            let g = load_graph(graph)?;
            let violation = g.string_graph_violation();
            let mut d = json!({
                "string_graph": violation.is_none(),
                "encoded_string_graph": g.is_encoded_string_graph(),
                "violation": violation.as_ref().map(|v| v.to_string()),
            });
            if violation.is_none() {
                let b = g.boundary()?;
                d["inputs"] = json!(b.inputs);
                d["outputs"] = json!(b.outputs);
                d["wires"] = json!(wires(&g)?);
            }
            Ok(Outcome::new(violation.is_none(), doc(d)).with_graph("graph", &g))
        }
        GraphCmd::Normalize { graph } => {
            let m = minimal_representative(&load_graph(graph)?)?;
            Ok(Outcome::new(true, graph_value(&m)).with_graph("normalized", &m))
        }
        GraphCmd::Iso { a, b } => {
            let iso = graph_isomorphic(&load_graph(a)?, &load_graph(b)?);
            Ok(Outcome::new(iso.is_some(), doc(json!({ "isomorphic": iso.is_some(), "mapping": iso }))))
        }
        GraphCmd::Homeo { a, b } => {
            let h = wire_homeomorphic(&load_graph(a)?, &load_graph(b)?)?;
            Ok(Outcome::new(h, doc(json!({ "homeomorphic": h }))))
        }
    }
}

fn rule_cmd(c: &RuleCmd) -> Result<Outcome> {
    match c {
        RuleCmd::Validate { rule } => {
            let r = load_rule(rule)?;
            let v = r.violation();
            let boundary = r.lhs.wire_boundary();
            let d = json!({
                "valid": v.is_none(),
                "violation": v,
                "inputs": boundary.inputs,
                "outputs": boundary.outputs,
            });
            Ok(Outcome::new(v.is_none(), doc(d)).with_graph("lhs", &r.lhs).with_graph("rhs", &r.rhs))
        }
        RuleCmd::Apply { rule, target, index } => {
            let out = apply_rule(&load_rule(rule)?, &load_graph(target)?, *index)?;
            Ok(Outcome::new(true, graph_value(&out)).with_graph("result", &out))
        }
    }
}

fn grammar_cmd(c: &GrammarCmd) -> Result<Outcome> {
    match c {
        GrammarCmd::Validate { grammar } => {
            let b = load_grammar(grammar)?;
            let violations: Vec<Value> = b
                .violations()
                .iter()
                .map(|v| json!({ "condition": v.condition, "production": v.production, "detail": v.detail }))
                .collect();
            let missing: Vec<Value> =
                b.missing_decoding_rules().into_iter().map(|(a, n1, n2)| json!([a, n1, n2])).collect();
            let d = json!({
                "valid": violations.is_empty(),
                "violations": violations,
                "missing_decoding_rules": missing,
                "reduced": b.grammar.reduced_violation().is_none(),
            });
            Ok(Outcome::new(violations.is_empty(), doc(d)))
        }
        GrammarCmd::Derive { grammar, trace, concrete } => {
            let (b, t) = (load_grammar(grammar)?, load_trace(trace)?);
            b.validate()?;
            let g = if *concrete { b.concrete_derive(&t)? } else { b.grammar.derive(&t)? };
            Ok(Outcome::new(true, graph_value(&g)).with_graph("derived", &g))
        }
        GrammarCmd::Enumerate { grammar, language, max_size, limit } => {
            let b = load_grammar(grammar)?;
            b.validate()?;
            let mut o = if *language {
                let ms = b.enumerate_language(*max_size)?;
                let items: Vec<Value> = ms
                    .iter()
                    .take(*limit)
                    .map(|m| json!({ "trace": trace_value(&m.trace), "graph": graph_value(&m.graph), "encoded": graph_value(&m.encoded) }))
                    .collect();
                let mut o = Outcome::new(true, doc(json!({ "count": ms.len(), "members": items })));
                for (i, m) in ms.iter().take(*limit).enumerate() {
                    o = o.with_graph(&format!("member{i}"), &m.graph);
                }
                o
            } else {
                let forms = b.grammar.enumerate_sentential_forms(*max_size)?;
                let items: Vec<Value> = forms
                    .iter()
                    .take(*limit)
                    .map(|(g, t)| json!({ "trace": trace_value(t), "graph": graph_value(g) }))
                    .collect();
                let mut o = Outcome::new(true, doc(json!({ "count": forms.len(), "forms": items })));
                for (i, (g, _)) in forms.iter().take(*limit).enumerate() {
                    o = o.with_graph(&format!("form{i}"), g);
                }
                o
            };
            o.exit_code = 0;
            Ok(o)
        }
        GrammarCmd::Member { grammar, graph } => {
            let ans = membership(&load_graph(graph)?, &load_grammar(grammar)?)?;
            let witness = ans.witness.as_ref().map(|w| {
                json!({
                    "trace": trace_value(&w.trace),
                    "h_tilde": graph_value(&w.h_tilde),
                    "encoded": graph_value(&w.encoded),
                })
            });
            let mut o = Outcome::new(ans.member, doc(json!({ "member": ans.member, "witness": witness })));
            if let Some(w) = &ans.witness {
                o = o.with_graph("h_tilde", &w.h_tilde);
            }
            Ok(o)
        }
        GrammarCmd::Matches { grammar, graph, limit } => {
            let ms = enumerate_matches(&load_graph(graph)?, &load_grammar(grammar)?)?;
            let items: Vec<Value> = ms
                .iter()
                .take(*limit)
                .map(|m| json!({ "trace": trace_value(&m.trace), "k": graph_value(&m.k), "matching": matching_value(&m.matching) }))
                .collect();
            Ok(Outcome::new(!ms.is_empty(), doc(json!({ "count": ms.len(), "matches": items }))))
        }
        GrammarCmd::Wirebound { grammar } => {
            let b = load_grammar(grammar)?;
            b.validate()?;
            Ok(Outcome::new(true, doc(json!({ "max_wire_bound": b.max_wire_bound() }))))
        }
        GrammarCmd::Exhaustive { grammar } => {
            let b = load_grammar(grammar)?;
            b.validate()?;
            let r = is_match_exhaustive(&b);
            let failures: Vec<Value> = r
                .failures
                .iter()
                .map(|f| json!({ "condition": f.condition, "production": f.production, "detail": f.detail }))
                .collect();
            let d = json!({ "match_exhaustive": r.is_match_exhaustive(), "n_bare": r.n_bare, "failures": failures });
            Ok(Outcome::new(r.is_match_exhaustive(), doc(d)))
        }
    }
}

fn pattern_cmd(c: &PatternCmd) -> Result<Outcome> {
    match c {
        PatternCmd::Validate { pattern } => {
            let p = load_pattern(pattern)?;
            let violations: Vec<Value> = p
                .violations()
                .iter()
                .map(|v| json!({ "condition": v.condition, "production": v.production, "detail": v.detail }))
                .collect();
            let d = json!({ "valid": violations.is_empty(), "violations": violations });
            Ok(Outcome::new(violations.is_empty(), doc(d)))
        }
        PatternCmd::Instantiate { pattern, trace } => {
            let r = load_pattern(pattern)?.instantiate(&load_trace(trace)?)?;
            let v = serde_json::to_value(RuleDoc::from_rule(&r)).expect("serializable");
            Ok(Outcome::new(true, v).with_graph("lhs", &r.lhs).with_graph("rhs", &r.rhs))
        }
    }
}

fn transform_cmd(c: &TransformCmd) -> Result<Outcome> {
    match c {
        TransformCmd::Step { grammar, rule, index, limit } => {
            let steps = transform_step(&load_grammar(grammar)?, &load_rule(rule)?)?;
            if let Some(i) = index {
                let s = steps
                    .get(*i)
                    .ok_or_else(|| Error::InvalidMatching(format!("step index {i} out of range ({} found)", steps.len())))?;
                let v = serde_json::to_value(GrammarDoc::from_besg(&s.b_prime)).expect("serializable");
                let body = &s.b_prime.grammar.productions[&s.production].body;
                return Ok(Outcome::new(true, v).with_graph(&s.production, body));
            }
            let items: Vec<Value> = steps
                .iter()
                .take(*limit)
                .map(|s| {
                    json!({
                        "production": s.production,
                        "matching": matching_value(&s.matching),
                        "grammar": serde_json::to_value(GrammarDoc::from_besg(&s.b_prime)).expect("serializable"),
                    })
                })
                .collect();
            Ok(Outcome::new(!steps.is_empty(), doc(json!({ "count": steps.len(), "steps": items }))))
        }
        TransformCmd::Admissible { grammar, transformed, rule, trace, budget } => {
            let a = check_admissibility(
                &load_grammar(grammar)?,
                &load_grammar(transformed)?,
                &load_rule(rule)?,
                &load_trace(trace)?,
                *budget,
            )?;
            let chain: Vec<Value> = a.chain.iter().map(graph_value).collect();
            let d = json!({
                "admissible": a.admissible,
                "complete": a.complete,
                "n": a.n,
                "chain": chain,
                "f_prime": graph_value(&a.f_prime),
            });
            let mut o = Outcome::new(a.admissible, doc(d));
            if !a.complete {
                // the partial chain still goes to stdout
                let e = Error::BudgetExceeded(*budget);
                o.exit_code = 2;
                o.error = Some(format!("error: {}: {e}", e.kind()));
            }
            for (i, g) in a.chain.iter().enumerate() {
                o = o.with_graph(&format!("step{i}"), g);
            }
            Ok(o)
        }
        TransformCmd::Induced { grammar, pattern, max_size, limit } => {
            let found = enumerate_induced(&load_grammar(grammar)?, &load_pattern(pattern)?, *max_size)?;
            let items: Vec<Value> = found
                .iter()
                .take(*limit)
                .map(|x| {
                    let steps: Vec<Value> = x
                        .results
                        .iter()
                        .map(|s| json!({ "production": s.production, "grammar": serde_json::to_value(GrammarDoc::from_besg(&s.b_prime)).expect("serializable") }))
                        .collect();
                    json!({
                        "trace": trace_value(&x.trace),
                        "rule": serde_json::to_value(RuleDoc::from_rule(&x.rule)).expect("serializable"),
                        "steps": steps,
                    })
                })
                .collect();
            Ok(Outcome::new(!found.is_empty(), doc(json!({ "count": found.len(), "induced": items }))))
        }
    }
}
