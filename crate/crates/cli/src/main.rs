//! `mampcg` command-line front end.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 parse or usage error,
//! 3 graph outside the requested family, 4 numerical or property failure.

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mampcg::{
    audit_faithfulness, check_properties, closure, eampify, emampify, enumerate_model, fixtures,
    latent_lift, marginalize, markov_equivalent, maximal_sets, models_equal, pairwise_base,
    parse_graph, selectionize, separated, serialize_graph, to_dot, triplex_class, triplexes,
    CiThresholds, Criterion, DeterminationMap, EquivalenceMode, Error, ErrorGraph, Family,
    IndependenceModel, MixedGraph, NodeTag, RuleKind,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "mampcg", version, about = "Marginal AMP chain graph toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Mamp,
    Amp,
    Mvr,
    Lwf,
    Dag,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Mamp => Family::Mamp,
            FamilyArg::Amp => Family::Amp,
            FamilyArg::Mvr => Family::Mvr,
            FamilyArg::Lwf => Family::Lwf,
            FamilyArg::Dag => Family::Dag,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    Eamp,
    Emamp,
    Selection,
    Latent,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleSet {
    All,
    Graphoid,
    Composition,
    Wt,
}

impl RuleSet {
    fn rules(self) -> &'static [RuleKind] {
        match self {
            RuleSet::All => &RuleKind::ALL,
            RuleSet::Graphoid => &RuleKind::GRAPHOID,
            RuleSet::Composition => &RuleKind::COMPOSITIONAL,
            RuleSet::Wt => &[RuleKind::WeakTransitivity],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Text,
    Json,
}

/// Where the determination map of a query comes from.
#[derive(clap::Args)]
struct QueryGraph {
    /// Graph file or fixture name (FIG1_G, FIG2_G, EX4, MOTIV, EX5, MAG1, RCG1).
    file: String,
    #[arg(long, default_value = "mamp")]
    criterion: Criterion,
    /// Lift the graph first and query the result with its determination map.
    #[arg(long, value_enum)]
    det_from_transform: Option<TransformKind>,
}

#[derive(Subcommand)]
enum Command {
    /// Check membership in a graph family.
    Validate {
        file: String,
        #[arg(long, value_enum, default_value = "mamp")]
        family: FamilyArg,
    },
    /// Decide X _||_ Y | Z.
    Sep {
        #[command(flatten)]
        graph: QueryGraph,
        #[arg(long, value_delimiter = ',')]
        x: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        y: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        z: Vec<String>,
    },
    /// Every separation statement over a node set.
    Model {
        #[command(flatten)]
        graph: QueryGraph,
        /// Restrict to these nodes (default: all).
        #[arg(long, value_delimiter = ',')]
        universe: Vec<String>,
    },
    /// The pairwise separation base.
    Base { file: String },
    /// Closure of the pairwise base under the compositional graphoid rules.
    Closure {
        file: String,
        #[arg(long)]
        emit_model: bool,
    },
    /// Check a separation model against graphoid rules.
    Audit {
        file: String,
        #[arg(long, value_enum, default_value = "all")]
        rules: RuleSet,
        #[arg(long, default_value = "mamp")]
        criterion: Criterion,
    },
    /// List triplexes.
    Triplex { file: String },
    /// Markov equivalence of two graphs.
    Equiv {
        first: String,
        second: String,
        /// Compare separation models instead of skeletons and triplexes.
        #[arg(long)]
        oracle: bool,
    },
    /// Enumerate the triplex equivalence class.
    Class {
        file: String,
        #[arg(long)]
        emit_members: bool,
    },
    /// Maximal directed and bidirected sets of the class.
    Maximal { file: String },
    /// Error-node, selection and latent transforms.
    Transform {
        file: String,
        #[arg(long, value_enum)]
        kind: TransformKind,
    },
    /// Marginalize original nodes of an error graph.
    Marginalize {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        nodes: Vec<String>,
    },
    /// Gaussian Markov and faithfulness audit.
    Gaussian {
        file: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        report: Option<Report>,
    },
    /// Graphviz export.
    Dot { file: String },
}

/// Command failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidFamily { .. } | Error::Cycle(_) => 3,
            Error::Numerical(_) | Error::PropertyViolation(_) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Command output: text or JSON payload plus the exit code.
struct Outcome {
    text: String,
    json: Value,
    code: u8,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome {
            text,
            json,
            code: 0,
        }
    }

    fn verdict(yes: bool, text: String, json: Value) -> Self {
        Outcome {
            text,
            json,
            code: if yes { 0 } else { 1 },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::Json => println!("{}", out.json),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_source(file: &str) -> Result<String, Failure> {
    if Path::new(file).is_file() {
        return std::fs::read_to_string(file).map_err(|e| usage(format!("{file}: {e}")));
    }
    fixtures::text(file)
        .map(str::to_string)
        .ok_or_else(|| usage(format!("{file}: no such file or fixture")))
}

fn load(file: &str) -> Result<(MixedGraph, DeterminationMap), Failure> {
    let text = read_source(file)?;
    parse_graph(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{file}: {}", f.message);
        f
    })
}

/// Reuses the error layer of a lifted graph, or lifts a plain one with the
/// transform that fits its edges.
fn error_graph(g: MixedGraph, det: DeterminationMap) -> Result<ErrorGraph, Failure> {
    if !g.nodes_tagged(NodeTag::Error).is_empty() {
        return Ok(ErrorGraph::from_parts(g, det)?);
    }
    if g.validate(Family::Amp).is_valid() {
        Ok(eampify(&g)?)
    } else {
        Ok(emampify(&g)?)
    }
}

fn transformed(
    g: MixedGraph,
    det: DeterminationMap,
    kind: TransformKind,
) -> Result<(MixedGraph, DeterminationMap), Failure> {
    Ok(match kind {
        TransformKind::Eamp => {
            let e = eampify(&g)?;
            (e.graph, e.det)
        }
        TransformKind::Emamp => {
            let e = emampify(&g)?;
            (e.graph, e.det)
        }
        TransformKind::Selection => {
            let e = selectionize(&error_graph(g, det)?)?;
            (e.graph, e.det)
        }
        TransformKind::Latent => (latent_lift(&g)?.graph, DeterminationMap::new()),
    })
}

fn query_graph(q: &QueryGraph) -> Result<(MixedGraph, DeterminationMap), Failure> {
    let (g, det) = load(&q.file)?;
    match q.det_from_transform {
        Some(kind) => transformed(g, det, kind),
        None => Ok((g, det)),
    }
}

fn graph_text(g: &MixedGraph, det: &DeterminationMap) -> Outcome {
    let text = serialize_graph(g, det);
    let json = json!({ "graph": text, "edges": edge_strings(g) });
    Outcome::ok(text, json)
}

fn edge_strings(g: &MixedGraph) -> Vec<String> {
    let list = g.edge_list_string();
    if list.is_empty() {
        return Vec::new();
    }
    list.split(", ").map(str::to_string).collect()
}

fn model_text(m: &IndependenceModel) -> String {
    m.sorted_statements()
        .iter()
        .map(|s| m.format_statement(s) + "\n")
        .collect()
}

fn model_json(m: &IndependenceModel) -> Value {
    serde_json::from_str(&m.to_json()).expect("model JSON is valid")
}

fn pairs_json(pairs: &std::collections::BTreeSet<(String, String)>) -> Value {
    pairs.iter().map(|(a, b)| json!([a, b])).collect()
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Validate { file, family } => {
            let (g, _) = load(&file)?;
            let report = g.validate(family.into());
            let mut text = String::new();
            for v in &report.violations {
                text += &format!("{} {}\n", v.constraint, v.witness.join(" "));
            }
            if report.is_valid() {
                text += &format!("valid {}\n", report.family);
            } else {
                text += &format!("invalid {}\n", report.family);
            }
            let json = serde_json::to_value(&report).expect("report serializes");
            Ok(Outcome {
                code: if report.is_valid() { 0 } else { 3 },
                text,
                json,
            })
        }
        Command::Sep { graph, x, y, z } => {
            let (g, det) = query_graph(&graph)?;
            if x.is_empty() || y.is_empty() {
                return Err(usage("--x and --y must name at least one node"));
            }
            let z: Vec<String> = z.into_iter().filter(|s| !s.is_empty()).collect();
            let (xs, ys, zs) = (g.set_of(&x)?, g.set_of(&y)?, g.set_of(&z)?);
            let holds = separated(&g, xs, ys, zs, graph.criterion, &det)?;
            let verdict = if holds { "separated" } else { "not separated" };
            let json = json!({
                "x": g.names_of(xs), "y": g.names_of(ys), "z": g.names_of(zs),
                "criterion": graph.criterion.to_string(), "separated": holds,
            });
            Ok(Outcome::verdict(holds, format!("{verdict}\n"), json))
        }
        Command::Model { graph, universe } => {
            let (g, det) = query_graph(&graph)?;
            let universe = if universe.is_empty() {
                g.all()
            } else {
                g.set_of(&universe)?
            };
            let m = enumerate_model(&g, graph.criterion, &det, universe)?;
            Ok(Outcome::ok(model_text(&m), model_json(&m)))
        }
        Command::Base { file } => {
            let (g, _) = load(&file)?;
            let m = pairwise_base(&g)?;
            Ok(Outcome::ok(model_text(&m), model_json(&m)))
        }
        Command::Closure { file, emit_model } => {
            let (g, det) = load(&file)?;
            let result = closure(&pairwise_base(&g)?)?;
            let sep = enumerate_model(&g, Criterion::Mamp, &det, g.all())?;
            let diff = models_equal(&result.model, &sep, 10)?;
            let mut text = format!(
                "{} statements after {} iterations\nseparation model: {}\n",
                result.model.len(),
                result.iterations,
                if diff.equal { "equal" } else { "different" }
            );
            if !diff.equal {
                text += &diff.describe(&result.model);
            }
            let mut json = json!({
                "statements": result.model.len(),
                "iterations": result.iterations,
                "equals_separation_model": diff.equal,
            });
            if emit_model {
                text += &model_text(&result.model);
                json["model"] = model_json(&result.model);
            }
            Ok(Outcome::verdict(diff.equal, text, json))
        }
        Command::Audit {
            file,
            rules,
            criterion,
        } => {
            let (g, det) = load(&file)?;
            let m = enumerate_model(&g, criterion, &det, g.all())?;
            let violations = check_properties(&m, rules.rules())?;
            let mut text: String = violations.iter().map(|v| v.describe(&m) + "\n").collect();
            let names: Vec<String> = rules.rules().iter().map(|r| r.to_string()).collect();
            text += &format!(
                "{} violations of {} over {} statements\n",
                violations.len(),
                names.join(", "),
                m.len()
            );
            let json = json!({
                "rules": names,
                "statements": m.len(),
                "violations": violations.iter().map(|v| v.describe(&m)).collect::<Vec<_>>(),
            });
            Ok(Outcome::verdict(violations.is_empty(), text, json))
        }
        Command::Triplex { file } => {
            let (g, _) = load(&file)?;
            let ts = triplexes(&g)?;
            let list: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
            let text = list.iter().map(|t| format!("{t}\n")).collect();
            let json = ts
                .iter()
                .map(|t| json!({"endpoints": [t.endpoints.0, t.endpoints.1], "center": t.center}))
                .collect();
            Ok(Outcome::ok(text, json))
        }
        Command::Equiv {
            first,
            second,
            oracle,
        } => {
            let (g, _) = load(&first)?;
            let (h, _) = load(&second)?;
            let mode = if oracle {
                EquivalenceMode::Oracle
            } else {
                EquivalenceMode::Triplex
            };
            let same = markov_equivalent(&g, &h, mode)?;
            let verdict = if same { "equivalent" } else { "not equivalent" };
            let json = json!({ "equivalent": same, "oracle": oracle });
            Ok(Outcome::verdict(same, format!("{verdict}\n"), json))
        }
        Command::Class { file, emit_members } => {
            let (g, _) = load(&file)?;
            let class = triplex_class(&g)?;
            let mut text = format!("{} members\n", class.members.len());
            let members: Vec<String> = class.members.iter().map(|m| m.edge_list_string()).collect();
            let mut json = json!({ "size": class.members.len() });
            if emit_members {
                text += &members.iter().map(|m| format!("{m}\n")).collect::<String>();
                json["members"] = json!(members);
            }
            Ok(Outcome::ok(text, json))
        }
        Command::Maximal { file } => {
            let (g, _) = load(&file)?;
            let sets = maximal_sets(&triplex_class(&g)?)?;
            let show = |p: &std::collections::BTreeSet<(String, String)>, sym: &str| {
                p.iter()
                    .map(|(a, b)| format!("{a}{sym}{b}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let lines = |gs: &[MixedGraph]| -> String {
                gs.iter()
                    .map(|m| format!("  {}\n", m.edge_list_string()))
                    .collect()
            };
            let text = format!(
                "directed pairs: {}\nMDCGs:\n{}bidirected edges: {}\nMBMDCGs:\n{}",
                show(&sets.directed_pairs, "~"),
                lines(&sets.mdcgs),
                show(&sets.bidirected, "<->"),
                lines(&sets.mbmdcgs)
            );
            let json = json!({
                "directed_pairs": pairs_json(&sets.directed_pairs),
                "mdcgs": sets.mdcgs.iter().map(|m| m.edge_list_string()).collect::<Vec<_>>(),
                "bidirected": pairs_json(&sets.bidirected),
                "mbmdcgs": sets.mbmdcgs.iter().map(|m| m.edge_list_string()).collect::<Vec<_>>(),
            });
            Ok(Outcome::ok(text, json))
        }
        Command::Transform { file, kind } => {
            let (g, det) = load(&file)?;
            let (h, hdet) = transformed(g, det, kind)?;
            Ok(graph_text(&h, &hdet))
        }
        Command::Marginalize { file, nodes } => {
            let (g, det) = load(&file)?;
            let eg = marginalize(&error_graph(g, det)?, &nodes)?;
            Ok(graph_text(&eg.graph, &eg.det))
        }
        Command::Gaussian { file, seed, report } => {
            let (g, _) = load(&file)?;
            let th = CiThresholds::default();
            let audit = audit_faithfulness(&g, &th, &[seed])?;
            let json = serde_json::to_value(&audit).expect("audit serializes");
            let mut text = format!(
                "seed {seed}: {} separated (max |rho| {:.3e}, {} Markov failures), {} dependent ({} at or below {:.0e})\n",
                audit.separated_statements,
                audit.worst_separated_rho,
                audit.markov_failures.len(),
                audit.dependent_statements,
                audit.unexcused.len(),
                th.nonzero_floor,
            );
            for r in audit.markov_failures.iter().chain(&audit.unexcused) {
                text += &format!(
                    "  {} _||_ {} | {} rho={:.3e}\n",
                    r.x,
                    r.y,
                    r.z.join(","),
                    r.rho
                );
            }
            let mut out = Outcome::verdict(audit.passed(), text, json.clone());
            if let Some(Report::Json) = report {
                out.text = serde_json::to_string_pretty(&json).expect("audit serializes") + "\n";
            }
            Ok(out)
        }
        Command::Dot { file } => {
            let text = read_source(&file)?;
            let doc = mampcg::GraphDocument::parse(&text)?;
            let (g, _) = doc.to_graph()?;
            let name = doc.name.clone().unwrap_or_else(|| file.clone());
            let dot = to_dot(&g, &name);
            Ok(Outcome::ok(dot.clone(), json!({ "dot": dot })))
        }
    }
}
