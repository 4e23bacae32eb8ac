//! Line-oriented graph text format and DOT export.
//!
//! ```text
//! # comment
//! name fig2
//! node F
//! node eps_A error
//! edge A -> B
//! edge C -- D
//! edge D <-> F
//! det eps_A <- A
//! ```
//!
//! Nodes named in edges are declared implicitly. `name` is optional and may
//! appear once, before any other directive.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{EdgeKind, GraphBuilder, MixedGraph, NodeTag};
use crate::separation::DeterminationMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Node {
        name: String,
        tag: NodeTag,
    },
    Edge {
        a: String,
        kind: EdgeKind,
        b: String,
    },
    Det {
        target: String,
        sources: Vec<String>,
    },
}

/// A parsed document. Equality ignores source lines.
#[derive(Debug, Clone, Default)]
pub struct GraphDocument {
    pub name: Option<String>,
    pub directives: Vec<Directive>,
    /// 1-based source line of each directive
    pub lines: Vec<usize>,
}

impl PartialEq for GraphDocument {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.directives == other.directives
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | ':' | '\''))
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn name_at(tok: (usize, &str), line: usize) -> Result<String> {
    if valid_name(tok.1) {
        Ok(tok.1.to_string())
    } else {
        Err(parse_err(
            line,
            tok.0,
            format!("invalid node name `{}`", tok.1),
        ))
    }
}

impl GraphDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = GraphDocument::default();
        let mut declared: BTreeSet<String> = BTreeSet::new();
        let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
        let mut pending_det: Vec<(usize, usize, String)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let content = raw.split('#').next().unwrap_or("");
            let toks = tokens(content);
            let Some(&(col, head)) = toks.first() else {
                continue;
            };
            let directive = match head {
                "name" => {
                    if toks.len() != 2 {
                        return Err(parse_err(ln, col, "expected `name <text>`"));
                    }
                    if doc.name.is_some() || !doc.directives.is_empty() {
                        return Err(parse_err(ln, col, "`name` must come first and only once"));
                    }
                    doc.name = Some(toks[1].1.to_string());
                    continue;
                }
                "node" => {
                    let tag = match toks.len() {
                        2 => NodeTag::Plain,
                        3 => match toks[2].1 {
                            "error" => NodeTag::Error,
                            "selection" => NodeTag::Selection,
                            other => {
                                return Err(parse_err(
                                    ln,
                                    toks[2].0,
                                    format!("unknown node tag `{other}`"),
                                ))
                            }
                        },
                        _ => {
                            return Err(parse_err(
                                ln,
                                col,
                                "expected `node <name> [error|selection]`",
                            ))
                        }
                    };
                    let name = name_at(toks[1], ln)?;
                    declared.insert(name.clone());
                    Directive::Node { name, tag }
                }
                "edge" => {
                    if toks.len() != 4 {
                        return Err(parse_err(ln, col, "expected `edge <A> <op> <B>`"));
                    }
                    let a = name_at(toks[1], ln)?;
                    let b = name_at(toks[3], ln)?;
                    let kind = match toks[2].1 {
                        "->" => EdgeKind::Directed,
                        "--" => EdgeKind::Undirected,
                        "<->" => EdgeKind::Bidirected,
                        other => {
                            return Err(parse_err(
                                ln,
                                toks[2].0,
                                format!("unknown edge operator `{other}`"),
                            ))
                        }
                    };
                    if a == b {
                        return Err(parse_err(ln, toks[3].0, "self-loop"));
                    }
                    let key = if a < b {
                        (a.clone(), b.clone())
                    } else {
                        (b.clone(), a.clone())
                    };
                    if !pairs.insert(key) {
                        return Err(parse_err(
                            ln,
                            col,
                            format!("duplicate edge between {a} and {b}"),
                        ));
                    }
                    declared.insert(a.clone());
                    declared.insert(b.clone());
                    Directive::Edge { a, kind, b }
                }
                "det" => {
                    if toks.len() < 4 || toks[2].1 != "<-" {
                        return Err(parse_err(ln, col, "expected `det <T> <- <S1>,<S2>,...`"));
                    }
                    let target = name_at(toks[1], ln)?;
                    let list_col = toks[3].0;
                    let joined: String = toks[3..].iter().map(|t| t.1).collect();
                    let mut sources = Vec::new();
                    for s in joined.split(',') {
                        if !valid_name(s) {
                            return Err(parse_err(
                                ln,
                                list_col,
                                format!("invalid determiner `{s}`"),
                            ));
                        }
                        sources.push(s.to_string());
                    }
                    pending_det.push((ln, toks[1].0, target.clone()));
                    for s in &sources {
                        pending_det.push((ln, list_col, s.clone()));
                    }
                    Directive::Det { target, sources }
                }
                other => return Err(parse_err(ln, col, format!("unknown directive `{other}`"))),
            };
            doc.directives.push(directive);
            doc.lines.push(ln);
        }
        for (ln, col, name) in pending_det {
            if !declared.contains(&name) {
                return Err(parse_err(
                    ln,
                    col,
                    format!("det refers to unknown node `{name}`"),
                ));
            }
        }
        Ok(doc)
    }

    fn line_of(&self, i: usize) -> usize {
        self.lines.get(i).copied().unwrap_or(i + 1)
    }

    pub fn to_graph(&self) -> Result<(MixedGraph, DeterminationMap)> {
        let mut b = GraphBuilder::default();
        let mut det = DeterminationMap::new();
        let located = |i: usize, e: Error| match e {
            Error::Parse { .. } => e,
            other => parse_err(self.line_of(i), 1, other.to_string()),
        };
        for (i, d) in self.directives.iter().enumerate() {
            match d {
                Directive::Node { name, tag } => {
                    b.add_tagged(name, *tag).map_err(|e| located(i, e))?;
                }
                Directive::Edge { a, kind, b: c } => {
                    b.add_edge(a, c, *kind).map_err(|e| located(i, e))?;
                }
                Directive::Det { target, sources } => {
                    det.insert(target, sources.iter().cloned())
                        .map_err(|e| located(i, e))?;
                }
            }
        }
        let g = b.build()?;
        Ok((g, det))
    }

    /// A document listing tagged and isolated nodes, then edges in graph
    /// order, then determinations.
    pub fn from_graph(g: &MixedGraph, det: &DeterminationMap, name: Option<&str>) -> Self {
        let mut directives = Vec::new();
        for v in 0..g.n() {
            if g.tag(v) != NodeTag::Plain || g.adjacents(v).is_empty() {
                directives.push(Directive::Node {
                    name: g.name(v).to_string(),
                    tag: g.tag(v),
                });
            }
        }
        for e in g.edges() {
            directives.push(Directive::Edge {
                a: g.name(e.from).to_string(),
                kind: e.kind,
                b: g.name(e.to).to_string(),
            });
        }
        for d in det.entries() {
            directives.push(Directive::Det {
                target: d.target,
                sources: d.determiners.into_iter().collect(),
            });
        }
        let lines = (1..=directives.len()).collect();
        GraphDocument {
            name: name.map(str::to_string),
            directives,
            lines,
        }
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if let Some(n) = &self.name {
            writeln!(out, "name {n}").unwrap();
        }
        for d in &self.directives {
            match d {
                Directive::Node { name, tag } => match tag {
                    NodeTag::Plain => writeln!(out, "node {name}"),
                    NodeTag::Error => writeln!(out, "node {name} error"),
                    NodeTag::Selection => writeln!(out, "node {name} selection"),
                }
                .unwrap(),
                Directive::Edge { a, kind, b } => {
                    writeln!(out, "edge {a} {} {b}", kind.symbol()).unwrap()
                }
                Directive::Det { target, sources } => {
                    writeln!(out, "det {target} <- {}", sources.join(",")).unwrap()
                }
            }
        }
        out
    }
}

/// Parses a document straight into a graph and its determination map.
pub fn parse_graph(text: &str) -> Result<(MixedGraph, DeterminationMap)> {
    GraphDocument::parse(text)?.to_graph()
}

pub fn serialize_graph(g: &MixedGraph, det: &DeterminationMap) -> String {
    GraphDocument::from_graph(g, det, None).serialize()
}

/// Graphviz rendering; undirected edges use `dir=none`, bidirected `dir=both`.
pub fn to_dot(g: &MixedGraph, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", name.replace('"', "\\\"")).unwrap();
    for v in 0..g.n() {
        let attrs = match g.tag(v) {
            NodeTag::Plain => "",
            NodeTag::Error => " [style=dashed]",
            NodeTag::Selection => " [shape=box]",
        };
        writeln!(out, "  \"{}\"{attrs};", g.name(v)).unwrap();
    }
    for e in g.edges() {
        let attrs = match e.kind {
            EdgeKind::Directed => "",
            EdgeKind::Undirected => " [dir=none]",
            EdgeKind::Bidirected => " [dir=both]",
        };
        writeln!(
            out,
            "  \"{}\" -> \"{}\"{attrs};",
            g.name(e.from),
            g.name(e.to)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let (g, det) = parse_graph("edge A -> B").unwrap();
        assert_eq!(g.names(), ["A", "B"]);
        assert_eq!(g.edge_list_string(), "A->B");
        assert!(det.is_empty());
    }

    #[test]
    fn duplicate_edge_reports_line() {
        let err = parse_graph("edge A -> B\nedge A -- B").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = parse_graph("edge A -> B\nedge B -> A").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn syntax_errors_have_columns() {
        match parse_graph("edge A => B").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (1, 8)),
            e => panic!("{e:?}"),
        }
        assert!(parse_graph("frob A").is_err());
        assert!(parse_graph("node A weird").is_err());
        assert!(parse_graph("edge A -> A").is_err());
    }

    #[test]
    fn det_requires_known_nodes() {
        let err = parse_graph("edge A -> B\ndet eps_B <- A,Q").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let (_, det) =
            parse_graph("node e error\nedge e -> B\nedge A -> B\ndet e <- A, B").unwrap();
        assert_eq!(det.get("e").unwrap().len(), 2);
    }

    #[test]
    fn comments_tags_and_name() {
        let text = "# header\nname demo\nnode e error  # trailing\nnode S selection\nedge e -> S\nnode Q\n";
        let doc = GraphDocument::parse(text).unwrap();
        assert_eq!(doc.name.as_deref(), Some("demo"));
        assert_eq!(doc.lines, [3, 4, 5, 6]);
        let (g, _) = doc.to_graph().unwrap();
        assert_eq!(g.tag(g.index_of("e").unwrap()), NodeTag::Error);
        assert!(g.contains_node("Q"));
        assert_eq!(GraphDocument::parse(&doc.serialize()).unwrap(), doc);
    }

    #[test]
    fn serialization_round_trip() {
        let (g, det) = parse_graph(
            "node eps_A error\nedge eps_A -> A\nedge A -- B\nedge C <-> B\nnode Z\ndet eps_A <- A",
        )
        .unwrap();
        let text = serialize_graph(&g, &det);
        let (g2, det2) = parse_graph(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(det, det2);
        assert_eq!(serialize_graph(&g2, &det2), text);
    }

    #[test]
    fn dot_output() {
        let (g, _) = parse_graph("edge A -> B\nedge B -- C\nedge C <-> D").unwrap();
        let dot = to_dot(&g, "g");
        assert!(dot.contains("\"A\" -> \"B\";"));
        assert!(dot.contains("\"B\" -> \"C\" [dir=none];"));
        assert!(dot.contains("\"C\" -> \"D\" [dir=both];"));
        assert!(dot.starts_with("digraph \"g\" {") && dot.ends_with("}\n"));
    }
}
