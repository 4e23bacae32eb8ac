//! Error-node transforms and marginalization.
//!
//! Error nodes are named `eps_<source>`, selection nodes
//! `sel_<eps1>_<eps2>` with the pair in lexicographic order, and latent nodes
//! of the bidirected-edge lift `lat_<A>_<B>`.

use std::collections::BTreeMap;

use crate::error::{domain, Error, Result};
use crate::graph::{EdgeKind, Family, MixedGraph, NodeTag};
use crate::nodeset::NodeSet;
use crate::separation::DeterminationMap;

pub fn error_name(source: &str) -> String {
    format!("eps_{source}")
}

pub fn selection_name(eps_a: &str, eps_b: &str) -> String {
    if eps_a <= eps_b {
        format!("sel_{eps_a}_{eps_b}")
    } else {
        format!("sel_{eps_b}_{eps_a}")
    }
}

pub fn latent_name(a: &str, b: &str) -> String {
    if a <= b {
        format!("lat_{a}_{b}")
    } else {
        format!("lat_{b}_{a}")
    }
}

/// A graph augmented with error (and possibly selection) nodes, together with
/// the determination map those nodes induce.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorGraph {
    pub graph: MixedGraph,
    pub det: DeterminationMap,
    /// error node -> the node whose error it represents
    pub origin: BTreeMap<String, String>,
    /// transforms applied so far, oldest first
    pub provenance: Vec<String>,
}

impl ErrorGraph {
    /// Rebuilds an error graph from a parsed graph and determination map. The
    /// origin of an error node `eps_X` is `X` when `eps_X -> X` is in the graph.
    pub fn from_parts(graph: MixedGraph, det: DeterminationMap) -> Result<Self> {
        det.bind(&graph)?;
        let mut origin = BTreeMap::new();
        for e in graph.nodes_tagged(NodeTag::Error).iter() {
            let name = graph.name(e);
            if let Some(src) = name.strip_prefix("eps_") {
                if let Ok(s) = graph.index_of(src) {
                    if graph.children(e).contains(s) {
                        origin.insert(name.to_string(), src.to_string());
                    }
                }
            }
        }
        Ok(ErrorGraph {
            graph,
            det,
            origin,
            provenance: vec!["loaded".to_string()],
        })
    }

    pub fn error_nodes(&self) -> NodeSet {
        self.graph.nodes_tagged(NodeTag::Error)
    }

    pub fn selection_nodes(&self) -> NodeSet {
        self.graph.nodes_tagged(NodeTag::Selection)
    }

    /// Nodes that are neither error nor selection nodes.
    pub fn original_nodes(&self) -> NodeSet {
        self.graph.nodes_tagged(NodeTag::Plain)
    }

    pub fn error_names(&self) -> Vec<String> {
        self.graph.names_of(self.error_nodes())
    }

    pub fn selection_names(&self) -> Vec<String> {
        self.graph.names_of(self.selection_nodes())
    }
}

/// Adds `eps_A -> A` for every node and moves the edges of the lifted kinds
/// onto the error layer.
fn lift(g: &MixedGraph, lifted: &[EdgeKind], name: &str) -> Result<ErrorGraph> {
    for v in 0..g.n() {
        if g.tag(v) != NodeTag::Plain {
            return domain(format!(
                "`{}` is already an error or selection node",
                g.name(v)
            ));
        }
        let eps = error_name(g.name(v));
        if g.contains_node(&eps) {
            return domain(format!(
                "node name `{eps}` is reserved for the error of `{}`",
                g.name(v)
            ));
        }
    }
    let mut b = g.to_builder();
    let mut origin = BTreeMap::new();
    for v in g.names() {
        let eps = error_name(v);
        b.add_tagged(&eps, NodeTag::Error)?;
        b.add_edge(&eps, v, EdgeKind::Directed)?;
        origin.insert(eps, v.clone());
    }
    for e in g.edges().iter().filter(|e| lifted.contains(&e.kind)) {
        let (a, c) = (g.name(e.from), g.name(e.to));
        b.remove_edge(a, c);
        b.add_edge(&error_name(a), &error_name(c), e.kind)?;
    }
    let graph = b.build()?;
    let mut det = DeterminationMap::new();
    for v in g.names() {
        let eps = error_name(v);
        let pa = graph
            .parents(graph.index_of(v)?)
            .without(graph.index_of(&eps)?);
        let mut determiners = graph.names_of(pa);
        determiners.push(v.clone());
        det.insert(&eps, determiners)?;
    }
    Ok(ErrorGraph {
        graph,
        det,
        origin,
        provenance: vec![name.to_string()],
    })
}

/// AMP CG `G` to its EAMP CG `G'`: error nodes for every node and every
/// undirected edge moved onto the error nodes.
pub fn eampify(g: &MixedGraph) -> Result<ErrorGraph> {
    g.validate(Family::Amp).into_result()?;
    let out = lift(g, &[EdgeKind::Undirected], "eampify")?;
    out.graph.validate(Family::Amp).into_result()?;
    Ok(out)
}

/// MAMP CG `G` to its EMAMP CG `G'`: as [`eampify`], lifting both undirected
/// and bidirected edges with their kind preserved.
pub fn emampify(g: &MixedGraph) -> Result<ErrorGraph> {
    g.validate(Family::Mamp).into_result()?;
    let out = lift(g, &[EdgeKind::Undirected, EdgeKind::Bidirected], "emampify")?;
    out.graph.validate(Family::Mamp).into_result()?;
    Ok(out)
}

/// EAMP CG `G'` to the DAG `G''`: every `eps_A - eps_B` becomes
/// `eps_A -> sel_eps_A_eps_B <- eps_B`.
pub fn selectionize(eg: &ErrorGraph) -> Result<ErrorGraph> {
    let g = &eg.graph;
    let mut b = g.to_builder();
    for e in g.edges() {
        match e.kind {
            EdgeKind::Directed => continue,
            EdgeKind::Bidirected => {
                return domain(
                    "selection nodes replace undirected edges only; found a bidirected edge",
                )
            }
            EdgeKind::Undirected => {}
        }
        let (a, c) = (g.name(e.from), g.name(e.to));
        if g.tag(e.from) != NodeTag::Error || g.tag(e.to) != NodeTag::Error {
            return domain(format!(
                "undirected edge {a} -- {c} touches a non-error node"
            ));
        }
        let sel = selection_name(a, c);
        if b.has_node(&sel) {
            return domain(format!("node name `{sel}` already in use"));
        }
        b.remove_edge(a, c);
        b.add_tagged(&sel, NodeTag::Selection)?;
        b.add_edge(a, &sel, EdgeKind::Directed)?;
        b.add_edge(c, &sel, EdgeKind::Directed)?;
    }
    let graph = b.build()?;
    graph.validate(Family::Dag).into_result()?;
    let mut provenance = eg.provenance.clone();
    provenance.push("selectionize".to_string());
    Ok(ErrorGraph {
        graph,
        det: eg.det.clone(),
        origin: eg.origin.clone(),
        provenance,
    })
}

/// `[G']_L`: each node `B` of `L` passes its parents on to its children and is
/// removed. The result does not depend on the order in which `L` is visited.
pub fn marginalize<S: AsRef<str>>(eg: &ErrorGraph, nodes: &[S]) -> Result<ErrorGraph> {
    let mut names: Vec<&str> = nodes.iter().map(AsRef::as_ref).collect();
    names.sort_unstable();
    names.dedup();
    for &n in &names {
        let i = eg.graph.index_of(n)?;
        if eg.graph.tag(i) != NodeTag::Plain {
            return domain(format!(
                "`{n}` is an error or selection node and cannot be marginalized"
            ));
        }
    }
    let mut cur = eg.graph.clone();
    for &n in &names {
        let bi = cur.index_of(n)?;
        let mut b = cur.to_builder();
        for a in cur.parents(bi).iter() {
            for c in cur.children(bi).iter() {
                let (an, cn) = (cur.name(a), cur.name(c));
                match b.edge(an, cn) {
                    None => {
                        b.add_edge(an, cn, EdgeKind::Directed)?;
                    }
                    Some((from, _, EdgeKind::Directed)) if from == an => {}
                    Some(_) => {
                        return Err(Error::Domain(format!(
                            "cannot add {an} -> {cn}: the pair already has an incompatible edge"
                        )))
                    }
                }
            }
        }
        b.remove_node(n);
        cur = b.build()?;
    }
    cur.validate(Family::Mamp).into_result()?;
    let mut det = eg.det.clone();
    det.retain(|t, d| !names.contains(&t) && !d.iter().any(|x| names.contains(&x.as_str())));
    let mut origin = eg.origin.clone();
    origin.retain(|_, src| !names.contains(&src.as_str()));
    let mut provenance = eg.provenance.clone();
    provenance.push(format!("marginalize({})", names.join(",")));
    Ok(ErrorGraph {
        graph: cur,
        det,
        origin,
        provenance,
    })
}

/// The AMP CG obtained by replacing each `A <-> B` with `A <- lat_A_B -> B`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentLift {
    pub graph: MixedGraph,
    pub latents: Vec<String>,
}

pub fn latent_lift(g: &MixedGraph) -> Result<LatentLift> {
    g.validate(Family::Mamp).into_result()?;
    let mut b = g.to_builder();
    let mut latents = Vec::new();
    for e in g.edges().iter().filter(|e| e.kind == EdgeKind::Bidirected) {
        let (a, c) = (g.name(e.from), g.name(e.to));
        let l = latent_name(a, c);
        if b.has_node(&l) {
            return domain(format!("node name `{l}` already in use"));
        }
        b.remove_edge(a, c);
        b.add_edge(&l, a, EdgeKind::Directed)?;
        b.add_edge(&l, c, EdgeKind::Directed)?;
        latents.push(l);
    }
    let graph = b.build()?;
    graph.validate(Family::Amp).into_result()?;
    latents.sort();
    Ok(LatentLift { graph, latents })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn g(s: &str) -> MixedGraph {
        MixedGraph::from_edge_list(s).unwrap()
    }

    fn edge_set(g: &MixedGraph) -> BTreeSet<String> {
        g.edges()
            .iter()
            .map(|e| format!("{}{}{}", g.name(e.from), e.kind.symbol(), g.name(e.to)))
            .collect()
    }

    fn set_of(items: &str) -> BTreeSet<String> {
        items.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn single_undirected_edge_is_lifted() {
        let out = eampify(&g("A--B")).unwrap();
        assert_eq!(
            edge_set(&out.graph),
            set_of("eps_A->A eps_B->B eps_A--eps_B")
        );
        assert_eq!(
            out.det.get("eps_A").unwrap().iter().collect::<Vec<_>>(),
            ["A"]
        );
        assert_eq!(out.origin["eps_B"], "B");
    }

    #[test]
    fn directed_only_input_only_gains_error_edges() {
        let src = g("A->B");
        let out = eampify(&src).unwrap();
        assert_eq!(edge_set(&out.graph), set_of("A->B eps_A->A eps_B->B"));
        assert_eq!(
            out.det.get("eps_B").unwrap().iter().collect::<Vec<_>>(),
            ["A", "B"]
        );
        assert_eq!(emampify(&src).unwrap().graph, out.graph);
        // no undirected edges, so no selection nodes
        assert_eq!(selectionize(&out).unwrap().graph, out.graph);
    }

    #[test]
    fn emampify_keeps_bidirected_kind() {
        let out = emampify(&g("A<->B")).unwrap();
        assert_eq!(
            edge_set(&out.graph),
            set_of("eps_A->A eps_B->B eps_A<->eps_B")
        );
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(
            eampify(&g("A<->B")),
            Err(Error::InvalidFamily { .. })
        ));
        let motiv = g("A--B B--C C--D D--E A<->D B<->E C<->F");
        assert!(emampify(&motiv).is_err());
        assert!(latent_lift(&motiv).is_err());
        assert!(eampify(&g("A->B eps_A")).is_err());
    }

    #[test]
    fn shared_error_node_gets_two_selection_children() {
        let out = selectionize(&eampify(&g("C--D C--E")).unwrap()).unwrap();
        let gr = &out.graph;
        let c = gr.index_of("eps_C").unwrap();
        assert_eq!(
            gr.names_of(gr.children(c)),
            ["C", "sel_eps_C_eps_D", "sel_eps_C_eps_E"]
        );
        assert_eq!(out.selection_names().len(), 2);
    }

    #[test]
    fn selectionize_rejects_plain_undirected_edges() {
        let eg = ErrorGraph::from_parts(g("A--B"), DeterminationMap::new()).unwrap();
        assert!(selectionize(&eg).is_err());
    }

    #[test]
    fn marginalize_identity_and_childless() {
        let eg = emampify(&g("A->B B->C D<->C")).unwrap();
        let same = marginalize(&eg, &[] as &[&str]).unwrap();
        assert_eq!(same.graph, eg.graph);

        // B -> C: children inherit parents
        let out = marginalize(&eg, &["B"]).unwrap();
        assert!(edge_set(&out.graph).contains("A->C"));
        assert!(edge_set(&out.graph).contains("eps_B->C"));
        assert!(out.det.get("eps_B").is_none());
        assert!(out.det.get("eps_C").is_none());
        assert!(out.det.get("eps_A").is_some());

        // C is childless: nothing added
        let out = marginalize(&eg, &["C"]).unwrap();
        assert_eq!(out.graph.edges().len(), eg.graph.edges().len() - 2);
        assert!(out.graph.contains_node("eps_C"));
        assert!(marginalize(&eg, &["eps_A"]).is_err());
        assert!(marginalize(&eg, &["Q"]).is_err());
    }

    #[test]
    fn latent_lift_examples() {
        let ex4 = g("A->B B--C B--D C<->E D<->E");
        let lift = latent_lift(&ex4).unwrap();
        assert_eq!(lift.latents, ["lat_C_E", "lat_D_E"]);
        assert!(edge_set(&lift.graph).contains("lat_C_E->C"));
        let plain = g("A->B B--C");
        assert_eq!(latent_lift(&plain).unwrap().graph, plain);
    }

    #[test]
    fn from_parts_recovers_origin() {
        let eg = emampify(&g("A->B A--C")).unwrap();
        let back = ErrorGraph::from_parts(eg.graph.clone(), eg.det.clone()).unwrap();
        assert_eq!(back.origin, eg.origin);
    }
}
