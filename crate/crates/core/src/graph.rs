//! Mixed graphs with undirected, directed and bidirected edges.
//!
//! A [`MixedGraph`] is immutable once built. Nodes are stored in lexicographic
//! order of their names, so node indices, [`NodeSet`] iteration and every
//! report derived from them are reproducible.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodeset::{NodeSet, MAX_NODES};

/// Marker carried by nodes introduced by the error-node transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeTag {
    Plain,
    Error,
    Selection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Undirected,
    Directed,
    Bidirected,
}

impl EdgeKind {
    pub fn symbol(self) -> &'static str {
        match self {
            EdgeKind::Undirected => "--",
            EdgeKind::Directed => "->",
            EdgeKind::Bidirected => "<->",
        }
    }
}

/// An edge between two node indices. Directed edges point `from -> to`;
/// symmetric edges are normalized so that `from < to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

/// How an edge looks from one of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    /// `a - b`
    Undirected,
    /// `a -> b`
    Out,
    /// `a <- b`
    In,
    /// `a <-> b`
    Bidirected,
}

impl Link {
    /// Whether the edge has an arrowhead at the near endpoint.
    #[inline]
    pub fn head_here(self) -> bool {
        matches!(self, Link::In | Link::Bidirected)
    }

    /// Whether the near endpoint is the tail of a directed edge.
    #[inline]
    pub fn tail_here(self) -> bool {
        self == Link::Out
    }

    /// Whether the edge can be followed forward along a descending route.
    #[inline]
    pub fn descending(self) -> bool {
        !matches!(self, Link::In)
    }

    pub fn reversed(self) -> Link {
        match self {
            Link::Out => Link::In,
            Link::In => Link::Out,
            l => l,
        }
    }
}

/// Neighborhood relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Parents,
    Children,
    Neighbors,
    Spouses,
    Adjacents,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reach {
    Descendants,
    NonDescendants,
    StrictAscendants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    /// Connected through undirected or bidirected edges.
    Connectivity,
    /// Connected through undirected edges only.
    Undirected,
}

/// Graph families that [`MixedGraph::validate`] can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Mamp,
    Amp,
    Mvr,
    Lwf,
    Dag,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Mamp => "MAMP",
            Family::Amp => "AMP",
            Family::Mvr => "MVR",
            Family::Lwf => "LWF",
            Family::Dag => "DAG",
        })
    }
}

impl Family {
    pub fn allows(self, kind: EdgeKind) -> bool {
        match self {
            Family::Mamp => true,
            Family::Amp | Family::Lwf => kind != EdgeKind::Bidirected,
            Family::Mvr => kind != EdgeKind::Undirected,
            Family::Dag => kind == EdgeKind::Directed,
        }
    }
}

/// The constraint a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Constraint {
    /// Semidirected cycle.
    C1,
    /// Cycle made of one bidirected edge closed by undirected edges.
    C2,
    /// `V1 - V2 - V3` with `sp(V2)` nonempty and no `V1 - V3`.
    C3,
    /// An edge of a kind the family does not allow.
    ForbiddenEdge(EdgeKind),
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::C1 => f.write_str("C1"),
            Constraint::C2 => f.write_str("C2"),
            Constraint::C3 => f.write_str("C3"),
            Constraint::ForbiddenEdge(k) => write!(f, "forbidden-edge({})", k.symbol()),
        }
    }
}

/// One constraint violation with a node sequence that exhibits it.
///
/// Witness shapes: C1 and C2 carry a closed cycle `[V1, V2, .., V1]`, C3 the
/// triple `[V1, V2, V3]`, and forbidden edges the endpoint pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub witness: Vec<String>,
}

impl Violation {
    /// Checks the witness against `g`: true iff it really exhibits the violation.
    pub fn replay(&self, g: &MixedGraph) -> bool {
        let Ok(w) = self
            .witness
            .iter()
            .map(|n| g.index_of(n))
            .collect::<Result<Vec<_>>>()
        else {
            return false;
        };
        let steps_ok = |from: usize, pred: &dyn Fn(Link) -> bool| {
            w[from..]
                .windows(2)
                .all(|p| g.link(p[0], p[1]).is_some_and(pred))
        };
        match self.constraint {
            Constraint::C1 => {
                w.len() >= 3
                    && w.first() == w.last()
                    && g.link(w[0], w[1]) == Some(Link::Out)
                    && steps_ok(1, &|l| l.descending())
            }
            Constraint::C2 => {
                w.len() >= 4
                    && w.first() == w.last()
                    && g.link(w[0], w[1]) == Some(Link::Bidirected)
                    && steps_ok(1, &|l| l == Link::Undirected)
            }
            Constraint::C3 => {
                w.len() == 3
                    && w[0] != w[2]
                    && g.link(w[0], w[1]) == Some(Link::Undirected)
                    && g.link(w[1], w[2]) == Some(Link::Undirected)
                    && !g.spouses(w[1]).is_empty()
                    && g.link(w[0], w[2]) != Some(Link::Undirected)
            }
            Constraint::ForbiddenEdge(kind) => {
                w.len() == 2 && g.edge_kind(w[0], w[1]) == Some(kind)
            }
        }
    }
}

/// Outcome of [`MixedGraph::validate`]. Empty iff the graph belongs to the family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub family: Family,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, c: Constraint) -> bool {
        self.violations.iter().any(|v| v.constraint == c)
    }

    /// Turns a non-empty report into an [`Error::InvalidFamily`].
    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            return Ok(());
        }
        let summary = self
            .violations
            .iter()
            .take(3)
            .map(|v| format!("{} at {}", v.constraint, v.witness.join(" ")))
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::InvalidFamily {
            family: self.family,
            summary,
        })
    }
}

/// A simple graph with undirected, directed and bidirected edges.
#[derive(Clone, PartialEq, Eq)]
pub struct MixedGraph {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    tags: Vec<NodeTag>,
    edges: Vec<Edge>,
    links: Vec<Option<Link>>,
    pa: Vec<NodeSet>,
    ch: Vec<NodeSet>,
    ne: Vec<NodeSet>,
    sp: Vec<NodeSet>,
}

impl fmt::Debug for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedGraph[{}]", self.edge_list_string())
    }
}

impl MixedGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    /// Builds a graph from a compact list such as `"A->B B--C C<->D E"`.
    /// Tokens are separated by whitespace or commas; a bare name declares an
    /// isolated node.
    pub fn from_edge_list(s: &str) -> Result<Self> {
        let mut b = GraphBuilder::default();
        for tok in s.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                continue;
            }
            let parsed = [
                ("<->", EdgeKind::Bidirected),
                ("->", EdgeKind::Directed),
                ("--", EdgeKind::Undirected),
                ("<-", EdgeKind::Directed),
            ]
            .iter()
            .find_map(|(sym, kind)| tok.split_once(sym).map(|(a, c)| (*sym, *kind, a, c)));
            match parsed {
                Some(("<-", kind, a, c)) => b.add_edge(c, a, kind)?,
                Some((_, kind, a, c)) => b.add_edge(a, c, kind)?,
                None => b.add_node(tok),
            };
        }
        b.build()
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn all(&self) -> NodeSet {
        NodeSet::full(self.n())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn tag(&self, i: usize) -> NodeTag {
        self.tags[i]
    }

    pub fn nodes_tagged(&self, tag: NodeTag) -> NodeSet {
        (0..self.n()).filter(|&i| self.tags[i] == tag).collect()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn contains_node(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Resolves node names into a set.
    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<NodeSet> {
        names
            .iter()
            .map(|n| self.index_of(n.as_ref()))
            .collect::<Result<NodeSet>>()
    }

    pub fn names_of(&self, s: NodeSet) -> Vec<String> {
        s.iter().map(|i| self.names[i].clone()).collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The edge between `a` and `b` as seen from `a`.
    #[inline]
    pub fn link(&self, a: usize, b: usize) -> Option<Link> {
        self.links[a * self.n() + b]
    }

    pub fn edge_kind(&self, a: usize, b: usize) -> Option<EdgeKind> {
        self.link(a, b).map(|l| match l {
            Link::Undirected => EdgeKind::Undirected,
            Link::Out | Link::In => EdgeKind::Directed,
            Link::Bidirected => EdgeKind::Bidirected,
        })
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.link(a, b).is_some()
    }

    #[inline]
    pub fn parents(&self, i: usize) -> NodeSet {
        self.pa[i]
    }

    #[inline]
    pub fn children(&self, i: usize) -> NodeSet {
        self.ch[i]
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> NodeSet {
        self.ne[i]
    }

    #[inline]
    pub fn spouses(&self, i: usize) -> NodeSet {
        self.sp[i]
    }

    #[inline]
    pub fn adjacents(&self, i: usize) -> NodeSet {
        self.pa[i]
            .union(self.ch[i])
            .union(self.ne[i])
            .union(self.sp[i])
    }

    /// `pa`, `ch`, `ne`, `sp` or `ad` of a node set; never contains members of `x`.
    pub fn neighborhood(&self, x: NodeSet, rel: Relation) -> NodeSet {
        let per_node = |i: usize| match rel {
            Relation::Parents => self.pa[i],
            Relation::Children => self.ch[i],
            Relation::Neighbors => self.ne[i],
            Relation::Spouses => self.sp[i],
            Relation::Adjacents => self.adjacents(i),
        };
        x.iter()
            .fold(NodeSet::EMPTY, |acc, i| acc.union(per_node(i)))
            .minus(x)
    }

    pub fn reachable(&self, x: NodeSet, kind: Reach) -> NodeSet {
        match kind {
            Reach::Descendants => self.descendants(x),
            Reach::NonDescendants => self.all().minus(x).minus(self.descendants(x)),
            Reach::StrictAscendants => self.strict_ascendants(x),
        }
    }

    /// Nodes reachable from `x` along descending routes (`->`, `-`, `<->`), minus `x`.
    pub fn descendants(&self, x: NodeSet) -> NodeSet {
        self.closure(x, |i| self.ch[i].union(self.ne[i]).union(self.sp[i]))
            .minus(x)
    }

    /// Nodes with a strictly descending route (`->` only) into `x`, minus `x`.
    pub fn strict_ascendants(&self, x: NodeSet) -> NodeSet {
        self.closure(x, |i| self.pa[i]).minus(x)
    }

    fn closure(&self, start: NodeSet, step: impl Fn(usize) -> NodeSet) -> NodeSet {
        let mut seen = start;
        let mut frontier = start;
        while !frontier.is_empty() {
            let next = frontier
                .iter()
                .fold(NodeSet::EMPTY, |acc, i| acc.union(step(i)))
                .minus(seen);
            seen = seen.union(next);
            frontier = next;
        }
        seen
    }

    /// Partition of the nodes, sorted by smallest member.
    pub fn components(&self, kind: ComponentKind) -> Vec<NodeSet> {
        let mut left = self.all();
        let mut out = Vec::new();
        while let Some(i) = left.min() {
            let comp = self.closure(NodeSet::singleton(i), |v| match kind {
                ComponentKind::Connectivity => self.ne[v].union(self.sp[v]),
                ComponentKind::Undirected => self.ne[v],
            });
            left = left.minus(comp);
            out.push(comp);
        }
        out
    }

    /// The undirected connectivity component containing `i`.
    pub fn undirected_component(&self, i: usize) -> NodeSet {
        self.closure(NodeSet::singleton(i), |v| self.ne[v])
    }

    /// Connectivity components in topological order with respect to directed
    /// edges; ties go to the component with the smallest member.
    pub fn component_order(&self) -> Result<Vec<NodeSet>> {
        let comps = self.components(ComponentKind::Connectivity);
        let mut comp_of = vec![0usize; self.n()];
        for (c, set) in comps.iter().enumerate() {
            for v in set.iter() {
                comp_of[v] = c;
            }
        }
        let k = comps.len();
        let mut succ = vec![Vec::new(); k];
        let mut indeg = vec![0usize; k];
        for e in self.edges.iter().filter(|e| e.kind == EdgeKind::Directed) {
            let (a, b) = (comp_of[e.from], comp_of[e.to]);
            if a == b {
                return Err(Error::Cycle(self.c1_witness_names(e.from, e.to)));
            }
            succ[a].push(b);
            indeg[b] += 1;
        }
        // components are indexed by smallest member, so a min-heap on the
        // index is the lexicographic tie-break
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..k)
            .filter(|&c| indeg[c] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut order = Vec::with_capacity(k);
        while let Some(std::cmp::Reverse(c)) = ready.pop() {
            order.push(comps[c]);
            for &d in &succ[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    ready.push(std::cmp::Reverse(d));
                }
            }
        }
        if order.len() < k {
            let e = self
                .edges
                .iter()
                .find(|e| e.kind == EdgeKind::Directed && indeg[comp_of[e.to]] > 0)
                .expect("a blocked component has an incoming directed edge");
            return Err(Error::Cycle(self.c1_witness_names(e.from, e.to)));
        }
        Ok(order)
    }

    /// The subgraph over `x` keeping exactly the edges with both ends in `x`.
    pub fn induced_subgraph(&self, x: NodeSet) -> MixedGraph {
        let mut b = GraphBuilder::default();
        for v in x.iter() {
            b.add_tagged(&self.names[v], self.tags[v])
                .expect("tags copied from a valid graph");
        }
        for e in &self.edges {
            if x.contains(e.from) && x.contains(e.to) {
                b.add_edge(&self.names[e.from], &self.names[e.to], e.kind)
                    .expect("edges copied from a simple graph");
            }
        }
        b.build().expect("subgraph of a valid graph")
    }

    /// A builder pre-loaded with this graph, for graph surgery.
    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = GraphBuilder::default();
        for (i, n) in self.names.iter().enumerate() {
            b.nodes.insert(n.clone(), self.tags[i]);
        }
        for e in &self.edges {
            b.edges.insert(
                GraphBuilder::key(&self.names[e.from], &self.names[e.to]),
                (self.names[e.from].clone(), self.names[e.to].clone(), e.kind),
            );
        }
        b
    }

    /// Edges rendered as `A->B, C--D, ...` in storage order.
    pub fn edge_list_string(&self) -> String {
        let mut parts: Vec<String> = self
            .edges
            .iter()
            .map(|e| {
                format!(
                    "{}{}{}",
                    self.names[e.from],
                    e.kind.symbol(),
                    self.names[e.to]
                )
            })
            .collect();
        let isolated = (0..self.n()).filter(|&i| self.adjacents(i).is_empty());
        parts.extend(isolated.map(|i| self.names[i].clone()));
        parts.join(", ")
    }

    /// Unordered adjacent pairs as `(min, max)` index pairs.
    pub fn skeleton(&self) -> Vec<(usize, usize)> {
        let mut s: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.from.min(e.to), e.from.max(e.to)))
            .collect();
        s.sort();
        s
    }

    /// Checks membership in `family` and reports every violation found.
    pub fn validate(&self, family: Family) -> ValidityReport {
        let mut violations = Vec::new();
        for e in &self.edges {
            if !family.allows(e.kind) {
                violations.push(Violation {
                    constraint: Constraint::ForbiddenEdge(e.kind),
                    witness: vec![self.names[e.from].clone(), self.names[e.to].clone()],
                });
            }
        }
        for e in self.edges.iter().filter(|e| e.kind == EdgeKind::Directed) {
            if self.descendants(NodeSet::singleton(e.to)).contains(e.from) {
                violations.push(Violation {
                    constraint: Constraint::C1,
                    witness: self.c1_witness_names(e.from, e.to),
                });
            }
        }
        if family == Family::Mamp {
            for e in self.edges.iter().filter(|e| e.kind == EdgeKind::Bidirected) {
                let uc = self.undirected_component(e.from);
                if uc.contains(e.to) {
                    let mut w = vec![e.from];
                    w.extend(self.bfs_path(e.to, e.from, |a, b| {
                        self.link(a, b) == Some(Link::Undirected)
                    }));
                    violations.push(Violation {
                        constraint: Constraint::C2,
                        witness: w.into_iter().map(|i| self.names[i].clone()).collect(),
                    });
                }
            }
            for v in 0..self.n() {
                if self.sp[v].is_empty() {
                    continue;
                }
                let ne: Vec<usize> = self.ne[v].iter().collect();
                for (k, &a) in ne.iter().enumerate() {
                    for &c in &ne[k + 1..] {
                        if self.link(a, c) != Some(Link::Undirected) {
                            violations.push(Violation {
                                constraint: Constraint::C3,
                                witness: vec![
                                    self.names[a].clone(),
                                    self.names[v].clone(),
                                    self.names[c].clone(),
                                ],
                            });
                        }
                    }
                }
            }
        }
        violations.sort();
        ValidityReport { family, violations }
    }

    /// Shortest path `from .. to` whose steps satisfy `ok`; includes both ends.
    fn bfs_path(&self, from: usize, to: usize, ok: impl Fn(usize, usize) -> bool) -> Vec<usize> {
        let n = self.n();
        let mut prev = vec![usize::MAX; n];
        prev[from] = from;
        let mut q = VecDeque::from([from]);
        while let Some(a) = q.pop_front() {
            if a == to {
                break;
            }
            for b in self.adjacents(a).iter() {
                if prev[b] == usize::MAX && ok(a, b) {
                    prev[b] = a;
                    q.push_back(b);
                }
            }
        }
        if prev[to] == usize::MAX {
            return Vec::new();
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn c1_witness_names(&self, tail: usize, head: usize) -> Vec<String> {
        let mut w = vec![tail];
        w.extend(self.bfs_path(head, tail, |a, b| {
            self.link(a, b).is_some_and(Link::descending)
        }));
        w.into_iter().map(|i| self.names[i].clone()).collect()
    }
}

/// Incremental construction of a [`MixedGraph`].
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    nodes: BTreeMap<String, NodeTag>,
    /// keyed by the lexicographically ordered endpoint pair
    edges: BTreeMap<(String, String), (String, String, EdgeKind)>,
}

impl GraphBuilder {
    fn key(a: &str, b: &str) -> (String, String) {
        if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        }
    }

    /// Declares a plain node; re-declaring an existing node is a no-op.
    pub fn add_node(&mut self, name: &str) -> &mut Self {
        self.nodes.entry(name.to_string()).or_insert(NodeTag::Plain);
        self
    }

    /// Declares a node with a tag. Fails if the node already has a different
    /// non-plain tag.
    pub fn add_tagged(&mut self, name: &str, tag: NodeTag) -> Result<&mut Self> {
        let slot = self.nodes.entry(name.to_string()).or_insert(tag);
        if *slot != tag {
            if *slot == NodeTag::Plain {
                *slot = tag;
            } else if tag != NodeTag::Plain {
                return Err(Error::ConflictingTag(name.to_string()));
            }
        }
        Ok(self)
    }

    /// Adds `a -> b` for [`EdgeKind::Directed`], otherwise the symmetric edge.
    /// Endpoints are declared automatically.
    pub fn add_edge(&mut self, a: &str, b: &str, kind: EdgeKind) -> Result<&mut Self> {
        if a == b {
            return Err(Error::SelfLoop(a.to_string()));
        }
        let key = Self::key(a, b);
        if self.edges.contains_key(&key) {
            return Err(Error::DuplicateEdge(key.0, key.1));
        }
        self.add_node(a).add_node(b);
        self.edges.insert(key, (a.to_string(), b.to_string(), kind));
        Ok(self)
    }

    /// Removes the edge between `a` and `b`, returning its kind.
    pub fn remove_edge(&mut self, a: &str, b: &str) -> Option<EdgeKind> {
        self.edges.remove(&Self::key(a, b)).map(|(_, _, k)| k)
    }

    /// Removes a node together with all the edges it participates in.
    pub fn remove_node(&mut self, name: &str) {
        self.nodes.remove(name);
        self.edges.retain(|_, (a, b, _)| a != name && b != name);
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges.contains_key(&Self::key(a, b))
    }

    /// The stored edge between `a` and `b`, oriented as stored.
    pub fn edge(&self, a: &str, b: &str) -> Option<(&str, &str, EdgeKind)> {
        self.edges
            .get(&Self::key(a, b))
            .map(|(x, y, k)| (x.as_str(), y.as_str(), *k))
    }

    pub fn has_node(&self, name: &str) -> bool {
        self.nodes.contains_key(name)
    }

    pub fn build(&self) -> Result<MixedGraph> {
        let n = self.nodes.len();
        if n > MAX_NODES {
            return Err(Error::TooManyNodes(n));
        }
        let names: Vec<String> = self.nodes.keys().cloned().collect();
        let tags: Vec<NodeTag> = self.nodes.values().copied().collect();
        let index: BTreeMap<String, usize> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut links = vec![None; n * n];
        let mut pa = vec![NodeSet::EMPTY; n];
        let mut ch = vec![NodeSet::EMPTY; n];
        let mut ne = vec![NodeSet::EMPTY; n];
        let mut sp = vec![NodeSet::EMPTY; n];
        let mut edges = Vec::with_capacity(self.edges.len());
        for (a, b, kind) in self.edges.values() {
            let (mut i, mut j) = (index[a], index[b]);
            match kind {
                EdgeKind::Directed => {
                    links[i * n + j] = Some(Link::Out);
                    links[j * n + i] = Some(Link::In);
                    ch[i].insert(j);
                    pa[j].insert(i);
                }
                EdgeKind::Undirected => {
                    links[i * n + j] = Some(Link::Undirected);
                    links[j * n + i] = Some(Link::Undirected);
                    ne[i].insert(j);
                    ne[j].insert(i);
                }
                EdgeKind::Bidirected => {
                    links[i * n + j] = Some(Link::Bidirected);
                    links[j * n + i] = Some(Link::Bidirected);
                    sp[i].insert(j);
                    sp[j].insert(i);
                }
            }
            if *kind != EdgeKind::Directed && i > j {
                std::mem::swap(&mut i, &mut j);
            }
            edges.push(Edge {
                from: i,
                to: j,
                kind: *kind,
            });
        }
        edges.sort_by_key(|e| (e.from.min(e.to), e.from.max(e.to)));
        Ok(MixedGraph {
            names,
            index,
            tags,
            edges,
            links,
            pa,
            ch,
            ne,
            sp,
        })
    }
}
