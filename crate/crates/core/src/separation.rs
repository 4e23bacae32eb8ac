//! Separation criteria, deterministic nodes and independence models.
//!
//! The reference algorithm for the path-based criteria (MAMP, AMP, MVR and
//! DAG) is an exhaustive depth-first search over simple paths, pruned at the
//! first blocked inner node. LWF separation uses the moralization criterion on
//! the smallest anterior set. [`separated_route_oracle`] answers the same
//! questions over bounded routes and is only used to cross-check the two.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{Constraint, EdgeKind, Family, Link, MixedGraph};
use crate::nodeset::{NodeSet, MAX_NODES};

/// Largest universe for which [`enumerate_model`] materializes every statement.
pub const FULL_MODEL_MAX_NODES: usize = 10;

/// Largest universe for [`enumerate_pairwise_model`].
pub const PAIRWISE_MODEL_MAX_NODES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// Triplex nodes in `Z ∪ san(Z)`; non-triplex nodes outside `Z` unless the
    /// node sits in `A - B - C` and has a spouse or a parent outside `Z`.
    Mamp,
    /// As [`Criterion::Mamp`] with the parent clause only.
    MampSimplified,
    Amp,
    Mvr,
    Lwf,
    /// Only legal on DAGs, where it coincides with the AMP criterion.
    Dag,
}

impl Criterion {
    /// Family a graph must belong to for the criterion to apply.
    pub fn family(self) -> Family {
        match self {
            Criterion::Mamp | Criterion::MampSimplified => Family::Mamp,
            Criterion::Amp => Family::Amp,
            Criterion::Mvr => Family::Mvr,
            Criterion::Lwf => Family::Lwf,
            Criterion::Dag => Family::Dag,
        }
    }

    pub fn supports_determinism(self) -> bool {
        self != Criterion::Mvr
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Mamp => "mamp",
            Criterion::MampSimplified => "mamp-simple",
            Criterion::Amp => "amp",
            Criterion::Mvr => "mvr",
            Criterion::Lwf => "lwf",
            Criterion::Dag => "dag",
        })
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "mamp" => Criterion::Mamp,
            "mamp-simple" | "mamp_simplified" | "mamp-simplified" => Criterion::MampSimplified,
            "amp" => Criterion::Amp,
            "mvr" => Criterion::Mvr,
            "lwf" => Criterion::Lwf,
            "dag" => Criterion::Dag,
            other => return domain(format!("unknown criterion `{other}`")),
        })
    }
}

/// "`target` is a function of `determiners`".
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Determination {
    pub target: String,
    pub determiners: BTreeSet<String>,
}

/// Registered functional dependencies between nodes, keyed by target.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminationMap {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl DeterminationMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `target <- determiners`, replacing any previous entry for the target.
    pub fn insert<I, S>(&mut self, target: &str, determiners: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = determiners.into_iter().map(Into::into).collect();
        if set.is_empty() {
            return domain(format!("determination of `{target}` has no determiners"));
        }
        if set.contains(target) {
            return domain(format!("`{target}` cannot determine itself"));
        }
        self.entries.insert(target.to_string(), set);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, target: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(target)
    }

    pub fn entries(&self) -> impl Iterator<Item = Determination> + '_ {
        self.entries.iter().map(|(t, d)| Determination {
            target: t.clone(),
            determiners: d.clone(),
        })
    }

    /// Keeps the entries for which `keep(target, determiners)` holds.
    pub fn retain(&mut self, mut keep: impl FnMut(&str, &BTreeSet<String>) -> bool) {
        self.entries.retain(|t, d| keep(t, d));
    }

    /// Resolves node names against `g`.
    pub fn bind(&self, g: &MixedGraph) -> Result<BoundDeterminations> {
        let entries = self
            .entries
            .iter()
            .map(|(t, d)| Ok((g.index_of(t)?, g.set_of(&d.iter().collect::<Vec<_>>())?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundDeterminations { entries })
    }
}

/// A [`DeterminationMap`] resolved to node indices of one graph.
#[derive(Debug, Clone, Default)]
pub struct BoundDeterminations {
    entries: Vec<(usize, NodeSet)>,
}

impl BoundDeterminations {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `D(Z)`: least fixpoint of `D = Z ∪ {t | (t, S) registered, S ⊆ D}`.
    pub fn determined(&self, z: NodeSet) -> NodeSet {
        let mut d = z;
        loop {
            let next = self
                .entries
                .iter()
                .filter(|(_, s)| s.is_subset(d))
                .fold(d, |acc, (t, _)| acc.with(*t));
            if next == d {
                return d;
            }
            d = next;
        }
    }
}

/// `D(Z)` for a node set of `g`.
pub fn determined_set(g: &MixedGraph, z: NodeSet, det: &DeterminationMap) -> Result<NodeSet> {
    Ok(det.bind(g)?.determined(z))
}

/// The MVR criterion is also used for ancestral graphs, which may close a
/// semidirected cycle through bidirected edges; it only needs the directed
/// part to be acyclic. Every other criterion requires its family.
fn check_domain(g: &MixedGraph, criterion: Criterion) -> Result<()> {
    let mut report = g.validate(criterion.family());
    if criterion != Criterion::Mvr {
        return report.into_result();
    }
    report.violations.retain(|v| v.constraint != Constraint::C1);
    report.into_result()?;
    for e in g.edges().iter().filter(|e| e.kind == EdgeKind::Directed) {
        if g.strict_ascendants(NodeSet::singleton(e.from))
            .contains(e.to)
        {
            return Err(Error::Cycle(vec![
                g.name(e.from).to_string(),
                g.name(e.to).to_string(),
            ]));
        }
    }
    Ok(())
}

/// Prepared separation queries for one graph, criterion and determination map.
pub struct Separator<'g> {
    g: &'g MixedGraph,
    criterion: Criterion,
    det: BoundDeterminations,
}

impl<'g> Separator<'g> {
    /// Checks that `g` belongs to the criterion's family and binds `det`.
    pub fn new(g: &'g MixedGraph, criterion: Criterion, det: &DeterminationMap) -> Result<Self> {
        check_domain(g, criterion)?;
        if !det.is_empty() && !criterion.supports_determinism() {
            return domain(format!(
                "the {criterion} criterion is not defined with deterministic nodes"
            ));
        }
        Ok(Separator {
            g,
            criterion,
            det: det.bind(g)?,
        })
    }

    pub fn graph(&self) -> &'g MixedGraph {
        self.g
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn determined(&self, z: NodeSet) -> NodeSet {
        self.det.determined(z)
    }

    /// Whether `X ⊥ Y | Z` may be posed: the sets are disjoint and neither `X`
    /// nor `Y` holds a node determined by, but not in, `Z`.
    pub fn check_query(&self, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<NodeSet> {
        let all = self.g.all();
        if !x.union(y).union(z).is_subset(all) {
            return Err(Error::UnknownNode("index out of range".into()));
        }
        if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
            return domain("X, Y and Z must be pairwise disjoint");
        }
        let w = self.det.determined(z);
        let hidden = w.minus(z).intersection(x.union(y));
        if !hidden.is_empty() {
            return domain(format!(
                "{} determined by the conditioning set but not in it",
                self.g.names_of(hidden).join(", ")
            ));
        }
        Ok(w)
    }

    /// `X ⊥ Y | Z` under the prepared criterion.
    pub fn separated(&self, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<bool> {
        let w = self.check_query(x, y, z)?;
        Ok(self.separated_unchecked(x, y, w))
    }

    /// Separation given the already determined conditioning set `w = D(Z)`.
    pub(crate) fn separated_unchecked(&self, x: NodeSet, y: NodeSet, w: NodeSet) -> bool {
        if x.is_empty() || y.is_empty() {
            return true;
        }
        match self.criterion {
            Criterion::Lwf => !self.moral_connected(x, y, w),
            _ => !self.open_path_exists(x, y, w),
        }
    }

    fn open_path_exists(&self, x: NodeSet, y: NodeSet, w: NodeSet) -> bool {
        let g = self.g;
        let ctx = PathContext {
            g,
            criterion: self.criterion,
            x,
            y,
            w,
            triplex_ok: w.union(g.strict_ascendants(w)),
        };
        for s in x.iter() {
            for c in g.adjacents(s).minus(x).iter() {
                if y.contains(c) || ctx.extend(s, c, NodeSet::singleton(s).with(c)) {
                    return true;
                }
            }
        }
        false
    }

    /// Moralization criterion: `X` and `Y` connected outside `W` in the moral
    /// graph of the smallest anterior set containing `X ∪ Y ∪ W`.
    fn moral_connected(&self, x: NodeSet, y: NodeSet, w: NodeSet) -> bool {
        let g = self.g;
        let n = g.n();
        let mut anterior = x.union(y).union(w);
        let mut frontier = anterior;
        while !frontier.is_empty() {
            let next = frontier
                .iter()
                .fold(NodeSet::EMPTY, |acc, v| {
                    acc.union(g.parents(v)).union(g.neighbors(v))
                })
                .minus(anterior);
            anterior = anterior.union(next);
            frontier = next;
        }
        let mut moral = vec![NodeSet::EMPTY; n];
        for v in anterior.iter() {
            moral[v] = g.adjacents(v).intersection(anterior);
        }
        let mut seen = NodeSet::EMPTY;
        for v in anterior.iter() {
            if seen.contains(v) {
                continue;
            }
            let tau = g.undirected_component(v);
            seen = seen.union(tau);
            let pa = g.neighborhood(tau, crate::graph::Relation::Parents);
            for p in pa.iter() {
                moral[p] = moral[p].union(pa.without(p));
            }
        }
        let mut reached = x;
        let mut frontier = x;
        while !frontier.is_empty() {
            let next = frontier
                .iter()
                .fold(NodeSet::EMPTY, |acc, v| acc.union(moral[v]))
                .minus(reached)
                .minus(w);
            if !next.is_disjoint(y) {
                return true;
            }
            reached = reached.union(next);
            frontier = next;
        }
        false
    }
}

struct PathContext<'a> {
    g: &'a MixedGraph,
    criterion: Criterion,
    x: NodeSet,
    y: NodeSet,
    w: NodeSet,
    triplex_ok: NodeSet,
}

impl PathContext<'_> {
    /// Extends the simple path ending in `prev, cur`; true once a node of `Y`
    /// is reached through open inner nodes.
    fn extend(&self, prev: usize, cur: usize, visited: NodeSet) -> bool {
        let candidates = self.g.adjacents(cur).minus(visited).minus(self.x);
        for next in candidates.iter() {
            if !self.inner_open(prev, cur, next) {
                continue;
            }
            if self.y.contains(next) || self.extend(cur, next, visited.with(next)) {
                return true;
            }
        }
        false
    }

    fn inner_open(&self, a: usize, b: usize, c: usize) -> bool {
        let g = self.g;
        let (l1, l2) = (g.link(b, a).unwrap(), g.link(b, c).unwrap());
        if is_triplex_center(l1, l2) {
            return self.triplex_ok.contains(b);
        }
        if !self.w.contains(b) {
            return true;
        }
        if l1 != Link::Undirected || l2 != Link::Undirected {
            return false;
        }
        let parent_escape = !g.parents(b).minus(self.w).is_empty();
        match self.criterion {
            Criterion::Mamp => parent_escape || !g.spouses(b).is_empty(),
            Criterion::MampSimplified | Criterion::Amp | Criterion::Dag => parent_escape,
            Criterion::Mvr | Criterion::Lwf => false,
        }
    }
}

/// Whether `B` is a triplex node between two path edges, given the edges as
/// seen from `B`: no edge leaves `B` as the tail of a directed edge and at
/// least one has an arrowhead at `B`.
#[inline]
pub fn is_triplex_center(l1: Link, l2: Link) -> bool {
    !l1.tail_here() && !l2.tail_here() && (l1.head_here() || l2.head_here())
}

/// `X ⊥ Y | Z` in `g` under `criterion`, with deterministic nodes from `det`.
pub fn separated(
    g: &MixedGraph,
    x: NodeSet,
    y: NodeSet,
    z: NodeSet,
    criterion: Criterion,
    det: &DeterminationMap,
) -> Result<bool> {
    Separator::new(g, criterion, det)?.separated(x, y, z)
}

/// Default route-length bound for [`separated_route_oracle`]: `2·n²`.
pub fn default_route_bound(g: &MixedGraph) -> usize {
    2 * g.n() * g.n()
}

/// Separation over routes of at most `max_len` edges.
///
/// Every criterion except LWF uses the route form of the MAMP criterion:
/// triplex nodes of the route (flanking nodes may coincide) must be in `D(Z)`,
/// non-triplex nodes must be outside it. LWF uses sections: collider sections
/// need a node in `D(Z)`, other sections must avoid it. The search is a
/// breadth-first sweep over traversal states, so it is exact once `max_len`
/// covers the state space.
pub fn separated_route_oracle(
    g: &MixedGraph,
    x: NodeSet,
    y: NodeSet,
    z: NodeSet,
    criterion: Criterion,
    det: &DeterminationMap,
    max_len: usize,
) -> Result<bool> {
    if max_len == 0 {
        return domain("max_len must be positive");
    }
    let sep = Separator::new(g, criterion, det)?;
    let w = sep.check_query(x, y, z)?;
    if x.is_empty() || y.is_empty() {
        return Ok(true);
    }
    Ok(match criterion {
        Criterion::Lwf => !lwf_route_open(g, x, y, w, max_len),
        _ => !mamp_route_open(g, x, y, w, max_len),
    })
}

fn mamp_route_open(g: &MixedGraph, x: NodeSet, y: NodeSet, w: NodeSet, max_len: usize) -> bool {
    let n = g.n();
    // state = last traversed edge (prev, cur)
    let mut seen = vec![false; n * n];
    let mut queue = VecDeque::new();
    for s in x.iter() {
        for c in g.adjacents(s).iter() {
            if y.contains(c) {
                return true;
            }
            if !seen[s * n + c] {
                seen[s * n + c] = true;
                queue.push_back((s, c, 1usize));
            }
        }
    }
    while let Some((a, b, len)) = queue.pop_front() {
        if len >= max_len {
            continue;
        }
        let l1 = g.link(b, a).unwrap();
        for c in g.adjacents(b).iter() {
            let triplex = is_triplex_center(l1, g.link(b, c).unwrap());
            if triplex != w.contains(b) {
                continue;
            }
            if y.contains(c) {
                return true;
            }
            if !seen[b * n + c] {
                seen[b * n + c] = true;
                queue.push_back((b, c, len + 1));
            }
        }
    }
    false
}

fn lwf_route_open(g: &MixedGraph, x: NodeSet, y: NodeSet, w: NodeSet, max_len: usize) -> bool {
    let n = g.n();
    // state = (node, current section entered through an arrowhead, section meets W)
    let idx = |v: usize, head: bool, hit: bool| v * 4 + (head as usize) * 2 + hit as usize;
    let mut seen = vec![false; n * 4];
    let mut queue = VecDeque::new();
    for s in x.iter() {
        let hit = w.contains(s);
        seen[idx(s, false, hit)] = true;
        queue.push_back((s, false, hit, 0usize));
    }
    while let Some((v, head, hit, len)) = queue.pop_front() {
        if len >= max_len {
            continue;
        }
        for c in g.adjacents(v).iter() {
            let next = match g.link(v, c).unwrap() {
                Link::Undirected => (c, head, hit || w.contains(c)),
                link @ (Link::Out | Link::In) => {
                    let collider = head && link == Link::In;
                    if collider != hit {
                        continue;
                    }
                    (c, link == Link::Out, w.contains(c))
                }
                Link::Bidirected => continue,
            };
            // the section holding the route's last node is never a collider
            if y.contains(c) && !next.2 {
                return true;
            }
            let k = idx(next.0, next.1, next.2);
            if !seen[k] {
                seen[k] = true;
                queue.push_back((next.0, next.1, next.2, len + 1));
            }
        }
    }
    false
}

/// A statement `X ⊥ Y | Z` over the indices of some universe. The
/// constructor orders `X` and `Y` so that `min(X) < min(Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Statement {
    pub x: NodeSet,
    pub y: NodeSet,
    pub z: NodeSet,
}

impl Statement {
    pub fn new(x: NodeSet, y: NodeSet, z: NodeSet) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return domain("statement sides must be nonempty");
        }
        if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
            return domain("statement sets must be pairwise disjoint");
        }
        Ok(Self::canonical(x, y, z))
    }

    /// Canonical form without validation.
    #[inline]
    pub(crate) fn canonical(x: NodeSet, y: NodeSet, z: NodeSet) -> Self {
        if x.min() <= y.min() {
            Statement { x, y, z }
        } else {
            Statement { x: y, y: x, z }
        }
    }

    pub fn pair(a: usize, b: usize, z: NodeSet) -> Self {
        Self::canonical(NodeSet::singleton(a), NodeSet::singleton(b), z)
    }

    pub fn is_pairwise(&self) -> bool {
        self.x.len() == 1 && self.y.len() == 1
    }

    pub fn nodes(&self) -> NodeSet {
        self.x.union(self.y).union(self.z)
    }

    fn sort_key(&self) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        (
            self.x.iter().collect(),
            self.y.iter().collect(),
            self.z.iter().collect(),
        )
    }
}

/// A finite set of canonical statements over a named universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceModel {
    universe: Vec<String>,
    statements: BTreeSet<Statement>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    universe: Vec<String>,
    statements: Vec<StatementJson>,
}

#[derive(Serialize, Deserialize)]
struct StatementJson {
    x: Vec<String>,
    y: Vec<String>,
    z: Vec<String>,
}

impl IndependenceModel {
    /// An empty model; the universe is sorted and deduplicated.
    pub fn new<I, S>(universe: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = universe.into_iter().map(Into::into).collect();
        if set.len() > MAX_NODES {
            return Err(Error::TooManyNodes(set.len()));
        }
        Ok(IndependenceModel {
            universe: set.into_iter().collect(),
            statements: BTreeSet::new(),
        })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn universe_set(&self) -> NodeSet {
        NodeSet::full(self.universe.len())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.universe
            .binary_search_by(|u| u.as_str().cmp(name))
            .map_err(|_| Error::UnknownNode(name.to_string()))
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<NodeSet> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    pub fn names_of(&self, s: NodeSet) -> Vec<String> {
        s.iter().map(|i| self.universe[i].clone()).collect()
    }

    pub fn insert(&mut self, s: Statement) -> Result<bool> {
        if !s.nodes().is_subset(self.universe_set()) {
            return domain("statement mentions nodes outside the universe");
        }
        let s = Statement::new(s.x, s.y, s.z)?;
        Ok(self.statements.insert(s))
    }

    /// Inserts a statement given by node names.
    pub fn insert_named<S: AsRef<str>>(&mut self, x: &[S], y: &[S], z: &[S]) -> Result<bool> {
        let s = Statement::new(self.set_of(x)?, self.set_of(y)?, self.set_of(z)?)?;
        self.insert(s)
    }

    pub fn contains(&self, x: NodeSet, y: NodeSet, z: NodeSet) -> bool {
        if x.is_empty() || y.is_empty() {
            return false;
        }
        self.statements.contains(&Statement::canonical(x, y, z))
    }

    pub fn contains_named<S: AsRef<str>>(&self, x: &[S], y: &[S], z: &[S]) -> bool {
        match (self.set_of(x), self.set_of(y), self.set_of(z)) {
            (Ok(x), Ok(y), Ok(z)) => self.contains(x, y, z),
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.statements.iter()
    }

    /// Statements in canonical output order (lexicographic on name lists).
    pub fn sorted_statements(&self) -> Vec<Statement> {
        let mut v: Vec<Statement> = self.statements.iter().copied().collect();
        v.sort_by_key(Statement::sort_key);
        v
    }

    /// The single-node-sided statements of the model.
    pub fn pairwise_fragment(&self) -> IndependenceModel {
        IndependenceModel {
            universe: self.universe.clone(),
            statements: self
                .statements
                .iter()
                .filter(|s| s.is_pairwise())
                .copied()
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &IndependenceModel) -> bool {
        self.universe == other.universe && self.statements.is_subset(&other.statements)
    }

    pub(crate) fn from_parts(universe: Vec<String>, statements: BTreeSet<Statement>) -> Self {
        IndependenceModel {
            universe,
            statements,
        }
    }

    /// Renders one statement as `A ⊥ B | C,D`.
    pub fn format_statement(&self, s: &Statement) -> String {
        format!(
            "{} _||_ {} | {}",
            self.names_of(s.x).join(","),
            self.names_of(s.y).join(","),
            self.names_of(s.z).join(",")
        )
    }

    /// Byte-stable JSON: sorted universe, statements in canonical order.
    pub fn to_json(&self) -> String {
        let doc = ModelJson {
            universe: self.universe.clone(),
            statements: self
                .sorted_statements()
                .iter()
                .map(|s| StatementJson {
                    x: self.names_of(s.x),
                    y: self.names_of(s.y),
                    z: self.names_of(s.z),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut m = IndependenceModel::new(doc.universe)?;
        for s in doc.statements {
            m.insert_named(&s.x, &s.y, &s.z)?;
        }
        Ok(m)
    }
}

/// Maps sets of graph indices onto indices of a sorted sub-universe.
pub(crate) struct Reindex {
    to_local: Vec<Option<usize>>,
}

impl Reindex {
    pub(crate) fn new(universe: NodeSet, n: usize) -> Self {
        let mut to_local = vec![None; n];
        for (k, v) in universe.iter().enumerate() {
            to_local[v] = Some(k);
        }
        Reindex { to_local }
    }

    pub(crate) fn map(&self, s: NodeSet) -> NodeSet {
        s.iter()
            .map(|v| self.to_local[v].expect("member of the universe"))
            .collect()
    }
}

fn check_universe(g: &MixedGraph, universe: NodeSet, cap: usize) -> Result<()> {
    if !universe.is_subset(g.all()) {
        return Err(Error::UnknownNode("universe index out of range".into()));
    }
    if universe.len() > cap {
        return Err(Error::GuardExceeded(format!(
            "universe of {} nodes exceeds the limit of {cap}",
            universe.len()
        )));
    }
    Ok(())
}

/// Pairwise separation table over `universe`, conditioning always on `given`.
/// Entry `(a, b, Z)` for `a < b` is `Some(sep)`, or `None` when the query is
/// not admissible because `a` or `b` is determined by `Z ∪ given`.
fn pairwise_table(
    sep: &Separator<'_>,
    universe: NodeSet,
    given: NodeSet,
    mut visit: impl FnMut(usize, usize, NodeSet, bool),
) {
    let nodes: Vec<usize> = universe.iter().collect();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            let rest = universe.without(a).without(b);
            for z in rest.subsets() {
                let cond = z.union(given);
                let w = sep.determined(cond);
                let pair = NodeSet::singleton(a).with(b);
                if !w.minus(cond).is_disjoint(pair) {
                    continue;
                }
                let s = sep.separated_unchecked(NodeSet::singleton(a), NodeSet::singleton(b), w);
                visit(a, b, z, s);
            }
        }
    }
}

/// The full model over `universe`: every canonical statement whose nodes lie
/// in `universe` and that holds under the criterion.
///
/// Only single-node queries are run. A `Z`-open path between two sets is a
/// `Z`-open path between two of their members, so `X ⊥ Y | Z` holds exactly
/// when `x ⊥ y | Z` holds for all `x ∈ X`, `y ∈ Y`; larger statements are
/// assembled from the pairwise table. Statements whose sides contain a node
/// determined by (but not in) `Z` are never posed and never included.
pub fn enumerate_model(
    g: &MixedGraph,
    criterion: Criterion,
    det: &DeterminationMap,
    universe: NodeSet,
) -> Result<IndependenceModel> {
    check_universe(g, universe, FULL_MODEL_MAX_NODES)?;
    let sep = Separator::new(g, criterion, det)?;
    let mut table: std::collections::HashMap<(usize, usize, NodeSet), bool> =
        std::collections::HashMap::new();
    pairwise_table(&sep, universe, NodeSet::EMPTY, |a, b, z, s| {
        table.insert((a, b, z), s);
    });
    let holds = |a: usize, b: usize, z: NodeSet| {
        let (a, b) = (a.min(b), a.max(b));
        table.get(&(a, b, z)).copied().unwrap_or(false)
    };
    let re = Reindex::new(universe, g.n());
    let mut statements = BTreeSet::new();
    for z in universe.subsets() {
        let rest = universe.minus(z);
        // partners[a]: nodes b with a ⊥ b | z
        let partners: Vec<NodeSet> = (0..g.n())
            .map(|a| {
                if !rest.contains(a) {
                    return NodeSet::EMPTY;
                }
                rest.without(a).iter().filter(|&b| holds(a, b, z)).collect()
            })
            .collect();
        for x in rest.nonempty_subsets() {
            let allowed = x
                .iter()
                .fold(rest.minus(x), |acc, a| acc.intersection(partners[a]));
            let xmin = x.min().unwrap();
            for y in allowed.nonempty_subsets() {
                if y.min().unwrap() > xmin {
                    statements.insert(Statement {
                        x: re.map(x),
                        y: re.map(y),
                        z: re.map(z),
                    });
                }
            }
        }
    }
    Ok(IndependenceModel::from_parts(
        g.names_of(universe),
        statements,
    ))
}

/// The single-node-sided statements of `[I(G)]_∅^given` restricted to
/// `universe`: `a ⊥ b | Z` is included iff `a ⊥ b | Z ∪ given` holds, for
/// `a, b ∈ universe` and `Z ⊆ universe`. `universe` and `given` must be disjoint.
pub fn enumerate_pairwise_model(
    g: &MixedGraph,
    criterion: Criterion,
    det: &DeterminationMap,
    universe: NodeSet,
    given: NodeSet,
) -> Result<IndependenceModel> {
    check_universe(g, universe, PAIRWISE_MODEL_MAX_NODES)?;
    if !universe.is_disjoint(given) || !given.is_subset(g.all()) {
        return domain("universe and conditioning set must be disjoint graph node sets");
    }
    let sep = Separator::new(g, criterion, det)?;
    let re = Reindex::new(universe, g.n());
    let mut statements = BTreeSet::new();
    pairwise_table(&sep, universe, given, |a, b, z, s| {
        if s {
            statements.insert(Statement::pair(
                re.map(NodeSet::singleton(a)).min().unwrap(),
                re.map(NodeSet::singleton(b)).min().unwrap(),
                re.map(z),
            ));
        }
    });
    Ok(IndependenceModel::from_parts(
        g.names_of(universe),
        statements,
    ))
}

/// `[M]_L^S`: keeps `⟨X, Y, Z⟩` iff `⟨X, Y, Z ∪ S⟩ ∈ M` and `X, Y, Z` avoid
/// `L ∪ S`. The universe becomes `universe ∖ L ∖ S`.
pub fn restrict_model<S: AsRef<str>>(
    m: &IndependenceModel,
    marginalized: &[S],
    conditioned: &[S],
) -> Result<IndependenceModel> {
    let l = m.set_of(marginalized)?;
    let s = m.set_of(conditioned)?;
    if !l.is_disjoint(s) {
        return domain("marginalized and conditioned sets overlap");
    }
    let keep = m.universe_set().minus(l).minus(s);
    let re = Reindex::new(keep, m.universe.len());
    let statements = m
        .statements
        .iter()
        .filter(|st| {
            st.x.union(st.y).is_subset(keep) && s.is_subset(st.z) && st.z.minus(s).is_subset(keep)
        })
        .map(|st| Statement::canonical(re.map(st.x), re.map(st.y), re.map(st.z.minus(s))))
        .collect();
    let universe = keep.iter().map(|i| m.universe[i].clone()).collect();
    Ok(IndependenceModel::from_parts(universe, statements))
}
