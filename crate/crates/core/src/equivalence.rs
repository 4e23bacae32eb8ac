//! Triplexes, Markov equivalence and brute-force exploration of graphs that
//! share a skeleton.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graph::{EdgeKind, Family, MixedGraph};
use crate::nodeset::NodeSet;
use crate::separation::{
    enumerate_model, enumerate_pairwise_model, Criterion, DeterminationMap, IndependenceModel,
};

pub const SKELETON_MAX_NODES: usize = 7;
pub const SKELETON_MAX_EDGES: usize = 8;
/// Node limit for oracle-mode equivalence checks.
pub const ORACLE_MAX_NODES: usize = 10;

/// An induced subgraph `A ? B ? C` with `A`, `C` non-adjacent and `B` a
/// triplex node between them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triplex {
    /// sorted
    pub endpoints: (String, String),
    pub center: String,
}

impl fmt::Display for Triplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({{{},{}}},{})",
            self.endpoints.0, self.endpoints.1, self.center
        )
    }
}

/// `(a, c, b)` index triples with `a < c` and centre `b`.
fn triplex_indices(g: &MixedGraph) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for b in 0..g.n() {
        let ad: Vec<usize> = g.adjacents(b).iter().collect();
        for (k, &a) in ad.iter().enumerate() {
            for &c in &ad[k + 1..] {
                if g.adjacent(a, c) {
                    continue;
                }
                let (la, lc) = (g.link(b, a).unwrap(), g.link(b, c).unwrap());
                if crate::separation::is_triplex_center(la, lc) {
                    out.insert((a, c, b));
                }
            }
        }
    }
    out
}

pub fn triplexes(g: &MixedGraph) -> Result<BTreeSet<Triplex>> {
    g.validate(Family::Mamp).into_result()?;
    Ok(triplex_indices(g)
        .into_iter()
        .map(|(a, c, b)| Triplex {
            endpoints: (g.name(a).to_string(), g.name(c).to_string()),
            center: g.name(b).to_string(),
        })
        .collect())
}

fn same_nodes(g: &MixedGraph, h: &MixedGraph) -> Result<()> {
    if g.names() != h.names() {
        return domain(format!(
            "graphs are over different node sets: {:?} vs {:?}",
            g.names(),
            h.names()
        ));
    }
    Ok(())
}

/// Same adjacencies and same triplexes.
pub fn triplex_equivalent(g: &MixedGraph, h: &MixedGraph) -> Result<bool> {
    same_nodes(g, h)?;
    g.validate(Family::Mamp).into_result()?;
    h.validate(Family::Mamp).into_result()?;
    Ok(g.skeleton() == h.skeleton() && triplex_indices(g) == triplex_indices(h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquivalenceMode {
    #[default]
    Triplex,
    /// Compares the separation models directly.
    Oracle,
}

pub fn markov_equivalent(g: &MixedGraph, h: &MixedGraph, mode: EquivalenceMode) -> Result<bool> {
    match mode {
        EquivalenceMode::Triplex => triplex_equivalent(g, h),
        EquivalenceMode::Oracle => {
            same_nodes(g, h)?;
            if g.n() > ORACLE_MAX_NODES {
                return Err(Error::GuardExceeded(format!(
                    "oracle equivalence is limited to {ORACLE_MAX_NODES} nodes"
                )));
            }
            // Separation is pairwise, so the single-node statements decide the model.
            let det = DeterminationMap::new();
            let mg = enumerate_pairwise_model(g, Criterion::Mamp, &det, g.all(), NodeSet::EMPTY)?;
            let mh = enumerate_pairwise_model(h, Criterion::Mamp, &det, h.all(), NodeSet::EMPTY)?;
            Ok(mg == mh)
        }
    }
}

/// Node names plus the adjacent pairs, as sorted index pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Skeleton {
    pub names: Vec<String>,
    pub pairs: Vec<(usize, usize)>,
}

impl Skeleton {
    pub fn of(g: &MixedGraph) -> Self {
        Skeleton {
            names: g.names().to_vec(),
            pairs: g.skeleton(),
        }
    }

    pub fn from_pairs<S: AsRef<str>>(names: &[S], pairs: &[(S, S)]) -> Result<Self> {
        let mut b = MixedGraph::builder();
        for n in names {
            b.add_node(n.as_ref());
        }
        for (a, c) in pairs {
            b.add_edge(a.as_ref(), c.as_ref(), EdgeKind::Undirected)?;
        }
        Ok(Skeleton::of(&b.build()?))
    }

    fn check_guard(&self) -> Result<()> {
        if self.names.len() > SKELETON_MAX_NODES || self.pairs.len() > SKELETON_MAX_EDGES {
            return Err(Error::GuardExceeded(format!(
                "skeleton enumeration is limited to {SKELETON_MAX_NODES} nodes and {SKELETON_MAX_EDGES} edges; got {} and {}",
                self.names.len(),
                self.pairs.len()
            )));
        }
        Ok(())
    }

    /// The candidate whose base-4 digits (least significant first, one per
    /// pair) pick `-`, `->`, `<-`, `<->`.
    fn candidate(&self, mut index: usize, family: Family) -> Option<MixedGraph> {
        let mut b = MixedGraph::builder();
        for n in &self.names {
            b.add_node(n);
        }
        for &(a, c) in &self.pairs {
            let (a, c) = (self.names[a].as_str(), self.names[c].as_str());
            let (from, to, kind) = match index % 4 {
                0 => (a, c, EdgeKind::Undirected),
                1 => (a, c, EdgeKind::Directed),
                2 => (c, a, EdgeKind::Directed),
                _ => (a, c, EdgeKind::Bidirected),
            };
            index /= 4;
            if !family.allows(kind) {
                return None;
            }
            b.add_edge(from, to, kind)
                .expect("skeleton pairs are distinct");
        }
        let g = b.build().expect("skeleton fits");
        g.validate(family).is_valid().then_some(g)
    }
}

/// Every valid graph of `family` with exactly this skeleton, in candidate order.
pub fn enumerate_same_skeleton(skeleton: &Skeleton, family: Family) -> Result<Vec<MixedGraph>> {
    skeleton.check_guard()?;
    let total = 1usize << (2 * skeleton.pairs.len());
    Ok((0..total)
        .filter_map(|i| skeleton.candidate(i, family))
        .collect())
}

fn criterion_for(family: Family) -> Criterion {
    match family {
        Family::Mamp => Criterion::Mamp,
        Family::Amp => Criterion::Amp,
        Family::Mvr => Criterion::Mvr,
        Family::Lwf => Criterion::Lwf,
        Family::Dag => Criterion::Dag,
    }
}

/// The first member of `family` on the skeleton whose model under the
/// family's own criterion equals `target`.
pub fn representability_search(
    target: &IndependenceModel,
    skeleton: &Skeleton,
    family: Family,
) -> Result<Option<MixedGraph>> {
    skeleton.check_guard()?;
    if target.universe() != skeleton.names.as_slice() {
        return domain("target model and skeleton have different node sets");
    }
    let det = DeterminationMap::new();
    let criterion = criterion_for(family);
    for g in enumerate_same_skeleton(skeleton, family)? {
        if enumerate_model(&g, criterion, &det, g.all())? == *target {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// All MAMP CGs triplex equivalent to some graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassEnumeration {
    pub skeleton: Skeleton,
    pub members: Vec<MixedGraph>,
}

pub fn triplex_class(g: &MixedGraph) -> Result<ClassEnumeration> {
    g.validate(Family::Mamp).into_result()?;
    let skeleton = Skeleton::of(g);
    let own = triplex_indices(g);
    let members = enumerate_same_skeleton(&skeleton, Family::Mamp)?
        .into_iter()
        .filter(|h| triplex_indices(h) == own)
        .collect();
    Ok(ClassEnumeration { skeleton, members })
}

/// Pairs of node names, each pair sorted.
pub type NamePairs = BTreeSet<(String, String)>;

fn pairs_of(g: &MixedGraph, keep: impl Fn(EdgeKind) -> bool) -> NamePairs {
    g.edges()
        .iter()
        .filter(|e| keep(e.kind))
        .map(|e| {
            let (a, b) = (g.name(e.from), g.name(e.to));
            if a < b {
                (a.to_string(), b.to_string())
            } else {
                (b.to_string(), a.to_string())
            }
        })
        .collect()
}

/// Node pairs joined by a directed edge in either direction.
pub fn directed_pairs(g: &MixedGraph) -> NamePairs {
    pairs_of(g, |k| k == EdgeKind::Directed)
}

pub fn bidirected_pairs(g: &MixedGraph) -> NamePairs {
    pairs_of(g, |k| k == EdgeKind::Bidirected)
}

/// The edges that take part in some triplex, rendered as `A->B`, `A--B`, `A<->B`.
pub fn triplex_edges(g: &MixedGraph) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (a, c, b) in triplex_indices(g) {
        for v in [a, c] {
            let e = g
                .edges()
                .iter()
                .find(|e| (e.from == v && e.to == b) || (e.from == b && e.to == v))
                .expect("triplex edge exists");
            out.insert(format!(
                "{}{}{}",
                g.name(e.from),
                e.kind.symbol(),
                g.name(e.to)
            ));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalSets {
    pub directed_pairs: NamePairs,
    pub mdcgs: Vec<MixedGraph>,
    pub bidirected: NamePairs,
    pub mbmdcgs: Vec<MixedGraph>,
}

/// The unique inclusion-maximal set among `sets`, if one exists.
fn unique_maximum(sets: &[NamePairs]) -> Option<NamePairs> {
    let union: NamePairs = sets.iter().flatten().cloned().collect();
    sets.contains(&union).then_some(union)
}

/// Finds the maximal directed-pair set of the class and the members attaining
/// it, then the maximal bidirected-edge set among those. A missing unique
/// maximum is reported as a property violation.
pub fn maximal_sets(class: &ClassEnumeration) -> Result<MaximalSets> {
    if class.members.is_empty() {
        return domain("empty equivalence class");
    }
    let dp: Vec<NamePairs> = class.members.iter().map(directed_pairs).collect();
    let directed = unique_maximum(&dp).ok_or_else(|| {
        Error::PropertyViolation("no unique maximal set of directed node pairs".into())
    })?;
    let mdcgs: Vec<MixedGraph> = class
        .members
        .iter()
        .zip(&dp)
        .filter(|(_, s)| **s == directed)
        .map(|(g, _)| g.clone())
        .collect();
    let bp: Vec<NamePairs> = mdcgs.iter().map(bidirected_pairs).collect();
    let bidirected = unique_maximum(&bp).ok_or_else(|| {
        Error::PropertyViolation("no unique maximal set of bidirected edges among MDCGs".into())
    })?;
    let mbmdcgs = mdcgs
        .iter()
        .zip(&bp)
        .filter(|(_, s)| **s == bidirected)
        .map(|(g, _)| g.clone())
        .collect();
    Ok(MaximalSets {
        directed_pairs: directed,
        mdcgs,
        bidirected,
        mbmdcgs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> MixedGraph {
        MixedGraph::from_edge_list(s).unwrap()
    }

    fn tx(set: &BTreeSet<Triplex>) -> Vec<String> {
        set.iter().map(Triplex::to_string).collect()
    }

    const EX4: &str = "A->B B--C B--D C<->E D<->E";

    #[test]
    fn triplex_examples() {
        assert_eq!(
            tx(&triplexes(&g(EX4)).unwrap()),
            [
                "({A,C},B)",
                "({A,D},B)",
                "({B,E},C)",
                "({B,E},D)",
                "({C,D},E)"
            ]
        );
        assert!(triplexes(&g("A->B B->C")).unwrap().is_empty());
        assert_eq!(
            tx(&triplexes(&g("A->C B--C C--D")).unwrap()),
            ["({A,B},C)", "({A,D},C)"]
        );
    }

    #[test]
    fn triplex_equivalence_examples() {
        assert!(triplex_equivalent(&g("A->B"), &g("B->A")).unwrap());
        assert!(triplex_equivalent(&g(EX4), &g(EX4)).unwrap());
        assert!(!triplex_equivalent(&g("A->B C->B"), &g("A->B B->C")).unwrap());
        assert!(triplex_equivalent(&g("A->B"), &g("A->C")).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert!(markov_equivalent(&g("A->B"), &g("B->A"), EquivalenceMode::Oracle).unwrap());
        let other = g("A->B B--C B--D E->C E->D");
        assert!(!markov_equivalent(&g(EX4), &other, EquivalenceMode::Oracle).unwrap());
        assert!(!markov_equivalent(&g(EX4), &other, EquivalenceMode::Triplex).unwrap());
    }

    #[test]
    fn single_pair_skeleton() {
        let sk = Skeleton::from_pairs(&["A", "B"], &[("A", "B")]).unwrap();
        let all = enumerate_same_skeleton(&sk, Family::Mamp).unwrap();
        let lists: Vec<String> = all.iter().map(MixedGraph::edge_list_string).collect();
        assert_eq!(lists, ["A--B", "A->B", "B->A", "A<->B"]);
        assert_eq!(enumerate_same_skeleton(&sk, Family::Amp).unwrap().len(), 3);
    }

    #[test]
    fn triangle_mvr_count() {
        let sk =
            Skeleton::from_pairs(&["A", "B", "C"], &[("A", "B"), ("B", "C"), ("A", "C")]).unwrap();
        let mvr = enumerate_same_skeleton(&sk, Family::Mvr).unwrap();
        let brute = mvr_triangle_count();
        assert_eq!(mvr.len(), brute);
        let distinct: BTreeSet<String> = mvr.iter().map(MixedGraph::edge_list_string).collect();
        assert_eq!(distinct.len(), mvr.len());
    }

    /// Counts MVR triangles by checking for a semidirected cycle directly.
    fn mvr_triangle_count() -> usize {
        let mut count = 0;
        // each edge: 0 forward, 1 backward, 2 bidirected around the cycle A,B,C
        for code in 0..27 {
            let e = [code % 3, code / 3 % 3, code / 9];
            let fwd = e.iter().all(|&k| k != 1) && e.contains(&0);
            let bwd = e.iter().all(|&k| k != 0) && e.contains(&1);
            if !fwd && !bwd {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn guard_is_enforced() {
        let names = ["A", "B", "C", "D", "E", "F"];
        let pairs: Vec<(&str, &str)> = (0..6)
            .flat_map(|i| (i + 1..6).map(move |j| (names[i], names[j])))
            .take(9)
            .collect();
        let sk = Skeleton::from_pairs(&names, &pairs).unwrap();
        assert!(matches!(
            enumerate_same_skeleton(&sk, Family::Mamp),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn ex4_is_not_representable_by_amp_or_mvr() {
        let ex4 = g(EX4);
        let target =
            enumerate_model(&ex4, Criterion::Mamp, &DeterminationMap::new(), ex4.all()).unwrap();
        let sk = Skeleton::of(&ex4);
        assert!(representability_search(&target, &sk, Family::Amp)
            .unwrap()
            .is_none());
        assert!(representability_search(&target, &sk, Family::Mvr)
            .unwrap()
            .is_none());
        let found = representability_search(&target, &sk, Family::Mamp)
            .unwrap()
            .unwrap();
        assert!(triplex_equivalent(&found, &ex4).unwrap());
    }

    #[test]
    fn maximal_sets_of_single_directed_edge() {
        let class = triplex_class(&g("A->B")).unwrap();
        assert_eq!(class.members.len(), 4);
        let m = maximal_sets(&class).unwrap();
        assert_eq!(m.directed_pairs.len(), 1);
        let mdcgs: Vec<String> = m.mdcgs.iter().map(MixedGraph::edge_list_string).collect();
        assert_eq!(mdcgs, ["A->B", "B->A"]);
        assert!(m.bidirected.is_empty());
        assert_eq!(m.mbmdcgs.len(), 2);
    }

    #[test]
    fn undirected_edge_shares_the_class() {
        // the class of A--B is the same class as that of A->B
        let class = triplex_class(&g("A--B")).unwrap();
        let lists: Vec<String> = class
            .members
            .iter()
            .map(MixedGraph::edge_list_string)
            .collect();
        assert!(lists.contains(&"A<->B".to_string()));
        assert!(lists.contains(&"A->B".to_string()));
        assert!(maximal_sets(&class).unwrap().bidirected.is_empty());
    }

    #[test]
    fn collider_class_pins_arrowheads() {
        let class = triplex_class(&g("A->B C->B")).unwrap();
        let m = maximal_sets(&class).unwrap();
        assert_eq!(m.directed_pairs.len(), 2);
        assert_eq!(m.mdcgs.len(), 1);
        assert_eq!(m.mdcgs[0].edge_list_string(), "A->B, C->B");
    }

    #[test]
    fn uniqueness_trap_fires_on_antichain() {
        let class = ClassEnumeration {
            skeleton: Skeleton::of(&g("A->B B->C")),
            members: vec![g("A->B B--C"), g("A--B B->C")],
        };
        assert!(matches!(
            maximal_sets(&class),
            Err(Error::PropertyViolation(_))
        ));
    }
}
