//! Pairwise separation base, compositional graphoid closure and property
//! auditing of independence models.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{Family, MixedGraph, Relation};
use crate::nodeset::NodeSet;
use crate::separation::{IndependenceModel, Statement};

/// Closure and audits work on a dense table of `4^n` statements.
pub const CLOSURE_MAX_NODES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
    Composition,
    /// Audit only; never used to derive statements.
    WeakTransitivity,
}

impl RuleKind {
    pub const GRAPHOID: [RuleKind; 5] = [
        RuleKind::Symmetry,
        RuleKind::Decomposition,
        RuleKind::WeakUnion,
        RuleKind::Contraction,
        RuleKind::Intersection,
    ];
    pub const COMPOSITIONAL: [RuleKind; 6] = [
        RuleKind::Symmetry,
        RuleKind::Decomposition,
        RuleKind::WeakUnion,
        RuleKind::Contraction,
        RuleKind::Intersection,
        RuleKind::Composition,
    ];
    pub const ALL: [RuleKind; 7] = [
        RuleKind::Symmetry,
        RuleKind::Decomposition,
        RuleKind::WeakUnion,
        RuleKind::Contraction,
        RuleKind::Intersection,
        RuleKind::Composition,
        RuleKind::WeakTransitivity,
    ];
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleKind::Symmetry => "symmetry",
            RuleKind::Decomposition => "decomposition",
            RuleKind::WeakUnion => "weak-union",
            RuleKind::Contraction => "contraction",
            RuleKind::Intersection => "intersection",
            RuleKind::Composition => "composition",
            RuleKind::WeakTransitivity => "weak-transitivity",
        };
        f.write_str(s)
    }
}

/// The pairwise separation base of a MAMP CG, as a model over all its nodes.
pub fn pairwise_base(g: &MixedGraph) -> Result<IndependenceModel> {
    g.validate(Family::Mamp).into_result()?;
    let mut m = IndependenceModel::new(g.names().iter().cloned())?;
    for a in 0..g.n() {
        let sa = NodeSet::singleton(a);
        let de_a = g.descendants(sa);
        for b in 0..g.n() {
            if a == b || g.adjacent(a, b) {
                continue;
            }
            let sb = NodeSet::singleton(b);
            let z = if !de_a.contains(b) {
                g.parents(a)
            } else if g.descendants(sb).contains(a) {
                if g.undirected_component(a) == g.undirected_component(b) {
                    let ne = g.neighbors(a);
                    ne.union(g.neighborhood(sa.union(ne), Relation::Parents))
                } else {
                    g.parents(a)
                }
            } else {
                continue;
            };
            m.insert(Statement::new(sa, sb, z)?)?;
        }
    }
    Ok(m)
}

/// Statements over at most [`CLOSURE_MAX_NODES`] nodes, both orientations
/// stored, indexed by one base-4 digit per node (0 absent, 1 X, 2 Y, 3 Z).
struct Dense {
    n: usize,
    present: Vec<bool>,
}

impl Dense {
    fn new(n: usize) -> Result<Self> {
        if n > CLOSURE_MAX_NODES {
            return Err(Error::GuardExceeded(format!(
                "closure universe has {n} nodes; the limit is {CLOSURE_MAX_NODES}"
            )));
        }
        Ok(Dense {
            n,
            present: vec![false; 1 << (2 * n)],
        })
    }

    fn from_model(m: &IndependenceModel) -> Result<Self> {
        let mut d = Dense::new(m.universe().len())?;
        for s in m.statements() {
            d.insert(s.x, s.y, s.z);
        }
        Ok(d)
    }

    fn code(x: NodeSet, y: NodeSet, z: NodeSet) -> usize {
        let mut c = 0;
        for v in x.iter() {
            c |= 1 << (2 * v);
        }
        for v in y.iter() {
            c |= 2 << (2 * v);
        }
        for v in z.iter() {
            c |= 3 << (2 * v);
        }
        c
    }

    fn has(&self, x: NodeSet, y: NodeSet, z: NodeSet) -> bool {
        !x.is_empty() && !y.is_empty() && self.present[Self::code(x, y, z)]
    }

    /// Adds both orientations; false when already present.
    fn insert(&mut self, x: NodeSet, y: NodeSet, z: NodeSet) -> bool {
        let c = Self::code(x, y, z);
        if self.present[c] {
            return false;
        }
        self.present[c] = true;
        self.present[Self::code(y, x, z)] = true;
        true
    }

    fn full(&self) -> NodeSet {
        NodeSet::full(self.n)
    }

    fn canonical(&self) -> BTreeSet<Statement> {
        let mut out = BTreeSet::new();
        for (c, &p) in self.present.iter().enumerate() {
            if !p {
                continue;
            }
            let (mut x, mut y, mut z) = (NodeSet::EMPTY, NodeSet::EMPTY, NodeSet::EMPTY);
            for v in 0..self.n {
                match (c >> (2 * v)) & 3 {
                    1 => x.insert(v),
                    2 => y.insert(v),
                    3 => z.insert(v),
                    _ => {}
                }
            }
            if x.min() < y.min() {
                out.insert(Statement { x, y, z });
            }
        }
        out
    }
}

/// One rule instance: premises and the conclusion(s) derived from them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Instance {
    rule: RuleKind,
    premises: Vec<Statement>,
    /// for weak transitivity either conclusion suffices
    conclusions: Vec<Statement>,
}

fn st(x: NodeSet, y: NodeSet, z: NodeSet) -> Statement {
    Statement::canonical(x, y, z)
}

/// Every instance of the selected rules in which the oriented statement
/// `x ⊥ t | z` (assumed present) is a premise and all other premises are
/// present in `d`. Conclusions are returned whether present or not.
fn instances(
    d: &Dense,
    x: NodeSet,
    t: NodeSet,
    z: NodeSet,
    rules: &[RuleKind],
    out: &mut Vec<Instance>,
) {
    let me = st(x, t, z);
    let free = d.full().minus(x.union(t).union(z));
    for &rule in rules {
        match rule {
            RuleKind::Symmetry => {}
            RuleKind::Decomposition | RuleKind::WeakUnion => {
                for y in t.nonempty_subsets() {
                    if y == t {
                        continue;
                    }
                    let w = t.minus(y);
                    let c = if rule == RuleKind::Decomposition {
                        st(x, y, z)
                    } else {
                        st(x, y, z.union(w))
                    };
                    out.push(Instance {
                        rule,
                        premises: vec![me],
                        conclusions: vec![c],
                    });
                }
            }
            RuleKind::Contraction => {
                // as x ⊥ y | z' with z' = z ∪ w
                for w in z.nonempty_subsets() {
                    let zz = z.minus(w);
                    if d.has(x, w, zz) {
                        out.push(Instance {
                            rule,
                            premises: vec![me, st(x, w, zz)],
                            conclusions: vec![st(x, t.union(w), zz)],
                        });
                    }
                }
                // as x ⊥ w | z
                for y in free.nonempty_subsets() {
                    if d.has(x, y, z.union(t)) {
                        out.push(Instance {
                            rule,
                            premises: vec![st(x, y, z.union(t)), me],
                            conclusions: vec![st(x, y.union(t), z)],
                        });
                    }
                }
            }
            RuleKind::Intersection => {
                for w in z.nonempty_subsets() {
                    let zz = z.minus(w);
                    if d.has(x, w, zz.union(t)) {
                        out.push(Instance {
                            rule,
                            premises: vec![me, st(x, w, zz.union(t))],
                            conclusions: vec![st(x, t.union(w), zz)],
                        });
                    }
                }
            }
            RuleKind::Composition => {
                for w in free.nonempty_subsets() {
                    if d.has(x, w, z) {
                        out.push(Instance {
                            rule,
                            premises: vec![me, st(x, w, z)],
                            conclusions: vec![st(x, t.union(w), z)],
                        });
                    }
                }
            }
            RuleKind::WeakTransitivity => {
                for k in free.iter() {
                    let sk = NodeSet::singleton(k);
                    if d.has(x, t, z.with(k)) {
                        out.push(Instance {
                            rule,
                            premises: vec![me, st(x, t, z.with(k))],
                            conclusions: vec![st(x, sk, z), st(sk, t, z)],
                        });
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureResult {
    pub model: IndependenceModel,
    /// number of statements taken off the worklist
    pub iterations: usize,
}

/// Least fixpoint of the compositional graphoid rules over `base.universe()`.
pub fn closure(base: &IndependenceModel) -> Result<ClosureResult> {
    let mut d = Dense::new(base.universe().len())?;
    let mut work: Vec<(NodeSet, NodeSet, NodeSet)> = Vec::new();
    for s in base.statements() {
        if d.insert(s.x, s.y, s.z) {
            work.push((s.x, s.y, s.z));
        }
    }
    let mut iterations = 0;
    let mut found = Vec::new();
    while let Some((x, y, z)) = work.pop() {
        iterations += 1;
        for (a, b) in [(x, y), (y, x)] {
            found.clear();
            instances(&d, a, b, z, &RuleKind::COMPOSITIONAL, &mut found);
            for inst in &found {
                let c = inst.conclusions[0];
                if d.insert(c.x, c.y, c.z) {
                    work.push((c.x, c.y, c.z));
                }
            }
        }
    }
    Ok(ClosureResult {
        model: IndependenceModel::from_parts(base.universe().to_vec(), d.canonical()),
        iterations,
    })
}

/// A rule instance whose premises hold in the model but no conclusion does.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RuleViolation {
    pub rule: RuleKind,
    pub premises: Vec<Statement>,
    pub missing: Vec<Statement>,
}

impl RuleViolation {
    pub fn describe(&self, m: &IndependenceModel) -> String {
        let fmt = |v: &[Statement]| {
            v.iter()
                .map(|s| m.format_statement(s))
                .collect::<Vec<_>>()
                .join(" and ")
        };
        format!(
            "{}: from {} but missing {}",
            self.rule,
            fmt(&self.premises),
            self.missing
                .iter()
                .map(|s| m.format_statement(s))
                .collect::<Vec<_>>()
                .join(" or ")
        )
    }
}

/// Instantiates every selected rule over the model's universe and reports the
/// instances whose conclusion is absent. Symmetry holds by construction
/// since statements are stored canonically.
pub fn check_properties(m: &IndependenceModel, rules: &[RuleKind]) -> Result<Vec<RuleViolation>> {
    let d = Dense::from_model(m)?;
    let mut out = BTreeSet::new();
    let mut found = Vec::new();
    for s in m.statements() {
        for (a, b) in [(s.x, s.y), (s.y, s.x)] {
            found.clear();
            instances(&d, a, b, s.z, rules, &mut found);
            for inst in found.drain(..) {
                if !inst.conclusions.iter().any(|c| d.has(c.x, c.y, c.z)) {
                    let (mut premises, mut missing) = (inst.premises, inst.conclusions);
                    premises.sort();
                    missing.sort();
                    out.insert(RuleViolation {
                        rule: inst.rule,
                        premises,
                        missing,
                    });
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Outcome of comparing two models over the same universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDiff {
    pub equal: bool,
    pub only_left: Vec<Statement>,
    pub only_right: Vec<Statement>,
    /// total differing statements, including those not listed
    pub total: usize,
}

impl ModelDiff {
    pub fn describe(&self, m: &IndependenceModel) -> String {
        if self.equal {
            return "models are equal".to_string();
        }
        let mut lines = vec![format!("{} differing statements", self.total)];
        lines.extend(
            self.only_left
                .iter()
                .map(|s| format!("< {}", m.format_statement(s))),
        );
        lines.extend(
            self.only_right
                .iter()
                .map(|s| format!("> {}", m.format_statement(s))),
        );
        lines.join("\n")
    }
}

/// Set equality with up to `limit` witnesses listed per side.
pub fn models_equal(
    a: &IndependenceModel,
    b: &IndependenceModel,
    limit: usize,
) -> Result<ModelDiff> {
    if a.universe() != b.universe() {
        return domain(format!(
            "universes differ: {:?} vs {:?}",
            a.universe(),
            b.universe()
        ));
    }
    let left: BTreeSet<Statement> = a.statements().copied().collect();
    let right: BTreeSet<Statement> = b.statements().copied().collect();
    let only_left: Vec<Statement> = left.difference(&right).copied().collect();
    let only_right: Vec<Statement> = right.difference(&left).copied().collect();
    let total = only_left.len() + only_right.len();
    Ok(ModelDiff {
        equal: total == 0,
        only_left: only_left.into_iter().take(limit).collect(),
        only_right: only_right.into_iter().take(limit).collect(),
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separation::{enumerate_model, Criterion, DeterminationMap};

    fn g(s: &str) -> MixedGraph {
        MixedGraph::from_edge_list(s).unwrap()
    }

    fn model(universe: &[&str], stmts: &[(&[&str], &[&str], &[&str])]) -> IndependenceModel {
        let mut m = IndependenceModel::new(universe.iter().copied()).unwrap();
        for (x, y, z) in stmts {
            m.insert_named(x, y, z).unwrap();
        }
        m
    }

    fn mamp_model(gr: &MixedGraph) -> IndependenceModel {
        enumerate_model(gr, Criterion::Mamp, &DeterminationMap::new(), gr.all()).unwrap()
    }

    #[test]
    fn base_of_chain() {
        let b = pairwise_base(&g("A->B B->C")).unwrap();
        assert_eq!(b, model(&["A", "B", "C"], &[(&["A"], &["C"], &["B"])]));
    }

    #[test]
    fn base_of_complete_graph_is_empty() {
        assert!(pairwise_base(&g("A->B B->C A->C")).unwrap().is_empty());
    }

    #[test]
    fn base_of_ex5_has_marginal_statement() {
        let ex5 = g("A->D B->J E->F I->F C--D E--D J--K I--J");
        let b = pairwise_base(&ex5).unwrap();
        assert!(b.contains_named(&["C"], &["A"], &[] as &[&str]));
    }

    #[test]
    fn closure_examples() {
        let base = model(&["A", "B", "C"], &[(&["C"], &["A"], &["B"])]);
        let c = closure(&base).unwrap();
        assert_eq!(c.model, base);

        let empty = model(&["A", "B"], &[]);
        assert!(closure(&empty).unwrap().model.is_empty());

        let base = model(
            &["A", "B", "C"],
            &[(&["A"], &["B"], &[]), (&["A"], &["C"], &[])],
        );
        let c = closure(&base).unwrap().model;
        assert!(c.contains_named(&["A"], &["B", "C"], &[] as &[&str]));
        assert!(c.contains_named(&["A"], &["B"], &["C"]));
        assert!(c.contains_named(&["A"], &["C"], &["B"]));
    }

    #[test]
    fn closure_guard() {
        let big = IndependenceModel::new(["A", "B", "C", "D", "E", "F", "G", "H"]).unwrap();
        assert!(matches!(closure(&big), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn decomposition_violation_is_reported() {
        let m = model(&["A", "B", "C"], &[(&["A"], &["B", "C"], &[])]);
        let v = check_properties(&m, &[RuleKind::Decomposition]).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|v| v.rule == RuleKind::Decomposition));
        let missing: Vec<String> = v
            .iter()
            .map(|v| m.format_statement(&v.missing[0]))
            .collect();
        assert!(missing.contains(&"A _||_ B | ".to_string()));
    }

    #[test]
    fn weak_transitivity_violation() {
        // A ⊥ B and A ⊥ B | C without A ⊥ C or C ⊥ B
        let m = model(
            &["A", "B", "C"],
            &[(&["A"], &["B"], &[]), (&["A"], &["B"], &["C"])],
        );
        let v = check_properties(&m, &[RuleKind::WeakTransitivity]).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].missing.len(), 2);
    }

    #[test]
    fn ex4_model_is_a_compositional_graphoid_with_weak_transitivity() {
        let ex4 = g("A->B B--C B--D C<->E D<->E");
        let m = mamp_model(&ex4);
        assert!(check_properties(&m, &RuleKind::ALL).unwrap().is_empty());
        let cl = closure(&pairwise_base(&ex4).unwrap()).unwrap().model;
        assert!(models_equal(&cl, &m, 5).unwrap().equal);
    }

    #[test]
    fn models_equal_reports_witness() {
        let collider = mamp_model(&g("A->B C->B"));
        let chain = mamp_model(&g("A->B B->C"));
        let d = models_equal(&collider, &chain, 10).unwrap();
        assert!(!d.equal);
        assert!(d.only_left.contains(&Statement::pair(0, 2, NodeSet::EMPTY)));
        assert!(models_equal(&chain, &chain, 10).unwrap().equal);
        let other = IndependenceModel::new(["A"]).unwrap();
        assert!(models_equal(&chain, &other, 1).is_err());
    }
}
