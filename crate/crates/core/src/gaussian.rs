//! Gaussian linear structural equation models respecting a MAMP CG, and
//! numerical auditing of its separations.
//!
//! Each connectivity component `K` follows `K = β pa(K) + ε` with
//! `ε ~ N(0, Λ_K)`. Within an undirected component the precision of `Λ` is
//! zero on missing undirected edges; across undirected components `Λ` itself
//! is zero on missing bidirected edges.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graph::{ComponentKind, Family, MixedGraph};
use crate::nodeset::NodeSet;
use crate::separation::{Criterion, DeterminationMap, Separator};

/// Node limit for [`audit_faithfulness`].
pub const AUDIT_MAX_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemConfig {
    /// magnitude range of coefficients and off-diagonal precision entries
    pub coef_range: (f64, f64),
    /// range of the conditional error variances
    pub variance_range: (f64, f64),
    /// smallest eigenvalue accepted for any covariance block
    pub pd_floor: f64,
    pub max_resamples: usize,
}

impl Default for SemConfig {
    fn default() -> Self {
        SemConfig {
            coef_range: (0.1, 1.0),
            variance_range: (0.5, 1.5),
            pd_floor: 1e-9,
            max_resamples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemParameters {
    pub names: Vec<String>,
    /// connectivity components in topological order, members sorted
    pub components: Vec<Vec<usize>>,
    /// `beta[(a, p)]` is the coefficient of parent `p` in the equation of `a`
    pub beta: DMatrix<f64>,
    /// error covariance per component, rows in member order
    pub lambda: Vec<DMatrix<f64>>,
}

fn signed_uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    let v = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().max()
}

/// Error covariance of one connectivity component.
fn sample_lambda(
    g: &MixedGraph,
    members: &[usize],
    rng: &mut impl Rng,
    cfg: &SemConfig,
) -> DMatrix<f64> {
    let k = members.len();
    let pos = |v: usize| members.iter().position(|&m| m == v).unwrap();
    let mut block = DMatrix::zeros(k, k);
    let mut seen = NodeSet::EMPTY;
    for &v in members {
        if seen.contains(v) {
            continue;
        }
        let uc: Vec<usize> = g.undirected_component(v).iter().collect();
        seen = seen.union(uc.iter().copied().collect());
        let u = uc.len();
        let mut prec = DMatrix::zeros(u, u);
        for i in 0..u {
            for j in i + 1..u {
                if g.neighbors(uc[i]).contains(uc[j]) {
                    let w = signed_uniform(rng, cfg.coef_range);
                    prec[(i, j)] = w;
                    prec[(j, i)] = w;
                }
            }
        }
        for i in 0..u {
            let off: f64 = (0..u).filter(|&j| j != i).map(|j| prec[(i, j)].abs()).sum();
            let var = rng.gen_range(cfg.variance_range.0..=cfg.variance_range.1);
            prec[(i, i)] = off + 1.0 / var;
        }
        let cov = prec.try_inverse().expect("diagonally dominant precision");
        for i in 0..u {
            for j in 0..u {
                block[(pos(uc[i]), pos(uc[j]))] = cov[(i, j)];
            }
        }
    }
    let mut cross = DMatrix::zeros(k, k);
    for (i, &a) in members.iter().enumerate() {
        for (j, &b) in members.iter().enumerate().skip(i + 1) {
            if g.spouses(a).contains(b) {
                let w = signed_uniform(rng, cfg.coef_range);
                cross[(i, j)] = w;
                cross[(j, i)] = w;
            }
        }
    }
    let norm = spectral_norm(&cross);
    if norm > 0.0 {
        let t = 0.9 * min_eigenvalue(&block) / norm;
        block += cross * t;
    }
    block
}

/// Draws parameters for a valid MAMP CG, deterministically in `seed`.
pub fn sample_parameters(g: &MixedGraph, seed: u64, cfg: &SemConfig) -> Result<SemParameters> {
    g.validate(Family::Mamp).into_result()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let components: Vec<Vec<usize>> = g
        .component_order()?
        .into_iter()
        .map(|c| c.iter().collect())
        .collect();
    let n = g.n();
    for _ in 0..cfg.max_resamples.max(1) {
        let mut beta = DMatrix::zeros(n, n);
        for a in 0..n {
            for p in g.parents(a).iter() {
                beta[(a, p)] = signed_uniform(&mut rng, cfg.coef_range);
            }
        }
        let lambda: Vec<DMatrix<f64>> = components
            .iter()
            .map(|c| sample_lambda(g, c, &mut rng, cfg))
            .collect();
        if lambda.iter().all(|l| min_eigenvalue(l) > cfg.pd_floor) {
            return Ok(SemParameters {
                names: g.names().to_vec(),
                components,
                beta,
                lambda,
            });
        }
    }
    Err(Error::Numerical(format!(
        "no positive-definite error covariance after {} draws",
        cfg.max_resamples
    )))
}

impl SemParameters {
    /// The full `n × n` error covariance.
    pub fn error_covariance(&self) -> DMatrix<f64> {
        let n = self.names.len();
        let mut out = DMatrix::zeros(n, n);
        for (c, l) in self.components.iter().zip(&self.lambda) {
            for (i, &a) in c.iter().enumerate() {
                for (j, &b) in c.iter().enumerate() {
                    out[(a, b)] = l[(i, j)];
                }
            }
        }
        out
    }

    /// Checks the zero patterns against `g` with absolute tolerance `tol`.
    pub fn check_structure(&self, g: &MixedGraph, tol: f64) -> Result<()> {
        let n = self.names.len();
        for a in 0..n {
            for p in 0..n {
                let is_parent = g.parents(a).contains(p);
                if is_parent != (self.beta[(a, p)] != 0.0) {
                    return Err(Error::PropertyViolation(format!(
                        "coefficient support differs from parents at ({}, {})",
                        self.names[a], self.names[p]
                    )));
                }
            }
        }
        let lam = self.error_covariance();
        for u in g.components(ComponentKind::Undirected) {
            let idx: Vec<usize> = u.iter().collect();
            let sub = lam.select_rows(&idx).select_columns(&idx);
            let prec = sub
                .try_inverse()
                .ok_or_else(|| Error::Numerical("singular error block".into()))?;
            for (i, &a) in idx.iter().enumerate() {
                for (j, &b) in idx.iter().enumerate() {
                    if i != j && !g.neighbors(a).contains(b) && prec[(i, j)].abs() > tol {
                        return Err(Error::PropertyViolation(format!(
                            "error precision nonzero between {} and {}",
                            self.names[a], self.names[b]
                        )));
                    }
                }
            }
            for a in u.iter() {
                for b in 0..n {
                    if !u.contains(b) && !g.spouses(a).contains(b) && lam[(a, b)].abs() > tol {
                        return Err(Error::PropertyViolation(format!(
                            "error covariance nonzero between {} and {}",
                            self.names[a], self.names[b]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A symmetric positive-definite covariance over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    pub names: Vec<String>,
    pub matrix: DMatrix<f64>,
}

/// `Σ = (I − B)⁻¹ Λ (I − B)⁻ᵀ`.
pub fn joint_covariance(params: &SemParameters) -> Result<Covariance> {
    let n = params.names.len();
    let ib = DMatrix::<f64>::identity(n, n) - &params.beta;
    let inv = ib
        .try_inverse()
        .ok_or_else(|| Error::Numerical("I - B is singular".into()))?;
    let mut sigma = &inv * params.error_covariance() * inv.transpose();
    // symmetrize away rounding
    sigma = (&sigma + sigma.transpose()) * 0.5;
    let floor = SemConfig::default().pd_floor;
    let ev = min_eigenvalue(&sigma);
    if ev <= floor {
        return Err(Error::Numerical(format!(
            "joint covariance has minimum eigenvalue {ev:e}"
        )));
    }
    Ok(Covariance {
        names: params.names.clone(),
        matrix: sigma,
    })
}

impl Covariance {
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    fn precision_of(&self, idx: &[usize]) -> Result<DMatrix<f64>> {
        self.matrix
            .select_rows(idx)
            .select_columns(idx)
            .cholesky()
            .map(|c| c.inverse())
            .ok_or_else(|| Error::Numerical("singular covariance submatrix".into()))
    }

    /// `ρ_{ab·Z}` from the precision of the submatrix over `{a, b} ∪ Z`.
    pub fn partial_correlation(&self, a: usize, b: usize, z: NodeSet) -> Result<f64> {
        if a == b || z.contains(a) || z.contains(b) {
            return domain("partial correlation needs distinct a, b outside Z");
        }
        let mut idx = vec![a, b];
        idx.extend(z.iter());
        let p = self.precision_of(&idx)?;
        let rho = -p[(0, 1)] / (p[(0, 0)] * p[(1, 1)]).sqrt();
        Ok(rho.clamp(-1.0, 1.0))
    }

    /// Recovers `(β_K, Λ_K)` of one component from the joint distribution of
    /// `K ∪ pa(K)`: `β = −(Ω_KK)⁻¹ Ω_{K,pa}` and `Λ = (Ω_KK)⁻¹`. Columns of
    /// `β` follow `parents`.
    pub fn conditional_parameters(
        &self,
        component: &[usize],
        parents: &[usize],
    ) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let k = component.len();
        let idx: Vec<usize> = component.iter().chain(parents).copied().collect();
        let omega = self.precision_of(&idx)?;
        let okk = omega.view((0, 0), (k, k)).into_owned();
        let okp = omega.view((0, k), (k, parents.len())).into_owned();
        let lambda = okk
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular precision block".into()))?;
        let beta = -(&lambda * okp);
        Ok((beta, lambda))
    }
}

pub fn partial_correlation(c: &Covariance, a: &str, b: &str, z: &[&str]) -> Result<f64> {
    let z: NodeSet = z.iter().map(|n| c.index_of(n)).collect::<Result<_>>()?;
    c.partial_correlation(c.index_of(a)?, c.index_of(b)?, z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CiThresholds {
    /// separated statements must have `|ρ|` below this
    pub zero_tol: f64,
    /// dependent statements are flagged at or below this
    pub nonzero_floor: f64,
    /// seeds used when none are given
    pub retry_seeds: usize,
}

impl Default for CiThresholds {
    fn default() -> Self {
        CiThresholds {
            zero_tol: 1e-7,
            nonzero_floor: 1e-5,
            retry_seeds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRecord {
    pub x: String,
    pub y: String,
    pub z: Vec<String>,
    pub separated: bool,
    pub rho: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub seeds: Vec<u64>,
    pub thresholds: CiThresholds,
    /// singleton statements checked (per seed)
    pub separated_statements: usize,
    pub dependent_statements: usize,
    /// separated statements with `|ρ| >= zero_tol` on some seed
    pub markov_failures: Vec<AuditRecord>,
    /// dependent statements at or below the floor on some seed
    pub flagged: Vec<AuditRecord>,
    /// dependent statements at or below the floor on every seed
    pub unexcused: Vec<AuditRecord>,
    pub worst_separated_rho: f64,
    /// smallest over dependent statements of the largest `|ρ|` across seeds
    pub weakest_dependent_rho: f64,
    pub records: Vec<AuditRecord>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.markov_failures.is_empty() && self.unexcused.is_empty()
    }

    /// Fraction of dependent statements exceeding the floor on some seed.
    pub fn faithful_fraction(&self) -> f64 {
        if self.dependent_statements == 0 {
            return 1.0;
        }
        1.0 - self.unexcused.len() as f64 / self.dependent_statements as f64
    }
}

/// Checks every singleton statement of `g` against the partial correlations
/// of sampled models, one per seed.
pub fn audit_faithfulness(
    g: &MixedGraph,
    thresholds: &CiThresholds,
    seeds: &[u64],
) -> Result<AuditReport> {
    if thresholds.zero_tol >= thresholds.nonzero_floor {
        return domain("zero_tol must be below nonzero_floor");
    }
    if g.n() > AUDIT_MAX_NODES {
        return Err(Error::GuardExceeded(format!(
            "audits are limited to {AUDIT_MAX_NODES} nodes"
        )));
    }
    let seeds: Vec<u64> = if seeds.is_empty() {
        (0..thresholds.retry_seeds as u64).collect()
    } else {
        seeds.to_vec()
    };
    let det = DeterminationMap::new();
    let sep = Separator::new(g, Criterion::Mamp, &det)?;
    let covs: Vec<Covariance> = seeds
        .iter()
        .map(|&s| joint_covariance(&sample_parameters(g, s, &SemConfig::default())?))
        .collect::<Result<_>>()?;

    let mut report = AuditReport {
        seeds: seeds.clone(),
        thresholds: *thresholds,
        separated_statements: 0,
        dependent_statements: 0,
        markov_failures: Vec::new(),
        flagged: Vec::new(),
        unexcused: Vec::new(),
        worst_separated_rho: 0.0,
        weakest_dependent_rho: f64::INFINITY,
        records: Vec::new(),
    };
    for a in 0..g.n() {
        for b in a + 1..g.n() {
            let rest = g.all().without(a).without(b);
            for z in rest.subsets() {
                let separated = sep.separated(NodeSet::singleton(a), NodeSet::singleton(b), z)?;
                let mut best: Option<AuditRecord> = None;
                for (&seed, c) in seeds.iter().zip(&covs) {
                    let rho = c.partial_correlation(a, b, z)?;
                    let rec = AuditRecord {
                        x: g.name(a).to_string(),
                        y: g.name(b).to_string(),
                        z: g.names_of(z),
                        separated,
                        rho,
                        seed,
                    };
                    if separated {
                        report.worst_separated_rho = report.worst_separated_rho.max(rho.abs());
                        if rho.abs() >= thresholds.zero_tol {
                            report.markov_failures.push(rec.clone());
                        }
                    } else {
                        if rho.abs() <= thresholds.nonzero_floor {
                            report.flagged.push(rec.clone());
                        }
                        if best.as_ref().is_none_or(|r| rho.abs() > r.rho.abs()) {
                            best = Some(rec.clone());
                        }
                    }
                    report.records.push(rec);
                }
                if separated {
                    report.separated_statements += 1;
                } else {
                    report.dependent_statements += 1;
                    let best = best.expect("at least one seed");
                    report.weakest_dependent_rho = report.weakest_dependent_rho.min(best.rho.abs());
                    if best.rho.abs() <= thresholds.nonzero_floor {
                        report.unexcused.push(best);
                    }
                }
            }
        }
    }
    if report.dependent_statements == 0 {
        report.weakest_dependent_rho = 0.0;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> MixedGraph {
        MixedGraph::from_edge_list(s).unwrap()
    }

    fn params(gr: &MixedGraph, seed: u64) -> SemParameters {
        sample_parameters(gr, seed, &SemConfig::default()).unwrap()
    }

    #[test]
    fn single_node() {
        let p = params(&g("A"), 7);
        assert_eq!(p.beta, DMatrix::zeros(1, 1));
        let v = p.lambda[0][(0, 0)];
        assert!((0.5..=1.5).contains(&v));
        let c = joint_covariance(&p).unwrap();
        assert_eq!(c.matrix[(0, 0)], v);
    }

    #[test]
    fn undirected_pair_has_dense_precision() {
        let p = params(&g("A--B"), 1);
        let prec = p.lambda[0].clone().try_inverse().unwrap();
        assert!(prec[(0, 1)].abs() >= 0.1);
    }

    #[test]
    fn fig2_zero_pattern() {
        let fig2 = g("A->B A->C A->D B->D C--D C--E D<->F E<->F");
        for seed in 0..5 {
            let p = params(&fig2, seed);
            p.check_structure(&fig2, 1e-12).unwrap();
            assert_eq!(p.components.len(), 3);
            let lam = p.error_covariance();
            // C = 2, D = 3, E = 4, F = 5
            let sub = lam.select_rows(&[2, 3, 4]).select_columns(&[2, 3, 4]);
            let prec = sub.try_inverse().unwrap();
            assert!(prec[(1, 2)].abs() < 1e-12);
            assert_eq!(lam[(2, 5)], 0.0);
            assert!(lam[(3, 5)] != 0.0 && lam[(4, 5)] != 0.0);
        }
    }

    #[test]
    fn seed_determinism() {
        let gr = g("A->B B--C C<->D");
        assert_eq!(params(&gr, 42), params(&gr, 42));
        assert_ne!(params(&gr, 42), params(&gr, 43));
    }

    #[test]
    fn two_node_chain_by_hand() {
        let gr = g("A->B");
        let mut p = params(&gr, 0);
        let b = 0.7;
        p.beta[(1, 0)] = b;
        p.lambda = vec![DMatrix::from_element(1, 1, 1.0); 2];
        let c = joint_covariance(&p).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, b, b, b * b + 1.0]);
        assert!((c.matrix.clone() - expect).abs().max() < 1e-14);
        let rho = partial_correlation(&c, "A", "B", &[]).unwrap();
        assert!((rho - b / (b * b + 1.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn identity_covariance_has_zero_partial_correlation() {
        let c = Covariance {
            names: vec!["A".into(), "B".into(), "C".into()],
            matrix: DMatrix::identity(3, 3),
        };
        assert_eq!(partial_correlation(&c, "A", "B", &["C"]).unwrap(), 0.0);
        assert!(partial_correlation(&c, "A", "A", &[]).is_err());
    }

    #[test]
    fn chain_screens_off() {
        let gr = g("A->B B->C");
        let mut p = params(&gr, 0);
        p.beta[(1, 0)] = 1.0;
        p.beta[(2, 1)] = 1.0;
        p.lambda = vec![DMatrix::from_element(1, 1, 1.0); 3];
        let c = joint_covariance(&p).unwrap();
        assert!(partial_correlation(&c, "A", "C", &["B"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn round_trip_recovers_parameters() {
        let fig2 = g("A->B A->C A->D B->D C--D C--E D<->F E<->F");
        let p = params(&fig2, 3);
        let c = joint_covariance(&p).unwrap();
        for (comp, lam) in p.components.iter().zip(&p.lambda) {
            let set: NodeSet = comp.iter().copied().collect();
            let parents: Vec<usize> = fig2
                .neighborhood(set, crate::graph::Relation::Parents)
                .iter()
                .collect();
            let (beta, lambda) = c.conditional_parameters(comp, &parents).unwrap();
            assert!((lambda - lam).abs().max() < 1e-10);
            for (i, &a) in comp.iter().enumerate() {
                for (j, &q) in parents.iter().enumerate() {
                    assert!((beta[(i, j)] - p.beta[(a, q)]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn audits() {
        let th = CiThresholds::default();
        let ex4 = g("A->B B--C B--D C<->E D<->E");
        let r = audit_faithfulness(&ex4, &th, &[]).unwrap();
        assert!(r.markov_failures.is_empty());
        assert_eq!(r.seeds, [0, 1, 2]);

        let empty = g("A B C");
        let r = audit_faithfulness(&empty, &th, &[]).unwrap();
        assert_eq!(r.dependent_statements, 0);
        assert!(r.worst_separated_rho < 1e-7);

        let fig2 = g("A->B A->C A->D B->D C--D C--E D<->F E<->F");
        let r = audit_faithfulness(&fig2, &th, &[0, 1, 2]).unwrap();
        assert!(r.passed(), "{:?}", r.unexcused);
    }

    #[test]
    fn report_serializes_records() {
        let r = audit_faithfulness(&g("A->B"), &CiThresholds::default(), &[5]).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        let rec = &json["records"][0];
        for key in ["x", "y", "z", "separated", "rho", "seed"] {
            assert!(rec.get(key).is_some());
        }
    }
}
