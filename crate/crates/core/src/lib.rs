//! Marginal AMP chain graphs.
//!
//! Graph container and validity checks live in [`graph`], separation criteria
//! and independence models in [`separation`], the error-node transforms in
//! [`transforms`], triplex-based Markov equivalence in [`equivalence`], the
//! compositional-graphoid calculus in [`graphoid`] and Gaussian SEM auditing in
//! [`gaussian`]. [`format`] reads and writes the line-oriented graph format,
//! [`fixtures`] holds the example graphs and [`sample`] draws random ones.

pub mod equivalence;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod gaussian;
pub mod graph;
pub mod graphoid;
pub mod nodeset;
pub mod sample;
pub mod separation;
pub mod transforms;

pub use equivalence::{
    enumerate_same_skeleton, markov_equivalent, maximal_sets, representability_search,
    triplex_class, triplex_equivalent, triplexes, ClassEnumeration, EquivalenceMode, MaximalSets,
    Skeleton, Triplex,
};
pub use error::{Error, Result};
pub use format::{parse_graph, serialize_graph, to_dot, Directive, GraphDocument};
pub use gaussian::{
    audit_faithfulness, joint_covariance, partial_correlation, sample_parameters, AuditRecord,
    AuditReport, CiThresholds, Covariance, SemConfig, SemParameters,
};
pub use graph::{
    ComponentKind, Constraint, Edge, EdgeKind, Family, GraphBuilder, Link, MixedGraph, NodeTag,
    Reach, Relation, ValidityReport, Violation,
};
pub use graphoid::{
    check_properties, closure, models_equal, pairwise_base, ClosureResult, ModelDiff, RuleKind,
    RuleViolation,
};
pub use nodeset::NodeSet;
pub use separation::{
    determined_set, enumerate_model, enumerate_pairwise_model, restrict_model, separated,
    separated_route_oracle, Criterion, DeterminationMap, IndependenceModel, Separator, Statement,
};
pub use transforms::{
    eampify, emampify, latent_lift, marginalize, selectionize, ErrorGraph, LatentLift,
};
