//! Exact solver for the maximum independent flow problem: how much
//! independent information correlated sources can push through a
//! capacitated digraph to a sink, when the admissible rate vectors form the
//! submodular polyhedron of a joint entropy function.
//!
//! All arithmetic is exact over [`Rational`]. Submodular minimization is done
//! by enumeration, so ground sets are limited to
//! [`source::BRUTE_FORCE_LIMIT`] sources.

pub mod auxiliary;
pub mod error;
pub mod graph;
pub mod intersection;
pub mod rational;
pub mod sfm;
pub mod solver;
pub mod source;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use auxiliary::{ArcKind, AuxArc, AuxiliaryGraph, DependenceInfo};
pub use error::{Error, Result};
pub use graph::{boundary, rate_vector, Digraph, Edge, EdgeId, Flow, NodeId, RateVector, SourceSet};
pub use rational::Rational;
pub use solver::{solve_imif, solve_mif, AugmentingPath, IterationRecord, SolveResult, Termination};
pub use source::{BitSharingSource, EntropyOracle, EntropyTable};
