//! The auxiliary digraph `G_f` used for augmenting-path search.
//!
//! For a capacity-feasible flow `f` with rate vector `x = ∂f` the arcs are
//!
//! * `Forward (i,j)` for every edge with `f(i,j) < c(i,j)`, capacity `c - f`;
//! * `Backward (j,i)` for every edge with `f(i,j) > 0`, capacity `f(i,j)`;
//! * `Dependence (j,i)` for every saturated `i` and `j ∈ dep(x,i) \ {i}`,
//!   capacity `ĉ(x,i,j)`.
//!
//! Arcs of zero capacity are never materialised.

use std::collections::BTreeMap;

use crate::graph::{Digraph, EdgeId, Flow, NodeId, SourceSet};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcKind {
    Forward,
    Backward,
    Dependence,
}

impl ArcKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcKind::Forward => "forward",
            ArcKind::Backward => "backward",
            ArcKind::Dependence => "dependence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AuxArc {
    pub tail: NodeId,
    pub head: NodeId,
    pub kind: ArcKind,
    /// `None` in the uncapacitated graph used by the integral solver.
    pub capacity: Option<Rational>,
    /// Underlying edge of `E` for residual arcs.
    pub edge: Option<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AuxiliaryGraph {
    arcs: Vec<AuxArc>,
}

impl AuxiliaryGraph {
    /// Arcs are kept sorted by `(tail, head, kind)`.
    pub fn from_arcs(mut arcs: Vec<AuxArc>) -> Self {
        arcs.sort_by_key(|a| (a.tail, a.head, a.kind));
        AuxiliaryGraph { arcs }
    }

    pub fn arcs(&self) -> &[AuxArc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn find(&self, tail: NodeId, head: NodeId, kind: ArcKind) -> Option<&AuxArc> {
        self.arcs
            .iter()
            .find(|a| a.tail == tail && a.head == head && a.kind == kind)
    }

    pub fn of_kind(&self, kind: ArcKind) -> impl Iterator<Item = &AuxArc> {
        self.arcs.iter().filter(move |a| a.kind == kind)
    }

    /// Out-arcs of `v`, sorted by `(head, kind)`.
    pub fn out_arcs(&self, v: NodeId) -> impl Iterator<Item = &AuxArc> {
        self.arcs.iter().filter(move |a| a.tail == v)
    }
}

/// What the SFM layer knows about a saturated node `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceInfo {
    /// `dep(x,i)`, including `i` itself.
    pub set: SourceSet,
    /// `ĉ(x,i,j)` for each `j ∈ dep(x,i) \ {i}`.
    pub exchange: Vec<(NodeId, Rational)>,
}

fn residual_arcs(g: &Digraph, f: &Flow, capacitated: bool) -> Vec<AuxArc> {
    let mut arcs = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        let flow = f.get(id);
        let slack = e.capacity - flow;
        if slack.is_positive() {
            arcs.push(AuxArc {
                tail: e.tail,
                head: e.head,
                kind: ArcKind::Forward,
                capacity: capacitated.then_some(slack),
                edge: Some(id),
            });
        }
        if flow.is_positive() {
            arcs.push(AuxArc {
                tail: e.head,
                head: e.tail,
                kind: ArcKind::Backward,
                capacity: capacitated.then_some(flow),
                edge: Some(id),
            });
        }
    }
    arcs
}

/// Builds `G_f` with capacities `c_f`. `deps` maps each saturated source to
/// its dependence information.
pub fn build_auxiliary(g: &Digraph, f: &Flow, deps: &BTreeMap<NodeId, DependenceInfo>) -> AuxiliaryGraph {
    let mut arcs = residual_arcs(g, f, true);
    for (&i, info) in deps {
        for &(j, cap) in &info.exchange {
            if j != i && cap.is_positive() {
                arcs.push(AuxArc {
                    tail: j,
                    head: i,
                    kind: ArcKind::Dependence,
                    capacity: Some(cap),
                    edge: None,
                });
            }
        }
    }
    AuxiliaryGraph::from_arcs(arcs)
}

/// Builds the uncapacitated `G_f^I`: residual arcs plus a dependence arc
/// `(j,i)` for every `j` in the minimal minimizer `deps[i]` other than `i`.
pub fn build_uncapacitated_auxiliary(g: &Digraph, f: &Flow, deps: &BTreeMap<NodeId, SourceSet>) -> AuxiliaryGraph {
    let mut arcs = residual_arcs(g, f, false);
    for (&i, set) in deps {
        for j in g.set_nodes(*set) {
            if j != i {
                arcs.push(AuxArc {
                    tail: j,
                    head: i,
                    kind: ArcKind::Dependence,
                    capacity: None,
                    edge: None,
                });
            }
        }
    }
    AuxiliaryGraph::from_arcs(arcs)
}
