//! Maximum independent flow by repeated augmentation on the auxiliary
//! digraph, in a fractional (capacitated) and an integral (unit-push)
//! variant.
//!
//! Each iteration recomputes every saturation capacity from scratch, builds
//! `G_f`, and pushes along the shortest path from an unsaturated source to
//! the sink. Ties are broken by source index and then by the node sequence
//! of the path, so runs are fully deterministic.

use std::collections::{BTreeMap, VecDeque};

use crate::auxiliary::{
    build_auxiliary, build_uncapacitated_auxiliary, ArcKind, AuxArc, AuxiliaryGraph, DependenceInfo,
};
use crate::error::{Error, Result};
use crate::graph::{check_capacity_feasible, rate_vector, Digraph, Flow, NodeId, RateVector, SourceSet};
use crate::rational::Rational;
use crate::sfm::SlackTable;
use crate::source::{check_brute_force, is_integer_valued, polyhedron_member, EntropyOracle};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AugmentingPath {
    pub source: NodeId,
    pub arcs: Vec<AuxArc>,
}

impl AugmentingPath {
    /// Node sequence from the source to the sink.
    pub fn nodes(&self) -> Vec<NodeId> {
        std::iter::once(self.source)
            .chain(self.arcs.iter().map(|a| a.head))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Smallest arc capacity on the path; `None` if no arc is capacitated.
    pub fn bottleneck(&self) -> Option<Rational> {
        self.arcs.iter().filter_map(|a| a.capacity).min()
    }

    fn validate(&self, sink: NodeId) -> Result<()> {
        let nodes = self.nodes();
        if self.arcs.is_empty() {
            return Err(Error::MalformedPath("path has no arcs".into()));
        }
        let mut at = self.source;
        for a in &self.arcs {
            if a.tail != at {
                return Err(Error::MalformedPath(format!(
                    "arc ({}, {}) does not continue from {}",
                    a.tail, a.head, at
                )));
            }
            at = a.head;
        }
        if at != sink {
            return Err(Error::MalformedPath(format!("path ends at {at}, not the sink")));
        }
        let mut sorted = nodes.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != nodes.len() {
            return Err(Error::MalformedPath("path repeats a node".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    /// `∂f(V) = H(V)`: every bit of source randomness reaches the sink.
    ReachedTotalEntropy,
    /// No unsaturated source can reach the sink in `G_f`.
    NoAugmentingPath,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ReachedTotalEntropy => "reached-total-entropy",
            Termination::NoAugmentingPath => "no-augmenting-path",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    /// 1-based.
    pub index: usize,
    pub source: NodeId,
    pub path: AugmentingPath,
    pub beta: Rational,
    /// `ĉ(∂f,i)` for every source position, at the start of the iteration.
    pub saturation: Vec<Rational>,
    /// `G_f` at the start of the iteration.
    pub auxiliary: AuxiliaryGraph,
    pub flow_after: Flow,
    pub rates_after: RateVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub flow: Flow,
    pub rates: RateVector,
    pub value: Rational,
    pub termination: Termination,
    pub trace: Vec<IterationRecord>,
}

/// What one source computes about itself at rate vector `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCapacities {
    pub saturation: Rational,
    /// Present exactly when the node is saturated.
    pub dependence: Option<DependenceInfo>,
    /// Number of constrained minimizations performed.
    pub sfm_calls: usize,
}

/// Saturation capacity of the source at `pos` and, if it is saturated, its
/// dependence set and the exchange capacity towards each dependent node.
/// `sources[p]` is the node at source position `p`.
pub fn local_capacities(sources: &[NodeId], table: &SlackTable, x: &RateVector, pos: usize) -> LocalCapacities {
    let sat = table
        .minimize(pos, SourceSet::EMPTY)
        .expect("position is inside the ground set");
    if sat.min_value.is_positive() {
        return LocalCapacities {
            saturation: sat.min_value,
            dependence: None,
            sfm_calls: 1,
        };
    }
    let mut calls = 1;
    let mut exchange = Vec::new();
    for j in sat.minimal_minimizer.iter().filter(|&j| j != pos) {
        let r = table
            .minimize(pos, SourceSet::singleton(j))
            .expect("distinct positions");
        calls += 1;
        exchange.push((sources[j], r.min_value.min(x.get(j))));
    }
    LocalCapacities {
        saturation: sat.min_value,
        dependence: Some(DependenceInfo {
            set: sat.minimal_minimizer,
            exchange,
        }),
        sfm_calls: calls,
    }
}

/// Adjacency with parallel arcs collapsed to the first kind in
/// `Forward < Backward < Dependence` order.
fn adjacency(aux: &AuxiliaryGraph, node_count: usize) -> Vec<Vec<&AuxArc>> {
    let mut adj: Vec<Vec<&AuxArc>> = vec![Vec::new(); node_count];
    for a in aux.arcs() {
        if a.capacity.is_some_and(|c| !c.is_positive()) {
            continue;
        }
        let list = &mut adj[a.tail.0];
        if list.last().is_some_and(|prev| prev.head == a.head) {
            continue;
        }
        list.push(a);
    }
    adj
}

fn bfs_path(adj: &[Vec<&AuxArc>], source: NodeId, sink: NodeId) -> Option<Vec<AuxArc>> {
    let mut parent: Vec<Option<&AuxArc>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[source.0] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        if u == sink {
            continue;
        }
        for &arc in &adj[u.0] {
            let w = arc.head;
            if seen[w.0] {
                continue;
            }
            seen[w.0] = true;
            parent[w.0] = Some(arc);
            if w == sink {
                let mut arcs = Vec::new();
                let mut at = sink;
                while at != source {
                    let a = parent[at.0].expect("parent chain");
                    arcs.push(a.clone());
                    at = a.tail;
                }
                arcs.reverse();
                return Some(arcs);
            }
            queue.push_back(w);
        }
    }
    None
}

/// Shortest path in `aux` from any unsaturated source to `sink`; ties go to
/// the smaller source index and then to the lexicographically smaller node
/// sequence. Breadth-first search with heads explored in ascending order
/// yields exactly that path for each source.
pub fn find_augmenting_path(
    aux: &AuxiliaryGraph,
    unsaturated: &[(NodeId, Rational)],
    sink: NodeId,
) -> Option<(NodeId, AugmentingPath)> {
    let node_count = aux
        .arcs()
        .iter()
        .map(|a| a.tail.0.max(a.head.0) + 1)
        .chain(unsaturated.iter().map(|(v, _)| v.0 + 1))
        .chain(std::iter::once(sink.0 + 1))
        .max()
        .unwrap_or(0);
    let adj = adjacency(aux, node_count);
    let mut sources: Vec<NodeId> = unsaturated
        .iter()
        .filter(|(_, c)| c.is_positive())
        .map(|(v, _)| *v)
        .collect();
    sources.sort();
    sources.dedup();
    let mut best: Option<(NodeId, Vec<AuxArc>)> = None;
    for s in sources {
        if let Some(arcs) = bfs_path(&adj, s, sink) {
            if best.as_ref().is_none_or(|(_, b)| arcs.len() < b.len()) {
                best = Some((s, arcs));
            }
        }
    }
    best.map(|(s, arcs)| (s, AugmentingPath { source: s, arcs }))
}

/// Pushes `beta` along `path`: residual arcs change the underlying edge,
/// dependence arcs only move rate between their endpoints implicitly.
pub fn augment(g: &Digraph, f: &Flow, path: &AugmentingPath, beta: Rational) -> Result<Flow> {
    if !beta.is_positive() {
        return Err(Error::MalformedPath(format!(
            "augmentation amount {beta} is not positive"
        )));
    }
    path.validate(g.sink())?;
    let mut out = f.clone();
    for a in &path.arcs {
        if let Some(cap) = a.capacity {
            if beta > cap {
                return Err(Error::ArcCapacityExceeded {
                    tail: a.tail,
                    head: a.head,
                    beta,
                    capacity: cap,
                });
            }
        }
        let edge_of = |a: &AuxArc, tail: NodeId, head: NodeId| {
            a.edge
                .filter(|&id| id < g.edges().len() && g.edge(id).tail == tail && g.edge(id).head == head)
                .ok_or_else(|| Error::MalformedPath(format!("arc ({}, {}) has no matching edge", a.tail, a.head)))
        };
        match a.kind {
            ArcKind::Forward => {
                let id = edge_of(a, a.tail, a.head)?;
                out.set(id, out.get(id) + beta);
            }
            ArcKind::Backward => {
                let id = edge_of(a, a.head, a.tail)?;
                out.set(id, out.get(id) - beta);
            }
            ArcKind::Dependence => {}
        }
    }
    if let Some(v) = check_capacity_feasible(g, &out).first() {
        let e = g.edge(v.edge);
        return Err(Error::ArcCapacityExceeded {
            tail: e.tail,
            head: e.head,
            beta,
            capacity: e.capacity,
        });
    }
    Ok(out)
}

fn check_oracle_dims(g: &Digraph, o: &dyn EntropyOracle) -> Result<()> {
    if o.ground_size() != g.source_count() {
        return Err(Error::DimensionMismatch {
            expected: g.source_count(),
            actual: o.ground_size(),
        });
    }
    check_brute_force(o.ground_size())
}

fn iteration_limit(n: usize) -> usize {
    // Far above the n^3 bound; only reached if the solver is broken.
    64 * n.pow(3) + 1024
}

/// Fractional maximum independent flow, starting from a feasible `f0`.
pub fn solve_mif(g: &Digraph, o: &dyn EntropyOracle, f0: &Flow) -> Result<SolveResult> {
    check_oracle_dims(g, o)?;
    if f0.len() != g.edges().len() {
        return Err(Error::DimensionMismatch {
            expected: g.edges().len(),
            actual: f0.len(),
        });
    }
    if let Some(v) = check_capacity_feasible(g, f0).first() {
        let e = g.edge(v.edge);
        return Err(Error::InfeasibleFlow(format!(
            "f({}, {}) = {} violates capacity {}",
            g.name(e.tail),
            g.name(e.head),
            v.value,
            v.capacity
        )));
    }
    if let Some(v) = polyhedron_member(o, &rate_vector(g, f0))?.violation() {
        return Err(Error::InfeasibleFlow(format!(
            "rate vector violates the source polyhedron on {}",
            g.format_set(v.set)
        )));
    }

    let n = g.source_count();
    let entropy = o.table();
    let total = entropy[SourceSet::full(n).0 as usize];
    let mut flow = f0.clone();
    let mut trace = Vec::new();
    loop {
        let rates = rate_vector(g, &flow);
        let value = rates.total();
        if value == total {
            return Ok(finish(flow, rates, Termination::ReachedTotalEntropy, trace));
        }
        if trace.len() >= iteration_limit(n) {
            return Err(Error::IterationLimit(trace.len()));
        }
        let table = SlackTable::from_entropy(&entropy, &rates);
        let mut saturation = Vec::with_capacity(n);
        let mut deps = BTreeMap::new();
        for pos in 0..n {
            let local = local_capacities(g.sources(), &table, &rates, pos);
            saturation.push(local.saturation);
            if let Some(info) = local.dependence {
                deps.insert(g.source_at(pos), info);
            }
        }
        let auxiliary = build_auxiliary(g, &flow, &deps);
        let unsaturated: Vec<(NodeId, Rational)> = (0..n)
            .filter(|&p| saturation[p].is_positive())
            .map(|p| (g.source_at(p), saturation[p]))
            .collect();
        let Some((source, path)) = find_augmenting_path(&auxiliary, &unsaturated, g.sink()) else {
            return Ok(finish(flow, rates, Termination::NoAugmentingPath, trace));
        };
        let own = saturation[g.position(source).expect("source")];
        let beta = path.bottleneck().map_or(own, |b| b.min(own));
        flow = augment(g, &flow, &path, beta)?;
        let rates_after = rate_vector(g, &flow);
        trace.push(IterationRecord {
            index: trace.len() + 1,
            source,
            path,
            beta,
            saturation,
            auxiliary,
            flow_after: flow.clone(),
            rates_after,
        });
    }
}

fn finish(flow: Flow, rates: RateVector, termination: Termination, trace: Vec<IterationRecord>) -> SolveResult {
    let value = rates.total();
    SolveResult {
        flow,
        rates,
        value,
        termination,
        trace,
    }
}

/// Checks the preconditions of [`solve_imif`].
pub fn check_integral(g: &Digraph, o: &dyn EntropyOracle) -> Result<()> {
    check_oracle_dims(g, o)?;
    if let Some(e) = g.edges().iter().find(|e| !e.capacity.is_integer()) {
        return Err(Error::NotIntegral(format!(
            "capacity of ({}, {}) is {}",
            g.name(e.tail),
            g.name(e.head),
            e.capacity
        )));
    }
    if !is_integer_valued(o)? {
        let table = o.table();
        let mask = table.iter().position(|h| !h.is_integer()).expect("non-integer entry");
        return Err(Error::NotIntegral(format!(
            "H({}) = {}",
            g.format_set(SourceSet(mask as u64)),
            table[mask]
        )));
    }
    Ok(())
}

/// Integral maximum independent flow from the zero flow: every iteration
/// pushes one unit along a shortest path of the uncapacitated `G_f^I`.
pub fn solve_imif(g: &Digraph, o: &dyn EntropyOracle) -> Result<SolveResult> {
    check_integral(g, o)?;
    let n = g.source_count();
    let entropy = o.table();
    let total = entropy[SourceSet::full(n).0 as usize];
    let mut flow = Flow::zero(g);
    let mut trace = Vec::new();
    loop {
        let rates = rate_vector(g, &flow);
        if rates.total() == total {
            return Ok(finish(flow, rates, Termination::ReachedTotalEntropy, trace));
        }
        if trace.len() >= iteration_limit(n) {
            return Err(Error::IterationLimit(trace.len()));
        }
        let table = SlackTable::from_entropy(&entropy, &rates);
        let mut saturation = Vec::with_capacity(n);
        let mut deps = BTreeMap::new();
        for pos in 0..n {
            let r = table.minimize(pos, SourceSet::EMPTY)?;
            if r.min_value.is_zero() {
                deps.insert(g.source_at(pos), r.minimal_minimizer);
            }
            saturation.push(r.min_value);
        }
        let auxiliary = build_uncapacitated_auxiliary(g, &flow, &deps);
        let unsaturated: Vec<(NodeId, Rational)> = (0..n)
            .filter(|&p| saturation[p].is_positive())
            .map(|p| (g.source_at(p), saturation[p]))
            .collect();
        let Some((source, path)) = find_augmenting_path(&auxiliary, &unsaturated, g.sink()) else {
            return Ok(finish(flow, rates, Termination::NoAugmentingPath, trace));
        };
        let beta = Rational::ONE;
        flow = augment(g, &flow, &path, beta)?;
        let rates_after = rate_vector(g, &flow);
        trace.push(IterationRecord {
            index: trace.len() + 1,
            source,
            path,
            beta,
            saturation,
            auxiliary,
            flow_after: flow.clone(),
            rates_after,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::testkit::{self, fixtures, RandomConfig};
    use proptest::prelude::*;

    fn id(g: &Digraph, name: &str) -> NodeId {
        g.node_by_name(name).unwrap()
    }

    fn names(g: &Digraph, nodes: &[NodeId]) -> Vec<String> {
        nodes.iter().map(|&v| g.name(v).to_string()).collect()
    }

    fn rates(v: &[(i128, i128)]) -> RateVector {
        RateVector::new(v.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn example1_trace() {
        let g = fixtures::reference_network();
        let o = fixtures::example1_source();
        let r = solve_mif(&g, &o, &Flow::zero(&g)).unwrap();
        assert_eq!(r.value, Rational::from(2));
        assert_eq!(r.termination, Termination::ReachedTotalEntropy);
        assert_eq!(r.rates, rates(&[(1, 1), (1, 5), (2, 5), (2, 5)]));
        assert_eq!(r.flow, fixtures::example1_final_flow(&g));
        let expected = [
            (vec!["2", "t"], q(3, 5), rates(&[(0, 1), (3, 5), (0, 1), (0, 1)])),
            (vec!["1", "3", "t"], q(1, 1), rates(&[(1, 1), (3, 5), (0, 1), (0, 1)])),
            (
                vec!["4", "2", "3", "t"],
                q(2, 5),
                rates(&[(1, 1), (1, 5), (2, 5), (2, 5)]),
            ),
        ];
        assert_eq!(r.trace.len(), 3);
        for (rec, (path, beta, x)) in r.trace.iter().zip(expected) {
            assert_eq!(names(&g, &rec.path.nodes()), path);
            assert_eq!(rec.beta, beta);
            assert_eq!(rec.rates_after, x);
        }
        let third = &r.trace[2];
        assert_eq!(third.path.arcs[1].kind, ArcKind::Dependence);
        assert_eq!(third.saturation, vec![q(0, 1), q(0, 1), q(0, 1), q(2, 5)]);
    }

    #[test]
    fn example1_auxiliary_graphs() {
        let g = fixtures::reference_network();
        let o = fixtures::example1_source();
        let r = solve_mif(&g, &o, &Flow::zero(&g)).unwrap();

        // Iteration 1 works on G itself.
        let first = &r.trace[0].auxiliary;
        assert_eq!(first.len(), g.edges().len());
        assert!(first.arcs().iter().all(|a| a.kind == ArcKind::Forward));

        let second = &r.trace[1];
        assert_eq!(second.saturation, vec![q(1, 1), q(0, 1), q(0, 1), q(2, 5)]);
        let aux = &second.auxiliary;
        assert!(aux.find(id(&g, "2"), g.sink(), ArcKind::Forward).is_none());
        assert_eq!(
            aux.find(g.sink(), id(&g, "2"), ArcKind::Backward).unwrap().capacity,
            Some(q(3, 5))
        );
        let deps: Vec<_> = aux.of_kind(ArcKind::Dependence).collect();
        assert_eq!(deps.len(), 1);
        assert_eq!((deps[0].tail, deps[0].head), (id(&g, "2"), id(&g, "3")));
        assert_eq!(deps[0].capacity, Some(q(2, 5)));
        assert_eq!(aux.len(), g.edges().len() + 1);

        let third = &r.trace[2].auxiliary;
        for (a, b) in [("1", "3"), ("3", "t")] {
            assert!(third.find(id(&g, a), id(&g, b), ArcKind::Forward).is_some());
            assert!(third.find(id(&g, b), id(&g, a), ArcKind::Backward).is_some());
        }
        assert_eq!(
            third
                .find(id(&g, "2"), id(&g, "3"), ArcKind::Dependence)
                .unwrap()
                .capacity,
            Some(q(2, 5))
        );
        // Node 1 is saturated as well and may take 1/5 from node 2.
        assert_eq!(
            third
                .find(id(&g, "2"), id(&g, "1"), ArcKind::Dependence)
                .unwrap()
                .capacity,
            Some(q(1, 5))
        );
    }

    #[test]
    fn path_selection_examples() {
        let g = fixtures::reference_network();
        let aux = build_auxiliary(&g, &Flow::zero(&g), &BTreeMap::new());
        let all: Vec<_> = g.sources().iter().map(|&v| (v, Rational::ONE)).collect();
        let (s, p) = find_augmenting_path(&aux, &all, g.sink()).unwrap();
        assert_eq!(names(&g, &[s]), ["2"]);
        assert_eq!(names(&g, &p.nodes()), ["2", "t"]);
        assert!(find_augmenting_path(&aux, &[], g.sink()).is_none());
    }

    #[test]
    fn augment_examples() {
        let g = fixtures::reference_network();
        let o = fixtures::example1_source();
        let r = solve_mif(&g, &o, &Flow::zero(&g)).unwrap();
        let before = r.trace[1].flow_after.clone();
        let third = &r.trace[2];
        let after = augment(&g, &before, &third.path, q(2, 5)).unwrap();
        assert_eq!(after, fixtures::example1_final_flow(&g));

        let first = &r.trace[0];
        let f1 = augment(&g, &Flow::zero(&g), &first.path, q(3, 5)).unwrap();
        assert_eq!(f1, first.flow_after);
        let undo = AugmentingPath {
            source: g.sink(),
            arcs: vec![],
        };
        assert!(augment(&g, &f1, &undo, q(3, 5)).is_err());

        // Backward arc (t,2) then forward... a path must start at a source,
        // so check the inverse push directly on the arc list.
        let aux = build_auxiliary(&g, &f1, &BTreeMap::new());
        let back = aux.find(g.sink(), id(&g, "2"), ArcKind::Backward).unwrap().clone();
        let mut restored = f1.clone();
        let e = back.edge.unwrap();
        restored.set(e, restored.get(e) - q(3, 5));
        assert_eq!(restored, Flow::zero(&g));

        assert!(matches!(
            augment(&g, &Flow::zero(&g), &first.path, Rational::ONE),
            Err(Error::ArcCapacityExceeded { .. })
        ));
        assert!(augment(&g, &Flow::zero(&g), &first.path, Rational::ZERO).is_err());
    }

    #[test]
    fn capacity_limited_instance() {
        let g = fixtures::reference_network_cut();
        let r = solve_mif(&g, &fixtures::example1_source(), &Flow::zero(&g)).unwrap();
        assert_eq!(r.value, q(8, 5));
        assert_eq!(r.termination, Termination::NoAugmentingPath);
    }

    #[test]
    fn blocked_sink() {
        let g = Digraph::from_labels(
            &["a", "b", "t"],
            "t",
            &[("a", "t", q(0, 1)), ("b", "t", q(0, 1)), ("a", "b", q(1, 1))],
        )
        .unwrap();
        let o = BitSharingSourceFixture::two_bits();
        let r = solve_mif(&g, &o, &Flow::zero(&g)).unwrap();
        assert_eq!(r.value, Rational::ZERO);
        assert_eq!(r.termination, Termination::NoAugmentingPath);
        assert!(r.trace.is_empty());
    }

    struct BitSharingSourceFixture;
    impl BitSharingSourceFixture {
        fn two_bits() -> crate::source::BitSharingSource {
            crate::source::BitSharingSource::from_names(
                &[("x", Rational::ONE), ("y", Rational::ONE)],
                &[&["x"], &["y"]],
            )
            .unwrap()
        }
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let g = fixtures::reference_network();
        let o = fixtures::example1_source();
        let over = fixtures::named_flow(&g, &[("2", "t", Rational::ONE)]);
        assert!(matches!(solve_mif(&g, &o, &over), Err(Error::InfeasibleFlow(_))));
        // Within capacity, but ∂f({3}) = 2 exceeds H({3}).
        let rate = fixtures::named_flow(&g, &[("3", "t", q(2, 1))]);
        assert!(matches!(solve_mif(&g, &o, &rate), Err(Error::InfeasibleFlow(_))));
    }

    #[test]
    fn nonzero_start_reaches_the_same_value() {
        let g = fixtures::reference_network();
        let o = fixtures::example1_source();
        let start = fixtures::named_flow(&g, &[("1", "3", q(1, 2)), ("3", "t", q(1, 2))]);
        let r = solve_mif(&g, &o, &start).unwrap();
        assert_eq!(r.value, Rational::from(2));
    }

    #[test]
    fn example2_integral_trace() {
        let g = fixtures::reference_network_wide();
        let o = fixtures::example2_source();
        let r = solve_imif(&g, &o).unwrap();
        assert_eq!(r.value, Rational::from(4));
        assert_eq!(r.rates, rates(&[(1, 1), (1, 1), (1, 1), (1, 1)]));
        assert_eq!(r.flow, fixtures::example2_final_flow(&g));
        let xs: Vec<RateVector> = r.trace.iter().map(|t| t.rates_after.clone()).collect();
        assert_eq!(
            xs,
            vec![
                rates(&[(0, 1), (1, 1), (0, 1), (0, 1)]),
                rates(&[(0, 1), (2, 1), (0, 1), (0, 1)]),
                rates(&[(1, 1), (2, 1), (0, 1), (0, 1)]),
                rates(&[(1, 1), (1, 1), (1, 1), (1, 1)]),
            ]
        );
        assert_eq!(names(&g, &r.trace[3].path.nodes()), ["4", "2", "3", "t"]);
        assert!(r.flow.is_integral());
        let fractional = solve_mif(&g, &o, &Flow::zero(&g)).unwrap();
        assert_eq!(fractional.value, r.value);
    }

    #[test]
    fn integral_preconditions() {
        let g = fixtures::reference_network();
        assert!(matches!(
            solve_imif(&g, &fixtures::example2_source()),
            Err(Error::NotIntegral(_))
        ));
        let g2 = fixtures::reference_network_wide();
        assert!(matches!(
            solve_imif(&g2, &fixtures::example1_source()),
            Err(Error::NotIntegral(_))
        ));
    }

    #[test]
    fn zero_entropy_source() {
        let g = fixtures::reference_network_wide();
        let o = crate::source::EntropyTable::new(4, vec![Rational::ZERO; 16]).unwrap();
        let r = solve_imif(&g, &o).unwrap();
        assert_eq!(r.value, Rational::ZERO);
        assert_eq!(r.termination, Termination::ReachedTotalEntropy);
        assert!(r.trace.is_empty());
    }

    #[test]
    fn oracle_dimension_must_match() {
        let g = fixtures::reference_network();
        let o = testkit::random_bit_source(3, 3, 2, &[Rational::ONE]);
        assert!(matches!(
            solve_mif(&g, &o, &Flow::zero(&g)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    /// Every simple path from `s` to `sink`, as node sequences.
    fn all_simple_paths(aux: &AuxiliaryGraph, s: NodeId, sink: NodeId) -> Vec<Vec<NodeId>> {
        fn walk(aux: &AuxiliaryGraph, at: NodeId, sink: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
            if at == sink {
                out.push(path.clone());
                return;
            }
            let mut heads: Vec<NodeId> = aux.out_arcs(at).map(|a| a.head).collect();
            heads.dedup();
            for w in heads {
                if !path.contains(&w) {
                    path.push(w);
                    walk(aux, w, sink, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(aux, s, sink, &mut vec![s], &mut out);
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn path_choice_matches_exhaustive_search(seed in any::<u64>()) {
            let inst = testkit::random_instance(seed, &RandomConfig::fractional());
            let g = &inst.graph;
            let o = &inst.source;
            let r = solve_mif(g, o, &Flow::zero(g)).unwrap();
            for rec in &r.trace {
                let mut best: Option<(usize, NodeId, Vec<NodeId>)> = None;
                for (p, sat) in rec.saturation.iter().enumerate() {
                    if !sat.is_positive() {
                        continue;
                    }
                    let s = g.source_at(p);
                    for path in all_simple_paths(&rec.auxiliary, s, g.sink()) {
                        let key = (path.len(), s, path);
                        if best.as_ref().is_none_or(|b| key < *b) {
                            best = Some(key);
                        }
                    }
                }
                let (_, s, nodes) = best.expect("an augmenting path existed");
                prop_assert_eq!(rec.source, s);
                prop_assert_eq!(rec.path.nodes(), nodes);
            }
        }

        #[test]
        fn every_iteration_stays_feasible(seed in any::<u64>()) {
            let inst = testkit::random_instance(seed, &RandomConfig::fractional());
            let g = &inst.graph;
            let o = &inst.source;
            let r = solve_mif(g, o, &Flow::zero(g)).unwrap();
            let mut last = Rational::ZERO;
            for rec in &r.trace {
                prop_assert!(rec.beta.is_positive());
                prop_assert!(check_capacity_feasible(g, &rec.flow_after).is_empty());
                prop_assert!(polyhedron_member(o, &rec.rates_after).unwrap().is_inside());
                prop_assert_eq!(rec.rates_after.total(), last + rec.beta);
                last = rec.rates_after.total();
            }
            let n = g.source_count();
            prop_assert!(r.trace.len() <= n * n * n);
            prop_assert_eq!(r.value, r.rates.total());
            let total = o.value(SourceSet::full(n));
            prop_assert_eq!(r.termination == Termination::ReachedTotalEntropy, r.value == total);
            prop_assert_eq!(solve_mif(g, o, &Flow::zero(g)).unwrap(), r);
        }

        #[test]
        fn optimal_flows_leave_no_path(seed in any::<u64>()) {
            let inst = testkit::random_instance(seed, &RandomConfig::fractional());
            let g = &inst.graph;
            let o = &inst.source;
            let r = solve_mif(g, o, &Flow::zero(g)).unwrap();
            if r.termination == Termination::NoAugmentingPath {
                let h = o.table();
                let table = SlackTable::from_entropy(&h, &r.rates);
                let mut deps = BTreeMap::new();
                let mut unsat = Vec::new();
                for p in 0..g.source_count() {
                    let local = local_capacities(g.sources(), &table, &r.rates, p);
                    if let Some(d) = local.dependence {
                        deps.insert(g.source_at(p), d);
                    } else {
                        unsat.push((g.source_at(p), local.saturation));
                    }
                }
                let aux = build_auxiliary(g, &r.flow, &deps);
                prop_assert!(find_augmenting_path(&aux, &unsat, g.sink()).is_none());
            }
        }

        #[test]
        fn integral_solver_agrees(seed in any::<u64>()) {
            let inst = testkit::random_instance(seed, &RandomConfig::integral());
            let g = &inst.graph;
            let o = &inst.source;
            let int = solve_imif(g, o).unwrap();
            let frac = solve_mif(g, o, &Flow::zero(g)).unwrap();
            prop_assert_eq!(int.value, frac.value);
            prop_assert!(int.flow.is_integral());
            prop_assert_eq!(Rational::from(int.trace.len() as i128), int.value);
        }
    }
}
