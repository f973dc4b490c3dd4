//! Capacitated digraphs, flows and the boundary operator.
//!
//! A [`Digraph`] has a distinguished sink `t`; every other node is a source
//! and belongs to `V`. Sources are addressed in two ways: by [`NodeId`]
//! (index into the node list, sink included) and by *position* (index into
//! the ascending list of sources). Subsets of `V` are [`SourceSet`]
//! bitmasks over positions, which is also the ground set seen by entropy
//! oracles.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest number of sources a [`SourceSet`] can hold.
pub const MAX_SOURCES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub type EdgeId = usize;

/// Subset of the source positions `0..|V|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SourceSet(pub u64);

impl SourceSet {
    pub const EMPTY: SourceSet = SourceSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            SourceSet(u64::MAX)
        } else {
            SourceSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(pos: usize) -> Self {
        SourceSet(1u64 << pos)
    }

    pub fn from_positions<I: IntoIterator<Item = usize>>(positions: I) -> Self {
        positions.into_iter().fold(SourceSet::EMPTY, |s, p| s.with(p))
    }

    pub fn contains(self, pos: usize) -> bool {
        pos < 64 && self.0 & (1u64 << pos) != 0
    }

    pub fn with(self, pos: usize) -> Self {
        SourceSet(self.0 | (1u64 << pos))
    }

    pub fn without(self, pos: usize) -> Self {
        SourceSet(self.0 & !(1u64 << pos))
    }

    pub fn union(self, other: Self) -> Self {
        SourceSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SourceSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SourceSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Positions in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let p = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(p)
            }
        })
    }

    /// Highest position plus one, i.e. the smallest `n` with `self ⊆ 0..n`.
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Every subset of `0..n`, in ascending bitmask order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = SourceSet> {
        assert!(n < 64, "cannot enumerate subsets of {n} elements");
        (0..1u64 << n).map(SourceSet)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: Rational,
}

/// Capacitated digraph `G = (V ∪ {t}, E, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    names: Vec<String>,
    sink: NodeId,
    sources: Vec<NodeId>,
    positions: Vec<Option<usize>>,
    edges: Vec<Edge>,
    index: BTreeMap<(NodeId, NodeId), EdgeId>,
}

impl Digraph {
    /// Validates and builds a digraph. Edges are stored sorted by
    /// `(tail, head)`, so edge ids do not depend on input order.
    pub fn new(names: Vec<String>, sink: NodeId, mut edges: Vec<Edge>) -> Result<Self> {
        let n = names.len();
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateNode(name.clone()));
            }
        }
        if sink.0 >= n {
            return Err(Error::UnknownNode(sink.to_string()));
        }
        let sources: Vec<NodeId> = (0..n).map(NodeId).filter(|&v| v != sink).collect();
        if sources.is_empty() {
            return Err(Error::NoSources);
        }
        if sources.len() > MAX_SOURCES {
            return Err(Error::TooManySources(sources.len()));
        }
        let mut positions = vec![None; n];
        for (p, v) in sources.iter().enumerate() {
            positions[v.0] = Some(p);
        }

        let name = |v: NodeId| names.get(v.0).cloned().unwrap_or_else(|| v.to_string());
        edges.sort_by_key(|e| (e.tail, e.head));
        let mut index = BTreeMap::new();
        for (id, e) in edges.iter().enumerate() {
            if e.tail.0 >= n {
                return Err(Error::UnknownNode(e.tail.to_string()));
            }
            if e.head.0 >= n {
                return Err(Error::UnknownNode(e.head.to_string()));
            }
            if e.tail == e.head {
                return Err(Error::SelfLoop(name(e.tail)));
            }
            if e.capacity.is_negative() {
                return Err(Error::NegativeCapacity {
                    tail: name(e.tail),
                    head: name(e.head),
                    capacity: e.capacity,
                });
            }
            if index.insert((e.tail, e.head), id).is_some() {
                return Err(Error::DuplicateEdge(name(e.tail), name(e.head)));
            }
        }

        let g = Digraph {
            names,
            sink,
            sources,
            positions,
            edges,
            index,
        };
        if let Some(v) = g.first_unreachable() {
            return Err(Error::Disconnected(g.name(v).to_string()));
        }
        Ok(g)
    }

    /// Convenience constructor from labelled edges.
    pub fn from_labels(names: &[&str], sink: &str, edges: &[(&str, &str, Rational)]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let lookup = |s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .map(NodeId)
                .ok_or_else(|| Error::UnknownNode(s.to_string()))
        };
        let sink = lookup(sink)?;
        let edges = edges
            .iter()
            .map(|&(a, b, c)| {
                Ok(Edge {
                    tail: lookup(a)?,
                    head: lookup(b)?,
                    capacity: c,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Digraph::new(names, sink, edges)
    }

    fn first_unreachable(&self) -> Option<NodeId> {
        let n = self.names.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.tail.0].push(e.head.0);
            adj[e.head.0].push(e.tail.0);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.iter().position(|s| !s).map(NodeId)
    }

    /// Same graph with the capacity of edge `(tail, head)` replaced.
    pub fn with_capacity(&self, tail: NodeId, head: NodeId, capacity: Rational) -> Result<Self> {
        let mut edges = self.edges.clone();
        let id = self
            .edge_between(tail, head)
            .ok_or_else(|| Error::UnknownNode(format!("edge ({}, {})", self.name(tail), self.name(head))))?;
        edges[id].capacity = capacity;
        Digraph::new(self.names.clone(), self.sink, edges)
    }

    /// Same nodes and edges with a different sink.
    pub fn rerooted(&self, sink: NodeId) -> Result<Self> {
        Digraph::new(self.names.clone(), sink, self.edges.clone())
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.0]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name).map(NodeId)
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    /// Sources `V` in ascending id order; the position of a source is its
    /// index in this slice.
    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    pub fn position(&self, v: NodeId) -> Option<usize> {
        self.positions.get(v.0).copied().flatten()
    }

    pub fn source_at(&self, pos: usize) -> NodeId {
        self.sources[pos]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_between(&self, tail: NodeId, head: NodeId) -> Option<EdgeId> {
        self.index.get(&(tail, head)).copied()
    }

    /// Ids of edges with `v` as tail or head, ascending.
    pub fn incident_edges(&self, v: NodeId) -> Vec<EdgeId> {
        (0..self.edges.len())
            .filter(|&id| self.edges[id].tail == v || self.edges[id].head == v)
            .collect()
    }

    /// Neighbours of `v` in the underlying undirected graph, ascending.
    pub fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.tail == v {
                    Some(e.head)
                } else if e.head == v {
                    Some(e.tail)
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Subset of `V` from node ids. The sink or an out-of-range id is an
    /// error.
    pub fn source_set(&self, nodes: &[NodeId]) -> Result<SourceSet> {
        nodes.iter().try_fold(SourceSet::EMPTY, |s, &v| {
            self.position(v)
                .map(|p| s.with(p))
                .ok_or_else(|| Error::UnknownNode(v.to_string()))
        })
    }

    /// Subset of `V` from node names.
    pub fn source_set_by_name(&self, names: &[&str]) -> Result<SourceSet> {
        let ids = names
            .iter()
            .map(|n| self.node_by_name(n).ok_or_else(|| Error::UnknownNode(n.to_string())))
            .collect::<Result<Vec<_>>>()?;
        self.source_set(&ids)
    }

    pub fn set_nodes(&self, set: SourceSet) -> Vec<NodeId> {
        set.iter().map(|p| self.sources[p]).collect()
    }

    /// `{1,2}`-style rendering of a subset of `V`.
    pub fn format_set(&self, set: SourceSet) -> String {
        let names: Vec<&str> = set.iter().map(|p| self.name(self.sources[p])).collect();
        format!("{{{}}}", names.join(","))
    }

    pub(crate) fn check_set(&self, set: SourceSet) -> Result<()> {
        if set.span() > self.sources.len() {
            return Err(Error::UnknownNode(format!("source position {}", set.span() - 1)));
        }
        Ok(())
    }

    pub fn all_capacities_integral(&self) -> bool {
        self.edges.iter().all(|e| e.capacity.is_integer())
    }
}

/// Per-edge flow values, indexed by [`EdgeId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flow {
    values: Vec<Rational>,
}

impl Flow {
    pub fn zero(g: &Digraph) -> Self {
        Flow {
            values: vec![Rational::ZERO; g.edges().len()],
        }
    }

    pub fn from_values(g: &Digraph, values: Vec<Rational>) -> Result<Self> {
        if values.len() != g.edges().len() {
            return Err(Error::DimensionMismatch {
                expected: g.edges().len(),
                actual: values.len(),
            });
        }
        Ok(Flow { values })
    }

    /// Flow given as `(tail, head, value)` triples; unlisted edges carry 0.
    pub fn from_pairs(g: &Digraph, pairs: &[(NodeId, NodeId, Rational)]) -> Result<Self> {
        let mut f = Flow::zero(g);
        for &(a, b, v) in pairs {
            let id = g
                .edge_between(a, b)
                .ok_or_else(|| Error::UnknownNode(format!("edge ({}, {})", g.name(a), g.name(b))))?;
            f.values[id] = v;
        }
        Ok(f)
    }

    pub fn get(&self, id: EdgeId) -> Rational {
        self.values[id]
    }

    pub fn set(&mut self, id: EdgeId, value: Rational) {
        self.values[id] = value;
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(Rational::is_integer)
    }

    fn check_dims(&self, g: &Digraph) -> Result<()> {
        if self.values.len() != g.edges().len() {
            return Err(Error::DimensionMismatch {
                expected: g.edges().len(),
                actual: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Source coding rates `∂f({i})`, indexed by source position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RateVector {
    rates: Vec<Rational>,
}

impl RateVector {
    pub fn new(rates: Vec<Rational>) -> Self {
        RateVector { rates }
    }

    pub fn zero(n: usize) -> Self {
        RateVector {
            rates: vec![Rational::ZERO; n],
        }
    }

    pub fn get(&self, pos: usize) -> Rational {
        self.rates[pos]
    }

    pub fn set(&mut self, pos: usize, value: Rational) {
        self.rates[pos] = value;
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.rates.iter().sum()
    }

    /// `x(X)`.
    pub fn sum_over(&self, set: SourceSet) -> Rational {
        set.iter().map(|p| self.rates[p]).sum()
    }

    /// `x(X)` for every subset `X`, in bitmask order.
    pub fn subset_sums(&self) -> Vec<Rational> {
        let n = self.rates.len();
        let mut sums = vec![Rational::ZERO; 1usize << n];
        for mask in 1usize..sums.len() {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + self.rates[low];
        }
        sums
    }
}

impl From<Vec<Rational>> for RateVector {
    fn from(rates: Vec<Rational>) -> Self {
        RateVector::new(rates)
    }
}

/// `∂f(X)`: flow leaving `X` minus flow entering `X`.
pub fn boundary(g: &Digraph, f: &Flow, set: SourceSet) -> Result<Rational> {
    f.check_dims(g)?;
    g.check_set(set)?;
    let inside = |v: NodeId| g.position(v).is_some_and(|p| set.contains(p));
    let mut total = Rational::ZERO;
    for (id, e) in g.edges().iter().enumerate() {
        if inside(e.tail) {
            total += f.get(id);
        }
        if inside(e.head) {
            total -= f.get(id);
        }
    }
    Ok(total)
}

/// `∂f = (∂f({i}) : i ∈ V)`.
pub fn rate_vector(g: &Digraph, f: &Flow) -> RateVector {
    assert_eq!(f.len(), g.edges().len(), "flow does not match digraph");
    let mut rates = vec![Rational::ZERO; g.source_count()];
    for (id, e) in g.edges().iter().enumerate() {
        let v = f.get(id);
        if let Some(p) = g.position(e.tail) {
            rates[p] += v;
        }
        if let Some(p) = g.position(e.head) {
            rates[p] -= v;
        }
    }
    RateVector::new(rates)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityViolation {
    pub edge: EdgeId,
    pub value: Rational,
    pub capacity: Rational,
}

/// Edges where `0 ≤ f(e) ≤ c(e)` fails; empty when the flow is feasible.
pub fn check_capacity_feasible(g: &Digraph, f: &Flow) -> Vec<CapacityViolation> {
    assert_eq!(f.len(), g.edges().len(), "flow does not match digraph");
    g.edges()
        .iter()
        .enumerate()
        .filter(|(id, e)| f.get(*id).is_negative() || f.get(*id) > e.capacity)
        .map(|(id, e)| CapacityViolation {
            edge: id,
            value: f.get(id),
            capacity: e.capacity,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::testkit::fixtures;
    use proptest::prelude::*;

    fn node(g: &Digraph, name: &str) -> NodeId {
        g.node_by_name(name).unwrap()
    }

    #[test]
    fn final_flow_boundaries() {
        let g = fixtures::reference_network();
        let f = fixtures::example1_final_flow(&g);
        let x2 = g.source_set_by_name(&["2"]).unwrap();
        assert_eq!(boundary(&g, &f, x2).unwrap(), q(1, 5));
        let all = SourceSet::full(g.source_count());
        assert_eq!(boundary(&g, &f, all).unwrap(), Rational::from(2));
        assert_eq!(rate_vector(&g, &f).as_slice(), &[q(1, 1), q(1, 5), q(2, 5), q(2, 5)]);
    }

    #[test]
    fn zero_flow_has_zero_boundary() {
        let g = fixtures::reference_network();
        let f = Flow::zero(&g);
        for set in SourceSet::all_subsets(g.source_count()) {
            assert_eq!(boundary(&g, &f, set).unwrap(), Rational::ZERO);
        }
        assert!(rate_vector(&g, &f).as_slice().iter().all(Rational::is_zero));
    }

    #[test]
    fn first_iteration_rate_vector() {
        let g = fixtures::reference_network();
        let f = Flow::from_pairs(&g, &[(node(&g, "2"), node(&g, "t"), q(3, 5))]).unwrap();
        assert_eq!(rate_vector(&g, &f).as_slice(), &[q(0, 1), q(3, 5), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn example2_final_rates() {
        let g = fixtures::reference_network_wide();
        let f = fixtures::example2_final_flow(&g);
        assert_eq!(rate_vector(&g, &f).as_slice(), &[Rational::ONE; 4]);
    }

    #[test]
    fn boundary_rejects_unknown_positions() {
        let g = fixtures::reference_network();
        let f = Flow::zero(&g);
        assert!(matches!(
            boundary(&g, &f, SourceSet::singleton(4)),
            Err(Error::UnknownNode(_))
        ));
        assert!(g.source_set(&[g.sink()]).is_err());
    }

    #[test]
    fn capacity_checks() {
        let g = fixtures::reference_network();
        assert!(check_capacity_feasible(&g, &fixtures::example1_final_flow(&g)).is_empty());
        assert!(check_capacity_feasible(&g, &Flow::zero(&g)).is_empty());
        let bad = Flow::from_pairs(&g, &[(node(&g, "2"), node(&g, "t"), Rational::ONE)]).unwrap();
        let v = check_capacity_feasible(&g, &bad);
        assert_eq!(v.len(), 1);
        assert_eq!(g.edge(v[0].edge).tail, node(&g, "2"));
        assert_eq!(g.edge(v[0].edge).head, g.sink());
        assert_eq!(v[0].capacity, q(3, 5));
        let neg = Flow::from_pairs(&g, &[(node(&g, "1"), node(&g, "3"), q(-1, 2))]).unwrap();
        assert_eq!(check_capacity_feasible(&g, &neg).len(), 1);
    }

    #[test]
    fn construction_rejects_bad_graphs() {
        let one = Rational::ONE;
        assert!(matches!(
            Digraph::from_labels(&["a", "t"], "t", &[("a", "a", one)]),
            Err(Error::SelfLoop(_))
        ));
        assert!(matches!(
            Digraph::from_labels(&["a", "t"], "t", &[("a", "t", one), ("a", "t", one)]),
            Err(Error::DuplicateEdge(..))
        ));
        assert!(matches!(
            Digraph::from_labels(&["a", "b", "t"], "t", &[("a", "t", one)]),
            Err(Error::Disconnected(_))
        ));
        assert!(matches!(
            Digraph::from_labels(&["a", "t"], "t", &[("a", "t", q(-1, 1))]),
            Err(Error::NegativeCapacity { .. })
        ));
        assert!(matches!(Digraph::from_labels(&["t"], "t", &[]), Err(Error::NoSources)));
        assert!(matches!(
            Digraph::from_labels(&["a", "a", "t"], "t", &[]),
            Err(Error::DuplicateNode(_))
        ));
        // Opposite directions between the same pair are two distinct links.
        assert!(Digraph::from_labels(&["a", "t"], "t", &[("a", "t", one), ("t", "a", one)]).is_ok());
    }

    #[test]
    fn subset_sums_match_direct_sums() {
        let x = RateVector::new(vec![q(1, 1), q(1, 5), q(2, 5), q(2, 5)]);
        let sums = x.subset_sums();
        for set in SourceSet::all_subsets(4) {
            assert_eq!(sums[set.0 as usize], x.sum_over(set));
        }
    }

    proptest! {
        #[test]
        fn boundary_is_modular(seed in any::<u64>(), a in 0u64..16, b in 0u64..16) {
            let g = fixtures::reference_network();
            let f = crate::testkit::random_flow(&g, seed);
            let (x, y) = (SourceSet(a), SourceSet(b));
            let lhs = boundary(&g, &f, x.union(y)).unwrap() + boundary(&g, &f, x.intersection(y)).unwrap();
            let rhs = boundary(&g, &f, x).unwrap() + boundary(&g, &f, y).unwrap();
            prop_assert_eq!(lhs, rhs);
            let r = rate_vector(&g, &f);
            prop_assert_eq!(boundary(&g, &f, x).unwrap(), r.sum_over(x));
        }
    }
}
