//! Cut and characteristic functions of the network, membership in the flow
//! polyhedron `P(f,≤)`, and the min-max value of the polymatroid
//! intersection `P(H,≤) ∩ P(f,≤)`.

use crate::error::{Error, Result};
use crate::graph::{Digraph, NodeId, RateVector, SourceSet};
use crate::rational::Rational;
use crate::source::{check_brute_force, first_negative, BoundKind, EntropyOracle, Membership, Restricted, Violation};

/// `κ(X)`: total capacity of edges leaving `X` (the head may be the sink).
pub fn cut_value(g: &Digraph, set: SourceSet) -> Result<Rational> {
    g.check_set(set)?;
    let inside = |v: NodeId| g.position(v).is_some_and(|p| set.contains(p));
    Ok(g.edges()
        .iter()
        .filter(|e| inside(e.tail) && !inside(e.head))
        .map(|e| e.capacity)
        .sum())
}

/// `κ` on every subset of the sources, indexed by bitmask.
pub fn cut_table(g: &Digraph) -> Result<Vec<Rational>> {
    let n = g.source_count();
    check_brute_force(n)?;
    SourceSet::all_subsets(n).map(|s| cut_value(g, s)).collect()
}

/// `f(X) = min{κ(Y) : X ⊆ Y ⊆ V}` on every subset, indexed by bitmask.
pub fn characteristic_table(g: &Digraph) -> Result<Vec<Rational>> {
    let n = g.source_count();
    let mut table = cut_table(g)?;
    // Superset minima, one coordinate at a time.
    for bit in 0..n {
        for mask in 0..table.len() {
            if mask & (1 << bit) == 0 {
                let up = table[mask | (1 << bit)];
                if up < table[mask] {
                    table[mask] = up;
                }
            }
        }
    }
    Ok(table)
}

/// `f(X)`: the min cut separating a super source attached to `X` from the
/// sink.
pub fn characteristic(g: &Digraph, set: SourceSet) -> Result<Rational> {
    let n = g.source_count();
    check_brute_force(n)?;
    g.check_set(set)?;
    let free = SourceSet::full(n).difference(set);
    Ok(SourceSet::all_subsets(n)
        .filter(|y| y.is_subset(free))
        .map(|y| cut_value(g, set.union(y)).expect("subset of V"))
        .min()
        .expect("at least one superset"))
}

/// Checks `x ≥ 0` and `x(X) ≤ f(X)` for all `X`, reporting the first
/// violated subset in bitmask order.
pub fn in_flow_polyhedron(g: &Digraph, x: &RateVector) -> Result<Membership> {
    if x.len() != g.source_count() {
        return Err(Error::DimensionMismatch {
            expected: g.source_count(),
            actual: x.len(),
        });
    }
    let f = characteristic_table(g)?;
    if let Some(v) = first_negative(x) {
        return Ok(Membership::Outside(v));
    }
    let sums = x.subset_sums();
    for set in SourceSet::all_subsets(g.source_count()) {
        let (value, bound) = (sums[set.0 as usize], f[set.0 as usize]);
        if value > bound {
            return Ok(Membership::Outside(Violation {
                set,
                value,
                bound,
                kind: BoundKind::Upper,
            }));
        }
    }
    Ok(Membership::Inside)
}

/// `max{x(V) : x ∈ P(H,≤) ∩ P(f,≤)} = min_X H(X) + f(V \ X)`. Returns the
/// value and the first minimizing `X` in bitmask order.
pub fn max_independent_value(g: &Digraph, o: &dyn EntropyOracle) -> Result<(Rational, SourceSet)> {
    let n = g.source_count();
    if o.ground_size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: o.ground_size(),
        });
    }
    let f = characteristic_table(g)?;
    let h = o.table();
    let full = SourceSet::full(n);
    let mut best: Option<(Rational, SourceSet)> = None;
    for set in SourceSet::all_subsets(n) {
        let v = h[set.0 as usize] + f[full.difference(set).0 as usize];
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, set));
        }
    }
    Ok(best.expect("at least the empty set"))
}

/// Ranks candidate sinks by the value reachable when each one collects.
///
/// `model` covers every node of `g` by node index. For candidate `u` the
/// graph is rerooted at `u` and `u`'s own observations are dropped from the
/// model. The result is sorted by value, highest first, ties by node index.
pub fn sink_select(g: &Digraph, model: &dyn EntropyOracle, candidates: &[NodeId]) -> Result<Vec<(NodeId, Rational)>> {
    if model.ground_size() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            actual: model.ground_size(),
        });
    }
    let mut ranked = Vec::with_capacity(candidates.len());
    for &u in candidates {
        if u.0 >= g.node_count() {
            return Err(Error::UnknownNode(u.to_string()));
        }
        let rooted = g.rerooted(u)?;
        let restricted = Restricted::without(model, u.0)?;
        let (value, _) = max_independent_value(&rooted, &restricted)?;
        ranked.push((u, value));
    }
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}
