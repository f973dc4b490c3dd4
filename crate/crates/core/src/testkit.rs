//! Fixtures and seeded random instances for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Digraph, Edge, Flow, NodeId, RateVector, SourceSet};
use crate::rational::{q, Rational};
use crate::sfm::SlackTable;
use crate::source::{Bit, BitSharingSource, EntropyOracle};

/// The cluster of the running example and its variants.
pub mod fixtures {
    use super::*;

    pub fn reference_network_with(c2t: Rational, c3t: Rational) -> Digraph {
        Digraph::from_labels(
            &["1", "2", "3", "4", "t"],
            "t",
            &[
                ("1", "2", q(1, 1)),
                ("1", "3", q(2, 1)),
                ("1", "4", q(3, 1)),
                ("2", "t", c2t),
                ("3", "t", c3t),
                ("4", "2", q(1, 1)),
                ("t", "4", q(1, 1)),
            ],
        )
        .expect("fixture graph is valid")
    }

    pub fn reference_network() -> Digraph {
        reference_network_with(q(3, 5), q(2, 1))
    }

    /// `c(2,t) = 2`.
    pub fn reference_network_wide() -> Digraph {
        reference_network_with(q(2, 1), q(2, 1))
    }

    /// `c(3,t) = 1`.
    pub fn reference_network_cut() -> Digraph {
        reference_network_with(q(3, 5), q(1, 1))
    }

    fn four_node_model(a: Rational, b: Rational, c: Rational, d: Rational) -> BitSharingSource {
        BitSharingSource::from_names(
            &[("a", a), ("b", b), ("c", c), ("d", d)],
            &[&["a", "b"], &["b", "c"], &["c"], &["b", "d"]],
        )
        .expect("fixture model is valid")
    }

    /// `Z1=(a,b), Z2=(b,c), Z3=(c), Z4=(b,d)` with `H(a)=1, H(b)=0.2,
    /// H(c)=H(d)=0.4`.
    pub fn example1_source() -> BitSharingSource {
        four_node_model(q(1, 1), q(1, 5), q(2, 5), q(2, 5))
    }

    /// Same sharing pattern with unit bits.
    pub fn example2_source() -> BitSharingSource {
        four_node_model(q(1, 1), q(1, 1), q(1, 1), q(1, 1))
    }

    fn flow(g: &Digraph, pairs: &[(&str, &str, Rational)]) -> Flow {
        let pairs: Vec<(NodeId, NodeId, Rational)> = pairs
            .iter()
            .map(|&(a, b, v)| (g.node_by_name(a).unwrap(), g.node_by_name(b).unwrap(), v))
            .collect();
        Flow::from_pairs(g, &pairs).unwrap()
    }

    pub fn example1_final_flow(g: &Digraph) -> Flow {
        flow(
            g,
            &[
                ("1", "3", q(1, 1)),
                ("3", "t", q(7, 5)),
                ("4", "2", q(2, 5)),
                ("2", "t", q(3, 5)),
            ],
        )
    }

    pub fn example2_final_flow(g: &Digraph) -> Flow {
        flow(
            g,
            &[
                ("1", "3", q(1, 1)),
                ("3", "t", q(2, 1)),
                ("4", "2", q(1, 1)),
                ("2", "t", q(2, 1)),
            ],
        )
    }

    pub fn named_flow(g: &Digraph, pairs: &[(&str, &str, Rational)]) -> Flow {
        flow(g, pairs)
    }
}

/// Parameters for [`random_instance`].
#[derive(Debug, Clone)]
pub struct RandomConfig {
    pub min_sources: usize,
    pub max_sources: usize,
    pub capacities: Vec<Rational>,
    pub entropies: Vec<Rational>,
    pub max_bits: usize,
    /// Probability that any given ordered pair carries an edge.
    pub edge_probability: f64,
}

impl RandomConfig {
    /// Fractional instances: capacities in {0, 1/2, 1, 2}, bit entropies in
    /// {1/5, 2/5, 1}, up to six sources and six bits.
    pub fn fractional() -> Self {
        RandomConfig {
            min_sources: 2,
            max_sources: 6,
            capacities: vec![q(0, 1), q(1, 2), q(1, 1), q(2, 1)],
            entropies: vec![q(1, 5), q(2, 5), q(1, 1)],
            max_bits: 6,
            edge_probability: 0.35,
        }
    }

    /// Integral instances: capacities in 0..=4, unit bits, up to five sources.
    pub fn integral() -> Self {
        RandomConfig {
            min_sources: 2,
            max_sources: 5,
            capacities: (0..=4).map(|c| q(c, 1)).collect(),
            entropies: vec![q(1, 1)],
            max_bits: 6,
            edge_probability: 0.35,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub seed: u64,
    pub graph: Digraph,
    pub source: BitSharingSource,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bit-sharing model on `n` positions with `1..=max_bits` bits, each seen by
/// a random nonempty set of nodes.
pub fn random_bit_source(seed: u64, n: usize, max_bits: usize, entropies: &[Rational]) -> BitSharingSource {
    let mut r = rng(seed);
    random_bits_with(&mut r, n, max_bits, entropies)
}

fn random_bits_with(r: &mut ChaCha8Rng, n: usize, max_bits: usize, entropies: &[Rational]) -> BitSharingSource {
    let count = r.gen_range(1..=max_bits.max(1));
    let bits: Vec<Bit> = (0..count)
        .map(|k| Bit {
            name: format!("w{k}"),
            entropy: *entropies.choose(r).unwrap(),
        })
        .collect();
    let mut observes = vec![Vec::new(); n];
    for b in 0..count {
        let mut any = false;
        for list in observes.iter_mut() {
            if r.gen_bool(0.4) {
                list.push(b);
                any = true;
            }
        }
        if !any {
            observes[r.gen_range(0..n)].push(b);
        }
    }
    BitSharingSource::new(bits, observes).expect("generated model is valid")
}

/// A random point of `P(H,≤)`: coordinates are raised one at a time, in a
/// random order, by 0, half, or all of their remaining saturation capacity.
pub fn random_point_in_polyhedron(o: &dyn EntropyOracle, seed: u64) -> RateVector {
    let mut r = rng(seed);
    let n = o.ground_size();
    let h = o.table();
    let mut x = RateVector::zero(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    for i in order {
        let sat = SlackTable::from_entropy(&h, &x)
            .minimize(i, SourceSet::EMPTY)
            .unwrap()
            .min_value;
        let fraction = [q(0, 1), q(1, 2), q(1, 1)][r.gen_range(0..3)];
        x.set(i, x.get(i) + sat * fraction);
    }
    x
}

/// Arbitrary (not necessarily feasible) flow with small rational values.
pub fn random_flow(g: &Digraph, seed: u64) -> Flow {
    let mut r = rng(seed);
    let values = (0..g.edges().len())
        .map(|_| q(r.gen_range(0..10), r.gen_range(1..6)))
        .collect();
    Flow::from_values(g, values).unwrap()
}

/// Connected random digraph on sources `1..=n` plus sink `t`, with a
/// bit-sharing model over the sources.
pub fn random_instance(seed: u64, cfg: &RandomConfig) -> RandomInstance {
    let mut r = rng(seed);
    let n = r.gen_range(cfg.min_sources..=cfg.max_sources);
    let mut names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    names.push("t".into());
    let total = n + 1;

    let mut pairs = std::collections::BTreeSet::new();
    // Random spanning tree first, so the instance is always connected.
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut r);
    for k in 1..total {
        let a = order[k];
        let b = order[r.gen_range(0..k)];
        if r.gen_bool(0.5) {
            pairs.insert((a, b));
        } else {
            pairs.insert((b, a));
        }
    }
    for a in 0..total {
        for b in 0..total {
            if a != b && r.gen_bool(cfg.edge_probability) {
                pairs.insert((a, b));
            }
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(a, b)| Edge {
            tail: NodeId(a),
            head: NodeId(b),
            capacity: *cfg.capacities.choose(&mut r).unwrap(),
        })
        .collect();
    let graph = Digraph::new(names, NodeId(n), edges).expect("generated graph is valid");
    let source = random_bits_with(&mut r, n, cfg.max_bits, &cfg.entropies);
    RandomInstance { seed, graph, source }
}
