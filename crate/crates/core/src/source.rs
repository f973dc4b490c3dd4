//! Entropy oracles for the correlated sources and the information-theoretic
//! checks built on them.
//!
//! An oracle is a set function `H` on the ground set `0..n` of source
//! positions. Two backends are provided: [`BitSharingSource`], where each
//! node observes a subset of independent weighted bits and `H(X)` is the
//! total weight of the bits seen by `X`, and [`EntropyTable`], an explicit
//! value for each of the `2^n` subsets.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{RateVector, SourceSet};
use crate::rational::Rational;

/// Largest ground set for which exhaustive subset checks are attempted.
pub const BRUTE_FORCE_LIMIT: usize = 20;

pub trait EntropyOracle: Send + Sync {
    /// Number of elements `n` in the ground set `0..n`.
    fn ground_size(&self) -> usize;

    /// `H(X)`; `set` must lie inside the ground set.
    fn value(&self, set: SourceSet) -> Rational;

    /// `H(X)` for every subset, indexed by bitmask.
    fn table(&self) -> Vec<Rational> {
        SourceSet::all_subsets(self.ground_size())
            .map(|s| self.value(s))
            .collect()
    }
}

impl<T: EntropyOracle + ?Sized> EntropyOracle for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: SourceSet) -> Rational {
        (**self).value(set)
    }
    fn table(&self) -> Vec<Rational> {
        (**self).table()
    }
}

impl<T: EntropyOracle + ?Sized> EntropyOracle for Box<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: SourceSet) -> Rational {
        (**self).value(set)
    }
    fn table(&self) -> Vec<Rational> {
        (**self).table()
    }
}

pub(crate) fn check_brute_force(n: usize) -> Result<()> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GroundSetTooLarge {
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(())
}

fn check_member(o: &dyn EntropyOracle, set: SourceSet) -> Result<()> {
    if set.span() > o.ground_size() {
        return Err(Error::UnknownNode(format!("source position {}", set.span() - 1)));
    }
    Ok(())
}

fn check_dims(o: &dyn EntropyOracle, x: &RateVector) -> Result<()> {
    if x.len() != o.ground_size() {
        return Err(Error::DimensionMismatch {
            expected: o.ground_size(),
            actual: x.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bit {
    pub name: String,
    pub entropy: Rational,
}

/// Independent weighted bits shared among the nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSharingSource {
    bits: Vec<Bit>,
    observes: Vec<Vec<usize>>,
    words: Vec<Vec<u64>>,
}

impl BitSharingSource {
    /// `observes[p]` lists the bit indices seen by the source at position `p`.
    pub fn new(bits: Vec<Bit>, observes: Vec<Vec<usize>>) -> Result<Self> {
        for b in &bits {
            if !b.entropy.is_positive() {
                return Err(Error::InvalidModel(format!(
                    "bit {:?} has non-positive entropy {}",
                    b.name, b.entropy
                )));
            }
        }
        let words_per_node = bits.len().div_ceil(64);
        let mut seen = vec![false; bits.len()];
        let mut words = Vec::with_capacity(observes.len());
        let mut observes = observes;
        for list in observes.iter_mut() {
            list.sort_unstable();
            list.dedup();
            let mut w = vec![0u64; words_per_node];
            for &b in list.iter() {
                if b >= bits.len() {
                    return Err(Error::InvalidModel(format!("unknown bit index {b}")));
                }
                seen[b] = true;
                w[b / 64] |= 1u64 << (b % 64);
            }
            words.push(w);
        }
        if let Some(b) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidModel(format!(
                "bit {:?} is not observed by any node",
                bits[b].name
            )));
        }
        Ok(BitSharingSource { bits, observes, words })
    }

    /// Model with named bits: `bits` gives `(name, entropy)` and
    /// `observes[p]` the bit names seen at position `p`.
    pub fn from_names(bits: &[(&str, Rational)], observes: &[&[&str]]) -> Result<Self> {
        let list: Vec<Bit> = bits
            .iter()
            .map(|(n, e)| Bit {
                name: n.to_string(),
                entropy: *e,
            })
            .collect();
        let observes = observes
            .iter()
            .map(|names| {
                names
                    .iter()
                    .map(|n| {
                        list.iter()
                            .position(|b| b.name == *n)
                            .ok_or_else(|| Error::InvalidModel(format!("unknown bit {n:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        BitSharingSource::new(list, observes)
    }

    pub fn bits(&self) -> &[Bit] {
        &self.bits
    }

    pub fn observed(&self, pos: usize) -> &[usize] {
        &self.observes[pos]
    }

    /// Bits covered by `set`, ascending.
    pub fn covered_bits(&self, set: SourceSet) -> Vec<usize> {
        let mut cover = vec![0u64; self.bits.len().div_ceil(64)];
        for p in set.iter() {
            for (c, w) in cover.iter_mut().zip(&self.words[p]) {
                *c |= *w;
            }
        }
        (0..self.bits.len())
            .filter(|&b| cover[b / 64] & (1u64 << (b % 64)) != 0)
            .collect()
    }
}

impl EntropyOracle for BitSharingSource {
    fn ground_size(&self) -> usize {
        self.observes.len()
    }

    fn value(&self, set: SourceSet) -> Rational {
        self.covered_bits(set).into_iter().map(|b| self.bits[b].entropy).sum()
    }
}

/// Explicit `H` values for every subset of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyTable {
    n: usize,
    values: Vec<Rational>,
}

impl EntropyTable {
    /// `values[mask]` is `H` of the subset with bitmask `mask`.
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self> {
        check_brute_force(n)?;
        if values.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1usize << n,
                actual: values.len(),
            });
        }
        Ok(EntropyTable { n, values })
    }

    /// Tabulates any oracle.
    pub fn of(o: &dyn EntropyOracle) -> Result<Self> {
        check_brute_force(o.ground_size())?;
        EntropyTable::new(o.ground_size(), o.table())
    }
}

impl EntropyOracle for EntropyTable {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, set: SourceSet) -> Rational {
        self.values[set.0 as usize]
    }

    fn table(&self) -> Vec<Rational> {
        self.values.clone()
    }
}

/// `H` restricted to a subset of the inner ground set, re-indexed so that
/// `keep[k]` becomes position `k`.
#[derive(Debug, Clone)]
pub struct Restricted<O> {
    inner: O,
    keep: Vec<usize>,
}

impl<O: EntropyOracle> Restricted<O> {
    pub fn new(inner: O, keep: Vec<usize>) -> Result<Self> {
        if let Some(&p) = keep.iter().find(|&&p| p >= inner.ground_size()) {
            return Err(Error::UnknownNode(format!("source position {p}")));
        }
        Ok(Restricted { inner, keep })
    }

    /// Drops position `excluded` and shifts the rest down.
    pub fn without(inner: O, excluded: usize) -> Result<Self> {
        let keep = (0..inner.ground_size()).filter(|&p| p != excluded).collect();
        Restricted::new(inner, keep)
    }
}

impl<O: EntropyOracle> EntropyOracle for Restricted<O> {
    fn ground_size(&self) -> usize {
        self.keep.len()
    }

    fn value(&self, set: SourceSet) -> Rational {
        let lifted = SourceSet::from_positions(set.iter().map(|k| self.keep[k]));
        self.inner.value(lifted)
    }
}

/// `H(X)`, rejecting elements outside the ground set.
pub fn entropy(o: &dyn EntropyOracle, set: SourceSet) -> Result<Rational> {
    check_member(o, set)?;
    Ok(o.value(set))
}

/// `I(X ∧ Y) = H(X) + H(Y) − H(X ∪ Y)`.
pub fn mutual_information(o: &dyn EntropyOracle, x: SourceSet, y: SourceSet) -> Result<Rational> {
    check_member(o, x)?;
    check_member(o, y)?;
    Ok(o.value(x) + o.value(y) - o.value(x.union(y)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// A single coordinate is negative.
    NonNegative,
    /// `value > bound` where `value ≤ bound` was required.
    Upper,
    /// `value < bound` where `value ≥ bound` was required.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub set: SourceSet,
    pub value: Rational,
    pub bound: Rational,
    pub kind: BoundKind,
}

impl Violation {
    /// Amount by which the constraint is broken (always positive).
    pub fn excess(&self) -> Rational {
        match self.kind {
            BoundKind::Upper => self.value - self.bound,
            BoundKind::Lower | BoundKind::NonNegative => self.bound - self.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside(Violation),
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Membership::Inside => None,
            Membership::Outside(v) => Some(v),
        }
    }
}

pub(crate) fn first_negative(x: &RateVector) -> Option<Violation> {
    x.as_slice().iter().position(Rational::is_negative).map(|p| Violation {
        set: SourceSet::singleton(p),
        value: x.get(p),
        bound: Rational::ZERO,
        kind: BoundKind::NonNegative,
    })
}

/// Checks `x ∈ P(H,≤)`: nonnegative and `x(X) ≤ H(X)` for every `X`. The
/// first violated subset in bitmask order is reported.
pub fn polyhedron_member(o: &dyn EntropyOracle, x: &RateVector) -> Result<Membership> {
    check_dims(o, x)?;
    check_brute_force(o.ground_size())?;
    if let Some(v) = first_negative(x) {
        return Ok(Membership::Outside(v));
    }
    let sums = x.subset_sums();
    for set in SourceSet::all_subsets(o.ground_size()) {
        let h = o.value(set);
        let s = sums[set.0 as usize];
        if s > h {
            return Ok(Membership::Outside(Violation {
                set,
                value: s,
                bound: h,
                kind: BoundKind::Upper,
            }));
        }
    }
    Ok(Membership::Inside)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlepianWolfReport {
    pub membership: Membership,
    pub sum_rate: Rational,
    pub total_entropy: Rational,
}

impl SlepianWolfReport {
    pub fn is_feasible(&self) -> bool {
        self.membership.is_inside()
    }

    /// Whether `x(V) = H(V)`.
    pub fn is_sum_rate_tight(&self) -> bool {
        self.sum_rate == self.total_entropy
    }
}

/// Checks `x(X) ≥ H(X | V∖X) = H(V) − H(V∖X)` for every nonempty `X`.
pub fn slepian_wolf_feasible(o: &dyn EntropyOracle, x: &RateVector) -> Result<SlepianWolfReport> {
    check_dims(o, x)?;
    let n = o.ground_size();
    check_brute_force(n)?;
    let full = SourceSet::full(n);
    let total = o.value(full);
    let sums = x.subset_sums();
    let mut membership = Membership::Inside;
    for set in SourceSet::all_subsets(n).skip(1) {
        let bound = total - o.value(full.difference(set));
        let s = sums[set.0 as usize];
        if s < bound {
            membership = Membership::Outside(Violation {
                set,
                value: s,
                bound,
                kind: BoundKind::Lower,
            });
            break;
        }
    }
    Ok(SlepianWolfReport {
        membership,
        sum_rate: x.total(),
        total_entropy: total,
    })
}

/// The first axiom an oracle was found to break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomFailure {
    /// `H(∅) ≠ 0`.
    Normalization { value: Rational },
    /// `smaller ⊂ larger` but `H(smaller) > H(larger)`.
    Monotonicity {
        smaller: SourceSet,
        larger: SourceSet,
        h_smaller: Rational,
        h_larger: Rational,
    },
    /// `H(a) + H(b) < H(a ∪ b) + H(a ∩ b)`.
    Submodularity {
        a: SourceSet,
        b: SourceSet,
        lhs: Rational,
        rhs: Rational,
    },
}

fn fmt_positions(set: SourceSet) -> String {
    let parts: Vec<String> = set.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

impl fmt::Display for AxiomFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomFailure::Normalization { value } => write!(f, "H(empty set) = {value}, expected 0"),
            AxiomFailure::Monotonicity {
                smaller,
                larger,
                h_smaller,
                h_larger,
            } => write!(
                f,
                "not monotone: H({}) = {h_smaller} > H({}) = {h_larger}",
                fmt_positions(*smaller),
                fmt_positions(*larger)
            ),
            AxiomFailure::Submodularity { a, b, lhs, rhs } => write!(
                f,
                "not submodular at {} and {}: H(A)+H(B) = {lhs} < H(A∪B)+H(A∩B) = {rhs}",
                fmt_positions(*a),
                fmt_positions(*b)
            ),
        }
    }
}

/// Exhaustively checks normalization, monotonicity and submodularity.
///
/// Monotonicity and submodularity are checked through their single-element
/// forms (`H(X) ≤ H(X+i)`; `H(X+i) + H(X+j) ≥ H(X+i+j) + H(X)`), which are
/// equivalent to the all-pairs conditions and cost `O(2^n n^2)` evaluations.
pub fn validate_oracle(o: &dyn EntropyOracle) -> Result<()> {
    let n = o.ground_size();
    check_brute_force(n)?;
    let h = o.table();
    let fail = |a| Err(Error::OracleAxiom(a));
    if !h[0].is_zero() {
        return fail(AxiomFailure::Normalization { value: h[0] });
    }
    for set in SourceSet::all_subsets(n) {
        for i in 0..n {
            if set.contains(i) {
                continue;
            }
            let larger = set.with(i);
            if h[set.0 as usize] > h[larger.0 as usize] {
                return fail(AxiomFailure::Monotonicity {
                    smaller: set,
                    larger,
                    h_smaller: h[set.0 as usize],
                    h_larger: h[larger.0 as usize],
                });
            }
        }
    }
    for set in SourceSet::all_subsets(n) {
        for i in 0..n {
            if set.contains(i) {
                continue;
            }
            for j in i + 1..n {
                if set.contains(j) {
                    continue;
                }
                let a = set.with(i);
                let b = set.with(j);
                let lhs = h[a.0 as usize] + h[b.0 as usize];
                let rhs = h[a.union(b).0 as usize] + h[set.0 as usize];
                if lhs < rhs {
                    return fail(AxiomFailure::Submodularity { a, b, lhs, rhs });
                }
            }
        }
    }
    Ok(())
}

/// Whether `H(X)` is an integer for every `X`.
pub fn is_integer_valued(o: &dyn EntropyOracle) -> Result<bool> {
    check_brute_force(o.ground_size())?;
    Ok(o.table().iter().all(Rational::is_integer))
}
