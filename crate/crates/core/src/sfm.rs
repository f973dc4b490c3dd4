//! Constrained submodular function minimization by subset enumeration, and
//! the saturation capacity, exchange capacity and dependence set derived
//! from it.
//!
//! For `x ∈ P(H,≤)`:
//!
//! * `ĉ(x,i)   = min { H(X) − x(X) : i ∈ X }`
//! * `ĉ(x,i,j) = min( min { H(X) − x(X) : i ∈ X, j ∉ X }, x_j )`
//! * `dep(x,i)` is the smallest minimizer of the first problem when
//!   `ĉ(x,i) = 0`, and empty otherwise.
//!
//! The `x_j` clamp keeps coordinate `j` nonnegative after an exchange.

use crate::error::{Error, Result};
use crate::graph::{RateVector, SourceSet};
use crate::rational::Rational;
use crate::source::{check_brute_force, EntropyOracle};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfmResult {
    pub min_value: Rational,
    /// Intersection of all minimizers; itself a minimizer by
    /// submodularity.
    pub minimal_minimizer: SourceSet,
}

/// `H(X) − x(X)` for every subset `X`, computed once per rate vector and
/// reused by every minimization at that point.
#[derive(Debug, Clone)]
pub struct SlackTable {
    n: usize,
    slack: Vec<Rational>,
}

impl SlackTable {
    pub fn new(o: &dyn EntropyOracle, x: &RateVector) -> Result<Self> {
        let n = o.ground_size();
        check_brute_force(n)?;
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        Ok(Self::from_entropy(&o.table(), x))
    }

    /// `entropy[mask]` must hold `H` for every subset of `0..x.len()`.
    pub fn from_entropy(entropy: &[Rational], x: &RateVector) -> Self {
        let n = x.len();
        assert_eq!(entropy.len(), 1usize << n, "entropy table size");
        let sums = x.subset_sums();
        let slack = entropy.iter().zip(&sums).map(|(h, s)| *h - *s).collect();
        SlackTable { n, slack }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn slack(&self, set: SourceSet) -> Rational {
        self.slack[set.0 as usize]
    }

    /// Whether every subset constraint `x(X) ≤ H(X)` holds.
    pub fn all_nonnegative(&self) -> bool {
        self.slack.iter().all(|s| !s.is_negative())
    }

    /// `min { H(X) − x(X) : include ∈ X, X ∩ exclude = ∅ }`.
    pub fn minimize(&self, include: usize, exclude: SourceSet) -> Result<SfmResult> {
        if include >= self.n {
            return Err(Error::UnknownNode(format!("source position {include}")));
        }
        if exclude.span() > self.n {
            return Err(Error::UnknownNode(format!("source position {}", exclude.span() - 1)));
        }
        if exclude.contains(include) {
            return Err(Error::IncludedAndExcluded(include));
        }
        let mut best: Option<(Rational, SourceSet)> = None;
        for (mask, &s) in self.slack.iter().enumerate() {
            let set = SourceSet(mask as u64);
            if !set.contains(include) || !set.intersection(exclude).is_empty() {
                continue;
            }
            best = match best {
                None => Some((s, set)),
                Some((m, _)) if s < m => Some((s, set)),
                Some((m, inter)) if s == m => Some((m, inter.intersection(set))),
                keep => keep,
            };
        }
        let (min_value, minimal_minimizer) = best.expect("include is always feasible");
        Ok(SfmResult {
            min_value,
            minimal_minimizer,
        })
    }
}

fn table_inside(o: &dyn EntropyOracle, x: &RateVector) -> Result<SlackTable> {
    let table = SlackTable::new(o, x)?;
    if x.as_slice().iter().any(Rational::is_negative) || !table.all_nonnegative() {
        return Err(Error::OutsidePolyhedron);
    }
    Ok(table)
}

/// Exact minimum of `H(X) − x(X)` over `X ∋ include` avoiding `exclude`.
pub fn constrained_sfm(o: &dyn EntropyOracle, x: &RateVector, include: usize, exclude: SourceSet) -> Result<SfmResult> {
    SlackTable::new(o, x)?.minimize(include, exclude)
}

/// `ĉ(x,i) = max { α : x + α χ_i ∈ P(H,≤) }`.
pub fn saturation_capacity(o: &dyn EntropyOracle, x: &RateVector, i: usize) -> Result<Rational> {
    Ok(table_inside(o, x)?.minimize(i, SourceSet::EMPTY)?.min_value)
}

/// `ĉ(x,i,j) = max { α : x + α(χ_i − χ_j) ∈ P(H,≤) }`.
pub fn exchange_capacity(o: &dyn EntropyOracle, x: &RateVector, i: usize, j: usize) -> Result<Rational> {
    if i == j {
        return Err(Error::SameNode(i));
    }
    let table = table_inside(o, x)?;
    if j >= table.ground_size() {
        return Err(Error::UnknownNode(format!("source position {j}")));
    }
    let r = table.minimize(i, SourceSet::singleton(j))?;
    Ok(r.min_value.min(x.get(j)))
}

/// `dep(x,i)`: empty when `i` is unsaturated, otherwise the minimal
/// minimizer of the saturation problem (which contains `i`).
pub fn dependence_set(o: &dyn EntropyOracle, x: &RateVector, i: usize) -> Result<SourceSet> {
    let r = table_inside(o, x)?.minimize(i, SourceSet::EMPTY)?;
    Ok(if r.min_value.is_zero() {
        r.minimal_minimizer
    } else {
        SourceSet::EMPTY
    })
}
