//! Exact segment-length combinatorics of step-k iterates.
//!
//! Every step-k segment has length `Π a_j^{e_j}` (times the expansion factor)
//! with `Σ e_j = k`; the number of segments sharing an exponent configuration is
//! a multinomial coefficient. The two counting inequalities used to bound the
//! dimension of non-resolvable expanded curves are evaluated here in exact
//! arithmetic. Odd `k` uses the half index `⌊k/2⌋`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::budget::Budget;
use crate::curvegen::contract_iterate_labeled;
use crate::error::{Error, Result};
use crate::model::GeneratorRule;

/// Largest N^k accepted by [`census_enumerate`].
pub const ENUMERATION_LIMIT: u64 = 10_000;

/// Exact segment counts per exponent configuration `(j_1, …, j_N)`, keyed by
/// ratio index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    pub k: u32,
    pub n: usize,
    pub entries: BTreeMap<Vec<u32>, BigUint>,
}

impl CensusTable {
    pub fn total(&self) -> BigUint {
        self.entries.values().sum()
    }

    /// Merges configurations that give the same length, i.e. sums exponents of
    /// indices sharing a ratio value. Keys are exponent vectors over the
    /// ascending distinct values of `ratios`.
    pub fn merged_by_value(&self, ratios: &[f64]) -> Result<BTreeMap<Vec<u32>, BigUint>> {
        if ratios.len() != self.n {
            return Err(Error::invalid(format!(
                "{} ratios for a census over {} indices",
                ratios.len(),
                self.n
            )));
        }
        let distinct = crate::model::distinct_values(ratios);
        let slot = crate::model::distinct_slots(ratios);
        let mut out: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for (config, count) in &self.entries {
            let mut key = vec![0u32; distinct.len()];
            for (j, &e) in config.iter().enumerate() {
                key[slot[j]] += e;
            }
            *out.entry(key).or_default() += count;
        }
        Ok(out)
    }

    /// Sorted text dump: a header line, then `j_1 … j_N count` per configuration.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# census N={} k={} total={}\n",
            self.n,
            self.k,
            self.total()
        );
        for (config, count) in &self.entries {
            for j in config {
                let _ = write!(out, "{j} ");
            }
            let _ = writeln!(out, "{count}");
        }
        out
    }
}

/// Number of exponent configurations, `C(k + N - 1, N - 1)`.
pub fn configuration_count(n: usize, k: u32) -> BigUint {
    binomial(BigUint::from(k as usize + n - 1), BigUint::from(n - 1))
}

/// `k! / (j_1! ⋯ j_N!)` as a product of binomials.
pub fn multinomial(config: &[u32]) -> BigUint {
    let mut remaining: u64 = config.iter().map(|&j| j as u64).sum();
    let mut out = BigUint::one();
    for &j in config {
        out *= binomial(BigUint::from(remaining), BigUint::from(j));
        remaining -= j as u64;
    }
    out
}

/// All weak compositions of `k` into `n` parts, in lexicographic order.
fn compositions(n: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fn fill(pos: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == current.len() {
            current[pos] = left;
            out.push(current.clone());
            return;
        }
        for j in 0..=left {
            current[pos] = j;
            fill(pos + 1, left - j, current, out);
        }
    }
    fill(0, k, &mut current, &mut out);
    out
}

/// Multinomial segment counts for every configuration at step `k`.
pub fn multinomial_census(n: usize, k: u32, budget: &Budget) -> Result<CensusTable> {
    if n == 0 {
        return Err(Error::invalid("census needs at least one ratio"));
    }
    let configs = configuration_count(n, k);
    if configs > BigUint::from(budget.max_census_configs) {
        return Err(Error::Budget {
            what: "census configurations",
            requested: u128::try_from(configs).unwrap_or(u128::MAX),
            limit: budget.max_census_configs as u128,
        });
    }
    let entries = compositions(n, k)
        .into_iter()
        .map(|c| {
            let m = multinomial(&c);
            (c, m)
        })
        .collect();
    Ok(CensusTable { k, n, entries })
}

/// Census by generating `p_k` and tallying each segment's exponent configuration,
/// as tracked through the composition of generator maps.
pub fn census_enumerate(rule: &GeneratorRule, k: u32) -> Result<CensusTable> {
    let n = rule.segment_count();
    let limited = Budget {
        max_segments: ENUMERATION_LIMIT,
        ..Budget::default()
    };
    let labeled = contract_iterate_labeled(rule, k, &limited)?;
    let mut entries: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
    for config in labeled.exponents {
        *entries.entry(config).or_default() += 1u32;
    }
    Ok(CensusTable { k, n, entries })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfSum {
    /// `Σ_{i=0}^{⌊k/2⌋} C(k, i) α^{-i}`
    pub lhs: BigRational,
    /// `(1 + 1/α)^k / 2`
    pub rhs: BigRational,
    pub holds: bool,
}

/// Both sides of the half-sum binomial inequality, exactly.
pub fn half_sum_inequality(alpha: u32, k: u32) -> Result<HalfSum> {
    if alpha < 1 {
        return Err(Error::invalid("alpha must be at least 1"));
    }
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    let inv = BigRational::new(1.into(), alpha.into());
    let mut lhs = BigRational::zero();
    let mut power = BigRational::one();
    for i in 0..=k / 2 {
        let c = binomial(num_bigint::BigInt::from(k), num_bigint::BigInt::from(i));
        lhs += BigRational::from_integer(c) * &power;
        power *= &inv;
    }
    let base = BigRational::one() + &inv;
    let mut rhs = BigRational::new(1.into(), 2.into());
    for _ in 0..k {
        rhs *= &base;
    }
    let holds = lhs >= rhs;
    Ok(HalfSum { lhs, rhs, holds })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityCount {
    /// Segments whose configuration has `j_1 ≤ ⌊k/2⌋`.
    pub count: BigUint,
    /// `N^k`
    pub total: BigUint,
    /// `count ≥ total / 2`
    pub holds: bool,
}

/// `Σ_{j=0}^{⌊k/2⌋} C(k, j) (N-1)^{k-j}` against `N^k / 2`.
pub fn majority_short_count(n: u32, k: u32) -> Result<MajorityCount> {
    if n < 2 {
        return Err(Error::invalid("N must be at least 2"));
    }
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    let mut count = BigUint::zero();
    for j in 0..=k / 2 {
        count += binomial(BigUint::from(k), BigUint::from(j)) * BigUint::from(n - 1).pow(k - j);
    }
    let total = BigUint::from(n).pow(k);
    let holds = &count * 2u32 >= total;
    Ok(MajorityCount {
        count,
        total,
        holds,
    })
}

/// Closed form for the number of step-k segments whose first `fixed.len()`
/// exponents are pinned: the leading multinomial factor times
/// `(N - fixed.len())^{k - Σ fixed}`.
pub fn telescoped_count(n: usize, k: u32, fixed: &[u32]) -> Result<BigUint> {
    let used: u32 = fixed.iter().sum();
    if fixed.len() >= n || used > k {
        return Err(Error::invalid(
            "fixed exponents must leave a free index and not exceed k",
        ));
    }
    let mut remaining = k as u64;
    let mut lead = BigUint::one();
    for &j in fixed {
        lead *= binomial(BigUint::from(remaining), BigUint::from(j));
        remaining -= j as u64;
    }
    Ok(lead * BigUint::from(n - fixed.len()).pow(k - used))
}
