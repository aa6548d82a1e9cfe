//! Brute-force offline optimum and the allocation statistics that become
//! LP coefficients.
//!
//! The optimum always hands out every item (full allocation). Under monotone
//! valuations this loses nothing, and it makes `sum_i Pr[j in OPT_i] = 1`
//! hold exactly for every item.

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::lp::PriceVector;
use crate::valuations::Valuation;

/// Default cap on `n^m` assignments searched per profile.
pub const DEFAULT_ASSIGNMENT_CAP: u128 = 10_000_000;

/// Relative slack under which two welfare values count as tied.
const TIE_EPS: f64 = 1e-12;

/// One bundle per agent, pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn is_disjoint(&self) -> bool {
        let mut seen = Bundle::EMPTY;
        for &b in &self.bundles {
            if !b.is_disjoint(seen) {
                return false;
            }
            seen = seen.union(b);
        }
        true
    }

    pub fn covered(&self) -> Bundle {
        self.bundles.iter().fold(Bundle::EMPTY, |acc, &b| acc.union(b))
    }

    pub fn welfare(&self, valuations: &[&Valuation]) -> f64 {
        self.bundles
            .iter()
            .zip(valuations)
            .map(|(&b, v)| v.value(b))
            .sum()
    }
}

pub fn optimal_allocation(valuations: &[&Valuation], m: usize) -> Result<(Allocation, f64)> {
    optimal_allocation_capped(valuations, m, DEFAULT_ASSIGNMENT_CAP)
}

/// Exhaustive search over every assignment of each item to exactly one agent.
///
/// Assignments are visited lexicographically (item 0's owner most
/// significant) and a later one replaces the incumbent only if it is strictly
/// better, so ties resolve to the lexicographically smallest assignment.
pub fn optimal_allocation_capped(valuations: &[&Valuation], m: usize, cap: u128) -> Result<(Allocation, f64)> {
    let n = valuations.len();
    if n == 0 {
        return Err(Error::InvalidInstance("no agents to allocate to".into()));
    }
    let count = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::AllocationTooLarge { count, cap });
    }
    let tables: Vec<Vec<f64>> = valuations.iter().map(|v| v.value_table()).collect();

    let mut owner = vec![0usize; m];
    let mut best_owner = owner.clone();
    let mut best = f64::NEG_INFINITY;
    let mut bundles = vec![0u32; n];
    loop {
        bundles.iter_mut().for_each(|b| *b = 0);
        for (j, &i) in owner.iter().enumerate() {
            bundles[i] |= 1 << j;
        }
        let welfare: f64 = bundles
            .iter()
            .zip(&tables)
            .map(|(&b, table)| table[b as usize])
            .sum();
        if best == f64::NEG_INFINITY || welfare > best + TIE_EPS * best.abs().max(1.0) {
            best = welfare;
            best_owner.copy_from_slice(&owner);
        }
        // odometer over owners, last item fastest
        let mut j = m;
        loop {
            if j == 0 {
                let mut out = vec![Bundle::EMPTY; n];
                for (item, &i) in best_owner.iter().enumerate() {
                    out[i] = out[i].with(item);
                }
                let allocation = Allocation { bundles: out };
                let welfare = allocation.welfare(valuations);
                return Ok((allocation, welfare));
            }
            j -= 1;
            owner[j] += 1;
            if owner[j] < n {
                break;
            }
            owner[j] = 0;
        }
    }
}

/// `OPT_i(v)` for agent `i` under the canonical optimum.
pub fn opt_bundle(valuations: &[&Valuation], m: usize, i: usize) -> Result<Bundle> {
    let (allocation, _) = optimal_allocation(valuations, m)?;
    allocation
        .bundles
        .get(i)
        .copied()
        .ok_or_else(|| Error::InvalidInstance(format!("agent {i} out of range")))
}

/// Canonical optimum of one enumerated profile.
#[derive(Clone, Debug)]
pub struct OptRecord {
    /// Support index of each agent's valuation.
    pub choice: Vec<usize>,
    pub probability: f64,
    pub bundles: Vec<Bundle>,
    pub welfare: f64,
}

/// Exact expectations over all profiles of an instance.
#[derive(Clone, Debug)]
pub struct OptStats {
    pub expected_optimum: f64,
    /// `q_j = sum_i Pr[j in OPT_i(v)]`.
    pub item_probs: Vec<f64>,
    pub records: Vec<OptRecord>,
    /// `(agent, support index, bundle, probability mass)`: the total
    /// probability that agent `i` holds that valuation and receives that
    /// bundle in the optimum. Aggregates of `records`.
    pub bundle_mass: Vec<(usize, usize, Bundle, f64)>,
}

pub fn opt_stats(inst: &Instance) -> Result<OptStats> {
    let m = inst.items();
    let profiles = inst.enumerate_profiles()?;
    let mut records = Vec::with_capacity(profiles.len());
    let mut item_probs = vec![0.0; m];
    let mut expected_optimum = 0.0;
    let mut mass: std::collections::BTreeMap<(usize, usize, Bundle), f64> = Default::default();
    for profile in &profiles {
        let (allocation, welfare) = optimal_allocation(&profile.valuations, m)?;
        expected_optimum += profile.probability * welfare;
        for (i, &b) in allocation.bundles.iter().enumerate() {
            for j in b.items() {
                item_probs[j] += profile.probability;
            }
            *mass.entry((i, profile.choice[i], b)).or_default() += profile.probability;
        }
        records.push(OptRecord {
            choice: profile.choice.clone(),
            probability: profile.probability,
            bundles: allocation.bundles,
            welfare,
        });
    }
    // Every item is allocated in every profile, so each q_j is the total
    // probability mass; pin it to exactly one.
    for (j, q) in item_probs.iter_mut().enumerate() {
        assert!((*q - 1.0).abs() < 1e-9, "item {j} allocated with probability {q}");
        *q = 1.0;
    }
    Ok(OptStats {
        expected_optimum,
        item_probs,
        records,
        bundle_mass: mass.into_iter().map(|((i, c, b), p)| (i, c, b, p)).collect(),
    })
}

impl OptStats {
    /// `sum_i E_v[v_i(OPT_i(v) \ T)]`, summed profile by profile.
    pub fn residual_value(&self, inst: &Instance, t: Bundle) -> f64 {
        self.records
            .iter()
            .map(|r| {
                let kept: f64 = r
                    .bundles
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| inst.agents()[i].support()[r.choice[i]].0.value(b.difference(t)))
                    .sum();
                r.probability * kept
            })
            .sum()
    }

    /// [`OptStats::residual_value`] for every `T`, indexed by bitmask.
    pub fn residual_table(&self, inst: &Instance) -> Vec<f64> {
        Bundle::all(inst.items()).map(|t| self.residual_value(inst, t)).collect()
    }

    /// `sum_i E_v[sum_{j in OPT_i(v) \ T} p_j]`.
    pub fn residual_price(&self, prices: &PriceVector, t: Bundle) -> f64 {
        self.records
            .iter()
            .map(|r| r.probability * r.bundles.iter().map(|&b| prices.cost(b.difference(t))).sum::<f64>())
            .sum()
    }
}

/// Prices at half the expected contribution of each item to the optimum:
/// `p_j = 1/2 sum_i E[w_i^{OPT_i(v)}({j}) 1{j in OPT_i(v)}]`, with `w_i^S`
/// the additive clause supporting `OPT_i(v)`. Defined for XOS valuations
/// (including rank-1 hypergraph functions).
pub fn fgl_prices(inst: &Instance, stats: &OptStats) -> Result<PriceVector> {
    let mut prices = vec![0.0; inst.items()];
    for &(i, choice, bundle, mass) in &stats.bundle_mass {
        let v = &inst.agents()[i].support()[choice].0;
        let clause = v.supporting_additive(bundle).ok_or_else(|| {
            Error::Unsupported(format!(
                "contribution prices need XOS valuations; agent {i} has rank {}",
                v.hyper_rank()
            ))
        })?;
        for j in bundle.items() {
            prices[j] += 0.5 * mass * clause.weight(j);
        }
    }
    PriceVector::new(prices)
}
