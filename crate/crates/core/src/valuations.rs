//! Valuation classes: additive, XOS (max of additive), PH-k (positive
//! hypergraph of rank at most k) and MPH-k (max of PH-k).
//!
//! Every function here is monotone and normalized. Values are exact sums of
//! the stored weights; no function is approximated.

use crate::bundle::{Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::lp::PriceVector;

fn check_items(m: usize) -> Result<()> {
    if m == 0 || m > MAX_ITEMS {
        Err(Error::UnsupportedItemCount(m))
    } else {
        Ok(())
    }
}

fn check_weight(w: f64, what: &str) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        Err(Error::InvalidValuation(format!(
            "{what} must be finite and non-negative, got {w}"
        )))
    } else {
        Ok(())
    }
}

/// `a(S) = sum_{j in S} c_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveFunction {
    weights: Vec<f64>,
}

impl AdditiveFunction {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_items(weights.len())?;
        for &w in &weights {
            check_weight(w, "additive weight")?;
        }
        Ok(AdditiveFunction { weights })
    }

    pub fn items(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn value(&self, s: Bundle) -> f64 {
        s.items()
            .filter(|&j| j < self.weights.len())
            .map(|j| self.weights[j])
            .sum()
    }
}

/// Maximum over a non-empty list of additive clauses.
#[derive(Clone, Debug, PartialEq)]
pub struct XosFunction {
    clauses: Vec<AdditiveFunction>,
}

impl XosFunction {
    pub fn new(clauses: Vec<AdditiveFunction>) -> Result<Self> {
        let first = clauses
            .first()
            .ok_or_else(|| Error::InvalidValuation("XOS function needs at least one clause".into()))?;
        let m = first.items();
        if clauses.iter().any(|c| c.items() != m) {
            return Err(Error::InvalidValuation(
                "XOS clauses disagree on the item universe".into(),
            ));
        }
        Ok(XosFunction { clauses })
    }

    /// Convenience constructor from raw clause weight rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let clauses = rows
            .into_iter()
            .map(AdditiveFunction::new)
            .collect::<Result<Vec<_>>>()?;
        XosFunction::new(clauses)
    }

    pub fn items(&self) -> usize {
        self.clauses[0].items()
    }

    pub fn clauses(&self) -> &[AdditiveFunction] {
        &self.clauses
    }

    pub fn value(&self, s: Bundle) -> f64 {
        self.clauses
            .iter()
            .map(|c| c.value(s))
            .fold(0.0, f64::max)
    }

    /// Index of the clause attaining `v(S)`; lowest index on ties.
    pub fn supporting_index(&self, s: Bundle) -> usize {
        let mut best = 0;
        let mut best_value = self.clauses[0].value(s);
        for (idx, clause) in self.clauses.iter().enumerate().skip(1) {
            let value = clause.value(s);
            if value > best_value {
                best = idx;
                best_value = value;
            }
        }
        best
    }

    /// The additive clause `w^S` with `w^S(S) = v(S)`.
    pub fn supporting_additive(&self, s: Bundle) -> &AdditiveFunction {
        &self.clauses[self.supporting_index(s)]
    }
}

/// `v(S) = sum_{X subset of S} w(X)` over strictly positive hyperedge weights
/// with `1 <= |X| <= k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhkFunction {
    items: usize,
    k: usize,
    // sorted by bundle, unique
    edges: Vec<(Bundle, f64)>,
}

impl PhkFunction {
    pub fn new(items: usize, k: usize, edges: Vec<(Bundle, f64)>) -> Result<Self> {
        check_items(items)?;
        if k == 0 {
            return Err(Error::InvalidValuation("PH-k rank bound k must be >= 1".into()));
        }
        let mut edges = edges;
        edges.sort_by_key(|&(x, _)| x);
        for window in edges.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(Error::InvalidValuation(format!(
                    "duplicate hyperedge {}",
                    window[0].0
                )));
            }
        }
        for &(x, w) in &edges {
            x.check_within(items)?;
            if x.is_empty() {
                return Err(Error::InvalidValuation("empty hyperedge".into()));
            }
            if x.len() > k {
                return Err(Error::InvalidValuation(format!(
                    "hyperedge {x} has {} items, exceeding k = {k}",
                    x.len()
                )));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidValuation(format!(
                    "hyperedge {x} weight must be finite and > 0, got {w}"
                )));
            }
        }
        Ok(PhkFunction { items, k, edges })
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(Bundle, f64)] {
        &self.edges
    }

    /// Size of the largest hyperedge (0 when there are none).
    pub fn rank(&self) -> usize {
        self.edges.iter().map(|(x, _)| x.len()).max().unwrap_or(0)
    }

    pub fn weight(&self, x: Bundle) -> f64 {
        self.edges
            .binary_search_by_key(&x, |&(e, _)| e)
            .map(|pos| self.edges[pos].1)
            .unwrap_or(0.0)
    }

    pub fn value(&self, s: Bundle) -> f64 {
        self.edges
            .iter()
            .filter(|(x, _)| x.is_subset_of(s))
            .map(|&(_, w)| w)
            .sum()
    }
}

/// Maximum over a non-empty list of PH-k clauses, each of rank at most `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MphkFunction {
    k: usize,
    clauses: Vec<PhkFunction>,
}

impl MphkFunction {
    pub fn new(k: usize, clauses: Vec<PhkFunction>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidValuation("MPH-k rank bound k must be >= 1".into()));
        }
        let first = clauses
            .first()
            .ok_or_else(|| Error::InvalidValuation("MPH-k function needs at least one clause".into()))?;
        let m = first.items();
        for clause in &clauses {
            if clause.items() != m {
                return Err(Error::InvalidValuation(
                    "MPH-k clauses disagree on the item universe".into(),
                ));
            }
            if clause.rank() > k {
                return Err(Error::InvalidValuation(format!(
                    "clause of rank {} exceeds k = {k}",
                    clause.rank()
                )));
            }
        }
        Ok(MphkFunction { k, clauses })
    }

    pub fn items(&self) -> usize {
        self.clauses[0].items()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clauses(&self) -> &[PhkFunction] {
        &self.clauses
    }

    pub fn rank(&self) -> usize {
        self.clauses.iter().map(PhkFunction::rank).max().unwrap_or(0)
    }

    pub fn value(&self, s: Bundle) -> f64 {
        self.clauses
            .iter()
            .map(|c| c.value(s))
            .fold(0.0, f64::max)
    }

    pub fn supporting_index(&self, s: Bundle) -> usize {
        let mut best = 0;
        let mut best_value = self.clauses[0].value(s);
        for (idx, clause) in self.clauses.iter().enumerate().skip(1) {
            let value = clause.value(s);
            if value > best_value {
                best = idx;
                best_value = value;
            }
        }
        best
    }

    /// The PH-k clause `v^S` with `v^S(S) = v(S)`; lowest index on ties.
    pub fn supporting_phk(&self, s: Bundle) -> &PhkFunction {
        &self.clauses[self.supporting_index(s)]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Valuation {
    Additive(AdditiveFunction),
    Xos(XosFunction),
    Phk(PhkFunction),
    Mphk(MphkFunction),
}

impl Valuation {
    pub fn items(&self) -> usize {
        match self {
            Valuation::Additive(a) => a.items(),
            Valuation::Xos(x) => x.items(),
            Valuation::Phk(p) => p.items(),
            Valuation::Mphk(h) => h.items(),
        }
    }

    /// Value of `s`, rejecting bundles outside the item universe.
    pub fn evaluate(&self, s: Bundle) -> Result<f64> {
        s.check_within(self.items())?;
        Ok(self.value(s))
    }

    /// Value of `s` without the universe check; items beyond the universe
    /// contribute nothing.
    pub fn value(&self, s: Bundle) -> f64 {
        match self {
            Valuation::Additive(a) => a.value(s),
            Valuation::Xos(x) => x.value(s),
            Valuation::Phk(p) => p.value(s),
            Valuation::Mphk(h) => h.value(s),
        }
    }

    /// Smallest `k` such that this function is MPH-k. Additive and XOS
    /// functions count as rank 1.
    pub fn hyper_rank(&self) -> usize {
        match self {
            Valuation::Additive(_) | Valuation::Xos(_) => 1,
            Valuation::Phk(p) => p.rank().max(1),
            Valuation::Mphk(h) => h.rank().max(1),
        }
    }

    /// Additive clause supporting `s`, for every valuation that is XOS
    /// (rank-1 hypergraph functions included). `None` for rank >= 2.
    pub fn supporting_additive(&self, s: Bundle) -> Option<AdditiveFunction> {
        let from_phk = |p: &PhkFunction| {
            let mut weights = vec![0.0; p.items()];
            for &(x, w) in p.edges() {
                let j = x.items().next().expect("non-empty hyperedge");
                weights[j] += w;
            }
            AdditiveFunction { weights }
        };
        match self {
            Valuation::Additive(a) => Some(a.clone()),
            Valuation::Xos(x) => Some(x.supporting_additive(s).clone()),
            Valuation::Phk(p) if p.rank() <= 1 => Some(from_phk(p)),
            Valuation::Mphk(h) if h.rank() <= 1 => Some(from_phk(h.supporting_phk(s))),
            _ => None,
        }
    }

    /// Value of every bundle of the universe, indexed by bitmask.
    pub fn value_table(&self) -> Vec<f64> {
        Bundle::all(self.items()).map(|s| self.value(s)).collect()
    }
}

/// Utility-maximizing bundle among the subsets of `available`.
///
/// Exhaustive over `2^|available|` candidates. Ties go to the smaller bundle,
/// then to the smaller bitmask, so an agent indifferent between buying and not
/// buying takes nothing.
pub fn demand(v: &Valuation, prices: &PriceVector, available: Bundle) -> Bundle {
    demand_with_utility(v, prices, available).0
}

pub fn demand_with_utility(v: &Valuation, prices: &PriceVector, available: Bundle) -> (Bundle, f64) {
    let mut best = Bundle::EMPTY;
    let mut best_utility = 0.0;
    for b in available.subsets().skip(1) {
        let utility = v.value(b) - prices.cost(b);
        let better = utility > best_utility
            || (utility == best_utility && (b.len(), b.bits()) < (best.len(), best.bits()));
        if better {
            best = b;
            best_utility = utility;
        }
    }
    (best, best_utility)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(items: &[usize]) -> Bundle {
        Bundle::from_items(items.iter().copied(), MAX_ITEMS).unwrap()
    }

    fn xos_example() -> XosFunction {
        XosFunction::from_rows(vec![vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap()
    }

    #[test]
    fn evaluate_xos_takes_max_clause() {
        let v = Valuation::Xos(xos_example());
        assert_eq!(v.evaluate(b(&[0, 1])).unwrap(), 3.0);
        assert_eq!(v.evaluate(Bundle::EMPTY).unwrap(), 0.0);
        assert_eq!(v.evaluate(b(&[0])).unwrap(), 2.0);
    }

    #[test]
    fn evaluate_phk_sums_contained_edges() {
        let p = PhkFunction::new(2, 2, vec![(b(&[0]), 1.0), (b(&[0, 1]), 2.0)]).unwrap();
        let v = Valuation::Phk(p);
        assert_eq!(v.evaluate(b(&[0, 1])).unwrap(), 3.0);
        assert_eq!(v.evaluate(b(&[1])).unwrap(), 0.0);
        assert_eq!(v.evaluate(Bundle::EMPTY).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_rejects_out_of_universe_bundle() {
        let v = Valuation::Xos(xos_example());
        assert!(matches!(
            v.evaluate(b(&[2])),
            Err(Error::UniverseMismatch { items: 2, .. })
        ));
    }

    #[test]
    fn supporting_additive_tie_breaks_low_index() {
        let x = xos_example();
        assert_eq!(x.supporting_index(b(&[0, 1])), 0);
        assert_eq!(x.supporting_additive(b(&[1])).weights(), &[0.0, 3.0]);
        let single = XosFunction::from_rows(vec![vec![0.5, 0.25]]).unwrap();
        for s in Bundle::all(2) {
            assert_eq!(single.supporting_index(s), 0);
        }
    }

    #[test]
    fn supporting_phk_picks_larger_clause() {
        let c5 = PhkFunction::new(2, 2, vec![(b(&[0, 1]), 5.0)]).unwrap();
        let c7 = PhkFunction::new(2, 2, vec![(b(&[0]), 3.0), (b(&[1]), 4.0)]).unwrap();
        let h = MphkFunction::new(2, vec![c5.clone(), c7.clone()]).unwrap();
        assert_eq!(h.supporting_phk(b(&[0, 1])), &c7);
        assert_eq!(h.supporting_index(Bundle::EMPTY), 0);
        let single = MphkFunction::new(2, vec![c5.clone()]).unwrap();
        assert_eq!(single.supporting_phk(b(&[1])), &c5);
    }

    #[test]
    fn phk_construction_rejects_bad_edges() {
        assert!(PhkFunction::new(3, 2, vec![(b(&[0, 1, 2]), 1.0)]).is_err());
        assert!(PhkFunction::new(3, 2, vec![(b(&[0]), 0.0)]).is_err());
        assert!(PhkFunction::new(3, 2, vec![(b(&[0]), -1.0)]).is_err());
        assert!(PhkFunction::new(3, 2, vec![(Bundle::EMPTY, 1.0)]).is_err());
        assert!(PhkFunction::new(3, 2, vec![(b(&[3]), 1.0)]).is_err());
        assert!(PhkFunction::new(3, 2, vec![(b(&[0]), 1.0), (b(&[0]), 2.0)]).is_err());
        let wide = PhkFunction::new(3, 3, vec![(b(&[0, 1, 2]), 1.0)]).unwrap();
        assert!(MphkFunction::new(2, vec![wide]).is_err());
    }

    #[test]
    fn additive_rejects_negative_weights() {
        assert!(AdditiveFunction::new(vec![1.0, -0.5]).is_err());
        assert!(AdditiveFunction::new(vec![]).is_err());
        assert!(XosFunction::new(vec![]).is_err());
    }

    #[test]
    fn demand_single_item() {
        let v = Valuation::Additive(AdditiveFunction::new(vec![1.0]).unwrap());
        let cheap = PriceVector::new(vec![0.5]).unwrap();
        let dear = PriceVector::new(vec![1.5]).unwrap();
        let exact = PriceVector::new(vec![1.0]).unwrap();
        assert_eq!(demand(&v, &cheap, Bundle::full(1)), Bundle::full(1));
        assert_eq!(demand(&v, &dear, Bundle::full(1)), Bundle::EMPTY);
        assert_eq!(demand(&v, &cheap, Bundle::EMPTY), Bundle::EMPTY);
        // zero utility: indifferent, buys nothing
        assert_eq!(demand(&v, &exact, Bundle::full(1)), Bundle::EMPTY);
    }

    #[test]
    fn demand_prefers_smaller_bundle_on_ties() {
        // item 1 is worthless at price 0: {0} and {0,1} tie, {0} wins
        let v = Valuation::Additive(AdditiveFunction::new(vec![1.0, 0.0]).unwrap());
        let p = PriceVector::new(vec![0.25, 0.0]).unwrap();
        assert_eq!(demand(&v, &p, Bundle::full(2)), b(&[0]));
        // two equally good singletons: lower bitmask wins
        let v = Valuation::Additive(AdditiveFunction::new(vec![1.0, 1.0]).unwrap());
        let p = PriceVector::new(vec![0.5, 0.5]).unwrap();
        let x = Valuation::Xos(XosFunction::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap());
        assert_eq!(demand(&x, &p, Bundle::full(2)), b(&[0]));
        assert_eq!(demand(&v, &p, Bundle::full(2)), b(&[0, 1]));
    }

    #[test]
    fn mph1_matches_xos_with_same_singletons() {
        let rows = vec![vec![0.3, 0.0, 0.7], vec![0.5, 0.2, 0.1]];
        let xos = Valuation::Xos(XosFunction::from_rows(rows.clone()).unwrap());
        let clauses = rows
            .iter()
            .map(|row| {
                let edges = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(j, &w)| (Bundle::singleton(j), w))
                    .collect();
                PhkFunction::new(3, 1, edges).unwrap()
            })
            .collect();
        let mph = Valuation::Mphk(MphkFunction::new(1, clauses).unwrap());
        for s in Bundle::all(3) {
            assert_eq!(xos.value(s), mph.value(s), "bundle {s}");
            assert_eq!(
                xos.supporting_additive(s).unwrap().weights(),
                mph.supporting_additive(s).unwrap().weights()
            );
        }
        assert_eq!(mph.hyper_rank(), 1);
    }
}
