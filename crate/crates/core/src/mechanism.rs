//! Sequential posted-price mechanism and the revenue/utility lower bound on
//! its expected welfare.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::Bundle;
use crate::error::Result;
use crate::instances::Instance;
use crate::lp::PriceVector;
use crate::offline::{Allocation, OptStats};
use crate::valuations::{demand, Valuation};

#[derive(Clone, Debug, PartialEq)]
pub struct MechanismOutcome {
    /// Bundles bought; items nobody wanted stay unallocated.
    pub allocation: Allocation,
    pub sold: Bundle,
    pub revenue: f64,
    pub utilities: Vec<f64>,
    pub welfare: f64,
}

/// Agents arrive in order and each buys its demanded bundle among the items
/// still unsold.
pub fn run_mechanism(valuations: &[&Valuation], prices: &PriceVector) -> MechanismOutcome {
    let m = prices.len();
    let mut remaining = Bundle::full(m);
    let mut bundles = Vec::with_capacity(valuations.len());
    let mut utilities = Vec::with_capacity(valuations.len());
    let mut revenue = 0.0;
    let mut welfare = 0.0;
    for v in valuations {
        let bought = demand(v, prices, remaining);
        let value = v.value(bought);
        let paid = prices.cost(bought);
        remaining = remaining.difference(bought);
        revenue += paid;
        welfare += value;
        utilities.push(value - paid);
        bundles.push(bought);
    }
    MechanismOutcome {
        allocation: Allocation { bundles },
        sold: Bundle::full(m).difference(remaining),
        revenue,
        utilities,
        welfare,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum WelfareMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelfareEstimate {
    pub mean: f64,
    /// Standard error of the mean; zero in exact mode.
    pub std_error: f64,
    pub samples: usize,
}

pub fn expected_welfare(inst: &Instance, prices: &PriceVector, mode: WelfareMode) -> Result<WelfareEstimate> {
    match mode {
        WelfareMode::Exact => {
            let profiles = inst.enumerate_profiles()?;
            let mean = profiles
                .iter()
                .map(|p| p.probability * run_mechanism(&p.valuations, prices).welfare)
                .sum();
            Ok(WelfareEstimate {
                mean,
                std_error: 0.0,
                samples: profiles.len(),
            })
        }
        WelfareMode::MonteCarlo { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(monte_carlo_mean(samples, || {
                let profile = inst.sample_profile(&mut rng);
                run_mechanism(&profile.valuations, prices).welfare
            }))
        }
    }
}

/// Sample mean and standard error of `samples` draws of `draw`.
pub fn monte_carlo_mean(samples: usize, mut draw: impl FnMut() -> f64) -> WelfareEstimate {
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for n in 1..=samples {
        let x = draw();
        let delta = x - mean;
        mean += delta / n as f64;
        m2 += delta * (x - mean);
    }
    let std_error = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).sqrt()
    } else {
        0.0
    };
    WelfareEstimate {
        mean,
        std_error,
        samples,
    }
}

/// Evaluates, for every `T`,
/// `p(T) + beta * sum_i E[v_i(OPT_i(v) \ T) - p(OPT_i(v) \ T)]`
/// and returns the minimum with its minimizer (lowest bitmask on ties).
/// The expected welfare of the mechanism at `prices` is at least this bound.
pub fn lemma1_bound(inst: &Instance, stats: &OptStats, prices: &PriceVector, beta: f64) -> (f64, Bundle) {
    let mut best = (f64::INFINITY, Bundle::EMPTY);
    for t in Bundle::all(inst.items()) {
        let kept_utility = stats.residual_value(inst, t) - stats.residual_price(prices, t);
        let value = prices.cost(t) + beta * kept_utility;
        if value < best.0 {
            best = (value, t);
        }
    }
    best
}
