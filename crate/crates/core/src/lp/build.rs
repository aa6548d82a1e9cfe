use super::{
    solve_lp, Constraint, DualCertificate, LinearProgramSpec, LpSolution, LpStatus, Objective, Parameters,
    PriceVector, RowSense,
};
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::offline::OptStats;

/// Largest item count for which the `2^m`-row LP is built.
pub const MAX_LP_ITEMS: usize = 16;

#[derive(Clone, Copy, Debug)]
pub struct LpCaps {
    pub max_items: usize,
}

impl Default for LpCaps {
    fn default() -> Self {
        LpCaps {
            max_items: MAX_LP_ITEMS,
        }
    }
}

fn check_size(m: usize, caps: LpCaps) -> Result<()> {
    if m > caps.max_items {
        Err(Error::LpTooLarge {
            items: m,
            cap: caps.max_items,
        })
    } else {
        Ok(())
    }
}

/// Right-hand side of the row for every `T` (indexed by bitmask):
/// `beta * sum_i E[v_i(OPT_i(v) \ T)] - E[OPT] / alpha`.
pub fn primal_rhs(inst: &Instance, stats: &OptStats, params: Parameters) -> Vec<f64> {
    let target = stats.expected_optimum / params.alpha;
    stats
        .residual_table(inst)
        .into_iter()
        .map(|kept| params.beta * kept - target)
        .collect()
}

/// Coefficient of `p_j` in the row for `T`.
fn price_coeff(stats: &OptStats, params: Parameters, t: Bundle, j: usize) -> f64 {
    if t.contains(j) {
        -1.0
    } else {
        params.beta * stats.item_probs[j]
    }
}

/// `max l+ - l-` subject to one row per `T` over variables
/// `p_0 .. p_{m-1}, l+, l-`.
pub fn build_primal(inst: &Instance, stats: &OptStats, params: Parameters) -> Result<LinearProgramSpec> {
    let m = inst.items();
    check_size(m, LpCaps::default())?;
    let rhs = primal_rhs(inst, stats, params);
    let mut variables: Vec<String> = (0..m).map(|j| format!("p{j}")).collect();
    variables.push("lplus".into());
    variables.push("lminus".into());
    let mut objective = vec![0.0; m + 2];
    objective[m] = 1.0;
    objective[m + 1] = -1.0;

    let constraints = Bundle::all(m)
        .map(|t| {
            let mut coeffs: Vec<f64> = (0..m).map(|j| price_coeff(stats, params, t, j)).collect();
            coeffs.push(1.0);
            coeffs.push(-1.0);
            Constraint {
                name: format!("T_{}", t.bits()),
                coeffs,
                sense: RowSense::Le,
                rhs: rhs[t.bits() as usize],
            }
        })
        .collect();
    Ok(LinearProgramSpec {
        variables,
        objective_sense: Objective::Maximize,
        objective,
        constraints,
    })
}

/// `min sum_T mu_T rhs_T` subject to one row per item and `sum_T mu_T = 1`.
pub fn build_dual(inst: &Instance, stats: &OptStats, params: Parameters) -> Result<LinearProgramSpec> {
    let m = inst.items();
    check_size(m, LpCaps::default())?;
    let sets: Vec<Bundle> = Bundle::all(m).collect();
    let mut constraints: Vec<Constraint> = (0..m)
        .map(|j| Constraint {
            name: format!("item_{j}"),
            coeffs: sets.iter().map(|&t| price_coeff(stats, params, t, j)).collect(),
            sense: RowSense::Ge,
            rhs: 0.0,
        })
        .collect();
    constraints.push(Constraint {
        name: "mass".into(),
        coeffs: vec![1.0; sets.len()],
        sense: RowSense::Eq,
        rhs: 1.0,
    });
    Ok(LinearProgramSpec {
        variables: sets.iter().map(|t| format!("muT_{}", t.bits())).collect(),
        objective_sense: Objective::Minimize,
        objective: primal_rhs(inst, stats, params),
        constraints,
    })
}

pub fn solve_primal(inst: &Instance, stats: &OptStats, params: Parameters) -> Result<LpSolution> {
    Ok(solve_lp(&build_primal(inst, stats, params)?))
}

pub fn solve_dual(inst: &Instance, stats: &OptStats, params: Parameters) -> Result<LpSolution> {
    Ok(solve_lp(&build_dual(inst, stats, params)?))
}

/// Prices and the slack objective `l+ - l-` of an optimal primal solution.
pub fn prices_from_primal(sol: &LpSolution) -> Result<(PriceVector, f64)> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::NotOptimal(sol.status));
    }
    let m = sol
        .values
        .len()
        .checked_sub(2)
        .ok_or_else(|| Error::InvalidPrices("solution has no slack variables".into()))?;
    let prices = PriceVector::new(sol.values[..m].to_vec())?;
    Ok((prices, sol.values[m] - sol.values[m + 1]))
}

/// Dual objective after swapping the order of summation:
/// `sum_i sum_S E[1{S = OPT_i(v)} (beta sum_T mu_T v_i(S \ T) - v_i(S) / alpha)]`.
pub fn dual_objective(cert: &DualCertificate, inst: &Instance, stats: &OptStats, params: Parameters) -> f64 {
    stats
        .bundle_mass
        .iter()
        .map(|&(i, choice, s, mass)| {
            let v = &inst.agents()[i].support()[choice].0;
            let kept = cert.expectation(|t| v.value(s.difference(t)));
            mass * (params.beta * kept - v.value(s) / params.alpha)
        })
        .sum()
}

/// Dual objective as written: `sum_T mu_T rhs_T`.
pub fn direct_dual_objective(cert: &DualCertificate, inst: &Instance, stats: &OptStats, params: Parameters) -> f64 {
    let target = stats.expected_optimum / params.alpha;
    cert.expectation(|t| params.beta * stats.residual_value(inst, t) - target)
}

/// `min_T (rhs_T - lhs_T(prices))` with `l+ = l- = 0`; the prices certify
/// ratio `alpha` iff this is `>= -1e-9`.
pub fn verify_feasible_point(inst: &Instance, stats: &OptStats, params: Parameters, prices: &PriceVector) -> Result<f64> {
    let m = inst.items();
    if prices.len() != m {
        return Err(Error::InvalidPrices(format!("{} prices for {m} items", prices.len())));
    }
    check_size(m, LpCaps::default())?;
    let rhs = primal_rhs(inst, stats, params);
    Ok(Bundle::all(m)
        .map(|t| {
            let lhs: f64 = (0..m).map(|j| prices.price(j) * price_coeff(stats, params, t, j)).sum();
            rhs[t.bits() as usize] - lhs
        })
        .fold(f64::INFINITY, f64::min))
}
