//! The LP over static item prices, its dual over distributions of sold sets,
//! and the dense simplex that solves both.
//!
//! For every set `T` of items the primal has one row
//!
//! ```text
//! sum_j p_j (beta q_j 1{j not in T} - 1{j in T}) + l+ - l-
//!     <= beta sum_i E[v_i(OPT_i(v) \ T)] - E[v(OPT(v))] / alpha
//! ```
//!
//! and maximizes `l+ - l-`. A non-negative optimum means the optimal prices
//! are `alpha`-competitive. The dual puts a probability `mu_T` on every `T`.

mod build;
mod certificate;
mod export;
pub mod scaffold;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::bundle::Bundle;
use crate::error::{Error, Result};

pub use build::{
    build_dual, build_primal, direct_dual_objective, dual_objective, prices_from_primal, primal_rhs,
    solve_dual, solve_primal, verify_feasible_point, LpCaps, MAX_LP_ITEMS,
};
pub use certificate::{check_dual_feasible, marginal_absence_prob, DualCertificate};
pub use export::to_lp_format;
pub use simplex::{solve_lp, solve_lp_with, SimplexOptions};

/// Target ratio `alpha >= 1` and utility weight `0 < beta <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub alpha: f64,
    pub beta: f64,
}

impl Parameters {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 1.0 {
            return Err(Error::InvalidParameters(format!("alpha must be >= 1, got {alpha}")));
        }
        if !beta.is_finite() || beta <= 0.0 || beta > 1.0 {
            return Err(Error::InvalidParameters(format!("beta must lie in (0, 1], got {beta}")));
        }
        Ok(Parameters { alpha, beta })
    }
}

/// One non-negative price per item, the same for every agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PriceVector(Vec<f64>);

impl PriceVector {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if let Some((j, p)) = prices.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidPrices(format!("price of item {j} is {p}")));
        }
        Ok(PriceVector(prices))
    }

    pub fn zeros(m: usize) -> Self {
        PriceVector(vec![0.0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn price(&self, j: usize) -> f64 {
        self.0[j]
    }

    /// Total price of the items in `b`.
    pub fn cost(&self, b: Bundle) -> f64 {
        b.items().map(|j| self.0[j]).sum()
    }
}

impl TryFrom<Vec<f64>> for PriceVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        PriceVector::new(v)
    }
}

impl From<PriceVector> for Vec<f64> {
    fn from(p: PriceVector) -> Vec<f64> {
        p.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<f64>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// Dense LP; every variable is bounded below by zero and unbounded above.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgramSpec {
    pub variables: Vec<String>,
    pub objective_sense: Objective,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgramSpec {
    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        if self.objective.len() != n {
            return Err(Error::InvalidParameters(format!(
                "objective has {} coefficients for {n} variables",
                self.objective.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameters("non-finite objective coefficient".into()));
        }
        for row in &self.constraints {
            if row.coeffs.len() != n {
                return Err(Error::InvalidParameters(format!(
                    "row {} has {} coefficients for {n} variables",
                    row.name,
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameters(format!("row {} is not finite", row.name)));
            }
        }
        Ok(())
    }

    /// Largest violation of any row or non-negativity bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = x.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
        self.constraints
            .iter()
            .map(|row| {
                let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
                match row.sense {
                    RowSense::Le => (lhs - row.rhs).max(0.0),
                    RowSense::Ge => (row.rhs - lhs).max(0.0),
                    RowSense::Eq => (lhs - row.rhs).abs(),
                }
            })
            .fold(bounds, f64::max)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The pivoting finished but the point fails the residual check, or the
    /// iteration limit was hit.
    NumericalFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}
