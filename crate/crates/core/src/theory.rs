//! Closed-form `(alpha, beta)` per valuation class, and the per-bundle
//! inequalities that force every dual-feasible certificate to have a
//! non-negative objective.
//!
//! Dual feasibility says each item is missing from `T ~ mu` with probability
//! at least `1/(1+beta)`. For XOS functions, fixing the supporting additive
//! clause of `S` gives `E_mu[v(S \ T)] >= v(S)/2` at `beta = 1`. For MPH-k
//! functions, a union bound over a hyperedge of at most `k` items gives
//! `Pr_mu[X disjoint from T] >= 1 - k beta/(1+beta)`, which equals
//! `1/(alpha beta)` for both MPH-k parameter choices below.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::instances::ClassTag;
use crate::lp::{DualCertificate, Parameters};
use crate::valuations::Valuation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum ValuationClass {
    SingleItem,
    Xos,
    /// `alpha = 4k - 2`, `beta = 1 / (2(k - 1))`.
    MphBalanced { k: usize },
    /// `alpha = 2k + 2 sqrt(k(k - 1)) - 1`, `beta = sqrt(k / (k - 1)) - 1`.
    MphImproved { k: usize },
}

impl fmt::Display for ValuationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationClass::SingleItem => write!(f, "single-item"),
            ValuationClass::Xos => write!(f, "xos"),
            ValuationClass::MphBalanced { k } => write!(f, "mph-balanced(k={k})"),
            ValuationClass::MphImproved { k } => write!(f, "mph-improved(k={k})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassParameters {
    pub class: ValuationClass,
    pub alpha: f64,
    pub beta: f64,
}

impl ClassParameters {
    pub fn parameters(&self) -> Parameters {
        Parameters {
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

pub fn parameters_for(class: ValuationClass) -> Result<ClassParameters> {
    let (alpha, beta) = match class {
        ValuationClass::SingleItem | ValuationClass::Xos => (2.0, 1.0),
        ValuationClass::MphBalanced { k } | ValuationClass::MphImproved { k } if k < 2 => {
            return Err(Error::InvalidParameters(format!(
                "{class} needs k >= 2; MPH-1 is XOS"
            )))
        }
        ValuationClass::MphBalanced { k } => {
            let k = k as f64;
            (4.0 * k - 2.0, 1.0 / (2.0 * (k - 1.0)))
        }
        ValuationClass::MphImproved { k } => {
            let k = k as f64;
            (2.0 * k + 2.0 * (k * (k - 1.0)).sqrt() - 1.0, (k / (k - 1.0)).sqrt() - 1.0)
        }
    };
    Ok(ClassParameters { class, alpha, beta })
}

/// Parameters matched to an instance's declared class. MPH-1 instances use
/// the XOS parameters; for `k >= 2` the caller picks the variant.
pub fn parameters_for_tag(tag: ClassTag, improved: bool) -> Result<ClassParameters> {
    match tag {
        ClassTag::Xos | ClassTag::Mph { k: 1 } => parameters_for(ValuationClass::Xos),
        ClassTag::Mph { k } if improved => parameters_for(ValuationClass::MphImproved { k }),
        ClassTag::Mph { k } => parameters_for(ValuationClass::MphBalanced { k }),
    }
}

/// `(1 - k beta/(1+beta)) - 1/(alpha beta)`.
pub fn mph_identity_residual(k: usize, alpha: f64, beta: f64) -> f64 {
    (1.0 - k as f64 * beta / (1.0 + beta)) - 1.0 / (alpha * beta)
}

/// `sum_T mu_T v(S \ T) - v(S) / (alpha beta)`; non-negative whenever the
/// certificate is dual feasible and `(alpha, beta)` match the class of `v`.
pub fn check_claim1(cert: &DualCertificate, v: &Valuation, s: Bundle, params: Parameters) -> f64 {
    let kept = cert.expectation(|t| v.value(s.difference(t)));
    kept - v.value(s) / (params.alpha * params.beta)
}

/// `Pr_mu[X disjoint from T] - (1 - k beta/(1+beta))`.
pub fn check_hyperedge_survival(cert: &DualCertificate, x: Bundle, k: usize, beta: f64) -> Result<f64> {
    if x.len() > k {
        return Err(Error::InvalidParameters(format!(
            "hyperedge {x} has {} items, exceeding k = {k}",
            x.len()
        )));
    }
    let survive = cert.probability(|t| t.is_disjoint(x));
    Ok(survive - (1.0 - k as f64 * beta / (1.0 + beta)))
}

/// Smallest per-bundle margin over every support valuation of every agent and
/// every bundle, with the argmin `(agent, support index, S)`.
pub fn worst_claim1(
    cert: &DualCertificate,
    inst: &crate::instances::Instance,
    params: Parameters,
) -> (f64, Option<(usize, usize, Bundle)>) {
    let mut worst = (f64::INFINITY, None);
    for (i, agent) in inst.agents().iter().enumerate() {
        for (c, (v, _)) in agent.support().iter().enumerate() {
            for s in Bundle::all(inst.items()) {
                let margin = check_claim1(cert, v, s, params);
                if margin < worst.0 {
                    worst = (margin, Some((i, c, s)));
                }
            }
        }
    }
    worst
}
