use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LpSolution, LpStatus, Parameters};
use crate::bundle::Bundle;
use crate::error::{Error, Result};

/// Total-mass tolerance of a certificate.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Probability distribution `mu` over item sets `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate {
    items: usize,
    /// Sorted by bundle; zero weights are dropped.
    mu: Vec<(Bundle, f64)>,
}

impl DualCertificate {
    /// Validates a distribution over subsets of an `items`-item universe.
    /// Weights within `MASS_TOLERANCE` below zero (solver round-off) are
    /// clamped to zero.
    pub fn new(items: usize, weights: Vec<(Bundle, f64)>) -> Result<Self> {
        let mut mu: Vec<(Bundle, f64)> = Vec::with_capacity(weights.len());
        for (t, w) in weights {
            t.check_within(items)?;
            if !w.is_finite() || w < -MASS_TOLERANCE {
                return Err(Error::InvalidCertificate(format!("weight {w} on {t}")));
            }
            if w > 0.0 {
                mu.push((t, w));
            }
        }
        mu.sort_by_key(|&(t, _)| t);
        // merge repeated sets
        mu.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
        let total: f64 = mu.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidCertificate(format!("weights sum to {total}, not 1")));
        }
        Ok(DualCertificate { items, mu })
    }

    /// Dense weights indexed by bitmask.
    pub fn from_dense(items: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != 1usize << items {
            return Err(Error::InvalidCertificate(format!(
                "expected {} weights, got {}",
                1usize << items,
                dense.len()
            )));
        }
        let weights = dense
            .iter()
            .enumerate()
            .map(|(t, &w)| (Bundle::from_bits(t as u32), w))
            .collect();
        DualCertificate::new(items, weights)
    }

    pub fn point_mass(items: usize, t: Bundle) -> Result<Self> {
        DualCertificate::new(items, vec![(t, 1.0)])
    }

    /// The `mu_T` values of an optimal solution of [`super::build_dual`].
    pub fn from_dual_solution(items: usize, sol: &LpSolution) -> Result<Self> {
        if sol.status != LpStatus::Optimal {
            return Err(Error::NotOptimal(sol.status));
        }
        DualCertificate::from_dense(items, &sol.values)
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn weights(&self) -> &[(Bundle, f64)] {
        &self.mu
    }

    pub fn weight(&self, t: Bundle) -> f64 {
        self.mu
            .binary_search_by_key(&t, |&(b, _)| b)
            .map(|pos| self.mu[pos].1)
            .unwrap_or(0.0)
    }

    /// `Pr_mu[pred(T)]`.
    pub fn probability(&self, pred: impl Fn(Bundle) -> bool) -> f64 {
        self.mu.iter().filter(|&&(t, _)| pred(t)).map(|&(_, w)| w).sum()
    }

    /// `E_mu[f(T)]`.
    pub fn expectation(&self, f: impl Fn(Bundle) -> f64) -> f64 {
        self.mu.iter().map(|&(t, w)| w * f(t)).sum()
    }

    pub fn to_json(&self) -> String {
        let doc = CertificateDoc {
            mu: self
                .mu
                .iter()
                .map(|&(t, weight)| MuDoc {
                    items: t.items().collect(),
                    weight,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("certificate serializes")
    }

    pub fn from_json(text: &str, items: usize) -> Result<Self> {
        let doc: CertificateDoc = serde_json::from_str(text)?;
        let weights = doc
            .mu
            .into_iter()
            .map(|e| Ok((Bundle::from_items(e.items, items)?, e.weight)))
            .collect::<Result<Vec<_>>>()?;
        DualCertificate::new(items, weights)
    }

    pub fn load(path: impl AsRef<Path>, items: usize) -> Result<Self> {
        DualCertificate::from_json(&std::fs::read_to_string(path)?, items)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CertificateDoc {
    mu: Vec<MuDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MuDoc {
    items: Vec<usize>,
    weight: f64,
}

/// `Pr_mu[j not in T]`.
pub fn marginal_absence_prob(cert: &DualCertificate, j: usize) -> f64 {
    cert.probability(|t| !t.contains(j))
}

/// Per-item margins `Pr_mu[j not in T] - 1/(1+beta)`; the certificate
/// satisfies the dual item constraints iff every margin is `>= -1e-9`.
pub fn check_dual_feasible(cert: &DualCertificate, params: Parameters) -> Vec<f64> {
    let floor = 1.0 / (1.0 + params.beta);
    (0..cert.items())
        .map(|j| marginal_absence_prob(cert, j) - floor)
        .collect()
}
