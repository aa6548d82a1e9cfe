//! Random dual-feasible certificates for property tests.
//!
//! Weights over all `2^m` sets are drawn from a sparse Dirichlet-like
//! distribution, then each item whose inclusion probability exceeds
//! `beta / (1 + beta)` has just enough mass moved from every `T` containing it
//! to `T` minus that item. Moving mass this way never raises the inclusion
//! probability of any other item, so one pass over the items suffices.

use rand::Rng;

use super::DualCertificate;
use crate::bundle::Bundle;
use crate::error::Result;

pub fn random_feasible_certificate<R: Rng + ?Sized>(m: usize, beta: f64, rng: &mut R) -> Result<DualCertificate> {
    let size = 1usize << m;
    let density: f64 = rng.gen_range(0.2..1.0);
    let mut mu: Vec<f64> = (0..size)
        .map(|_| {
            if rng.gen::<f64>() < density {
                // Exp(1) draw, normalized below: a flat Dirichlet on the support
                -(1.0 - rng.gen::<f64>()).ln()
            } else {
                0.0
            }
        })
        .collect();
    if mu.iter().all(|&w| w == 0.0) {
        mu[rng.gen_range(0..size)] = 1.0;
    }
    let total: f64 = mu.iter().sum();
    mu.iter_mut().for_each(|w| *w /= total);

    let cap = beta / (1.0 + beta);
    for j in 0..m {
        let inside: f64 = (0..size).filter(|t| t & (1 << j) != 0).map(|t| mu[t]).sum();
        if inside > cap {
            let fraction = (inside - cap) / inside;
            for t in (0..size).filter(|t| t & (1 << j) != 0) {
                let moved = mu[t] * fraction;
                mu[t] -= moved;
                mu[t & !(1 << j)] += moved;
            }
        }
    }
    let weights = mu
        .into_iter()
        .enumerate()
        .map(|(t, w)| (Bundle::from_bits(t as u32), w))
        .collect();
    DualCertificate::new(m, weights)
}
