//! Corpora and independent oracles shared by the integration tests.
#![allow(dead_code)]

use prophet_prices::instances::{generate_random_instance, GeneratorClass};
use prophet_prices::valuations::AdditiveFunction;
use prophet_prices::{AgentPrior, Bundle, ClassTag, Instance, OptStats, Valuation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn additive(w: &[f64]) -> Valuation {
    Valuation::Additive(AdditiveFunction::new(w.to_vec()).unwrap())
}

/// One item; agent 1 values it at 1, agent 2 at 10 with probability 0.1.
pub fn tightness() -> Instance {
    let agent1 = AgentPrior::deterministic(additive(&[1.0]));
    let agent2 = AgentPrior::new(vec![(additive(&[10.0]), 0.1), (additive(&[0.0]), 0.9)]).unwrap();
    Instance::new(1, vec![agent1, agent2], ClassTag::Xos).unwrap()
}

pub fn toy() -> Instance {
    Instance::new(1, vec![AgentPrior::deterministic(additive(&[1.0]))], ClassTag::Xos).unwrap()
}

/// Random instance with `m <= max_m`, `n <= 3` agents and support size `<= 2`.
pub fn random_instance(class: GeneratorClass, max_m: usize, seed: u64) -> Instance {
    let mut r = rng(seed);
    let m = r.gen_range(1..=max_m);
    let n = r.gen_range(1..=3);
    let support = r.gen_range(1..=2);
    generate_random_instance(class, m, n, support, &mut r).unwrap()
}

pub fn xos_corpus(count: u64) -> Vec<Instance> {
    (0..count).map(|s| random_instance(GeneratorClass::Xos, 5, 1_000 + s)).collect()
}

pub fn mph_corpus(k: usize, count: u64) -> Vec<Instance> {
    (0..count)
        .map(|s| random_instance(GeneratorClass::Mph { k }, 5, 10_000 * k as u64 + s))
        .collect()
}

/// Best welfare over every partial allocation, where each item goes to one
/// agent or to nobody. Evaluates bundles directly, without value tables.
pub fn partial_optimum(valuations: &[&Valuation], m: usize) -> f64 {
    let n = valuations.len();
    let mut owner = vec![0usize; m];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut bundles = vec![Bundle::EMPTY; n + 1];
        for (j, &i) in owner.iter().enumerate() {
            bundles[i] = bundles[i].with(j);
        }
        let welfare: f64 = valuations.iter().zip(&bundles).map(|(v, &b)| v.value(b)).sum();
        best = best.max(welfare);
        let mut j = 0;
        loop {
            if j == m {
                return best;
            }
            owner[j] += 1;
            if owner[j] <= n {
                break;
            }
            owner[j] = 0;
            j += 1;
        }
    }
}

/// Contribution prices computed record by record, picking each supporting
/// clause by a fresh scan over the XOS clauses.
pub fn fgl_oracle(inst: &Instance, stats: &OptStats) -> Vec<f64> {
    let mut prices = vec![0.0; inst.items()];
    for r in &stats.records {
        for (i, &b) in r.bundles.iter().enumerate() {
            let weights: Vec<f64> = match &inst.agents()[i].support()[r.choice[i]].0 {
                Valuation::Additive(a) => a.weights().to_vec(),
                Valuation::Xos(x) => {
                    let mut best: Option<(f64, &AdditiveFunction)> = None;
                    for c in x.clauses() {
                        let val: f64 = b.items().map(|j| c.weight(j)).sum();
                        if best.is_none_or(|(v, _)| val > v) {
                            best = Some((val, c));
                        }
                    }
                    best.unwrap().1.weights().to_vec()
                }
                other => panic!("no additive clauses for {other:?}"),
            };
            for j in b.items() {
                prices[j] += 0.5 * r.probability * weights[j];
            }
        }
    }
    prices
}

/// Uniform random prices on `[0, 2 * max value]`.
pub fn random_prices(m: usize, max_value: f64, r: &mut impl Rng) -> Vec<f64> {
    let hi = 2.0 * max_value;
    (0..m).map(|_| if hi > 0.0 { r.gen_range(0.0..=hi) } else { 0.0 }).collect()
}
