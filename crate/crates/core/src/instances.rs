//! Stochastic auction instances: independent discrete priors per agent, a
//! fixed arrival order, exact profile enumeration, seeded sampling and the
//! JSON instance format.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::valuations::{AdditiveFunction, MphkFunction, PhkFunction, Valuation, XosFunction};

/// Default cap on the number of enumerated valuation profiles.
pub const DEFAULT_PROFILE_CAP: u128 = 1_000_000;

/// Stored priors sum to one within this tolerance.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-12;

/// Files whose probabilities are further than this from one are rejected.
pub const FILE_PRIOR_TOLERANCE: f64 = 1e-9;

/// Declared valuation class of an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassTag {
    Xos,
    Mph { k: usize },
}

impl ClassTag {
    /// Largest hyperedge size the class admits.
    pub fn max_rank(self) -> usize {
        match self {
            ClassTag::Xos => 1,
            ClassTag::Mph { k } => k,
        }
    }

    pub fn admits(self, v: &Valuation) -> bool {
        v.hyper_rank() <= self.max_rank()
    }
}

/// Finite prior over valuations of one agent.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentPrior {
    support: Vec<(Valuation, f64)>,
}

impl AgentPrior {
    pub fn new(support: Vec<(Valuation, f64)>) -> Result<Self> {
        Self::with_tolerance(support, PRIOR_SUM_TOLERANCE)
    }

    /// Accepts probabilities summing to one within `tolerance` and rescales
    /// them so the stored prior sums to one within [`PRIOR_SUM_TOLERANCE`].
    pub fn with_tolerance(support: Vec<(Valuation, f64)>, tolerance: f64) -> Result<Self> {
        let Some((first, _)) = support.first() else {
            return Err(Error::InvalidInstance("agent prior has an empty support".into()));
        };
        let m = first.items();
        let mut total = 0.0;
        for (v, p) in &support {
            if v.items() != m {
                return Err(Error::InvalidInstance(
                    "support valuations disagree on the item universe".into(),
                ));
            }
            if !p.is_finite() || *p <= 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "support probability must be positive, got {p}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > tolerance {
            return Err(Error::InvalidInstance(format!(
                "support probabilities sum to {total}, not 1"
            )));
        }
        let support = support.into_iter().map(|(v, p)| (v, p / total)).collect();
        Ok(AgentPrior { support })
    }

    /// Point mass on one valuation.
    pub fn deterministic(v: Valuation) -> Self {
        AgentPrior {
            support: vec![(v, 1.0)],
        }
    }

    pub fn support(&self) -> &[(Valuation, f64)] {
        &self.support
    }

    pub fn items(&self) -> usize {
        self.support[0].0.items()
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (idx, (_, p)) in self.support.iter().enumerate() {
            acc += p;
            if u < acc {
                return idx;
            }
        }
        self.support.len() - 1
    }
}

/// `m` items and `n` agents arriving in list order.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    m: usize,
    agents: Vec<AgentPrior>,
    class: ClassTag,
}

impl Instance {
    pub fn new(m: usize, agents: Vec<AgentPrior>, class: ClassTag) -> Result<Self> {
        if m == 0 || m > MAX_ITEMS {
            return Err(Error::UnsupportedItemCount(m));
        }
        if agents.is_empty() {
            return Err(Error::InvalidInstance("instance needs at least one agent".into()));
        }
        if let ClassTag::Mph { k } = class {
            if k == 0 {
                return Err(Error::InvalidInstance("MPH class needs k >= 1".into()));
            }
        }
        for (i, agent) in agents.iter().enumerate() {
            if agent.items() != m {
                return Err(Error::InvalidInstance(format!(
                    "agent {i} valuations have {} items, instance has {m}",
                    agent.items()
                )));
            }
            if let Some((v, _)) = agent.support().iter().find(|(v, _)| !class.admits(v)) {
                return Err(Error::InvalidInstance(format!(
                    "agent {i} has a valuation of rank {} outside class {class:?}",
                    v.hyper_rank()
                )));
            }
        }
        Ok(Instance { m, agents, class })
    }

    pub fn items(&self) -> usize {
        self.m
    }

    pub fn agents(&self) -> &[AgentPrior] {
        &self.agents
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn class(&self) -> ClassTag {
        self.class
    }

    /// Same priors, agents reordered so that `order[t]` arrives at step `t`.
    pub fn permuted(&self, order: &[usize]) -> Result<Instance> {
        let mut seen = vec![false; self.agents.len()];
        if order.len() != self.agents.len() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidInstance("arrival order is not a permutation".into()));
        }
        let agents = order.iter().map(|&i| self.agents[i].clone()).collect();
        Ok(Instance {
            m: self.m,
            agents,
            class: self.class,
        })
    }

    /// Number of profiles in the product of supports.
    pub fn profile_count(&self) -> u128 {
        self.agents
            .iter()
            .fold(1u128, |acc, a| acc.saturating_mul(a.support.len() as u128))
    }

    /// Largest single-bundle value over all support valuations.
    pub fn max_value(&self) -> f64 {
        let full = Bundle::full(self.m);
        self.agents
            .iter()
            .flat_map(|a| a.support.iter())
            .map(|(v, _)| v.value(full))
            .fold(0.0, f64::max)
    }

    pub fn enumerate_profiles(&self) -> Result<Vec<ValuationProfile<'_>>> {
        self.enumerate_profiles_capped(DEFAULT_PROFILE_CAP)
    }

    /// Cartesian product of the supports, lexicographic in support indices
    /// (agent 0 most significant), each with its product probability.
    pub fn enumerate_profiles_capped(&self, cap: u128) -> Result<Vec<ValuationProfile<'_>>> {
        let count = self.profile_count();
        if count > cap {
            return Err(Error::EnumerationTooLarge { count, cap });
        }
        let n = self.agents.len();
        let mut out = Vec::with_capacity(count as usize);
        let mut choice = vec![0usize; n];
        loop {
            out.push(self.profile(&choice));
            // odometer, last agent fastest
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < self.agents[i].support.len() {
                    break;
                }
                choice[i] = 0;
            }
        }
    }

    /// Profile with agent `i` holding support element `choice[i]`.
    pub fn profile(&self, choice: &[usize]) -> ValuationProfile<'_> {
        assert_eq!(choice.len(), self.agents.len());
        let mut probability = 1.0;
        let valuations = choice
            .iter()
            .zip(&self.agents)
            .map(|(&c, agent)| {
                let (v, p) = &agent.support[c];
                probability *= p;
                v
            })
            .collect();
        ValuationProfile {
            choice: choice.to_vec(),
            valuations,
            probability,
        }
    }

    /// Draws each agent's valuation independently from its prior.
    pub fn sample_profile<R: Rng + ?Sized>(&self, rng: &mut R) -> ValuationProfile<'_> {
        let choice: Vec<usize> = self.agents.iter().map(|a| a.draw(rng)).collect();
        self.profile(&choice)
    }

    pub fn from_json(text: &str) -> Result<Instance> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        doc.into_instance()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
        Instance::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceDoc::from_instance(self)).expect("instance serializes")
    }
}

/// One realization of every agent's valuation.
#[derive(Clone, Debug)]
pub struct ValuationProfile<'a> {
    /// Support index drawn for each agent.
    pub choice: Vec<usize>,
    pub valuations: Vec<&'a Valuation>,
    pub probability: f64,
}

/// Requested class for [`generate_random_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorClass {
    Xos,
    Mph { k: usize },
}

/// Random instance of the requested class, deterministic given the rng state.
///
/// XOS valuations get 1 to 3 clauses with weights uniform on `[0, 1]`. MPH-k
/// valuations get 1 to 3 PH-k clauses, each with 1 to `m + 1` random
/// hyperedges of size at most `k` and weights uniform on `(0, 1]`. Support
/// probabilities are random and strictly positive.
pub fn generate_random_instance<R: Rng + ?Sized>(
    class: GeneratorClass,
    m: usize,
    n: usize,
    support_size: usize,
    rng: &mut R,
) -> Result<Instance> {
    if m == 0 || n == 0 || support_size == 0 {
        return Err(Error::InvalidInstance(
            "generator parameters must be positive".into(),
        ));
    }
    if m > MAX_ITEMS {
        return Err(Error::UnsupportedItemCount(m));
    }
    let tag = match class {
        GeneratorClass::Xos => ClassTag::Xos,
        GeneratorClass::Mph { k } if k >= 1 => ClassTag::Mph { k },
        GeneratorClass::Mph { .. } => {
            return Err(Error::InvalidInstance("MPH generator needs k >= 1".into()))
        }
    };
    let mut agents = Vec::with_capacity(n);
    for _ in 0..n {
        let raw: Vec<f64> = (0..support_size).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let support = raw
            .into_iter()
            .map(|w| Ok((random_valuation(class, m, rng)?, w / total)))
            .collect::<Result<Vec<_>>>()?;
        agents.push(AgentPrior::new(support)?);
    }
    Instance::new(m, agents, tag)
}

fn random_valuation<R: Rng + ?Sized>(class: GeneratorClass, m: usize, rng: &mut R) -> Result<Valuation> {
    let clause_count = rng.gen_range(1..=3);
    match class {
        GeneratorClass::Xos => {
            let rows = (0..clause_count)
                .map(|_| (0..m).map(|_| rng.gen_range(0.0..=1.0)).collect())
                .collect();
            Ok(Valuation::Xos(XosFunction::from_rows(rows)?))
        }
        GeneratorClass::Mph { k } => {
            let clauses = (0..clause_count)
                .map(|_| random_phk(m, k, rng))
                .collect::<Result<Vec<_>>>()?;
            Ok(Valuation::Mphk(MphkFunction::new(k, clauses)?))
        }
    }
}

fn random_phk<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Result<PhkFunction> {
    let edge_count = rng.gen_range(1..=m + 1);
    let mut edges: Vec<(Bundle, f64)> = Vec::new();
    for _ in 0..edge_count {
        let size = rng.gen_range(1..=k.min(m));
        let mut x = Bundle::EMPTY;
        while x.len() < size {
            x = x.with(rng.gen_range(0..m));
        }
        // weight uniform on (0, 1]
        let w = 1.0 - rng.gen::<f64>();
        match edges.iter_mut().find(|(e, _)| *e == x) {
            Some(edge) => edge.1 += w,
            None => edges.push((x, w)),
        }
    }
    PhkFunction::new(m, k, edges)
}

// ---------------------------------------------------------------------------
// JSON documents

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    m: usize,
    class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    agents: Vec<AgentDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AgentDoc {
    support: Vec<SupportDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SupportDoc {
    prob: f64,
    valuation: ValuationDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ValuationDoc {
    Additive { weights: Vec<f64> },
    Xos { clauses: Vec<Vec<f64>> },
    Phk(PhkDoc),
    Mphk { k: usize, clauses: Vec<PhkClauseDoc> },
}

#[derive(Debug, Serialize, Deserialize)]
struct PhkDoc {
    k: usize,
    edges: Vec<EdgeDoc>,
}

/// A PH-k clause nested inside an MPH-k valuation; the `type` tag is optional.
#[derive(Debug, Serialize, Deserialize)]
struct PhkClauseDoc {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    k: usize,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    items: Vec<usize>,
    weight: f64,
}

fn weights_row(weights: Vec<f64>, m: usize) -> Result<AdditiveFunction> {
    if weights.len() != m {
        return Err(Error::InvalidInstance(format!(
            "weight vector has {} entries, expected {m}",
            weights.len()
        )));
    }
    AdditiveFunction::new(weights)
}

fn phk_from_doc(k: usize, edges: Vec<EdgeDoc>, m: usize) -> Result<PhkFunction> {
    let edges = edges
        .into_iter()
        .map(|e| Ok((Bundle::from_items(e.items, m)?, e.weight)))
        .collect::<Result<Vec<_>>>()?;
    PhkFunction::new(m, k, edges)
}

fn edges_doc(p: &PhkFunction) -> Vec<EdgeDoc> {
    p.edges()
        .iter()
        .map(|&(x, weight)| EdgeDoc {
            items: x.items().collect(),
            weight,
        })
        .collect()
}

impl ValuationDoc {
    fn into_valuation(self, m: usize) -> Result<Valuation> {
        Ok(match self {
            ValuationDoc::Additive { weights } => Valuation::Additive(weights_row(weights, m)?),
            ValuationDoc::Xos { clauses } => Valuation::Xos(XosFunction::new(
                clauses
                    .into_iter()
                    .map(|row| weights_row(row, m))
                    .collect::<Result<Vec<_>>>()?,
            )?),
            ValuationDoc::Phk(PhkDoc { k, edges }) => Valuation::Phk(phk_from_doc(k, edges, m)?),
            ValuationDoc::Mphk { k, clauses } => {
                let clauses = clauses
                    .into_iter()
                    .map(|c| {
                        if let Some(kind) = c.kind.as_deref() {
                            if kind != "phk" {
                                return Err(Error::InvalidInstance(format!(
                                    "MPH-k clause has type {kind:?}, expected \"phk\""
                                )));
                            }
                        }
                        if c.k > k {
                            return Err(Error::InvalidInstance(format!(
                                "MPH-k clause declares k = {} above the function's k = {k}",
                                c.k
                            )));
                        }
                        phk_from_doc(c.k, c.edges, m)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Valuation::Mphk(MphkFunction::new(k, clauses)?)
            }
        })
    }

    fn from_valuation(v: &Valuation) -> Self {
        match v {
            Valuation::Additive(a) => ValuationDoc::Additive {
                weights: a.weights().to_vec(),
            },
            Valuation::Xos(x) => ValuationDoc::Xos {
                clauses: x.clauses().iter().map(|c| c.weights().to_vec()).collect(),
            },
            Valuation::Phk(p) => ValuationDoc::Phk(PhkDoc {
                k: p.k(),
                edges: edges_doc(p),
            }),
            Valuation::Mphk(h) => ValuationDoc::Mphk {
                k: h.k(),
                clauses: h
                    .clauses()
                    .iter()
                    .map(|c| PhkClauseDoc {
                        kind: Some("phk".into()),
                        k: c.k(),
                        edges: edges_doc(c),
                    })
                    .collect(),
            },
        }
    }
}

impl InstanceDoc {
    fn into_instance(self) -> Result<Instance> {
        let m = self.m;
        if m == 0 || m > MAX_ITEMS {
            return Err(Error::UnsupportedItemCount(m));
        }
        let class = match (self.class.as_str(), self.k) {
            ("xos", None) => ClassTag::Xos,
            ("xos", Some(_)) => {
                return Err(Error::InvalidInstance("field `k` is only allowed for class \"mph\"".into()))
            }
            ("mph", Some(k)) => ClassTag::Mph { k },
            ("mph", None) => return Err(Error::InvalidInstance("class \"mph\" requires `k`".into())),
            (other, _) => {
                return Err(Error::InvalidInstance(format!(
                    "unknown class {other:?}, expected \"xos\" or \"mph\""
                )))
            }
        };
        let agents = self
            .agents
            .into_iter()
            .map(|agent| {
                let support = agent
                    .support
                    .into_iter()
                    .map(|s| Ok((s.valuation.into_valuation(m)?, s.prob)))
                    .collect::<Result<Vec<_>>>()?;
                AgentPrior::with_tolerance(support, FILE_PRIOR_TOLERANCE)
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(m, agents, class)
    }

    fn from_instance(inst: &Instance) -> Self {
        let (class, k) = match inst.class {
            ClassTag::Xos => ("xos".to_string(), None),
            ClassTag::Mph { k } => ("mph".to_string(), Some(k)),
        };
        InstanceDoc {
            m: inst.m,
            class,
            k,
            agents: inst
                .agents
                .iter()
                .map(|a| AgentDoc {
                    support: a
                        .support
                        .iter()
                        .map(|(v, p)| SupportDoc {
                            prob: *p,
                            valuation: ValuationDoc::from_valuation(v),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}
