//! Reports produced by the command-line pipeline.
//!
//! Every report is plain data that serializes to JSON and re-validates after
//! parsing. Pass/fail flags are derived from the stored numbers and the
//! stored tolerance, so [`ExperimentReport::validate`] can recompute them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::lp::{
    check_dual_feasible, direct_dual_objective, dual_objective, prices_from_primal, solve_dual, solve_primal,
    DualCertificate, LpStatus, Parameters, PriceVector,
};
use crate::mechanism::{expected_welfare, WelfareMode};
use crate::offline::{opt_stats, OptStats};
use crate::theory::worst_claim1;

pub const DEFAULT_TOLERANCE: f64 = 1e-7;

/// Hex SHA-256 of the instance's canonical JSON encoding.
pub fn instance_digest(inst: &Instance) -> String {
    let hash = Sha256::digest(inst.to_json().as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PricesReport {
    pub instance_digest: String,
    pub parameters: Parameters,
    pub status: LpStatus,
    pub primal_objective: Option<f64>,
    pub prices: Option<Vec<f64>>,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn solve_prices(inst: &Instance, stats: &OptStats, params: Parameters, tolerance: f64) -> Result<PricesReport> {
    let sol = solve_primal(inst, stats, params)?;
    let (prices, objective) = match sol.status {
        LpStatus::Optimal => {
            let (p, slack) = prices_from_primal(&sol)?;
            (Some(Vec::from(p)), Some(slack))
        }
        _ => (None, None),
    };
    Ok(PricesReport {
        instance_digest: instance_digest(inst),
        parameters: params,
        status: sol.status,
        pass: objective.is_some_and(|o| o >= -tolerance),
        primal_objective: objective,
        prices,
        tolerance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub instance_digest: String,
    pub prices: Vec<f64>,
    pub mode: WelfareMode,
    pub expected_welfare: f64,
    pub welfare_std_error: f64,
    pub expected_optimum: f64,
    /// `expected_optimum / expected_welfare`; absent when welfare is zero.
    pub ratio: Option<f64>,
    pub alpha: Option<f64>,
    pub tolerance: f64,
    /// Whether `ratio <= alpha + tolerance`; absent when no alpha was given.
    pub pass: Option<bool>,
}

pub fn simulate(
    inst: &Instance,
    expected_optimum: f64,
    prices: &PriceVector,
    mode: WelfareMode,
    alpha: Option<f64>,
    tolerance: f64,
) -> Result<SimulationReport> {
    if prices.len() != inst.items() {
        return Err(Error::InvalidPrices(format!(
            "{} prices for {} items",
            prices.len(),
            inst.items()
        )));
    }
    let welfare = expected_welfare(inst, prices, mode)?;
    let ratio = (welfare.mean > 0.0).then(|| expected_optimum / welfare.mean);
    Ok(SimulationReport {
        instance_digest: instance_digest(inst),
        prices: prices.as_slice().to_vec(),
        mode,
        expected_welfare: welfare.mean,
        welfare_std_error: welfare.std_error,
        expected_optimum,
        ratio,
        alpha,
        tolerance,
        pass: alpha.map(|a| ratio.is_some_and(|r| r <= a + tolerance)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleAt {
    pub agent: usize,
    pub support_index: usize,
    pub bundle: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub instance_digest: String,
    pub parameters: Parameters,
    pub certificate_source: String,
    pub dual_objective: f64,
    pub direct_dual_objective: f64,
    pub absence_margins: Vec<f64>,
    pub worst_absence_margin: f64,
    pub worst_claim1_margin: f64,
    pub worst_claim1_at: Option<BundleAt>,
    pub tolerance: f64,
    pub absence_pass: bool,
    pub claim1_pass: bool,
    pub objective_pass: bool,
    pub pass: bool,
}

/// Per-item absence margins are held to `1e-9`; per-bundle margins and the
/// objective sign to `tolerance`.
pub const ABSENCE_TOLERANCE: f64 = 1e-9;

pub fn verify_dual(
    inst: &Instance,
    stats: &OptStats,
    cert: &DualCertificate,
    params: Parameters,
    source: &str,
    tolerance: f64,
) -> Result<DualReport> {
    if cert.items() != inst.items() {
        return Err(Error::InvalidCertificate(format!(
            "certificate over {} items, instance has {}",
            cert.items(),
            inst.items()
        )));
    }
    let margins = check_dual_feasible(cert, params);
    let worst_absence = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let (worst_claim1, at) = worst_claim1(cert, inst, params);
    let objective = dual_objective(cert, inst, stats, params);
    let direct = direct_dual_objective(cert, inst, stats, params);
    let absence_pass = worst_absence >= -ABSENCE_TOLERANCE;
    let claim1_pass = worst_claim1 >= -tolerance;
    let objective_pass = objective >= -tolerance;
    Ok(DualReport {
        instance_digest: instance_digest(inst),
        parameters: params,
        certificate_source: source.to_string(),
        dual_objective: objective,
        direct_dual_objective: direct,
        absence_margins: margins,
        worst_absence_margin: worst_absence,
        worst_claim1_margin: worst_claim1,
        worst_claim1_at: at.map(|(agent, support_index, s)| BundleAt {
            agent,
            support_index,
            bundle: s.items().collect(),
        }),
        tolerance,
        absence_pass,
        claim1_pass,
        objective_pass,
        pass: absence_pass && claim1_pass && objective_pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub primal_nonnegative: bool,
    pub ratio_within_alpha: bool,
    pub strong_duality: bool,
    pub absence_feasible: bool,
    pub claim1: bool,
    pub dual_nonnegative: bool,
}

impl Flags {
    pub fn all(&self) -> bool {
        self.primal_nonnegative
            && self.ratio_within_alpha
            && self.strong_duality
            && self.absence_feasible
            && self.claim1
            && self.dual_nonnegative
    }
}

/// Full pipeline summary: prices, simulated welfare, dual certificate checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub instance_digest: String,
    pub parameters: Parameters,
    pub primal_objective: f64,
    pub prices: Vec<f64>,
    pub expected_welfare: f64,
    pub monte_carlo_welfare: Option<f64>,
    pub monte_carlo_std_error: Option<f64>,
    pub expected_optimum: f64,
    pub achieved_ratio: Option<f64>,
    pub dual_optimum: f64,
    pub worst_absence_margin: f64,
    pub worst_claim1_margin: f64,
    pub tolerance: f64,
    pub flags: Flags,
    pub pass: bool,
}

impl ExperimentReport {
    fn derive_flags(&self) -> Flags {
        let tol = self.tolerance;
        Flags {
            primal_nonnegative: self.primal_objective >= -tol,
            ratio_within_alpha: self
                .achieved_ratio
                .is_some_and(|r| r <= self.parameters.alpha + tol),
            strong_duality: (self.primal_objective - self.dual_optimum).abs() <= tol,
            absence_feasible: self.worst_absence_margin >= -ABSENCE_TOLERANCE,
            claim1: self.worst_claim1_margin >= -tol,
            dual_nonnegative: self.dual_optimum >= -tol,
        }
    }

    /// Re-derives the ratio and every flag from the stored numbers.
    pub fn validate(&self) -> Result<()> {
        let ratio = (self.expected_welfare > 0.0).then(|| self.expected_optimum / self.expected_welfare);
        let consistent = match (ratio, self.achieved_ratio) {
            (None, None) => true,
            (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * a.abs().max(1.0),
            _ => false,
        };
        if !consistent {
            return Err(Error::InvalidInstance(format!(
                "report ratio {:?} disagrees with optimum / welfare {ratio:?}",
                self.achieved_ratio
            )));
        }
        let flags = self.derive_flags();
        if flags != self.flags || flags.all() != self.pass {
            return Err(Error::InvalidInstance("report flags disagree with its numbers".into()));
        }
        Ok(())
    }
}

pub fn run_experiment(
    inst: &Instance,
    params: Parameters,
    monte_carlo: Option<(usize, u64)>,
    tolerance: f64,
) -> Result<ExperimentReport> {
    let stats = opt_stats(inst)?;
    let primal = solve_primal(inst, &stats, params)?;
    let (prices, primal_objective) = prices_from_primal(&primal)?;
    let welfare = expected_welfare(inst, &prices, WelfareMode::Exact)?;
    let mc = monte_carlo
        .map(|(samples, seed)| expected_welfare(inst, &prices, WelfareMode::MonteCarlo { samples, seed }))
        .transpose()?;
    let dual = solve_dual(inst, &stats, params)?;
    let cert = DualCertificate::from_dual_solution(inst.items(), &dual)?;
    let worst_absence = check_dual_feasible(&cert, params)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let (worst_claim1, _) = worst_claim1(&cert, inst, params);

    let mut report = ExperimentReport {
        instance_digest: instance_digest(inst),
        parameters: params,
        primal_objective,
        prices: prices.as_slice().to_vec(),
        expected_welfare: welfare.mean,
        monte_carlo_welfare: mc.map(|w| w.mean),
        monte_carlo_std_error: mc.map(|w| w.std_error),
        expected_optimum: stats.expected_optimum,
        achieved_ratio: (welfare.mean > 0.0).then(|| stats.expected_optimum / welfare.mean),
        dual_optimum: dual.objective,
        worst_absence_margin: worst_absence,
        worst_claim1_margin: worst_claim1,
        tolerance,
        flags: Flags {
            primal_nonnegative: false,
            ratio_within_alpha: false,
            strong_duality: false,
            absence_feasible: false,
            claim1: false,
            dual_nonnegative: false,
        },
        pass: false,
    };
    report.flags = report.derive_flags();
    report.pass = report.flags.all();
    Ok(report)
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str = "instance_digest,alpha,beta,primal_objective,expected_welfare,expected_optimum,achieved_ratio,dual_optimum,worst_absence_margin,worst_claim1_margin,pass";

    pub fn csv_row(&self) -> String {
        let ratio = self.achieved_ratio.map(|r| r.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.instance_digest,
            self.parameters.alpha,
            self.parameters.beta,
            self.primal_objective,
            self.expected_welfare,
            self.expected_optimum,
            ratio,
            self.dual_optimum,
            self.worst_absence_margin,
            self.worst_claim1_margin,
            self.pass
        )
    }
}
