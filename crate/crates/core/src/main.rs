//! Command-line front end: solve for prices, simulate the mechanism, verify
//! dual certificates, print class parameters, or run the whole pipeline.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on input
//! errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use prophet_prices::lp::{
    build_primal, prices_from_primal, solve_dual, solve_lp, to_lp_format, DualCertificate, Parameters, PriceVector,
};
use prophet_prices::mechanism::WelfareMode;
use prophet_prices::offline::opt_stats;
use prophet_prices::report::{self, ExperimentReport, DEFAULT_TOLERANCE};
use prophet_prices::theory::{parameters_for, parameters_for_tag, ValuationClass};
use prophet_prices::{ClassTag, Error, Instance};

#[derive(Parser)]
#[command(name = "prophet-prices", version, about = "Static item prices for XOS and MPH-k prophet inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the primal LP for item prices.
    SolvePrices {
        instance: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Write the primal LP in CPLEX LP format.
        #[arg(long)]
        export_lp: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the posted-price mechanism and compare with the offline optimum.
    Simulate {
        instance: PathBuf,
        /// JSON prices file: `{"prices": [..]}` or a bare array.
        #[arg(long, conflicts_with = "from_lp", required_unless_present = "from_lp")]
        prices: Option<PathBuf>,
        /// Use the prices of the optimal primal solution.
        #[arg(long)]
        from_lp: bool,
        /// Exact expectation over every profile (default).
        #[arg(long, conflicts_with = "samples")]
        exact: bool,
        /// Monte Carlo estimate with this many sampled profiles.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check a dual certificate: item absence margins, the per-bundle
    /// inequality for every agent and bundle, and the objective sign.
    VerifyDual {
        instance: PathBuf,
        /// Certificate file `{"mu": [{"items": [..], "weight": w}]}`.
        #[arg(long, conflicts_with = "from_lp", required_unless_present = "from_lp")]
        certificate: Option<PathBuf>,
        /// Use the optimal solution of the dual LP.
        #[arg(long)]
        from_lp: bool,
        /// Write the checked certificate to this path.
        #[arg(long)]
        export_certificate: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print `(alpha, beta)` for the valuation classes.
    Params {
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Full pipeline: prices, exact welfare, dual certificate checks.
    Report {
        instance: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Also estimate welfare by Monte Carlo with this many samples.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write a one-row CSV summary to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    SingleItem,
    Xos,
    MphBalanced,
    MphImproved,
}

#[derive(Args)]
struct ParamArgs {
    /// Valuation class whose (alpha, beta) to use; defaults to the
    /// instance's class (improved parameters for MPH-k, k >= 2).
    #[arg(long, value_enum, conflicts_with_all = ["alpha", "beta"])]
    class: Option<ClassArg>,
    /// k for the MPH classes; defaults to the instance's k.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn valuation_class(class: ClassArg, k: usize) -> ValuationClass {
    match class {
        ClassArg::SingleItem => ValuationClass::SingleItem,
        ClassArg::Xos => ValuationClass::Xos,
        ClassArg::MphBalanced => ValuationClass::MphBalanced { k },
        ClassArg::MphImproved => ValuationClass::MphImproved { k },
    }
}

impl ParamArgs {
    fn resolve(&self, inst: &Instance) -> Result<Parameters, Error> {
        if let (Some(alpha), Some(beta)) = (self.alpha, self.beta) {
            return Parameters::new(alpha, beta);
        }
        let instance_k = match inst.class() {
            ClassTag::Xos => 1,
            ClassTag::Mph { k } => k,
        };
        match self.class {
            Some(class) => Ok(parameters_for(valuation_class(class, self.k.unwrap_or(instance_k)))?.parameters()),
            None => Ok(parameters_for_tag(inst.class(), true)?.parameters()),
        }
    }

    /// Alpha if the user asked for any parameters at all.
    fn explicit(&self, inst: &Instance) -> Result<Option<Parameters>, Error> {
        if self.class.is_some() || self.alpha.is_some() {
            self.resolve(inst).map(Some)
        } else {
            Ok(None)
        }
    }
}

enum Failure {
    Check,
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotOptimal(_) => Failure::Check,
            other => Failure::Input(other),
        }
    }
}

fn emit<T: Serialize>(value: &T, out: &OutputArgs) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match &out.output {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load_prices(path: &Path) -> Result<PriceVector, Error> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum PricesDoc {
        Wrapped { prices: Vec<f64> },
        Bare(Vec<f64>),
    }
    let doc: PricesDoc = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let prices = match doc {
        PricesDoc::Wrapped { prices } | PricesDoc::Bare(prices) => prices,
    };
    PriceVector::new(prices)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::SolvePrices {
            instance,
            params,
            export_lp,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let p = params.resolve(&inst)?;
            let stats = opt_stats(&inst)?;
            if let Some(path) = export_lp {
                let spec = build_primal(&inst, &stats, p)?;
                std::fs::write(path, to_lp_format(&spec)).map_err(Error::from)?;
            }
            let rep = report::solve_prices(&inst, &stats, p, params.tolerance)?;
            emit(&rep, &out)?;
            Ok(rep.pass)
        }
        Command::Simulate {
            instance,
            prices,
            from_lp,
            exact: _,
            samples,
            seed,
            params,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let stats = opt_stats(&inst)?;
            let (price_vector, alpha) = if from_lp {
                let p = params.resolve(&inst)?;
                let sol = solve_lp(&build_primal(&inst, &stats, p)?);
                (prices_from_primal(&sol)?.0, Some(p.alpha))
            } else {
                let path = prices.expect("clap requires --prices without --from-lp");
                (load_prices(&path)?, params.explicit(&inst)?.map(|p| p.alpha))
            };
            let mode = match samples {
                Some(samples) => WelfareMode::MonteCarlo { samples, seed },
                None => WelfareMode::Exact,
            };
            let rep = report::simulate(&inst, stats.expected_optimum, &price_vector, mode, alpha, params.tolerance)?;
            emit(&rep, &out)?;
            Ok(rep.pass.unwrap_or(true))
        }
        Command::VerifyDual {
            instance,
            certificate,
            from_lp,
            export_certificate,
            params,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let p = params.resolve(&inst)?;
            let stats = opt_stats(&inst)?;
            let (cert, source) = if from_lp {
                let sol = solve_dual(&inst, &stats, p)?;
                (DualCertificate::from_dual_solution(inst.items(), &sol)?, "dual-lp".to_string())
            } else {
                let path = certificate.expect("clap requires --certificate without --from-lp");
                (DualCertificate::load(&path, inst.items())?, path.display().to_string())
            };
            if let Some(path) = export_certificate {
                std::fs::write(path, cert.to_json() + "\n").map_err(Error::from)?;
            }
            let rep = report::verify_dual(&inst, &stats, &cert, p, &source, params.tolerance)?;
            emit(&rep, &out)?;
            Ok(rep.pass)
        }
        Command::Params { class, k, json } => {
            let classes = match class {
                Some(c) => vec![valuation_class(c, k)],
                None => vec![
                    ValuationClass::SingleItem,
                    ValuationClass::Xos,
                    ValuationClass::MphBalanced { k },
                    ValuationClass::MphImproved { k },
                ],
            };
            let rows = classes
                .into_iter()
                .map(parameters_for)
                .collect::<Result<Vec<_>, _>>()?;
            if json {
                println!("{}", serde_json::to_string_pretty(&rows).map_err(Error::from)?);
            } else {
                println!("{:<22} {:>20} {:>20}", "class", "alpha", "beta");
                for row in rows {
                    println!("{:<22} {:>20.12} {:>20.12}", row.class.to_string(), row.alpha, row.beta);
                }
            }
            Ok(true)
        }
        Command::Report {
            instance,
            params,
            samples,
            seed,
            csv,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let p = params.resolve(&inst)?;
            let rep = report::run_experiment(&inst, p, samples.map(|s| (s, seed)), params.tolerance)?;
            if let Some(path) = csv {
                let text = format!("{}\n{}\n", ExperimentReport::CSV_HEADER, rep.csv_row());
                std::fs::write(path, text).map_err(Error::from)?;
            }
            emit(&rep, &out)?;
            Ok(rep.pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) | Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
