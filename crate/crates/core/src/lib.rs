//! Static anonymous item prices for sequential posted-price mechanisms in
//! XOS and MPH-k combinatorial auctions.
//!
//! The crate builds the linear program whose variables are item prices and
//! whose constraints range over every set `T` of items an adversary may have
//! already sold, solves it (and its dual over distributions on `T`) with a
//! small dense simplex, and checks the resulting prices and certificates
//! against exhaustive oracles on small instances:
//!
//! * [`valuations`]: additive, XOS, PH-k and MPH-k set functions, supporting
//!   clauses and an exhaustive demand oracle.
//! * [`instances`]: discrete independent priors, profile enumeration and
//!   sampling, the JSON instance format.
//! * [`offline`]: brute-force welfare optimum and the per-agent optimal
//!   bundles that feed the LP coefficients.
//! * [`lp`]: primal/dual construction, the simplex solver and dual
//!   certificates.
//! * [`mechanism`]: the posted-price simulator and the revenue/utility lower
//!   bound on its welfare.
//! * [`theory`]: closed-form `(alpha, beta)` per valuation class and the
//!   per-bundle inequalities that make every feasible dual non-negative.
//! * [`report`]: the experiment report emitted by the CLI.

pub mod bundle;
pub mod error;
pub mod instances;
pub mod lp;
pub mod mechanism;
pub mod offline;
pub mod report;
pub mod theory;
pub mod valuations;

pub use bundle::Bundle;
pub use error::{Error, Result};
pub use instances::{AgentPrior, ClassTag, Instance, ValuationProfile};
pub use lp::{DualCertificate, LinearProgramSpec, LpSolution, LpStatus, Parameters, PriceVector};
pub use offline::{Allocation, OptStats};
pub use valuations::Valuation;
