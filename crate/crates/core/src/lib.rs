//! Makespan minimisation on identical parallel machines sharing a single setup
//! server (`Pm|S1|Cmax`).
//!
//! The crate builds the two-graph arc-flow formulation (machines graph and
//! server graph sharing start variables), its tuned variant, and the classical
//! time-indexed baseline, and solves them through a solver-agnostic MILP layer
//! backed by HiGHS. Around the models sit the average-load and server-saturation
//! lower bounds, list-scheduling heuristics that set the time horizon, a
//! brute-force oracle for small instances, and a benchmark harness.
//!
//! ```no_run
//! use pms1::{arcflow, bounds, instance::Instance, milp};
//!
//! let inst = Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)]).unwrap();
//! let report = bounds::horizon_ub(&inst);
//! let fft = arcflow::build_fft(&inst, report.ub).unwrap();
//! let outcome = milp::solve(&fft.model, &milp::SolveOptions::default()).unwrap();
//! assert_eq!(outcome.objective.map(|v| v.round() as u32), Some(15));
//! ```

pub mod arcflow;
pub mod bench;
pub mod bounds;
pub mod error;
pub mod instance;
pub mod milp;
pub mod oracle;
pub mod schedule;
pub mod tivi;

pub use error::{Error, Result};

/// Integer time unit used throughout.
pub type Time = u32;
