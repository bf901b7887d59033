//! Constrained stochastic optimization with decision-dependent distributions.
//!
//! The crate solves problems of the form
//!
//! ```text
//!     minimize    E_{z ~ D(x)} [ l(x, z) ]
//!     subject to  G x <= E_{w ~ D_g(x)} [ w ]
//! ```
//!
//! where both distributions move with the deployed decision `x`. Two
//! iterative schemes are provided ([`algorithms::rcm`] and
//! [`algorithms::rda`]), together with an analyzer that evaluates every
//! convergence constant and condition ([`analysis`]), brute-force reference
//! oracles, and the market / dynamic-pricing experiment constructors
//! ([`experiments`]).
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`). The
//! `*F64` aliases below fix the scalar to `f64`, which is what the CLI and
//! the experiment reproductions use.
//!
//! ```
//! use ddopt::{algorithms, experiments};
//!
//! let problem = experiments::one_dim_example::<f64>(0.5).unwrap();
//! let trace = algorithms::rcm(&problem, &[1.0], &algorithms::RcmConfig::default()).unwrap();
//! assert_eq!(trace.records[3].x[0], 0.125);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod analysis;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod experiments;
pub mod inner_solver;
pub mod numerics;
pub mod problem;
pub mod scalar;
pub mod trace_io;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type MatrixF64 = numerics::Matrix<f64>;
pub type VectorF64 = numerics::Vector<f64>;
pub type DistributionMapF64 = distribution::DistributionMap<f64>;
pub type ProblemF64 = problem::PerformativeProblem<f64>;
pub type TraceF64 = algorithms::Trace<f64>;
pub type ConstantsReportF64 = analysis::ConstantsReport<f64>;
pub type BoundReportF64 = analysis::BoundReport<f64>;

pub type MatrixF32 = numerics::Matrix<f32>;
pub type VectorF32 = numerics::Vector<f32>;
pub type ProblemF32 = problem::PerformativeProblem<f32>;
