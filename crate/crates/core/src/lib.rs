//! Stochastic proximal trust-region optimization.
//!
//! The crate minimizes `f(x) + φ(x)` where `f = E[F(·, ξ)]` can only be sampled
//! and `φ` is convex, possibly nonsmooth, with an exact proximal map. Each
//! iteration builds a sampled quadratic model of `f`, computes a step inside a
//! trust region from a Cauchy-arc search followed by spectral proximal-gradient
//! refinement, and accepts or rejects it from a sampled estimate of the actual
//! reduction.
//!
//! Module map:
//!
//! - [`prox`]: proximal maps (ℓ¹, box, box with a weighted budget) and the
//!   proximal-gradient stationarity measure.
//! - [`model`]: sampled quadratic models with matrix-free curvature.
//! - [`subproblem`]: trial step computation.
//! - [`driver`]: the outer trust-region loop and its trace.
//! - [`sampling`]: variance-driven dynamic sample sizes.
//! - [`problems`]: built-in stochastic problems with ground truth.
//! - [`diagnostics`]: Lyapunov values, accuracy events, summability and
//!   theory constants computed from traces.
//! - [`harness`]: config-driven runs, sweeps and the verification suites
//!   behind the `proxstorm` binary.
//!
//! ```no_run
//! use proxstorm::{driver, problems::LogisticL1, TrustRegionConfig};
//!
//! let problem = LogisticL1::new(20, 500, 1e-2, 7);
//! let config = TrustRegionConfig::table2();
//! let trace = driver::run(&problem, &config).unwrap();
//! println!("final objective {:?}", trace.records.last().and_then(|r| r.f_plus_phi));
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod problems;
pub mod prox;
pub mod sampling;
pub mod subproblem;

pub use driver::{IterationRecord, Trace, TrustRegionConfig};
pub use error::{Error, Result};
pub use model::QuadraticModel;
pub use problems::StochasticProblem;
pub use prox::ProxFunction;

/// Dense column vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
