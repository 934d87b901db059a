//! Adaptive stochastic attitude estimation on SO(3).
//!
//! This crate implements a nonlinear attitude filter that works directly on
//! rotation matrices, driven by normalized vector measurements and biased,
//! noisy rate-gyro readings. Alongside the estimator itself it provides the
//! SO(3) kernel it is built on, the measurement and gyro corruption models,
//! a rigid-body truth simulator, a seeded Monte Carlo harness, and a sampled
//! verification suite for every identity the filter design relies on.
//!
//! Modules:
//! - [`so3`]: rotation parameterizations, Lie-algebra maps, distances.
//! - [`measurement`]: reference vector sets, frame synthesis, and the
//!   vector-space reconstructions the filter consumes.
//! - [`dynamics`]: true attitude propagation and gyro noise synthesis.
//! - [`filter`]: the adaptive stochastic filter and a deterministic baseline.
//! - [`sim`]: scenarios, trajectory logs, Monte Carlo aggregation.
//! - [`verify`]: sampled identity/equivalence/noise checks.
//! - [`scenario_file`]: flat key/value scenario files.
//! - [`output`]: trajectory CSV emission and parsing, run summaries.
//! - [`cli`]: the `run`/`verify`/`compare` commands behind the binary.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `cargo run --release --example run_benchmark`.

pub mod cli;
pub mod dynamics;
mod error;
pub mod filter;
pub mod measurement;
pub mod output;
pub mod rng;
pub mod scenario_file;
pub mod sim;
pub mod so3;
pub mod verify;

pub use error::{Error, Result};
pub use filter::{FilterGains, FilterKind, FilterState};
pub use measurement::{InertialMatrix, MeasurementFrame, ReferenceVector, ReferenceVectorSet};
pub use rng::RandomStream;
pub use sim::{paper_scenario, MonteCarloSummary, Scenario, TrajectoryLog};
pub use so3::{AngleAxis, Matrix3, RodriguezVector, RotationMatrix, Vector3};
