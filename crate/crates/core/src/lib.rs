//! Numerical laboratory for measure differential equations
//!
//! ```text
//! d/dt mu_t = V[mu_t] (+) c(., mu_t) mu_t (+) s[mu_t]
//! ```
//!
//! on nonnegative atomic measures. The crate provides
//!
//! * [`measures`]: atomic measures on R^d and R^d x R^d, the mesh, and the
//!   grid discretization operators,
//! * [`metrics`]: the exact flat (bounded-Lipschitz) distance as a
//!   partial-transport min-cost flow plus its dual LP, and 1D Wasserstein
//!   tools,
//! * [`mvf`]: measure vector fields, growth functions, sources and the
//!   numeric certification of their hypotheses,
//! * [`scheme`]: the lattice approximate solution and convergence studies,
//! * [`verify`]: weak-form residuals, continuity in the initial datum and the
//!   semigroup property as executable checks.
//!
//! Data-parallel loops go through [`exec`]; with the default `parallel`
//! feature they run on rayon, without it everything is sequential.

pub mod error;
pub mod exec;
pub mod measures;
pub mod metrics;
pub mod mvf;
pub mod presets;
pub mod rng;
pub mod scheme;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use measures::{DiscreteMeasure, Mesh, VelocityMeasure};
pub use metrics::{flat_distance, flat_distance_dual, wasserstein1_1d, TransportPlan};
pub use scheme::{solve, Scenario, Trajectory};
