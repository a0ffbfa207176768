//! Executable versions of the solution concept and its stability
//! properties: weak-form residuals, continuity in the initial datum, the
//! semigroup identity and the a priori bounds along a trajectory.

mod bounds;
mod continuity;
mod residual;
mod semigroup;
mod test_function;

pub use bounds::{check_trajectory_bounds, BoundsReport};
pub use continuity::{continuity_experiment, ContinuityReport, ContinuityRow};
pub use residual::{residual_study, weak_residual, ResidualReport, ResidualTable};
pub use semigroup::{semigroup_check, semigroup_distance};
pub use test_function::{check_gradient, check_support, Bump, TestFunction};
