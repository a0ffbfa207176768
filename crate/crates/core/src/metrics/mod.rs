//! Distances between nonnegative atomic measures.
//!
//! The flat distance has two independent routes: the primal partial-transport
//! min-cost flow ([`flat_distance`]) and the dual LP over sampled test
//! functions ([`flat_distance_dual`]). 1D Wasserstein distances use the
//! quantile formula.

mod dual;
mod flat;
mod flow;
mod wasserstein;

pub use dual::{flat_distance_dual, DualCertificate};
pub use flat::{balanced_transport, flat_distance, TransportPlan, MASS_REL_TOL, REMOVAL_COST, TRANSPORT_CAP};
pub use wasserstein::{barycenter_split, quantile, wasserstein1_1d, BarycenterSplit};

use crate::error::Result;
use crate::exec::Execution;
use crate::measures::DiscreteMeasure;

/// Flat distance value only.
pub fn flat_value(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    flat_distance(mu, nu).map(|(d, _)| d)
}

/// Evaluates many independent flat distances.
pub fn flat_distance_batch(pairs: &[(DiscreteMeasure, DiscreteMeasure)], exec: Execution) -> Result<Vec<f64>> {
    exec.map(pairs, |(mu, nu)| flat_value(mu, nu)).into_iter().collect()
}
