//! Measure vector fields, growth functions and source operators, with the
//! numeric certification of their standing hypotheses.

mod certify;
mod fields;
mod growth;
mod source;

pub use certify::{
    certify_sweep, check_growth_bound, check_marginal, check_source, check_v1, check_v2, check_v3, v1_report,
    MarginalReport, SourceReport, SweepConfig, SweepReport, V1Report, V2Report, V3Report, Violation, CHECK_TOL,
};
pub use fields::{barycenter_mvf, lipschitz_field_mvf, BarycenterField, HalfMassField, LipschitzField};
pub use growth::{AffineGrowth, ConstantGrowth, MassCoupledGrowth};
pub use source::{FixedSource, MassScaledSource, NoSource};

use std::fmt::Debug;

use crate::error::Result;
use crate::measures::{DiscreteMeasure, VelocityMeasure};

/// The metric a field's Lipschitz-type constants refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMetric {
    /// bounded-Lipschitz (flat) distance
    Flat,
    /// 1-Wasserstein distance; for conservative fields on probability measures
    Wasserstein1,
}

/// Declared constants of a measure vector field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvfConstants {
    /// velocity support: `|v| <= c_s (1 + sup |x|)`
    pub c_s: f64,
    /// Lipschitz constant of `mu -> V[mu]`
    pub c_f: f64,
    /// growth rate of `sup_psi int psi(x + tau v) d(V[mu] - V[nu])` in `tau`
    pub c_h: f64,
}

/// A map `mu -> V[mu]` from measures on R^d to measures on R^d x R^d whose
/// spatial marginal is `mu`.
pub trait MeasureVectorField: Debug + Send + Sync {
    fn name(&self) -> &str;

    fn eval(&self, mu: &DiscreteMeasure) -> Result<VelocityMeasure>;

    fn constants(&self) -> MvfConstants;

    fn reference_metric(&self) -> ReferenceMetric {
        ReferenceMetric::Flat
    }

    /// Fields defined only on probability measures reject other inputs.
    fn requires_probability(&self) -> bool {
        false
    }

    /// Fixed dimension, if the field only makes sense in one.
    fn fixed_dim(&self) -> Option<usize> {
        None
    }
}

/// The growth/decay rate `c(x, mu)`.
pub trait GrowthFunction: Debug + Send + Sync {
    fn name(&self) -> &str;

    fn rate(&self, x: &[f64], mu: &DiscreteMeasure) -> f64;

    /// declared bound `|c| <= C_b`
    fn bound(&self) -> f64;

    /// declared Lipschitz constant `C_L` in `(x, mu)`
    fn lipschitz(&self) -> f64;

    /// True if the rate is zero everywhere (conservative dynamics).
    fn is_zero(&self) -> bool {
        false
    }
}

/// The source term `s[mu]`, a nonnegative measure.
pub trait SourceOperator: Debug + Send + Sync {
    fn name(&self) -> &str;

    fn eval(&self, mu: &DiscreteMeasure) -> Result<DiscreteMeasure>;

    /// declared flat-Lipschitz constant `L`
    fn lipschitz(&self) -> f64;

    /// declared support radius `R`
    fn radius(&self) -> f64;

    fn is_zero(&self) -> bool {
        false
    }
}
