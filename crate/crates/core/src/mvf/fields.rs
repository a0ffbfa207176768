use std::fmt;
use std::sync::Arc;

use super::{MeasureVectorField, MvfConstants, ReferenceMetric};
use crate::error::{Error, Result};
use crate::measures::{norm, DiscreteMeasure, VelocityMeasure};
use crate::metrics::{barycenter_split, MASS_REL_TOL};

type FieldFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// `V[mu] = mu (x) delta_{v(x)}` for a Lipschitz vector field `v`.
#[derive(Clone)]
pub struct LipschitzField {
    name: String,
    field: Arc<FieldFn>,
    lip: f64,
    c_s: f64,
}

impl fmt::Debug for LipschitzField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipschitzField")
            .field("name", &self.name)
            .field("lip", &self.lip)
            .field("c_s", &self.c_s)
            .finish()
    }
}

/// Builds the product field from `v`. `lip_constant` must be a Lipschitz
/// constant of `v` on the working domain; it is declared, not checked.
pub fn lipschitz_field_mvf<F>(v: F, lip_constant: f64, c_s: f64) -> LipschitzField
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
{
    LipschitzField { name: "lipschitz_field".into(), field: Arc::new(v), lip: lip_constant, c_s }
}

impl LipschitzField {
    /// `v(x) = a x + b`; Lipschitz constant `|a|`, `C_S = max(|a|, |b|)`.
    pub fn affine(a: f64, b: Vec<f64>) -> Self {
        let c_s = a.abs().max(norm(&b));
        let b2 = b.clone();
        let mut f =
            lipschitz_field_mvf(move |x: &[f64]| x.iter().zip(&b2).map(|(xi, bi)| a * xi + bi).collect(), a.abs(), c_s);
        f.name = format!("affine(a={a}, b={b:?})");
        f
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Replaces the declared velocity-support constant.
    pub fn with_c_s(mut self, c_s: f64) -> Self {
        self.c_s = c_s;
        self
    }

    pub fn velocity(&self, x: &[f64]) -> Vec<f64> {
        (self.field)(x)
    }
}

impl MeasureVectorField for LipschitzField {
    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, mu: &DiscreteMeasure) -> Result<VelocityMeasure> {
        let mut out = VelocityMeasure::empty(mu.dim())?;
        for (x, w) in mu.atoms() {
            out.push(x, &(self.field)(x), w)?;
        }
        Ok(out)
    }

    fn constants(&self) -> MvfConstants {
        MvfConstants { c_s: self.c_s, c_f: 1.0 + self.lip, c_h: self.lip }
    }
}

/// The 1D median field on probability measures: mass left of the median
/// `B(mu)` moves at speed -1, mass right of it at +1, and the atom at `B(mu)`
/// is split by the fraction that balances the two halves.
#[derive(Debug, Clone, Copy, Default)]
pub struct BarycenterField;

pub fn barycenter_mvf() -> BarycenterField {
    BarycenterField
}

impl MeasureVectorField for BarycenterField {
    fn name(&self) -> &str {
        "barycenter"
    }

    fn eval(&self, mu: &DiscreteMeasure) -> Result<VelocityMeasure> {
        if mu.dim() != 1 {
            return Err(Error::NotOneDimensional(mu.dim()));
        }
        let mass = mu.total_mass();
        if (mass - 1.0).abs() > MASS_REL_TOL {
            return Err(Error::NotProbability { mass });
        }
        let split = barycenter_split(mu)?;
        let mut out = VelocityMeasure::empty(1)?;
        for (x, w) in split.left.atoms() {
            out.push(x, &[-1.0], w)?;
        }
        for (x, w) in split.right.atoms() {
            out.push(x, &[1.0], w)?;
        }
        Ok(out)
    }

    fn constants(&self) -> MvfConstants {
        MvfConstants { c_s: 1.0, c_f: 1.0, c_h: 0.0 }
    }

    fn reference_metric(&self) -> ReferenceMetric {
        ReferenceMetric::Wasserstein1
    }

    fn requires_probability(&self) -> bool {
        true
    }

    fn fixed_dim(&self) -> Option<usize> {
        Some(1)
    }
}

/// Negative control: wraps a field and drops half of every output weight,
/// violating the marginal condition.
#[derive(Debug)]
pub struct HalfMassField<F>(pub F);

impl<F: MeasureVectorField> MeasureVectorField for HalfMassField<F> {
    fn name(&self) -> &str {
        "broken_marginal"
    }

    fn eval(&self, mu: &DiscreteMeasure) -> Result<VelocityMeasure> {
        let full = self.0.eval(mu)?;
        let mut out = VelocityMeasure::empty(full.dim())?;
        for (x, v, w) in full.atoms() {
            out.push(x, v, 0.5 * w)?;
        }
        Ok(out)
    }

    fn constants(&self) -> MvfConstants {
        self.0.constants()
    }

    fn reference_metric(&self) -> ReferenceMetric {
        self.0.reference_metric()
    }

    fn requires_probability(&self) -> bool {
        self.0.requires_probability()
    }

    fn fixed_dim(&self) -> Option<usize> {
        self.0.fixed_dim()
    }
}
