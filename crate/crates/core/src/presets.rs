//! Serializable scenario descriptions and the built-in presets.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{norm, DiscreteMeasure};
use crate::mvf::{
    barycenter_mvf, AffineGrowth, ConstantGrowth, FixedSource, GrowthFunction, HalfMassField, LipschitzField,
    MassCoupledGrowth, MassScaledSource, MeasureVectorField, NoSource, SourceOperator,
};
use crate::scheme::Scenario;

/// Measure vector field choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MvfSpec {
    /// `v(x) = a x + b`
    LipschitzField {
        #[serde(default)]
        a: f64,
        #[serde(default)]
        b: Vec<f64>,
        /// overrides the default `max(|a|, |b|)`
        c_s: Option<f64>,
    },
    Barycenter,
    /// the affine field with half of every output weight dropped
    BrokenMarginal {
        #[serde(default)]
        a: f64,
        #[serde(default)]
        b: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthSpec {
    #[default]
    None,
    Constant {
        kappa: f64,
    },
    /// `alpha + beta . x`; `c_b` defaults to the bound over the a priori support
    Affine {
        alpha: f64,
        beta: Vec<f64>,
        c_b: Option<f64>,
    },
    /// `kappa (1 - mass)`; `c_b` defaults to `|kappa|`
    MassCoupled {
        kappa: f64,
        c_b: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    #[default]
    None,
    /// atoms as `[x0, .., x{d-1}, weight]`
    Fixed { atoms: Vec<Vec<f64>> },
    /// `mass(mu)` times the given measure
    MassScaled { atoms: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub horizon: f64,
    /// initial atoms as `[x0, .., x{d-1}, weight]`
    pub mu0: Vec<Vec<f64>>,
    /// needed only when `mu0` is empty
    pub dim: Option<usize>,
    pub mvf: MvfSpec,
    #[serde(default)]
    pub growth: GrowthSpec,
    #[serde(default)]
    pub source: SourceSpec,
}

/// Parses `[x.., w]` rows into a measure of dimension `dim`.
pub fn atoms_to_measure(dim: usize, atoms: &[Vec<f64>]) -> Result<DiscreteMeasure> {
    let mut m = DiscreteMeasure::empty(dim)?;
    for row in atoms {
        if row.len() != dim + 1 {
            return Err(Error::DimensionMismatch { expected: dim + 1, got: row.len() });
        }
        m.push(&row[..dim], row[dim])?;
    }
    Ok(m)
}

fn padded(b: &[f64], dim: usize) -> Result<Vec<f64>> {
    match b.len() {
        0 => Ok(vec![0.0; dim]),
        n if n == dim => Ok(b.to_vec()),
        n => Err(Error::DimensionMismatch { expected: dim, got: n }),
    }
}

impl MvfSpec {
    pub fn build(&self, dim: usize) -> Result<Arc<dyn MeasureVectorField>> {
        Ok(match self {
            MvfSpec::LipschitzField { a, b, c_s } => {
                let f = LipschitzField::affine(*a, padded(b, dim)?);
                Arc::new(match c_s {
                    Some(c) => f.with_c_s(*c),
                    None => f,
                })
            }
            MvfSpec::Barycenter => Arc::new(barycenter_mvf()),
            MvfSpec::BrokenMarginal { a, b } => Arc::new(HalfMassField(LipschitzField::affine(*a, padded(b, dim)?))),
        })
    }

    /// Declared `C_S` without building the field.
    fn c_s(&self, dim: usize) -> Result<f64> {
        Ok(self.build(dim)?.constants().c_s)
    }
}

impl SourceSpec {
    pub fn build(&self, dim: usize) -> Result<Arc<dyn SourceOperator>> {
        Ok(match self {
            SourceSpec::None => Arc::new(NoSource { dim }),
            SourceSpec::Fixed { atoms } => Arc::new(FixedSource { sigma: atoms_to_measure(dim, atoms)? }),
            SourceSpec::MassScaled { atoms } => Arc::new(MassScaledSource { sigma: atoms_to_measure(dim, atoms)? }),
        })
    }
}

impl GrowthSpec {
    /// `support_bound` is the a priori support radius, used for the default
    /// bound of affine rates.
    pub fn build(&self, dim: usize, support_bound: f64) -> Result<Arc<dyn GrowthFunction>> {
        Ok(match self {
            GrowthSpec::None => Arc::new(ConstantGrowth { kappa: 0.0 }),
            GrowthSpec::Constant { kappa } => Arc::new(ConstantGrowth { kappa: *kappa }),
            GrowthSpec::Affine { alpha, beta, c_b } => {
                let beta = padded(beta, dim)?;
                let declared_bound = c_b.unwrap_or(alpha.abs() + norm(&beta) * support_bound);
                Arc::new(AffineGrowth { alpha: *alpha, beta, declared_bound })
            }
            GrowthSpec::MassCoupled { kappa, c_b } => {
                Arc::new(MassCoupledGrowth { kappa: *kappa, declared_bound: c_b.unwrap_or(kappa.abs()) })
            }
        })
    }
}

impl ScenarioSpec {
    pub fn dim(&self) -> Result<usize> {
        match (self.mu0.first(), self.dim) {
            (Some(row), None) if row.len() >= 2 => Ok(row.len() - 1),
            (Some(row), Some(d)) if row.len() == d + 1 => Ok(d),
            (Some(row), Some(d)) => Err(Error::DimensionMismatch { expected: d + 1, got: row.len() }),
            (Some(_), None) => Err(Error::InvalidArgument("mu0 rows need coordinates and a weight".into())),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::InvalidArgument("empty mu0 needs an explicit dim".into())),
        }
    }

    pub fn build(&self) -> Result<Scenario> {
        let dim = self.dim()?;
        let mu0 = atoms_to_measure(dim, &self.mu0)?;
        let mvf = self.mvf.build(dim)?;
        let source = self.source.build(dim)?;
        let c_s = self.mvf.c_s(dim)?;
        let r_tilde = source.radius().max(mu0.support_radius());
        let support_bound = (c_s * self.horizon).exp() * (r_tilde + 2.0) - 1.0;
        let growth = self.growth.build(dim, support_bound)?;
        Scenario::new(self.name.clone(), mvf, growth, source, mu0, self.horizon)
    }
}

/// Names of the built-in scenarios.
pub const PRESET_NAMES: [&str; 7] =
    ["pure_growth", "transport", "barycenter", "decay", "lipschitz", "logistic", "drift_2d"];

/// The built-in scenario with the given name.
///
/// * `pure_growth`: still field, `c = 0.5`, `mu0 = delta_0`
/// * `transport`: unit velocity with the position-dependent rate `-0.3 + 0.6 x`
/// * `barycenter`: the median field from three off-grid atoms
/// * `decay`: contraction `v = -x` with `c = -5`
/// * `lipschitz`: `v = x / 2`, conservative
/// * `logistic`: slow drift, `c = 1 - mass`, source `mass * 0.2 delta_{0.5}`
/// * `drift_2d`: planar contraction towards a moving point with mild decay
pub fn preset(name: &str) -> Option<ScenarioSpec> {
    let spec = |mu0: Vec<Vec<f64>>, mvf, growth, source| ScenarioSpec {
        name: name.to_string(),
        horizon: 1.0,
        mu0,
        dim: None,
        mvf,
        growth,
        source,
    };
    let field = |a: f64, b: Vec<f64>| MvfSpec::LipschitzField { a, b, c_s: None };
    Some(match name {
        "pure_growth" => {
            spec(vec![vec![0.0, 1.0]], field(0.0, vec![0.0]), GrowthSpec::Constant { kappa: 0.5 }, SourceSpec::None)
        }
        "transport" => spec(
            vec![vec![-0.5, 0.6], vec![0.25, 0.4]],
            field(0.0, vec![1.0]),
            GrowthSpec::Affine { alpha: -0.3, beta: vec![0.6], c_b: None },
            SourceSpec::None,
        ),
        "barycenter" => spec(
            vec![vec![-0.71, 0.3], vec![0.13, 0.25], vec![0.52, 0.45]],
            MvfSpec::Barycenter,
            GrowthSpec::None,
            SourceSpec::None,
        ),
        "decay" => spec(
            vec![vec![-1.3, 0.5], vec![0.7, 1.0], vec![1.9, 0.25]],
            field(-1.0, vec![0.0]),
            GrowthSpec::Constant { kappa: -5.0 },
            SourceSpec::None,
        ),
        "lipschitz" => spec(
            vec![vec![-0.8, 0.35], vec![-0.1, 0.4], vec![0.45, 0.25]],
            field(0.5, vec![0.0]),
            GrowthSpec::None,
            SourceSpec::None,
        ),
        "logistic" => spec(
            vec![vec![-0.5, 0.2], vec![0.0, 0.3]],
            field(0.0, vec![0.25]),
            GrowthSpec::MassCoupled { kappa: 1.0, c_b: None },
            SourceSpec::MassScaled { atoms: vec![vec![0.5, 0.2]] },
        ),
        "drift_2d" => spec(
            vec![vec![-0.6, 0.4, 0.5], vec![0.3, -0.2, 0.8], vec![0.9, 0.7, 0.3]],
            field(-0.5, vec![0.25, -0.5]),
            GrowthSpec::Constant { kappa: -0.5 },
            SourceSpec::None,
        ),
        _ => return None,
    })
}

/// Builds a preset scenario, or fails with the list of known names.
pub fn preset_scenario(name: &str) -> Result<Scenario> {
    preset(name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown preset {name:?}; known: {}", PRESET_NAMES.join(", "))))?
        .build()
}
