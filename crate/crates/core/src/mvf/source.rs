use super::SourceOperator;
use crate::error::Result;
use crate::measures::DiscreteMeasure;

/// `s[mu] = 0`.
#[derive(Debug, Clone, Copy)]
pub struct NoSource {
    pub dim: usize,
}

impl SourceOperator for NoSource {
    fn name(&self) -> &str {
        "none"
    }

    fn eval(&self, _mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        DiscreteMeasure::empty(self.dim)
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }

    fn radius(&self) -> f64 {
        0.0
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// `s[mu] = sigma` for a fixed measure `sigma`.
#[derive(Debug, Clone)]
pub struct FixedSource {
    pub sigma: DiscreteMeasure,
}

impl SourceOperator for FixedSource {
    fn name(&self) -> &str {
        "fixed"
    }

    fn eval(&self, _mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        Ok(self.sigma.clone())
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }

    fn radius(&self) -> f64 {
        self.sigma.support_radius()
    }

    fn is_zero(&self) -> bool {
        self.sigma.total_mass() == 0.0
    }
}

/// `s[mu] = mass(mu) sigma`; flat-Lipschitz with `L = mass(sigma)`.
#[derive(Debug, Clone)]
pub struct MassScaledSource {
    pub sigma: DiscreteMeasure,
}

impl SourceOperator for MassScaledSource {
    fn name(&self) -> &str {
        "mass_scaled"
    }

    fn eval(&self, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        self.sigma.scaled(mu.total_mass())
    }

    fn lipschitz(&self) -> f64 {
        self.sigma.total_mass()
    }

    fn radius(&self) -> f64 {
        self.sigma.support_radius()
    }
}
