use super::GrowthFunction;
use crate::measures::DiscreteMeasure;

/// `c(x, mu) = kappa`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantGrowth {
    pub kappa: f64,
}

impl GrowthFunction for ConstantGrowth {
    fn name(&self) -> &str {
        "constant"
    }

    fn rate(&self, _x: &[f64], _mu: &DiscreteMeasure) -> f64 {
        self.kappa
    }

    fn bound(&self) -> f64 {
        self.kappa.abs()
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }

    fn is_zero(&self) -> bool {
        self.kappa == 0.0
    }
}

/// `c(x, mu) = alpha + beta . x`. Unbounded on R^d, so the bound over the
/// working domain is declared by the caller.
#[derive(Debug, Clone)]
pub struct AffineGrowth {
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub declared_bound: f64,
}

impl GrowthFunction for AffineGrowth {
    fn name(&self) -> &str {
        "affine"
    }

    fn rate(&self, x: &[f64], _mu: &DiscreteMeasure) -> f64 {
        self.alpha + self.beta.iter().zip(x).map(|(b, xi)| b * xi).sum::<f64>()
    }

    fn bound(&self) -> f64 {
        self.declared_bound
    }

    fn lipschitz(&self) -> f64 {
        crate::measures::norm(&self.beta)
    }
}

/// `c(x, mu) = kappa (1 - mass(mu))`: logistic-type saturation. Lipschitz in
/// `mu` with constant `|kappa|` since `|mass(mu) - mass(nu)| <= ||mu - nu||`.
#[derive(Debug, Clone, Copy)]
pub struct MassCoupledGrowth {
    pub kappa: f64,
    pub declared_bound: f64,
}

impl GrowthFunction for MassCoupledGrowth {
    fn name(&self) -> &str {
        "mass_coupled"
    }

    fn rate(&self, _x: &[f64], mu: &DiscreteMeasure) -> f64 {
        self.kappa * (1.0 - mu.total_mass())
    }

    fn bound(&self) -> f64 {
        self.declared_bound
    }

    fn lipschitz(&self) -> f64 {
        self.kappa.abs()
    }
}
