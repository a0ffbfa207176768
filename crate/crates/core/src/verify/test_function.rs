use std::fmt::Debug;

use crate::measures::norm;
use crate::rng::SplitMix64;
use crate::scheme::Scenario;

/// A compactly supported smooth function with its gradient.
pub trait TestFunction: Debug + Send + Sync {
    fn name(&self) -> &str;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// `f` and its gradient vanish outside this radius.
    fn radius(&self) -> f64;
}

/// `exp(1 - 1/(1 - |x - c|^2/rho^2))` inside the ball of radius `rho`
/// around `c`, zero outside. Equal to 1 at the center.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub rho: f64,
}

impl Bump {
    pub fn new(center: Vec<f64>, rho: f64) -> Self {
        assert!(rho > 0.0, "bump radius must be positive");
        Bump { center, rho }
    }

    /// Centered at the origin with radius 1.1 times the scenario's a priori
    /// support bound, so the whole trajectory sits inside the support.
    pub fn for_scenario(scenario: &Scenario) -> Self {
        Bump::new(vec![0.0; scenario.dim()], 1.1 * scenario.support_bound())
    }

    /// `(y, s)` with `y = (x - c)/rho` and `s = |y|^2`.
    fn scaled(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let y: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| (a - c) / self.rho).collect();
        let s = y.iter().map(|v| v * v).sum();
        (y, s)
    }
}

impl TestFunction for Bump {
    fn name(&self) -> &str {
        "bump"
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (_, s) = self.scaled(x);
        if s >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s)).exp()
        }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (y, s) = self.scaled(x);
        if s >= 1.0 {
            return vec![0.0; x.len()];
        }
        let f = (1.0 - 1.0 / (1.0 - s)).exp();
        // d/dx exp(1 - 1/(1-s)) = -f * 2 y / (rho (1-s)^2)
        let k = -2.0 * f / (self.rho * (1.0 - s) * (1.0 - s));
        y.iter().map(|yi| k * yi).collect()
    }

    fn radius(&self) -> f64 {
        self.rho + norm(&self.center)
    }
}

/// Largest deviation between the coded gradient and centered differences
/// with step `h` at `samples` random points in the cube `[-r, r]^dim`.
pub fn check_gradient(f: &dyn TestFunction, dim: usize, r: f64, samples: usize, h: f64, seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    let mut x = vec![0.0; dim];
    for _ in 0..samples {
        for c in x.iter_mut() {
            *c = rng.uniform(-r, r);
        }
        let g = f.gradient(&x);
        for k in 0..dim {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[k] += h;
            minus[k] -= h;
            let fd = (f.value(&plus) - f.value(&minus)) / (2.0 * h);
            worst = worst.max((fd - g[k]).abs());
        }
    }
    worst
}

/// Largest `|f| + |grad f|` on random points of the shell between the
/// declared radius and twice it. Zero for a correctly declared radius.
pub fn check_support(f: &dyn TestFunction, dim: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let r = f.radius();
    let mut worst: f64 = 0.0;
    let mut x = vec![0.0; dim];
    for _ in 0..samples {
        for c in x.iter_mut() {
            *c = rng.uniform(-1.0, 1.0);
        }
        let len = norm(&x).max(1e-300);
        let target = rng.uniform(r, 2.0 * r);
        for c in x.iter_mut() {
            *c *= target / len;
        }
        worst = worst.max(f.value(&x).abs() + norm(&f.gradient(&x)));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        let b = Bump::new(vec![0.0], 2.0);
        assert_eq!(b.value(&[0.0]), 1.0);
        assert_eq!(b.gradient(&[0.0]), vec![0.0]);
        assert_eq!(b.value(&[2.0]), 0.0);
        assert_eq!(b.value(&[-3.0]), 0.0);
        assert!(b.value(&[1.0]) > 0.0 && b.value(&[1.0]) < 1.0);
    }

    #[test]
    fn bump_gradient_matches_differences() {
        for dim in 1..=3 {
            let b = Bump::new(vec![0.1; dim], 1.5);
            assert!(check_gradient(&b, dim, 1.4, 200, 1e-6, 3) < 1e-6);
            assert_eq!(check_support(&b, dim, 200, 4), 0.0);
        }
    }
}
