//! One-dimensional Wasserstein machinery: generalized inverse CDF, the
//! quantile formula for `W_1`, and the median split of a probability measure.

use super::flat::MASS_REL_TOL;
use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;

/// Sorted distinct locations and cumulative weights of a 1D measure.
struct Cdf {
    xs: Vec<f64>,
    weights: Vec<f64>,
    cum: Vec<f64>,
}

impl Cdf {
    fn new(mu: &DiscreteMeasure) -> Result<Self> {
        if mu.dim() != 1 {
            return Err(Error::NotOneDimensional(mu.dim()));
        }
        let c = mu.canonicalize();
        if c.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let xs = c.locations().to_vec();
        let weights = c.weights().to_vec();
        let cum = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(Cdf { xs, weights, cum })
    }

    fn mass(&self) -> f64 {
        *self.cum.last().unwrap()
    }
}

/// `F^{-1}(y) = inf { x : F(x) > y }` for the normalized measure, `y` in
/// `[0, 1)`.
pub fn quantile(mu: &DiscreteMeasure, y: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::InvalidArgument(format!("quantile level {y} outside [0, 1)")));
    }
    let cdf = Cdf::new(mu)?;
    let mass = cdf.mass();
    let k = cdf.cum.iter().position(|&c| c / mass > y).unwrap_or(cdf.xs.len() - 1);
    Ok(cdf.xs[k])
}

/// `W_1(mu, nu) = int_0^1 |F^{-1}(y) - G^{-1}(y)| dy`, evaluated exactly by
/// merging the two quantile step functions. Measures of common mass `m != 1`
/// are normalized and the result scaled back by `m`.
pub fn wasserstein1_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    let f = Cdf::new(mu)?;
    let g = Cdf::new(nu)?;
    let (a, b) = (f.mass(), g.mass());
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::EmptyMeasure);
    }
    if (a - b).abs() > MASS_REL_TOL * a.max(b) {
        return Err(Error::MassMismatch { left: a, right: b });
    }
    let (mut i, mut j) = (0, 0);
    let mut level = 0.0;
    let mut total = 0.0;
    while i < f.xs.len() && j < g.xs.len() {
        let fi = f.cum[i] / a;
        let gj = g.cum[j] / b;
        let next = fi.min(gj);
        total += (next - level) * (f.xs[i] - g.xs[j]).abs();
        level = next;
        if fi <= gj {
            i += 1;
        }
        if gj <= fi {
            j += 1;
        }
    }
    Ok(total * a)
}

/// Median split of a 1D probability measure into halves `left` and `right`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycenterSplit {
    /// `B = sup { x : F(x) <= m/2 }`
    pub median: f64,
    /// Fraction of the atom at `B` assigned to `left`; `None` when that atom
    /// has zero mass.
    pub fraction: Option<f64>,
    pub left: DiscreteMeasure,
    pub right: DiscreteMeasure,
}

/// Splits `mu` at its median `B`: atoms below `B` go left, atoms above go
/// right, and the atom at `B` is divided with fraction
/// `b = (m/2 - mu(-inf, B)) / mu{B}` on the left so each half has mass `m/2`.
pub fn barycenter_split(mu: &DiscreteMeasure) -> Result<BarycenterSplit> {
    let cdf = Cdf::new(mu)?;
    let mass = cdf.mass();
    if (mass - 1.0).abs() > MASS_REL_TOL {
        return Err(Error::NotProbability { mass });
    }
    let half = 0.5 * mass;
    // F is a right-continuous step function: F(x) <= half exactly for x below
    // the first atom whose cumulative weight exceeds half.
    let k = cdf.cum.iter().position(|&c| c > half).unwrap_or(cdf.xs.len() - 1);
    let median = cdf.xs[k];
    let below = if k == 0 { 0.0 } else { cdf.cum[k - 1] };
    let at = cdf.weights[k];

    let mut left = DiscreteMeasure::empty(1)?;
    let mut right = DiscreteMeasure::empty(1)?;
    for idx in 0..k {
        left.push(&[cdf.xs[idx]], cdf.weights[idx])?;
    }
    let fraction = if at > 0.0 {
        let b = ((half - below) / at).clamp(0.0, 1.0);
        if b > 0.0 {
            left.push(&[median], b * at)?;
        }
        if b < 1.0 {
            right.push(&[median], at - b * at)?;
        }
        Some(b)
    } else {
        None
    };
    for idx in k + 1..cdf.xs.len() {
        right.push(&[cdf.xs[idx]], cdf.weights[idx])?;
    }
    Ok(BarycenterSplit { median, fraction, left, right })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(atoms: &[(f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::on_line(atoms).unwrap()
    }

    #[test]
    fn quantile_examples() {
        let m = line(&[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(quantile(&m, 0.25).unwrap(), 0.0);
        assert_eq!(quantile(&m, 0.5).unwrap(), 1.0);
        let d = line(&[(3.0, 1.0)]);
        for y in [0.0, 0.3, 0.999] {
            assert_eq!(quantile(&d, y).unwrap(), 3.0);
        }
        assert!(matches!(quantile(&DiscreteMeasure::empty(1).unwrap(), 0.1), Err(Error::EmptyMeasure)));
        assert!(quantile(&m, 1.0).is_err());
    }

    #[test]
    fn quantile_ignores_total_mass() {
        let m = line(&[(0.0, 2.0), (1.0, 2.0)]);
        assert_eq!(quantile(&m, 0.5).unwrap(), 1.0);
        assert_eq!(quantile(&m, 0.49).unwrap(), 0.0);
    }

    #[test]
    fn w1_examples() {
        let mu = line(&[(0.0, 0.5), (1.0, 0.5)]);
        let nu = line(&[(0.0, 0.5), (2.0, 0.5)]);
        assert_eq!(wasserstein1_1d(&mu, &nu).unwrap(), 0.5);
        assert_eq!(wasserstein1_1d(&mu, &mu).unwrap(), 0.0);
        assert_eq!(wasserstein1_1d(&line(&[(-1.5, 1.0)]), &line(&[(2.0, 1.0)])).unwrap(), 3.5);
    }

    #[test]
    fn w1_scales_with_common_mass() {
        let mu = line(&[(0.0, 1.0), (1.0, 1.0)]);
        let nu = line(&[(0.0, 1.0), (2.0, 1.0)]);
        assert_eq!(wasserstein1_1d(&mu, &nu).unwrap(), 1.0);
    }

    #[test]
    fn w1_errors() {
        let a = line(&[(0.0, 1.0)]);
        assert!(matches!(wasserstein1_1d(&a, &line(&[(0.0, 2.0)])), Err(Error::MassMismatch { .. })));
        let e = DiscreteMeasure::empty(1).unwrap();
        assert!(matches!(wasserstein1_1d(&a, &e), Err(Error::EmptyMeasure)));
        let p = DiscreteMeasure::dirac(&[0.0, 0.0], 1.0).unwrap();
        assert!(matches!(wasserstein1_1d(&p, &p), Err(Error::NotOneDimensional(2))));
    }

    #[test]
    fn split_single_atom() {
        let s = barycenter_split(&line(&[(0.0, 1.0)])).unwrap();
        assert_eq!(s.median, 0.0);
        assert_eq!(s.fraction, Some(0.5));
        assert_eq!(s.left, line(&[(0.0, 0.5)]));
        assert_eq!(s.right, line(&[(0.0, 0.5)]));
    }

    #[test]
    fn split_quarter_three_quarters() {
        let s = barycenter_split(&line(&[(0.0, 0.25), (1.0, 0.75)])).unwrap();
        assert_eq!(s.median, 1.0);
        assert!((s.fraction.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(s.left.approx_eq(&line(&[(0.0, 0.25), (1.0, 0.25)]), 1e-15));
        assert!(s.right.approx_eq(&line(&[(1.0, 0.5)]), 1e-15));
    }

    #[test]
    fn split_symmetric_pair() {
        let s = barycenter_split(&line(&[(-1.0, 0.5), (1.0, 0.5)])).unwrap();
        assert_eq!(s.median, 1.0);
        assert_eq!(s.fraction, Some(0.0));
        assert_eq!(s.left, line(&[(-1.0, 0.5)]));
        assert_eq!(s.right, line(&[(1.0, 0.5)]));
    }

    #[test]
    fn split_rejects_non_probability() {
        assert!(matches!(barycenter_split(&line(&[(0.0, 0.9)])), Err(Error::NotProbability { .. })));
    }
}
