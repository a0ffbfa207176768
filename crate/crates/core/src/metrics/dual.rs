use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::measures::{distance, DiscreteMeasure};

/// A test function sampled on the union of the two supports. Feasible when
/// `|psi| <= 1` everywhere and `psi` is 1-Lipschitz between support points;
/// such a `psi` extends to all of R^d with the same bounds (McShane).
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub dim: usize,
    /// flattened support points
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

impl DualCertificate {
    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    /// Worst violation of the sup-norm and Lipschitz bounds (0 when feasible).
    pub fn violation(&self) -> f64 {
        let n = self.values.len();
        let mut worst = self.values.iter().map(|v| v.abs() - 1.0).fold(0.0, f64::max);
        for p in 0..n {
            for q in p + 1..n {
                let gap = (self.values[p] - self.values[q]).abs() - distance(self.point(p), self.point(q));
                worst = worst.max(gap);
            }
        }
        worst
    }

    /// `int psi d(mu - nu)` where `psi` is read off at matching points.
    pub fn pairing(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Option<f64> {
        let lookup = |x: &[f64]| (0..self.values.len()).find(|&k| self.point(k) == x);
        let mut total = 0.0;
        for (x, w) in mu.atoms() {
            total += w * self.values[lookup(x)?];
        }
        for (y, w) in nu.atoms() {
            total -= w * self.values[lookup(y)?];
        }
        Some(total)
    }
}

/// Solves the dual of the flat-distance problem as a plain LP:
///
/// maximize `sum_k g_k psi_k` subject to `-1 <= psi_k <= 1` and
/// `psi_p - psi_q <= |p - q|` for every ordered pair of support points, where
/// `g = mu - nu` on the union support. All pairwise constraints are kept.
pub fn flat_distance_dual(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<(f64, DualCertificate)> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    let d = mu.dim();
    let mut points: Vec<f64> = Vec::new();
    let mut net: Vec<f64> = Vec::new();
    let mut add = |x: &[f64], w: f64| {
        let k = (0..net.len()).find(|&k| &points[k * d..(k + 1) * d] == x);
        match k {
            Some(k) => net[k] += w,
            None => {
                points.extend_from_slice(x);
                net.push(w);
            }
        }
    };
    for (x, w) in mu.atoms() {
        add(x, w);
    }
    for (y, w) in nu.atoms() {
        add(y, -w);
    }
    let n = net.len();
    if n == 0 {
        return Ok((0.0, DualCertificate { dim: d, points, values: Vec::new() }));
    }

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = net.iter().map(|&g| lp.add_var(g, (-1.0, 1.0))).collect();
    for p in 0..n {
        for q in p + 1..n {
            let dpq = distance(&points[p * d..(p + 1) * d], &points[q * d..(q + 1) * d]);
            lp.add_constraint([(vars[p], 1.0), (vars[q], -1.0)], ComparisonOp::Le, dpq);
            lp.add_constraint([(vars[q], 1.0), (vars[p], -1.0)], ComparisonOp::Le, dpq);
        }
    }
    let solution =
        lp.solve().map_err(|e| Error::Lp(e.to_string()))?.into_solution().map_err(|e| Error::Lp(format!("{e:?}")))?;
    let values: Vec<f64> = vars.iter().map(|&v| solution.var_value(v)).collect();
    // recompute from the certificate rather than trusting the solver's sum
    let value = net.iter().zip(&values).map(|(g, psi)| g * psi).sum::<f64>();
    Ok((value, DualCertificate { dim: d, points, values }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(atoms: &[(f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::on_line(atoms).unwrap()
    }

    #[test]
    fn unit_shift() {
        let (v, cert) = flat_distance_dual(&line(&[(0.0, 1.0)]), &line(&[(1.0, 1.0)])).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(cert.violation() < 1e-12);
        // optimum is psi(0) - psi(1) = 1; one optimal certificate is (1, 0)
        assert!((cert.values[0] - cert.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_measures() {
        let m = line(&[(0.0, 1.0), (2.0, 3.0)]);
        let (v, _) = flat_distance_dual(&m, &m).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn mass_excess() {
        let (v, cert) = flat_distance_dual(&line(&[(0.0, 2.0)]), &line(&[(0.0, 1.0)])).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!((cert.values[0] - 1.0).abs() < 1e-12);
        let p = cert.pairing(&line(&[(0.0, 2.0)]), &line(&[(0.0, 1.0)])).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn far_apart_hits_sup_bound() {
        let (v, _) = flat_distance_dual(&line(&[(0.0, 1.0)]), &line(&[(5.0, 1.0)])).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }
}
