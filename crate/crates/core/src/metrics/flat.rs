use std::cmp::Ordering;

use super::flow::MinCostFlow;
use crate::error::{Error, Result};
use crate::measures::{distance, io::fmt_f64, DiscreteMeasure};

/// Per-unit cost of removing mass from either side.
pub const REMOVAL_COST: f64 = 1.0;

/// Transport distances at or above this are never used: removing the unit
/// from both sides costs the same.
pub const TRANSPORT_CAP: f64 = 2.0 * REMOVAL_COST;

/// Relative tolerance for "equal total mass" preconditions.
pub const MASS_REL_TOL: f64 = 1e-12;

/// A partial coupling between the atoms of `mu` (rows) and `nu` (columns).
///
/// `entries[i * cols + j]` is the mass shipped from atom `i` of `mu` to atom
/// `j` of `nu`; `source_slack[i]` and `sink_slack[j]` are the masses removed
/// from each side.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<f64>,
    pub source_slack: Vec<f64>,
    pub sink_slack: Vec<f64>,
}

impl TransportPlan {
    fn zeros(rows: usize, cols: usize) -> Self {
        TransportPlan {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
            source_slack: vec![0.0; rows],
            sink_slack: vec![0.0; cols],
        }
    }

    /// The same plan read from `nu` to `mu`.
    pub fn transposed(&self) -> TransportPlan {
        let mut out = TransportPlan::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.entries[i * self.cols + j];
            }
        }
        out.source_slack = self.sink_slack.clone();
        out.sink_slack = self.source_slack.clone();
        out
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    /// Shipped plus removed mass of row `i`.
    pub fn row_total(&self, i: usize) -> f64 {
        self.entries[i * self.cols..(i + 1) * self.cols].iter().sum::<f64>() + self.source_slack[i]
    }

    /// Received plus removed mass of column `j`.
    pub fn col_total(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self.entry(i, j)).sum::<f64>() + self.sink_slack[j]
    }

    /// Cost of the plan under the flat-metric costs between `mu` and `nu`.
    pub fn cost(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let mut total = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let t = self.entry(i, j);
                if t > 0.0 {
                    total += t * distance(mu.location(i), nu.location(j)).min(TRANSPORT_CAP);
                }
            }
        }
        total
            + REMOVAL_COST * self.source_slack.iter().sum::<f64>()
            + REMOVAL_COST * self.sink_slack.iter().sum::<f64>()
    }

    /// Largest violation of the marginal constraints against `mu`, `nu`.
    pub fn marginal_error(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let rows = (0..self.rows).map(|i| (self.row_total(i) - mu.weight(i)).abs());
        let cols = (0..self.cols).map(|j| (self.col_total(j) - nu.weight(j)).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// CSV dump with header `i,j,mass,cost`. Transport rows carry the per-unit
    /// cost; removals are written as `i,-,slack,1` and `-,j,slack,1`.
    pub fn to_csv(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> String {
        let mut out = String::from("i,j,mass,cost\n");
        for i in 0..self.rows {
            for j in 0..self.cols {
                let t = self.entry(i, j);
                if t > 0.0 {
                    let c = distance(mu.location(i), nu.location(j)).min(TRANSPORT_CAP);
                    out.push_str(&format!("{i},{j},{},{}\n", fmt_f64(t), fmt_f64(c)));
                }
            }
        }
        for (i, s) in self.source_slack.iter().enumerate().filter(|(_, s)| **s > 0.0) {
            out.push_str(&format!("{i},-,{},{}\n", fmt_f64(*s), fmt_f64(REMOVAL_COST)));
        }
        for (j, s) in self.sink_slack.iter().enumerate().filter(|(_, s)| **s > 0.0) {
            out.push_str(&format!("-,{j},{},{}\n", fmt_f64(*s), fmt_f64(REMOVAL_COST)));
        }
        out
    }
}

fn check_dims(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    Ok(())
}

fn cap_eps(scale: f64) -> f64 {
    1e-15 * scale.max(f64::MIN_POSITIVE)
}

/// Exact flat (bounded-Lipschitz) distance `||mu - nu||_{BL*}` between two
/// nonnegative atomic measures, with an optimal partial plan.
///
/// Solved as min-cost flow: source `S` feeds the atoms of `mu`, the atoms of
/// `nu` drain into sink `T`, transport arcs cost `min(|x - y|, 2)` and a waste
/// node `W` absorbs removed mass of `mu` (cost 1) or supplies removed mass of
/// `nu` (cost 1). The total flow is `mass(mu) + mass(nu)`, with `S -> W` and
/// `W -> T` carrying the remainder at zero cost.
///
/// The pair is solved in a fixed orientation (see [`orientation`]) so the
/// value is bitwise symmetric in its arguments.
pub fn flat_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<(f64, TransportPlan)> {
    check_dims(mu, nu)?;
    if orientation(mu, nu) == Ordering::Greater {
        let (d, plan) = flat_oriented(nu, mu)?;
        return Ok((d, plan.transposed()));
    }
    flat_oriented(mu, nu)
}

/// A total order on measures, used only to pick which side is the source.
fn orientation(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Ordering {
    let lex = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    };
    mu.len()
        .cmp(&nu.len())
        .then_with(|| lex(mu.weights(), nu.weights()))
        .then_with(|| lex(mu.locations(), nu.locations()))
}

fn flat_oriented(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<(f64, TransportPlan)> {
    let (n, m) = (mu.len(), nu.len());
    let (a_total, b_total) = (mu.total_mass(), nu.total_mass());
    let s = n + m;
    let t = s + 1;
    let waste = s + 2;
    let mut g = MinCostFlow::new(n + m + 3);
    for (i, w) in mu.weights().iter().enumerate() {
        g.add_edge(s, i, *w, 0.0);
    }
    for (j, w) in nu.weights().iter().enumerate() {
        g.add_edge(n + j, t, *w, 0.0);
    }
    g.add_edge(s, waste, b_total, 0.0);
    g.add_edge(waste, t, a_total, 0.0);
    let mut transport = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let d = distance(mu.location(i), nu.location(j));
            if d < TRANSPORT_CAP {
                transport.push((i, j, g.add_edge(i, n + j, f64::INFINITY, d)));
            }
        }
    }
    let removal_mu: Vec<usize> = (0..n).map(|i| g.add_edge(i, waste, f64::INFINITY, REMOVAL_COST)).collect();
    let removal_nu: Vec<usize> = (0..m).map(|j| g.add_edge(waste, n + j, f64::INFINITY, REMOVAL_COST)).collect();

    g.run(s, t, a_total + b_total, cap_eps(a_total + b_total));

    let mut plan = TransportPlan::zeros(n, m);
    for (i, j, e) in transport {
        plan.entries[i * m + j] = g.flow(e);
    }
    for (i, e) in removal_mu.into_iter().enumerate() {
        plan.source_slack[i] = g.flow(e);
    }
    for (j, e) in removal_nu.into_iter().enumerate() {
        plan.sink_slack[j] = g.flow(e);
    }
    Ok((plan.cost(mu, nu), plan))
}

/// Balanced optimal transport with cost `|x - y|` (no removal, no cap):
/// `W_1(mu, nu)` for equal-mass measures in any dimension.
pub fn balanced_transport(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<(f64, TransportPlan)> {
    check_dims(mu, nu)?;
    let (a_total, b_total) = (mu.total_mass(), nu.total_mass());
    if (a_total - b_total).abs() > MASS_REL_TOL * a_total.max(b_total) {
        return Err(Error::MassMismatch { left: a_total, right: b_total });
    }
    let (n, m) = (mu.len(), nu.len());
    let s = n + m;
    let t = s + 1;
    let mut g = MinCostFlow::new(n + m + 2);
    for (i, w) in mu.weights().iter().enumerate() {
        g.add_edge(s, i, *w, 0.0);
    }
    for (j, w) in nu.weights().iter().enumerate() {
        g.add_edge(n + j, t, *w, 0.0);
    }
    let mut arcs = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            let d = distance(mu.location(i), nu.location(j));
            arcs.push((i, j, d, g.add_edge(i, n + j, f64::INFINITY, d)));
        }
    }
    let demand = a_total.min(b_total);
    g.run(s, t, demand, cap_eps(demand));
    let mut plan = TransportPlan::zeros(n, m);
    let mut cost = 0.0;
    for (i, j, d, e) in arcs {
        let f = g.flow(e);
        plan.entries[i * m + j] = f;
        cost += f * d;
    }
    for i in 0..n {
        plan.source_slack[i] = (mu.weight(i) - plan.row_total(i)).max(0.0);
    }
    for j in 0..m {
        plan.sink_slack[j] = (nu.weight(j) - plan.col_total(j)).max(0.0);
    }
    Ok((cost, plan))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(atoms: &[(f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::on_line(atoms).unwrap()
    }

    #[test]
    fn known_values() {
        let m = line(&[(0.0, 1.0), (0.7, 0.3)]);
        assert_eq!(flat_distance(&m, &m).unwrap().0, 0.0);
        assert_eq!(flat_distance(&line(&[(0.0, 1.0)]), &line(&[(1.0, 1.0)])).unwrap().0, 1.0);
        assert_eq!(flat_distance(&line(&[(0.0, 1.0)]), &line(&[(5.0, 1.0)])).unwrap().0, 2.0);
        assert_eq!(flat_distance(&line(&[(0.0, 2.0)]), &line(&[(0.0, 1.0)])).unwrap().0, 1.0);
    }

    #[test]
    fn empty_sides() {
        let e = DiscreteMeasure::empty(1).unwrap();
        let m = line(&[(0.0, 0.5), (3.0, 0.25)]);
        assert_eq!(flat_distance(&e, &m).unwrap().0, 0.75);
        assert_eq!(flat_distance(&m, &e).unwrap().0, 0.75);
        assert_eq!(flat_distance(&e, &e).unwrap().0, 0.0);
    }

    #[test]
    fn plan_marginals_and_slacks() {
        let mu = line(&[(0.0, 2.0), (10.0, 1.0)]);
        let nu = line(&[(0.5, 1.0), (-0.5, 0.5)]);
        let (d, plan) = flat_distance(&mu, &nu).unwrap();
        // ship 1 to 0.5 and 0.5 to -0.5 (cost 0.75), remove 0.5 at 0 and 1 at 10
        assert!((d - 2.25).abs() < 1e-14, "{d}");
        assert!(plan.marginal_error(&mu, &nu) < 1e-14);
        assert!((plan.source_slack[1] - 1.0).abs() < 1e-14);
        assert!(plan.entries.iter().all(|&t| t >= 0.0));
        let csv = plan.to_csv(&mu, &nu);
        assert!(csv.starts_with("i,j,mass,cost\n"));
        assert!(csv.contains("1,-,1.0000000000000000e0,1.0000000000000000e0"));
    }

    #[test]
    fn dimension_mismatch() {
        let a = line(&[(0.0, 1.0)]);
        let b = DiscreteMeasure::dirac(&[0.0, 0.0], 1.0).unwrap();
        assert!(matches!(flat_distance(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dominance_gives_mass_difference() {
        let mu = line(&[(0.0, 1.0), (1.0, 2.0)]);
        let nu = line(&[(0.0, 0.5), (1.0, 1.5)]);
        assert!((flat_distance(&mu, &nu).unwrap().0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn balanced_matches_sorted_matching() {
        let mu = line(&[(0.0, 0.5), (1.0, 0.5)]);
        let nu = line(&[(0.0, 0.5), (2.0, 0.5)]);
        assert!((balanced_transport(&mu, &nu).unwrap().0 - 0.5).abs() < 1e-15);
        let far = line(&[(100.0, 1.0)]);
        let one = line(&[(0.0, 1.0)]);
        assert_eq!(balanced_transport(&one, &far).unwrap().0, 100.0);
        assert!(matches!(balanced_transport(&one, &line(&[(0.0, 2.0)])), Err(Error::MassMismatch { .. })));
    }
}
