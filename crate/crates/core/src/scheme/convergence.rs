use super::{solve, Scenario, Trajectory};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measures::io::fmt_f64;
use crate::metrics::flat_value;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: u32,
    pub n_next: u32,
    pub t: f64,
    /// flat distance between the two solutions at `t`
    pub distance: f64,
    /// `log2(previous distance / distance)` at the same `t`; `None` for the
    /// first pair or when either distance is zero
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Rows for one probe time, in refinement order.
    pub fn at(&self, t: f64) -> Vec<&ConvergenceRow> {
        self.rows.iter().filter(|r| r.t == t).collect()
    }

    pub fn orders(&self, t: f64) -> Vec<f64> {
        self.at(t).iter().filter_map(|r| r.order).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,n_next,t,distance,order\n");
        for r in &self.rows {
            let order = r.order.map(fmt_f64).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{}\n", r.n, r.n_next, fmt_f64(r.t), fmt_f64(r.distance), order));
        }
        out
    }
}

/// Successive-refinement distances: for consecutive `N, N'` in `n_list` and
/// each probe time, the flat distance between the two solutions at the last
/// mesh time not after the probe. The solves run under `exec`.
pub fn convergence_study(
    scenario: &Scenario,
    n_list: &[u32],
    probes: &[f64],
    exec: Execution,
) -> Result<ConvergenceTable> {
    if n_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(format!("N list must be ascending, got {n_list:?}")));
    }
    if let Some(t) = probes.iter().find(|&&t| !(0.0..=scenario.horizon).contains(&t)) {
        return Err(Error::InvalidArgument(format!("probe time {t} outside [0, {}]", scenario.horizon)));
    }
    let trajectories: Vec<Trajectory> = exec.map(n_list, |&n| solve(scenario, n)).into_iter().collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for (k, pair) in trajectories.windows(2).enumerate() {
        for &t in probes {
            jobs.push((k, t, pair[0].state_at(t), pair[1].state_at(t)));
        }
    }
    let distances: Vec<f64> = exec.map(&jobs, |(_, _, a, b)| flat_value(a, b)).into_iter().collect::<Result<_>>()?;

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(jobs.len());
    for ((k, t, _, _), distance) in jobs.iter().zip(distances) {
        let order = rows
            .iter()
            .rev()
            .find(|r| r.t == *t)
            .filter(|prev| prev.distance > 0.0 && distance > 0.0)
            .map(|prev| (prev.distance / distance).log2());
        rows.push(ConvergenceRow { n: n_list[*k], n_next: n_list[k + 1], t: *t, distance, order });
    }
    Ok(ConvergenceTable { rows })
}
