use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measures::io::fmt_f64;
use crate::measures::DiscreteMeasure;
use crate::metrics::flat_value;
use crate::scheme::{solve, Scenario};

/// Below this initial distance the ratio is not meaningful.
const IDENTICAL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    pub t: f64,
    /// `||mu_t - nu_t|| / ||mu_0 - nu_0||`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub n: u32,
    pub initial_distance: f64,
    pub rows: Vec<ContinuityRow>,
    /// `max_t log(r(t)) / t` over the positive probe times
    pub c_hat: f64,
}

impl ContinuityReport {
    /// Largest relative excess `r(t) / e^{c t} - 1` over the rows; at most 0
    /// when the exponential bound with rate `c` holds everywhere.
    pub fn excess_over(&self, c: f64) -> f64 {
        self.rows.iter().map(|r| r.ratio / (c * r.t).exp() - 1.0).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Rows `t,ratio,bound` with the bound `e^{c_hat t}`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,ratio,bound\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", fmt_f64(r.t), fmt_f64(r.ratio), fmt_f64((self.c_hat * r.t).exp())));
        }
        out
    }
}

/// Solves from `mu0` and from `nu0` with the dynamics of `scenario` and
/// reports the distance ratio at the mesh times nearest the probes (all mesh
/// times when `probes` is empty).
pub fn continuity_experiment(
    scenario: &Scenario,
    mu0: &DiscreteMeasure,
    nu0: &DiscreteMeasure,
    n: u32,
    probes: &[f64],
    exec: Execution,
) -> Result<ContinuityReport> {
    let scenarios = [scenario.with_initial(mu0.clone())?, scenario.with_initial(nu0.clone())?];
    let mut trajs = exec.map(&scenarios, |s| solve(s, n)).into_iter();
    let (a, b) = (trajs.next().expect("two solves")?, trajs.next().expect("two solves")?);

    let initial_distance = flat_value(&a.states[0], &b.states[0])?;
    if initial_distance < IDENTICAL_TOL {
        return Err(Error::InitialDataIdentical(initial_distance));
    }
    let mesh = &a.mesh;
    let mut indices: Vec<usize> = if probes.is_empty() {
        (0..a.states.len()).collect()
    } else {
        probes.iter().map(|&t| mesh.nearest_index(t)).collect()
    };
    indices.sort_unstable();
    indices.dedup();

    let ratios: Vec<f64> =
        exec.map(&indices, |&i| flat_value(&a.states[i], &b.states[i])).into_iter().collect::<Result<_>>()?;
    let rows: Vec<ContinuityRow> = indices
        .iter()
        .zip(ratios)
        .map(|(&i, d)| ContinuityRow { t: mesh.time_points()[i], ratio: d / initial_distance })
        .collect();
    let c_hat = rows.iter().filter(|r| r.t > 0.0).map(|r| r.ratio.ln() / r.t).fold(f64::NEG_INFINITY, f64::max);
    Ok(ContinuityReport { n, initial_distance, rows, c_hat })
}
