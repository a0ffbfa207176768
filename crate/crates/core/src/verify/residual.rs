use super::TestFunction;
use crate::error::Result;
use crate::exec::Execution;
use crate::measures::io::fmt_f64;
use crate::scheme::{solve, Scenario, Trajectory};

/// Both sides of the weak formulation at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub n: u32,
    /// the mesh time actually used
    pub t: f64,
    /// `int f d mu_t - int f d mu_0`
    pub lhs: f64,
    pub transport: f64,
    pub growth: f64,
    pub source: f64,
    /// `|lhs - (transport + growth + source)|`
    pub residual: f64,
}

/// Weak-form residual of a computed trajectory at the mesh time nearest `t`.
///
/// The three time integrals use the left-endpoint rule on the mesh
/// intervals: the transport term pairs `grad f . v` with `V[mu_l]`, the
/// growth term pairs `f c(., mu_l)` with `mu_l`, and the source term pairs
/// `f` with `s[mu_l]`.
pub fn weak_residual(traj: &Trajectory, scenario: &Scenario, f: &dyn TestFunction, t: f64) -> Result<ResidualReport> {
    let mesh = &traj.mesh;
    let idx = mesh.nearest_index(t).min(traj.states.len() - 1);
    let lhs = traj.states[idx].integrate(|x| f.value(x))? - traj.states[0].integrate(|x| f.value(x))?;

    let (mut transport, mut growth, mut source) = (0.0, 0.0, 0.0);
    for l in 0..idx {
        let tau = mesh.step_size(l);
        let mu = &traj.states[l];
        let v = scenario.mvf.eval(mu)?;
        transport += tau
            * v.atoms()
                .map(|(x, u, w)| w * f.gradient(x).iter().zip(u).map(|(g, ui)| g * ui).sum::<f64>())
                .sum::<f64>();
        if !scenario.growth.is_zero() {
            growth += tau * mu.integrate(|x| f.value(x) * scenario.growth.rate(x, mu))?;
        }
        if !scenario.source.is_zero() {
            source += tau * scenario.source.eval(mu)?.integrate(|x| f.value(x))?;
        }
    }
    Ok(ResidualReport {
        n: mesh.n(),
        t: mesh.time_points()[idx],
        lhs,
        transport,
        growth,
        source,
        residual: (lhs - (transport + growth + source)).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualTable {
    pub reports: Vec<ResidualReport>,
}

impl ResidualTable {
    /// `residual(N') / residual(N)` for consecutive rows at the same time.
    pub fn ratios(&self) -> Vec<f64> {
        self.reports.windows(2).filter(|w| w[0].t == w[1].t).map(|w| w[1].residual / w[0].residual).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,t,residual\n");
        for r in &self.reports {
            out.push_str(&format!("{},{},{}\n", r.n, fmt_f64(r.t), fmt_f64(r.residual)));
        }
        out
    }
}

/// Residual at time `t` for each `N` in `n_list`, solving under `exec`.
pub fn residual_study(
    scenario: &Scenario,
    n_list: &[u32],
    f: &dyn TestFunction,
    t: f64,
    exec: Execution,
) -> Result<ResidualTable> {
    let reports = exec
        .map(n_list, |&n| solve(scenario, n).and_then(|traj| weak_residual(&traj, scenario, f, t)))
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(ResidualTable { reports })
}
