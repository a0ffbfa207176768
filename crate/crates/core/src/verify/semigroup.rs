use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::metrics::flat_value;
use crate::scheme::{solve, solve_from_state, Scenario};

/// Flat distance between the solution at `t1 + t2` and the solution
/// restarted at `t1` from `restart(state at t1)` and run for `t2`. All three
/// times must be mesh times.
pub fn semigroup_distance<F>(scenario: &Scenario, n: u32, t1: f64, t2: f64, restart: F) -> Result<f64>
where
    F: FnOnce(&DiscreteMeasure) -> DiscreteMeasure,
{
    let mesh = scenario.mesh(n)?;
    let index = |t: f64| mesh.mesh_index(t).ok_or(Error::NonMeshTime { time: t, n });
    let (i1, _) = (index(t1)?, index(t2)?);
    let i12 = index(t1 + t2)?;
    let traj = solve(scenario, n)?;
    let restarted = solve_from_state(scenario, &mesh, restart(&traj.states[i1]), i1, i12)?;
    flat_value(&traj.states[i12], restarted.last().expect("nonempty"))
}

/// The semigroup defect: zero when the recursion is Markov in its state.
pub fn semigroup_check(scenario: &Scenario, n: u32, t1: f64, t2: f64) -> Result<f64> {
    semigroup_distance(scenario, n, t1, t2, DiscreteMeasure::clone)
}
