//! The lattice approximate solution.
//!
//! From a state `mu` at a mesh time, the state a time `tau <= 1/N` later is
//!
//! ```text
//! tau * A_x(s[mu])  +  sum_{i,j} m_ij delta_{x_i + tau v_j} exp(c(x_i, mu) tau)
//! ```
//!
//! where `m_ij` are the weights of the grid projection of `V[mu]` onto the
//! space-velocity lattice. Emitted atoms are not snapped back to the grid;
//! the next step's projection does that.

mod convergence;
mod trajectory;

pub use convergence::{convergence_study, ConvergenceRow, ConvergenceTable};
pub use trajectory::{Diagnostics, Trajectory};

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measures::{grid_project_x, grid_project_xv, DiscreteMeasure, Mesh};
use crate::mvf::{GrowthFunction, MeasureVectorField, SourceOperator};

/// Atoms emitted per step before the emission loop goes parallel.
const EMIT_PAR_THRESHOLD: usize = 2048;

/// A complete initial-value problem.
#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub mvf: Arc<dyn MeasureVectorField>,
    pub growth: Arc<dyn GrowthFunction>,
    pub source: Arc<dyn SourceOperator>,
    pub mu0: DiscreteMeasure,
    pub horizon: f64,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("mvf", &self.mvf.name())
            .field("growth", &self.growth.name())
            .field("source", &self.source.name())
            .field("atoms", &self.mu0.len())
            .field("horizon", &self.horizon)
            .finish()
    }
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        mvf: Arc<dyn MeasureVectorField>,
        growth: Arc<dyn GrowthFunction>,
        source: Arc<dyn SourceOperator>,
        mu0: DiscreteMeasure,
        horizon: f64,
    ) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        if let Some(d) = mvf.fixed_dim() {
            if d != mu0.dim() {
                return Err(Error::DimensionMismatch { expected: d, got: mu0.dim() });
            }
        }
        Ok(Scenario { name: name.into(), mvf, growth, source, mu0, horizon })
    }

    /// Same dynamics, different initial datum.
    pub fn with_initial(&self, mu0: DiscreteMeasure) -> Result<Self> {
        Scenario::new(self.name.clone(), self.mvf.clone(), self.growth.clone(), self.source.clone(), mu0, self.horizon)
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Scenario::new(
            self.name.clone(),
            self.mvf.clone(),
            self.growth.clone(),
            self.source.clone(),
            self.mu0.clone(),
            horizon,
        )
    }

    pub fn dim(&self) -> usize {
        self.mu0.dim()
    }

    /// `max(R, R_0)`: source radius against initial support radius.
    pub fn r_tilde(&self) -> f64 {
        self.source.radius().max(self.mu0.support_radius())
    }

    /// A priori support radius bound `e^{C_S T} (R~ + 2) - 1`.
    pub fn support_bound(&self) -> f64 {
        let c_s = self.mvf.constants().c_s;
        (c_s * self.horizon).exp() * (self.r_tilde() + 2.0) - 1.0
    }

    /// A priori speed bound `C_S e^{C_S T} (R~ + 2)`.
    pub fn velocity_bound(&self) -> f64 {
        let c_s = self.mvf.constants().c_s;
        c_s * (c_s * self.horizon).exp() * (self.r_tilde() + 2.0)
    }

    /// Smallest `N` the a priori bounds guarantee, and always more than `n`.
    pub fn suggested_n(&self, n: u32) -> u32 {
        let need = self.support_bound().max(self.velocity_bound()).ceil();
        let need = if need.is_finite() && need < f64::from(u32::MAX) { need as u32 } else { u32::MAX };
        need.max(n.saturating_add(1))
    }

    pub fn mesh(&self, n: u32) -> Result<Mesh> {
        Mesh::new(n, self.dim(), self.horizon)
    }
}

/// Projection of the initial datum onto the spatial grid.
pub fn init(scenario: &Scenario, mesh: &Mesh) -> Result<DiscreteMeasure> {
    grid_project_x(&scenario.mu0, mesh)
}

/// Per-step byproducts recorded as diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct StepInfo {
    pub max_speed: f64,
}

pub(crate) fn advance(
    state: &DiscreteMeasure,
    tau: f64,
    scenario: &Scenario,
    mesh: &Mesh,
) -> Result<(DiscreteMeasure, StepInfo)> {
    if !(0.0..=mesh.dt() * (1.0 + 1e-12)).contains(&tau) {
        return Err(Error::InvalidArgument(format!("step {tau} outside [0, 1/N]")));
    }
    let mut out = DiscreteMeasure::empty(state.dim())?;
    if !scenario.source.is_zero() {
        let projected = grid_project_x(&scenario.source.eval(state)?, mesh)?;
        out.extend(&projected.scaled(tau)?)?;
    }

    let v = grid_project_xv(&scenario.mvf.eval(state)?, mesh)?;
    let info = StepInfo { max_speed: v.max_speed() };
    let growth = &*scenario.growth;
    let conservative = growth.is_zero();
    let idx: Vec<usize> = (0..v.len()).collect();
    let emitted: Vec<(Vec<f64>, f64)> = Execution::default().map_above(EMIT_PAR_THRESHOLD, &idx, |&k| {
        let x = v.location(k);
        let y: Vec<f64> = x.iter().zip(v.velocity(k)).map(|(a, b)| a + tau * b).collect();
        let factor = if conservative { 1.0 } else { (growth.rate(x, state) * tau).exp() };
        (y, v.weight(k) * factor)
    });
    for (y, w) in emitted {
        out.push(&y, w)?;
    }
    Ok((out.canonicalize(), info))
}

/// One step of the recursion from `state` over a time `tau` in `[0, 1/N]`.
pub fn step(state: &DiscreteMeasure, tau: f64, scenario: &Scenario, mesh: &Mesh) -> Result<DiscreteMeasure> {
    advance(state, tau, scenario, mesh).map(|(m, _)| m)
}

/// Options for [`solve_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Extra evenly spaced samples recorded inside each interval; 0 records
    /// mesh times only.
    pub intermediate_samples: usize,
}

/// Runs the recursion from the projected initial datum over the whole mesh.
pub fn solve(scenario: &Scenario, n: u32) -> Result<Trajectory> {
    solve_with(scenario, n, SolveOptions::default())
}

pub fn solve_with(scenario: &Scenario, n: u32, opts: SolveOptions) -> Result<Trajectory> {
    let mesh = scenario.mesh(n)?;
    let start = Instant::now();
    let mu0 = init(scenario, &mesh).map_err(|e| exceeded(scenario, &mesh, 0, e))?;
    let mut traj = Trajectory::start(mesh.clone(), mu0, start.elapsed());
    run_steps(scenario, &mesh, &mut traj, 0, mesh.num_intervals(), opts)?;
    Ok(traj)
}

/// Continues from `state` taken as the state at time point `from`, without
/// re-projecting it, through time point `to`. Returns the states at time
/// points `from..=to`.
pub fn solve_from_state(
    scenario: &Scenario,
    mesh: &Mesh,
    state: DiscreteMeasure,
    from: usize,
    to: usize,
) -> Result<Vec<DiscreteMeasure>> {
    if from > to || to > mesh.num_intervals() {
        return Err(Error::InvalidArgument(format!(
            "time point range {from}..={to} invalid for {} intervals",
            mesh.num_intervals()
        )));
    }
    let mut states = vec![state];
    for l in from..to {
        let last = states.last().expect("nonempty");
        let next = step(last, mesh.step_size(l), scenario, mesh).map_err(|e| exceeded(scenario, mesh, l, e))?;
        states.push(next);
    }
    Ok(states)
}

fn run_steps(
    scenario: &Scenario,
    mesh: &Mesh,
    traj: &mut Trajectory,
    from: usize,
    to: usize,
    opts: SolveOptions,
) -> Result<()> {
    for l in from..to {
        let tau = mesh.step_size(l);
        let t_l = mesh.time_points()[l];
        let state = traj.states.last().expect("trajectory has an initial state").clone();
        for j in 1..=opts.intermediate_samples {
            let sub = tau * j as f64 / (opts.intermediate_samples + 1) as f64;
            let sample = step(&state, sub, scenario, mesh).map_err(|e| exceeded(scenario, mesh, l, e))?;
            traj.intermediate.push((t_l + sub, sample));
        }
        let start = Instant::now();
        let (next, info) = advance(&state, tau, scenario, mesh).map_err(|e| exceeded(scenario, mesh, l, e))?;
        traj.record_speed(l, info.max_speed);
        traj.push(next, start.elapsed());
    }
    if let Some(last) = traj.states.last() {
        // speed the field would use from the final state, for the diagnostics
        let speed = scenario.mvf.eval(last).map(|v| v.max_speed()).unwrap_or(f64::NAN);
        traj.record_speed(to, speed);
    }
    Ok(())
}

fn exceeded(scenario: &Scenario, mesh: &Mesh, step: usize, e: Error) -> Error {
    match e {
        Error::AtomOutsideMesh { .. } => Error::MeshExceeded {
            step,
            time: mesh.time_points()[step],
            suggested_n: scenario.suggested_n(mesh.n()),
            source: Box::new(e),
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvf::{ConstantGrowth, FixedSource, LipschitzField, NoSource};

    fn scenario(v: LipschitzField, kappa: f64, sigma: Option<DiscreteMeasure>, mu0: DiscreteMeasure) -> Scenario {
        let source: Arc<dyn SourceOperator> = match sigma {
            Some(sigma) => Arc::new(FixedSource { sigma }),
            None => Arc::new(NoSource { dim: mu0.dim() }),
        };
        Scenario::new("test", Arc::new(v), Arc::new(ConstantGrowth { kappa }), source, mu0, 1.0).unwrap()
    }

    fn still() -> LipschitzField {
        LipschitzField::affine(0.0, vec![0.0])
    }

    #[test]
    fn init_examples() {
        let s = scenario(still(), 0.0, None, DiscreteMeasure::on_line(&[(0.3, 1.0)]).unwrap());
        let mesh = s.mesh(2).unwrap();
        assert_eq!(init(&s, &mesh).unwrap(), DiscreteMeasure::on_line(&[(0.25, 1.0)]).unwrap());
        let s = s.with_initial(DiscreteMeasure::empty(1).unwrap()).unwrap();
        assert!(init(&s, &mesh).unwrap().is_empty());
    }

    #[test]
    fn single_atom_growth() {
        let kappa = 0.7;
        let s = scenario(still(), kappa, None, DiscreteMeasure::on_line(&[(0.0, 1.0)]).unwrap());
        let mesh = s.mesh(4).unwrap();
        let out = step(&s.mu0, 0.1, &s, &mesh).unwrap();
        assert_eq!(out, DiscreteMeasure::on_line(&[(0.0, (kappa * 0.1).exp())]).unwrap());
    }

    #[test]
    fn unit_velocity_moves_one_cell_row() {
        let s = scenario(
            LipschitzField::affine(0.0, vec![1.0]),
            0.0,
            None,
            DiscreteMeasure::on_line(&[(0.0, 1.0)]).unwrap(),
        );
        let mesh = s.mesh(2).unwrap();
        let out = step(&s.mu0, mesh.dt(), &s, &mesh).unwrap();
        assert_eq!(out, DiscreteMeasure::on_line(&[(0.5, 1.0)]).unwrap());
    }

    #[test]
    fn source_only_fires_on_empty_state() {
        let sigma = DiscreteMeasure::on_line(&[(0.0, 1.0)]).unwrap();
        let s = scenario(still(), 0.0, Some(sigma), DiscreteMeasure::empty(1).unwrap());
        let mesh = s.mesh(4).unwrap();
        let out = step(&s.mu0, 0.2, &s, &mesh).unwrap();
        assert_eq!(out, DiscreteMeasure::on_line(&[(0.0, 0.2)]).unwrap());
    }

    #[test]
    fn oversize_step_is_rejected() {
        let s = scenario(still(), 0.0, None, DiscreteMeasure::on_line(&[(0.0, 1.0)]).unwrap());
        let mesh = s.mesh(4).unwrap();
        assert!(step(&s.mu0, 0.3, &s, &mesh).is_err());
    }

    #[test]
    fn leaving_the_box_reports_suggested_n() {
        let s = scenario(
            LipschitzField::affine(0.0, vec![3.0]),
            0.0,
            None,
            DiscreteMeasure::on_line(&[(0.5, 1.0)]).unwrap(),
        );
        match solve(&s, 2) {
            Err(Error::MeshExceeded { suggested_n, source, .. }) => {
                assert!(suggested_n > 2);
                assert!(matches!(*source, Error::AtomOutsideMesh { .. }));
            }
            other => panic!("expected MeshExceeded, got {other:?}"),
        }
    }

    #[test]
    fn intermediate_samples_are_recorded() {
        let s = scenario(
            LipschitzField::affine(0.0, vec![1.0]),
            0.0,
            None,
            DiscreteMeasure::on_line(&[(0.0, 1.0)]).unwrap(),
        );
        let traj = solve_with(&s, 4, SolveOptions { intermediate_samples: 1 }).unwrap();
        assert_eq!(traj.intermediate.len(), 4);
        assert_eq!(traj.intermediate[0].0, 0.125);
        assert_eq!(traj.intermediate[0].1, DiscreteMeasure::on_line(&[(0.125, 1.0)]).unwrap());
        assert_eq!(traj.states.len(), 5);
    }
}
