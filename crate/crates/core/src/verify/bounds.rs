use crate::scheme::{Scenario, Trajectory};

/// A priori bounds audited along a computed trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub min_weight: f64,
    pub max_support_radius: f64,
    pub support_bound: f64,
    pub max_speed: f64,
    pub velocity_bound: f64,
    /// largest `|c(x, mu_l)|` over the atoms of every state
    pub max_growth: f64,
    pub growth_bound: f64,
    pub violations: Vec<String>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Nonnegativity, the support and speed bounds, and the declared growth
/// bound, checked on every recorded state.
pub fn check_trajectory_bounds(scenario: &Scenario, traj: &Trajectory) -> BoundsReport {
    let mut report = BoundsReport {
        min_weight: f64::INFINITY,
        max_support_radius: 0.0,
        support_bound: scenario.support_bound(),
        max_speed: 0.0,
        velocity_bound: scenario.velocity_bound(),
        max_growth: 0.0,
        growth_bound: scenario.growth.bound(),
        violations: Vec::new(),
    };
    let tol = 1e-9;
    for (state, d) in traj.states.iter().zip(&traj.diagnostics) {
        let t = d.t;
        if let Some(w) = state.weights().iter().copied().find(|w| *w < 0.0) {
            report.violations.push(format!("negative weight {w} at t = {t}"));
        }
        report.min_weight = report.min_weight.min(d.min_weight);
        report.max_support_radius = report.max_support_radius.max(d.support_radius);
        if d.support_radius > report.support_bound + tol {
            report
                .violations
                .push(format!("support radius {} exceeds {} at t = {t}", d.support_radius, report.support_bound));
        }
        if d.max_speed.is_finite() {
            report.max_speed = report.max_speed.max(d.max_speed);
            if d.max_speed > report.velocity_bound + tol {
                report.violations.push(format!("speed {} exceeds {} at t = {t}", d.max_speed, report.velocity_bound));
            }
        }
        let growth = state.atoms().map(|(x, _)| scenario.growth.rate(x, state).abs()).fold(0.0, f64::max);
        report.max_growth = report.max_growth.max(growth);
        if growth > report.growth_bound + tol {
            report.violations.push(format!("|c| = {growth} exceeds C_b = {} at t = {t}", report.growth_bound));
        }
    }
    report
}
