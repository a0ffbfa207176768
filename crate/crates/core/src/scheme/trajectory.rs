use std::time::Duration;

use crate::measures::io::fmt_f64;
use crate::measures::{DiscreteMeasure, Mesh};

/// Per-state summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub mass: f64,
    pub support_radius: f64,
    pub atom_count: usize,
    /// smallest weight, 0 for the empty state
    pub min_weight: f64,
    /// largest projected speed used when stepping from this state
    pub max_speed: f64,
    pub wall_time: Duration,
}

impl Diagnostics {
    fn of(t: f64, m: &DiscreteMeasure, wall_time: Duration) -> Self {
        Diagnostics {
            t,
            mass: m.total_mass(),
            support_radius: m.support_radius(),
            atom_count: m.len(),
            min_weight: if m.is_empty() { 0.0 } else { m.weights().iter().copied().fold(f64::INFINITY, f64::min) },
            max_speed: f64::NAN,
            wall_time,
        }
    }
}

/// States of one solve at every mesh time, plus optional samples inside the
/// intervals.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub mesh: Mesh,
    pub states: Vec<DiscreteMeasure>,
    pub diagnostics: Vec<Diagnostics>,
    /// `(t, state)` pairs strictly between mesh times, in time order
    pub intermediate: Vec<(f64, DiscreteMeasure)>,
}

impl Trajectory {
    pub(crate) fn start(mesh: Mesh, mu0: DiscreteMeasure, wall: Duration) -> Self {
        let diag = Diagnostics::of(0.0, &mu0, wall);
        Trajectory { mesh, states: vec![mu0], diagnostics: vec![diag], intermediate: Vec::new() }
    }

    pub(crate) fn push(&mut self, state: DiscreteMeasure, wall: Duration) {
        let t = self.mesh.time_points()[self.states.len()];
        self.diagnostics.push(Diagnostics::of(t, &state, wall));
        self.states.push(state);
    }

    pub(crate) fn record_speed(&mut self, index: usize, speed: f64) {
        if let Some(d) = self.diagnostics.get_mut(index) {
            d.max_speed = speed;
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.mesh.time_points()[..self.states.len()]
    }

    pub fn final_state(&self) -> &DiscreteMeasure {
        self.states.last().expect("trajectory is never empty")
    }

    /// State at the last mesh time `<= t`.
    pub fn state_at(&self, t: f64) -> &DiscreteMeasure {
        &self.states[self.mesh.index_at_or_before(t).min(self.states.len() - 1)]
    }

    /// Rows `t,atom_index,x0..x{d-1},weight` for every mesh state and every
    /// intermediate sample, in time order.
    pub fn to_csv(&self) -> String {
        let d = self.mesh.dim();
        let mut out = String::from("t,atom_index");
        for k in 0..d {
            out.push_str(&format!(",x{k}"));
        }
        out.push_str(",weight\n");

        let mut rows: Vec<(f64, &DiscreteMeasure)> = self.times().iter().copied().zip(&self.states).collect();
        rows.extend(self.intermediate.iter().map(|(t, m)| (*t, m)));
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (t, m) in rows {
            for (i, (x, w)) in m.atoms().enumerate() {
                out.push_str(&fmt_f64(t));
                out.push_str(&format!(",{i}"));
                for c in x {
                    out.push(',');
                    out.push_str(&fmt_f64(*c));
                }
                out.push(',');
                out.push_str(&fmt_f64(w));
                out.push('\n');
            }
        }
        out
    }

    /// Rows `t,mass,support_radius,atom_count`. Wall times are left out so
    /// the file is reproducible.
    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::from("t,mass,support_radius,atom_count\n");
        for d in &self.diagnostics {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(d.t),
                fmt_f64(d.mass),
                fmt_f64(d.support_radius),
                d.atom_count
            ));
        }
        out
    }
}
