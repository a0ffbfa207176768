use crate::error::{Error, Result};

/// Discretization parameters for a given `N`: time step `1/N`, velocity step
/// `1/N`, space step `1/N^2`, mesh box `[-N, N]^d` and time points covering
/// `[0, T]`.
///
/// Time points are `t_l = l/N` for `l = 0..=floor(T N)`, followed by `T` itself
/// when `T N` is not an integer. The grids are never materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    n: u32,
    dim: usize,
    horizon: f64,
    time_points: Vec<f64>,
    /// true when the last interval is shorter than `1/N`
    partial_tail: bool,
}

/// Tolerance for deciding that `T N` is an integer.
const INTEGER_TOL: f64 = 1e-9;

impl Mesh {
    pub fn new(n: u32, dim: usize, horizon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        let nf = f64::from(n);
        let steps = horizon * nf;
        let rounded = steps.round();
        let (full, partial_tail) = if (steps - rounded).abs() <= INTEGER_TOL * rounded.max(1.0) {
            (rounded as usize, false)
        } else {
            (steps.floor() as usize, true)
        };
        let mut time_points: Vec<f64> = (0..=full).map(|l| l as f64 / nf).collect();
        if partial_tail {
            time_points.push(horizon);
        } else {
            *time_points.last_mut().unwrap() = horizon;
        }
        Ok(Mesh { n, dim, horizon, time_points, partial_tail })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Time step `1/N`.
    pub fn dt(&self) -> f64 {
        1.0 / f64::from(self.n)
    }

    /// Velocity step `1/N`.
    pub fn dv(&self) -> f64 {
        1.0 / f64::from(self.n)
    }

    /// Space step `1/N^2`.
    pub fn dx(&self) -> f64 {
        1.0 / (f64::from(self.n) * f64::from(self.n))
    }

    pub fn time_points(&self) -> &[f64] {
        &self.time_points
    }

    pub fn num_intervals(&self) -> usize {
        self.time_points.len() - 1
    }

    /// Length of interval `l`. Full intervals return exactly `1/N` so that
    /// restarting from a mesh time reproduces the same step sequence.
    pub fn step_size(&self, l: usize) -> f64 {
        assert!(l < self.num_intervals(), "interval {l} out of range");
        if self.partial_tail && l + 1 == self.num_intervals() {
            self.horizon - self.time_points[l]
        } else {
            self.dt()
        }
    }

    /// Index of `t` among the time points, if it is one (within 1e-9).
    pub fn mesh_index(&self, t: f64) -> Option<usize> {
        self.time_points.iter().position(|&s| (s - t).abs() <= 1e-9)
    }

    /// Index of the last time point `<= t` (within 1e-9).
    pub fn index_at_or_before(&self, t: f64) -> usize {
        self.time_points.iter().rposition(|&s| s <= t + 1e-9).unwrap_or(0)
    }

    /// Index of the time point nearest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &s) in self.time_points.iter().enumerate() {
            if (s - t).abs() < (self.time_points[best] - t).abs() {
                best = i;
            }
        }
        best
    }
}
