//! The grid discretization operators: mass of each half-open cell
//! `x_i + [0, 1/N^2)^d` (and `v_j + [0, 1/N)^d` for velocities) is moved to the
//! cell's lower corner.

use std::collections::BTreeMap;

use super::{DiscreteMeasure, Mesh, VelocityMeasure};
use crate::error::{Error, GridKind, Result};
use crate::exec::Execution;

/// Floating-point products within this distance of an integer are treated as
/// lying on the grid line.
const SNAP_TOL: f64 = 1e-12;

/// Atoms processed per parallel batch before going wide is worth it.
const PAR_THRESHOLD: usize = 4096;

fn cell_index(y: f64) -> i64 {
    let r = y.round();
    if (y - r).abs() <= SNAP_TOL {
        r as i64
    } else {
        y.floor() as i64
    }
}

/// Cell multi-index of `x` on the grid `Z^d / scale` inside `[-N, N]^d`.
fn snap(x: &[f64], scale: f64, n: u32, grid: GridKind, index: usize, out: &mut Vec<i64>) -> Result<()> {
    let bound = f64::from(n);
    let max_index = (bound * scale).round() as i64;
    for &c in x {
        if !(-bound..=bound).contains(&c) {
            return Err(Error::AtomOutsideMesh { grid, index, coords: x.to_vec(), n });
        }
        // right boundary of the box is assigned to the last cell
        out.push(cell_index(c * scale).clamp(-max_index, max_index));
    }
    Ok(())
}

fn keys_x(m: &DiscreteMeasure, mesh: &Mesh) -> Result<Vec<Vec<i64>>> {
    let n = mesh.n();
    let scale = f64::from(n) * f64::from(n);
    let idx: Vec<usize> = (0..m.len()).collect();
    Execution::Parallel
        .map_above(PAR_THRESHOLD, &idx, |&i| {
            let mut key = Vec::with_capacity(m.dim());
            snap(m.location(i), scale, n, GridKind::Space, i, &mut key)?;
            Ok(key)
        })
        .into_iter()
        .collect()
}

/// The spatial discretization operator: every atom's mass goes to the grid
/// point `floor(x N^2) / N^2` (componentwise). Output atoms are sorted by cell.
///
/// Fails with [`Error::AtomOutsideMesh`] if an atom lies outside `[-N, N]^d`.
pub fn grid_project_x(m: &DiscreteMeasure, mesh: &Mesh) -> Result<DiscreteMeasure> {
    if m.dim() != mesh.dim() {
        return Err(Error::DimensionMismatch { expected: mesh.dim(), got: m.dim() });
    }
    let keys = keys_x(m, mesh)?;
    let mut cells: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for (key, w) in keys.into_iter().zip(m.weights()) {
        *cells.entry(key).or_insert(0.0) += w;
    }
    let scale = f64::from(mesh.n()) * f64::from(mesh.n());
    let mut out = DiscreteMeasure::empty(m.dim())?;
    let mut x = vec![0.0; m.dim()];
    for (key, w) in cells {
        if w == 0.0 {
            continue;
        }
        for (c, k) in x.iter_mut().zip(&key) {
            *c = *k as f64 / scale;
        }
        out.push(&x, w)?;
    }
    Ok(out)
}

/// The phase-space discretization operator: locations snap to the `1/N^2`
/// grid and velocities to the `1/N` grid, both by floor. Atoms sharing a
/// `(x_i, v_j)` cell are merged; output is sorted by cell.
pub fn grid_project_xv(v: &VelocityMeasure, mesh: &Mesh) -> Result<VelocityMeasure> {
    if v.dim() != mesh.dim() {
        return Err(Error::DimensionMismatch { expected: mesh.dim(), got: v.dim() });
    }
    let d = v.dim();
    let n = mesh.n();
    let nf = f64::from(n);
    let idx: Vec<usize> = (0..v.len()).collect();
    let keys: Vec<Vec<i64>> = Execution::Parallel
        .map_above(PAR_THRESHOLD, &idx, |&k| {
            let mut key = Vec::with_capacity(2 * d);
            snap(v.location(k), nf * nf, n, GridKind::Space, k, &mut key)?;
            snap(v.velocity(k), nf, n, GridKind::Velocity, k, &mut key)?;
            Ok(key)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let mut cells: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for (k, key) in keys.into_iter().enumerate() {
        *cells.entry(key).or_insert(0.0) += v.weight(k);
    }
    let mut out = VelocityMeasure::empty(d)?;
    let mut x = vec![0.0; d];
    let mut u = vec![0.0; d];
    for (key, w) in cells {
        if w == 0.0 {
            continue;
        }
        for c in 0..d {
            x[c] = key[c] as f64 / (nf * nf);
            u[c] = key[d + c] as f64 / nf;
        }
        out.push(&x, &u, w)?;
    }
    Ok(out)
}
