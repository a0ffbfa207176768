//! Finite nonnegative atomic measures on R^d and on R^d x R^d.
//!
//! Atom locations are stored flattened (`dim` coordinates per atom). All
//! constructors validate: weights must be nonnegative and every coordinate
//! finite.

mod grid;
pub(crate) mod io;
mod mesh;

pub use grid::{grid_project_x, grid_project_xv};
pub use io::{fmt_f64, measure_from_csv, measure_from_json, measure_to_csv, measure_to_json};
pub use mesh::Mesh;

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Euclidean norm of a coordinate slice.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Euclidean distance between two coordinate slices of equal length.
pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::ZeroDimension)
    } else {
        Ok(())
    }
}

fn check_weight(index: usize, w: f64) -> Result<()> {
    if !w.is_finite() {
        return Err(Error::NonFinite { what: "weight", index });
    }
    if w < 0.0 {
        return Err(Error::NegativeWeight { index, weight: w });
    }
    Ok(())
}

fn check_coords(what: &'static str, index: usize, x: &[f64]) -> Result<()> {
    if x.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what, index })
    }
}

/// A finite nonnegative measure `sum_i w_i delta_{x_i}` on R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    locs: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn empty(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(DiscreteMeasure { dim, locs: Vec::new(), weights: Vec::new() })
    }

    /// Builds a measure from `(location, weight)` pairs.
    pub fn new<I, P>(dim: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (P, f64)>,
        P: AsRef<[f64]>,
    {
        let mut m = DiscreteMeasure::empty(dim)?;
        for (x, w) in atoms {
            m.push(x.as_ref(), w)?;
        }
        Ok(m)
    }

    /// Builds a measure from flattened coordinates and weights.
    pub fn from_parts(dim: usize, locs: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if locs.len() != weights.len() * dim {
            return Err(Error::DimensionMismatch { expected: weights.len() * dim, got: locs.len() });
        }
        for (i, &w) in weights.iter().enumerate() {
            check_weight(i, w)?;
            check_coords("location", i, &locs[i * dim..(i + 1) * dim])?;
        }
        let locs = locs.into_iter().map(|c| c + 0.0).collect();
        Ok(DiscreteMeasure { dim, locs, weights })
    }

    /// One-dimensional convenience constructor.
    pub fn on_line(atoms: &[(f64, f64)]) -> Result<Self> {
        DiscreteMeasure::new(1, atoms.iter().map(|&(x, w)| ([x], w)))
    }

    /// A single atom `w delta_x`.
    pub fn dirac(x: &[f64], w: f64) -> Result<Self> {
        DiscreteMeasure::new(x.len(), [(x, w)])
    }

    pub fn push(&mut self, x: &[f64], w: f64) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let index = self.weights.len();
        check_weight(index, w)?;
        check_coords("location", index, x)?;
        // -0.0 + 0.0 == +0.0, so equal locations compare equal bitwise
        self.locs.extend(x.iter().map(|c| c + 0.0));
        self.weights.push(w);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn location(&self, i: usize) -> &[f64] {
        &self.locs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn locations(&self) -> &[f64] {
        &self.locs
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.locs.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i w_i f(x_i)`; a non-finite value of `f` is an error.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (i, (x, w)) in self.atoms().enumerate() {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "integrand", index: i });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Largest Euclidean norm over atoms of positive weight; 0 when empty.
    pub fn support_radius(&self) -> f64 {
        self.atoms().filter(|(_, w)| *w > 0.0).map(|(x, _)| norm(x)).fold(0.0, f64::max)
    }

    /// Relocates every atom through `map`; weights are untouched.
    pub fn push_forward<F>(&self, out_dim: usize, map: F) -> Result<DiscreteMeasure>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let mut out = DiscreteMeasure::empty(out_dim)?;
        for (x, w) in self.atoms() {
            out.push(&map(x), w)?;
        }
        Ok(out)
    }

    /// Multiplies every weight by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<DiscreteMeasure> {
        let weights = self.weights.iter().map(|w| w * factor).collect();
        DiscreteMeasure::from_parts(self.dim, self.locs.clone(), weights)
    }

    /// Concatenates the atoms of `other` (no merging).
    pub fn extend(&mut self, other: &DiscreteMeasure) -> Result<()> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        self.locs.extend_from_slice(&other.locs);
        self.weights.extend_from_slice(&other.weights);
        Ok(())
    }

    /// Sorts atoms lexicographically, merges bitwise-equal locations by summing
    /// weights (in input order), and drops atoms of weight exactly 0.
    pub fn canonicalize(&self) -> DiscreteMeasure {
        let d = self.dim;
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| lex_cmp(self.location(a), self.location(b)));
        let mut locs = Vec::with_capacity(self.locs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(self.len());
        let mut last: Option<usize> = None;
        for i in order {
            let x = self.location(i);
            match last {
                Some(j) if lex_cmp(x, self.location(j)) == Ordering::Equal => {
                    *weights.last_mut().unwrap() += self.weights[i];
                }
                _ => {
                    locs.extend_from_slice(x);
                    weights.push(self.weights[i]);
                    last = Some(i);
                }
            }
        }
        let mut out = DiscreteMeasure { dim: d, locs: Vec::new(), weights: Vec::new() };
        for (x, w) in locs.chunks_exact(d).zip(weights) {
            if w != 0.0 {
                out.locs.extend_from_slice(x);
                out.weights.push(w);
            }
        }
        out
    }

    /// Atom-by-atom comparison after canonicalization; weights must agree to
    /// `rel_tol` relative to the larger of the two total masses.
    pub fn approx_eq(&self, other: &DiscreteMeasure, rel_tol: f64) -> bool {
        self.max_atom_difference(other)
            .is_some_and(|diff| diff <= rel_tol * self.total_mass().max(other.total_mass()).max(f64::MIN_POSITIVE))
    }

    /// Largest weight difference between matching atoms after
    /// canonicalization, or `None` when the supports differ.
    pub fn max_atom_difference(&self, other: &DiscreteMeasure) -> Option<f64> {
        if self.dim != other.dim {
            return None;
        }
        let a = self.canonicalize();
        let b = other.canonicalize();
        if a.len() != b.len() || a.locs != b.locs {
            return None;
        }
        Some(a.weights.iter().zip(&b.weights).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }
}

/// A finite nonnegative measure `sum_k m_k delta_{(x_k, v_k)}` on R^d x R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityMeasure {
    dim: usize,
    locs: Vec<f64>,
    vels: Vec<f64>,
    weights: Vec<f64>,
}

impl VelocityMeasure {
    pub fn empty(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(VelocityMeasure { dim, locs: Vec::new(), vels: Vec::new(), weights: Vec::new() })
    }

    pub fn push(&mut self, x: &[f64], v: &[f64], w: f64) -> Result<()> {
        for len in [x.len(), v.len()] {
            if len != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: len });
            }
        }
        let index = self.weights.len();
        check_weight(index, w)?;
        check_coords("location", index, x)?;
        check_coords("velocity", index, v)?;
        self.locs.extend(x.iter().map(|c| c + 0.0));
        self.vels.extend(v.iter().map(|c| c + 0.0));
        self.weights.push(w);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn location(&self, k: usize) -> &[f64] {
        &self.locs[k * self.dim..(k + 1) * self.dim]
    }

    pub fn velocity(&self, k: usize) -> &[f64] {
        &self.vels[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], &[f64], f64)> + '_ {
        self.locs
            .chunks_exact(self.dim)
            .zip(self.vels.chunks_exact(self.dim))
            .zip(self.weights.iter().copied())
            .map(|((x, v), w)| (x, v, w))
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The projection onto the first factor, canonicalized.
    pub fn spatial_marginal(&self) -> DiscreteMeasure {
        DiscreteMeasure { dim: self.dim, locs: self.locs.clone(), weights: self.weights.clone() }.canonicalize()
    }

    /// Views the measure as a measure on R^{2d} with points `(x, v)`.
    pub fn as_joint(&self) -> DiscreteMeasure {
        let d = self.dim;
        let mut locs = Vec::with_capacity(2 * self.locs.len());
        for (x, v, _) in self.atoms() {
            locs.extend_from_slice(x);
            locs.extend_from_slice(v);
        }
        DiscreteMeasure { dim: 2 * d, locs, weights: self.weights.clone() }
    }

    /// Pushes forward through `(x, v) -> map(x, v)` into R^out_dim.
    pub fn push_forward<F>(&self, out_dim: usize, map: F) -> Result<DiscreteMeasure>
    where
        F: Fn(&[f64], &[f64]) -> Vec<f64>,
    {
        let mut out = DiscreteMeasure::empty(out_dim)?;
        for (x, v, w) in self.atoms() {
            out.push(&map(x, v), w)?;
        }
        Ok(out)
    }

    /// Largest velocity norm over atoms of positive weight.
    pub fn max_speed(&self) -> f64 {
        self.atoms().filter(|(_, _, w)| *w > 0.0).map(|(_, v, _)| norm(v)).fold(0.0, f64::max)
    }

    /// Largest location norm over atoms of positive weight.
    pub fn max_location_norm(&self) -> f64 {
        self.atoms().filter(|(_, _, w)| *w > 0.0).map(|(x, _, _)| norm(x)).fold(0.0, f64::max)
    }
}
