//! Vectors, balls, V-polytopes and simplex weights.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::Deref;

/// A point of R^n with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct VectorN(Vec<f64>);

impl VectorN {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid("vector of dimension 0".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(VectorN(coords))
    }

    pub fn zeros(n: usize) -> Self {
        VectorN(vec![0.0; n.max(1)])
    }

    /// Unchecked constructor for solver internals that already guarantee finiteness.
    pub(crate) fn raw(coords: Vec<f64>) -> Self {
        VectorN(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for VectorN {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for VectorN {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        VectorN::new(v)
    }
}

impl From<VectorN> for Vec<f64> {
    fn from(v: VectorN) -> Vec<f64> {
        v.0
    }
}

fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    Ok(())
}

/// Inner product, summed left to right.
pub fn dot(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    Ok(dot_unchecked(x, y))
}

pub fn norm(x: &[f64]) -> f64 {
    dot_unchecked(x, x).sqrt()
}

pub(crate) fn dot_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i] * y[i];
    }
    s
}

pub(crate) fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        let d = x[i] - y[i];
        s += d * d;
    }
    s.sqrt()
}

pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    dot_unchecked(x, x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: VectorN,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: VectorN, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Invalid(format!("ball radius {radius} must be finite and >= 0")));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }
}

/// Convex hull of a finite vertex list. Redundant vertices are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    vertices: Vec<VectorN>,
}

impl Polytope {
    pub fn new(vertices: Vec<VectorN>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::Invalid("polytope needs at least one vertex".into()))?;
        let n = first.dim();
        for v in &vertices {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
            }
        }
        Ok(Polytope { vertices })
    }

    pub fn vertices(&self) -> &[VectorN] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Convex-combination weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    /// Clamps entries in [-1e-12, 0) to zero and renormalizes; rejects sums off by more than 1e-9.
    pub fn new(mut w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Invalid("empty weight vector".into()));
        }
        for (i, x) in w.iter_mut().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if *x < -1e-12 {
                return Err(Error::Invalid(format!("negative weight {x} at index {i}")));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let s: f64 = w.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("weights sum to {s}")));
        }
        for x in w.iter_mut() {
            *x /= s;
        }
        Ok(SimplexWeights(w))
    }

    pub fn one_hot(k: usize, i: usize) -> Self {
        let mut w = vec![0.0; k];
        w[i] = 1.0;
        SimplexWeights(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn convex_combination(p: &Polytope, w: &SimplexWeights) -> Result<VectorN> {
    if w.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: w.len() });
    }
    Ok(VectorN::raw(combine(p.vertices(), w.weights())))
}

pub(crate) fn combine<V: Deref<Target = [f64]>>(vs: &[V], w: &[f64]) -> Vec<f64> {
    let n = vs[0].len();
    let mut out = vec![0.0; n];
    for (v, &l) in vs.iter().zip(w) {
        for j in 0..n {
            out[j] += l * v[j];
        }
    }
    out
}
