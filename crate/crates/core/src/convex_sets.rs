//! Projections, Carathéodory and Radon certificates, separation, Minkowski sums.

use crate::error::{Error, Result};
use crate::geometry::{combine, dist, dot_unchecked, norm, sub, Ball, Polytope, SimplexWeights, VectorN};
use crate::solvers::{nearest_in_hull, DenseQ, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvexBody {
    Ball(Ball),
    Polytope(Polytope),
}

impl ConvexBody {
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball(b) => b.dim(),
            ConvexBody::Polytope(p) => p.dim(),
        }
    }

    /// Axis-aligned bounding box (lo, hi).
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConvexBody::Ball(b) => (
                b.center.iter().map(|c| c - b.radius).collect(),
                b.center.iter().map(|c| c + b.radius).collect(),
            ),
            ConvexBody::Polytope(p) => {
                let n = p.dim();
                let mut lo = vec![f64::INFINITY; n];
                let mut hi = vec![f64::NEG_INFINITY; n];
                for v in p.vertices() {
                    for j in 0..n {
                        lo[j] = lo[j].min(v[j]);
                        hi[j] = hi[j].max(v[j]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// A representative interior-ish point: ball center or vertex centroid.
    pub fn center(&self) -> Vec<f64> {
        match self {
            ConvexBody::Ball(b) => b.center.to_vec(),
            ConvexBody::Polytope(p) => {
                let w = vec![1.0 / p.len() as f64; p.len()];
                combine(p.vertices(), &w)
            }
        }
    }
}

/// Unit normal u and offset α of {y : ⟨y, u⟩ = α}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: VectorN,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaratheodoryCertificate {
    pub indices: Vec<usize>,
    pub weights: SimplexWeights,
}

fn proj_cfg() -> SolverConfig {
    SolverConfig::default().with_tol(1e-13)
}

fn check_dim(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    Ok(())
}

pub(crate) fn project_ball(x: &[f64], b: &Ball) -> Vec<f64> {
    let d = sub(x, &b.center);
    let r = norm(&d);
    if r <= b.radius {
        x.to_vec()
    } else {
        b.center.iter().zip(&d).map(|(c, v)| c + b.radius * v / r).collect()
    }
}

/// Projection onto a polytope with its representing weights.
pub(crate) fn project_polytope(x: &[f64], p: &Polytope) -> (Vec<f64>, Vec<f64>) {
    let vs: Vec<&[f64]> = p.vertices().iter().map(|v| v.coords()).collect();
    let (w, q, _) = nearest_in_hull(&vs, x, &proj_cfg());
    (q, w)
}

pub(crate) fn project_raw(x: &[f64], c: &ConvexBody) -> Vec<f64> {
    match c {
        ConvexBody::Ball(b) => project_ball(x, b),
        ConvexBody::Polytope(p) => project_polytope(x, p).0,
    }
}

pub fn project(x: &VectorN, c: &ConvexBody) -> Result<VectorN> {
    check_dim(x, c.dim())?;
    Ok(VectorN::raw(project_raw(x, c)))
}

pub fn distance(x: &VectorN, c: &ConvexBody) -> Result<f64> {
    check_dim(x, c.dim())?;
    Ok(dist(x, &project_raw(x, c)))
}

/// Null vector μ of [p₁ … p_k; 1 … 1] by Gaussian elimination with partial pivoting,
/// taking the first free column. None when the points are affinely independent.
pub(crate) fn affine_dependence(points: &[&[f64]]) -> Option<Vec<f64>> {
    let k = points.len();
    let n = points.first()?.len();
    let rows = n + 1;
    let mut m: Vec<Vec<f64>> = (0..rows)
        .map(|r| (0..k).map(|j| if r < n { points[j][r] } else { 1.0 }).collect())
        .collect();
    let scale = m.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()));
    let eps = 1e-12 * scale;
    let mut pivots = Vec::new();
    let mut row = 0;
    let mut free = None;
    for col in 0..k {
        if row == rows {
            free.get_or_insert(col);
            continue;
        }
        let piv = (row..rows).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        if m[piv][col].abs() <= eps {
            free.get_or_insert(col);
            continue;
        }
        m.swap(row, piv);
        let d = m[row][col];
        for j in col..k {
            m[row][j] /= d;
        }
        for r in 0..rows {
            if r != row && m[r][col] != 0.0 {
                let f = m[r][col];
                for j in col..k {
                    m[r][j] -= f * m[row][j];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let f = free?;
    let mut mu = vec![0.0; k];
    mu[f] = 1.0;
    for (r, &c) in pivots.iter().enumerate() {
        if c < f {
            mu[c] = -m[r][f];
        }
    }
    let s = mu.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Some(mu.iter().map(|v| v / s).collect())
}

pub fn caratheodory(x: &VectorN, p: &Polytope) -> Result<CaratheodoryCertificate> {
    check_dim(x, p.dim())?;
    let (q, mut w) = project_polytope(x, p);
    let d = dist(x, &q);
    if d > 1e-8 {
        return Err(Error::NotInHull { distance: d });
    }
    loop {
        let sup: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
        let pts: Vec<&[f64]> = sup.iter().map(|&i| p.vertices()[i].coords()).collect();
        let Some(mu) = affine_dependence(&pts) else { break };
        // shift along μ (Σμ = 0) until a weight hits zero
        let mu = if mu.iter().any(|&v| v > 0.0) { mu } else { mu.iter().map(|v| -v).collect() };
        let mut t = f64::INFINITY;
        let mut hit = 0;
        for (a, &i) in sup.iter().enumerate() {
            if mu[a] > 0.0 && w[i] / mu[a] < t {
                t = w[i] / mu[a];
                hit = i;
            }
        }
        for (a, &i) in sup.iter().enumerate() {
            w[i] = (w[i] - t * mu[a]).max(0.0);
        }
        w[hit] = 0.0;
    }
    let indices: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    let weights = refit(x, p, &indices, &w);
    Ok(CaratheodoryCertificate { weights: SimplexWeights::new(weights)?, indices })
}

/// Least-squares re-solve of the weights on an affinely independent support.
fn refit(x: &[f64], p: &Polytope, idx: &[usize], w: &[f64]) -> Vec<f64> {
    let current: Vec<f64> = idx.iter().map(|&i| w[i]).collect();
    let s: f64 = current.iter().sum();
    let current: Vec<f64> = current.iter().map(|v| v / s).collect();
    if idx.len() < 2 {
        return current;
    }
    let n = x.len();
    let k = idx.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(n + 1, k);
    let mut b = nalgebra::DVector::<f64>::zeros(n + 1);
    for (j, &i) in idx.iter().enumerate() {
        for r in 0..n {
            a[(r, j)] = p.vertices()[i][r];
        }
        a[(n, j)] = 1.0;
    }
    for r in 0..n {
        b[r] = x[r];
    }
    b[n] = 1.0;
    let Ok(sol) = a.svd(true, true).solve(&b, 1e-14) else { return current };
    if sol.iter().all(|&v| v >= 0.0) {
        let err_new = dist(&combine_idx(p, idx, sol.as_slice()), x);
        let err_old = dist(&combine_idx(p, idx, &current), x);
        if err_new <= err_old {
            let s: f64 = sol.iter().sum();
            return sol.iter().map(|v| v / s).collect();
        }
    }
    current
}

fn combine_idx(p: &Polytope, idx: &[usize], w: &[f64]) -> Vec<f64> {
    let vs: Vec<&[f64]> = idx.iter().map(|&i| p.vertices()[i].coords()).collect();
    combine(&vs, w)
}

/// Radon partition from an affine dependence. Returns (positive side, negative side, witness);
/// zero coefficients go to the positive side.
pub fn radon_partition(points: &[VectorN], n: usize) -> Result<(Vec<usize>, Vec<usize>, VectorN)> {
    for p in points {
        check_dim(p, n)?;
    }
    let refs: Vec<&[f64]> = points.iter().map(|p| p.coords()).collect();
    let mu = affine_dependence(&refs).ok_or_else(|| {
        Error::Invalid(format!("need n + 2 = {} points (or an affinely dependent set), got {}", n + 2, points.len()))
    })?;
    let pos: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] >= 0.0).collect();
    let neg: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] < 0.0).collect();
    let sp: f64 = pos.iter().map(|&i| mu[i]).sum();
    let w: Vec<f64> = pos.iter().map(|&i| mu[i] / sp).collect();
    let vs: Vec<&[f64]> = pos.iter().map(|&i| refs[i]).collect();
    Ok((pos, neg, VectorN::raw(combine(&vs, &w))))
}

/// Closest pair (p ∈ A, q ∈ B).
pub fn closest_pair(a: &ConvexBody, b: &ConvexBody) -> Result<(Vec<f64>, Vec<f64>)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(match (a, b) {
        (ConvexBody::Ball(x), ConvexBody::Ball(y)) => {
            let d = sub(&y.center, &x.center);
            let r = norm(&d);
            if r == 0.0 {
                (x.center.to_vec(), y.center.to_vec())
            } else {
                let u: Vec<f64> = d.iter().map(|v| v / r).collect();
                let t1 = x.radius.min(r);
                let t2 = y.radius.min(r - t1);
                (
                    x.center.iter().zip(&u).map(|(c, v)| c + t1 * v).collect(),
                    y.center.iter().zip(&u).map(|(c, v)| c - t2 * v).collect(),
                )
            }
        }
        (ConvexBody::Polytope(p), ConvexBody::Ball(ball)) => {
            let q = project_polytope(&ball.center, p).0;
            (q.clone(), project_ball(&q, ball))
        }
        (ConvexBody::Ball(_), ConvexBody::Polytope(_)) => {
            let (q, p) = closest_pair(b, a)?;
            (p, q)
        }
        (ConvexBody::Polytope(p), ConvexBody::Polytope(q)) => {
            // nearest point to 0 in conv{vᵢ − wⱼ}
            let diffs: Vec<Vec<f64>> = p
                .vertices()
                .iter()
                .flat_map(|v| q.vertices().iter().map(move |w| sub(v, w)))
                .collect();
            let refs: Vec<&[f64]> = diffs.iter().map(|d| d.as_slice()).collect();
            let gram = DenseQ::gram(&refs);
            let c = vec![0.0; refs.len()];
            let rep = crate::solvers::simplex_qp_dense(&gram, &c, &proj_cfg());
            let nq = q.len();
            let mut wa = vec![0.0; p.len()];
            let mut wb = vec![0.0; nq];
            for (idx, l) in rep.argmin.iter().enumerate() {
                wa[idx / nq] += l;
                wb[idx % nq] += l;
            }
            (combine(p.vertices(), &wa), combine(q.vertices(), &wb))
        }
    })
}

pub fn separate(a: &ConvexBody, b: &ConvexBody) -> Result<Hyperplane> {
    let (p, q) = closest_pair(a, b)?;
    let d = dist(&p, &q);
    if d <= 1e-7 {
        return Err(Error::Overlap { distance: d });
    }
    let u: Vec<f64> = sub(&q, &p).iter().map(|v| v / d).collect();
    let mid: Vec<f64> = p.iter().zip(&q).map(|(x, y)| 0.5 * (x + y)).collect();
    let offset = dot_unchecked(&u, &mid);
    Ok(Hyperplane { normal: VectorN::raw(u), offset })
}

pub fn minkowski_sum(a: &Polytope, b: &Polytope) -> Result<Polytope> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let vs = a
        .vertices()
        .iter()
        .flat_map(|v| b.vertices().iter().map(move |w| VectorN::raw(v.iter().zip(w.iter()).map(|(x, y)| x + y).collect())))
        .collect();
    Polytope::new(vs)
}

/// Support function h_C(u) = max over C of ⟨u, ·⟩.
pub fn support(c: &ConvexBody, u: &[f64]) -> (f64, Vec<f64>) {
    match c {
        ConvexBody::Ball(b) => {
            let r = norm(u);
            let arg: Vec<f64> = if r > 0.0 {
                b.center.iter().zip(u).map(|(c, v)| c + b.radius * v / r).collect()
            } else {
                b.center.to_vec()
            };
            (dot_unchecked(&b.center, u) + b.radius * r, arg)
        }
        ConvexBody::Polytope(p) => {
            let mut best = 0;
            let mut bv = f64::NEG_INFINITY;
            for (i, v) in p.vertices().iter().enumerate() {
                let s = dot_unchecked(v, u);
                if s > bv {
                    bv = s;
                    best = i;
                }
            }
            (bv, p.vertices()[best].to_vec())
        }
    }
}
