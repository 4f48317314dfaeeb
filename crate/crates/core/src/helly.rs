//! Intersection checks for finite body families and Jung's enclosing-ball bound.

use crate::convex_sets::{project_raw, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::{dist, dot_unchecked, sub, Ball, VectorN};
use crate::solvers::{minimize_over_box, OracleValue, SolverConfig};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// Residual below which a family counts as intersecting.
pub const INTERSECTION_TOL: f64 = 1e-6;
const ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyFamily {
    pub n: usize,
    pub bodies: Vec<ConvexBody>,
}

impl BodyFamily {
    pub fn new(bodies: Vec<ConvexBody>) -> Result<Self> {
        let n = bodies.first().ok_or_else(|| Error::Invalid("empty family".into()))?.dim();
        for b in &bodies {
            if b.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
            }
        }
        Ok(BodyFamily { n, bodies })
    }

    pub fn validate(&self) -> Result<()> {
        BodyFamily::new(self.bodies.clone()).and_then(|f| {
            if f.n != self.n {
                Err(Error::DimensionMismatch { expected: self.n, got: f.n })
            } else {
                Ok(())
            }
        })
    }

    fn subfamily(&self, idx: &[usize]) -> BodyFamily {
        BodyFamily { n: self.n, bodies: idx.iter().map(|&i| self.bodies[i].clone()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub intersects: bool,
    pub witness: Option<VectorN>,
    pub residual: f64,
    pub violating_subset: Option<Vec<usize>>,
}

/// d(x) = maxᵢ d(x, Cᵢ) with a subgradient from the active body.
pub fn max_distance(f: &BodyFamily, x: &[f64]) -> (f64, Vec<f64>) {
    let mut best = (0.0, vec![0.0; x.len()]);
    for b in &f.bodies {
        let p = project_raw(x, b);
        let d = dist(x, &p);
        if d > best.0 {
            best = (d, sub(x, &p).iter().map(|v| v / d).collect());
        }
    }
    best
}

/// Minimize d over the family's bounding box; the clamp onto that box never increases d.
pub fn common_point(f: &BodyFamily, cfg: &SolverConfig) -> IntersectionReport {
    let n = f.n;
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for b in &f.bodies {
        let (l, h) = b.bounds();
        for j in 0..n {
            lo[j] = lo[j].min(l[j]);
            hi[j] = hi[j].max(h[j]);
        }
    }
    for j in 0..n {
        let pad = 1e-3 * (1.0 + hi[j] - lo[j]);
        lo[j] -= pad;
        hi[j] += pad;
    }
    let oracle = |x: &[f64]| {
        let (value, subgrad) = max_distance(f, x);
        OracleValue::Finite { value, subgrad }
    };
    let rep = minimize_over_box(oracle, &lo, &hi, 1e-10, cfg);
    let x = rep.x.unwrap_or_else(|| lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect());
    let residual = max_distance(f, &x).0;
    IntersectionReport {
        intersects: residual <= INTERSECTION_TOL,
        witness: Some(VectorN::raw(x)),
        residual,
        violating_subset: None,
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Run `common_point` on every k-subset in lexicographic order, stopping at the first failure.
pub fn check_k_intersection(f: &BodyFamily, k: usize, cfg: &SolverConfig) -> Result<IntersectionReport> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let m = f.bodies.len();
    let k = k.min(m);
    let count = binomial(m, k);
    if count > ENUMERATION_LIMIT {
        return Err(Error::EnumerationGuard { count, limit: ENUMERATION_LIMIT });
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut worst = 0.0f64;
    let mut last;
    loop {
        let r = common_point(&f.subfamily(&idx), cfg);
        if !r.intersects {
            return Ok(IntersectionReport { violating_subset: Some(idx), ..r });
        }
        worst = worst.max(r.residual);
        last = r.witness;
        // next combination
        let mut i = k;
        while i > 0 && idx[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(IntersectionReport { intersects: true, witness: last, residual: worst, violating_subset: None })
}

/// Finite Helly: check all (n+1)-subsets, then find a common point of the whole family.
pub fn helly_verify(f: &BodyFamily, cfg: &SolverConfig) -> Result<IntersectionReport> {
    let r = check_k_intersection(f, f.n + 1, cfg)?;
    if !r.intersects {
        return Ok(r);
    }
    Ok(common_point(f, cfg))
}

fn circumball(pts: &[&[f64]]) -> (Vec<f64>, f64) {
    let p0 = pts[0];
    let m = pts.len() - 1;
    if m == 0 {
        return (p0.to_vec(), 0.0);
    }
    let d: Vec<Vec<f64>> = pts[1..].iter().map(|p| sub(p, p0)).collect();
    let a = nalgebra::DMatrix::from_fn(m, m, |i, j| dot_unchecked(&d[i], &d[j]));
    let b = nalgebra::DVector::from_fn(m, |i, _| 0.5 * dot_unchecked(&d[i], &d[i]));
    let alpha = a.svd(true, true).solve(&b, 1e-14).unwrap_or_else(|_| nalgebra::DVector::zeros(m));
    let mut c = p0.to_vec();
    for i in 0..m {
        for j in 0..c.len() {
            c[j] += alpha[i] * d[i][j];
        }
    }
    let r = pts.iter().map(|p| dist(p, &c)).fold(0.0, f64::max);
    (c, r)
}

/// Move-to-front Welzl recursion on the first `end` entries of `order`.
fn mtf(pts: &[&[f64]], order: &mut Vec<usize>, end: usize, boundary: &mut Vec<usize>, n: usize) -> (Vec<f64>, f64) {
    let bref: Vec<&[f64]> = boundary.iter().map(|&i| pts[i]).collect();
    let mut ball = if bref.is_empty() { (pts[order[0]].to_vec(), 0.0) } else { circumball(&bref) };
    if boundary.len() == n + 1 {
        return ball;
    }
    let start = if bref.is_empty() { 1 } else { 0 };
    let mut i = start;
    while i < end {
        let p = order[i];
        if dist(pts[p], &ball.0) > ball.1 * (1.0 + 1e-12) + 1e-15 {
            boundary.push(p);
            ball = mtf(pts, order, i, boundary, n);
            boundary.pop();
            let v = order.remove(i);
            order.insert(0, v);
        }
        i += 1;
    }
    ball
}

/// Radius-minimizing dual: maximize Σλᵢ‖pᵢ‖² − ‖Σλᵢpᵢ‖² over the simplex.
pub fn enclosing_ball_dual(points: &[&[f64]]) -> (Vec<f64>, f64) {
    let n = points[0].len();
    let k = points.len();
    let mut cen = vec![0.0; n];
    for p in points {
        for j in 0..n {
            cen[j] += p[j] / k as f64;
        }
    }
    let sh: Vec<Vec<f64>> = points.iter().map(|p| sub(p, &cen)).collect();
    let refs: Vec<&[f64]> = sh.iter().map(|v| v.as_slice()).collect();
    // minimize λᵀGλ − Σλᵢ‖pᵢ‖² = ½λᵀ(2G)λ + cᵀλ
    let c: Vec<f64> = refs.iter().map(|p| -dot_unchecked(p, p)).collect();
    let q = crate::solvers::DenseQ::from_oracle(k, |x, o| {
        for i in 0..k {
            o[i] = 2.0 * (0..k).map(|j| dot_unchecked(refs[i], refs[j]) * x[j]).sum::<f64>();
        }
    });
    let rep = crate::solvers::simplex_qp_dense(&q, &c, &SolverConfig::default().with_tol(1e-14));
    let c0 = crate::geometry::combine(&refs, &rep.argmin);
    let r = refs.iter().map(|p| dist(p, &c0)).fold(0.0, f64::max);
    (c0.iter().zip(&cen).map(|(a, b)| a + b).collect(), r)
}

pub fn jung_ball(points: &[VectorN], cfg: &SolverConfig) -> Result<Ball> {
    let n = points.first().ok_or_else(|| Error::Invalid("jung_ball needs at least one point".into()))?.dim();
    for p in points {
        if p.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
        }
    }
    let refs: Vec<&[f64]> = points.iter().map(|p| p.coords()).collect();
    let (c, r) = if n <= 3 {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.shuffle(&mut crate::rng::seeded(cfg.seed));
        let end = order.len();
        mtf(&refs, &mut order, end, &mut Vec::new(), n)
    } else {
        enclosing_ball_dual(&refs)
    };
    // cover every point exactly
    let r = refs.iter().map(|p| dist(p, &c)).fold(r, f64::max);
    Ball::new(VectorN::new(c)?, r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JungCheck {
    pub diameter: f64,
    pub radius: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn jung_bound_check(points: &[VectorN]) -> Result<JungCheck> {
    if points.len() < 2 {
        return Err(Error::Invalid("jung_bound_check needs at least two points".into()));
    }
    let n = points[0].dim();
    let mut diameter = 0.0f64;
    for i in 0..points.len() {
        for j in 0..i {
            diameter = diameter.max(dist(&points[i], &points[j]));
        }
    }
    let radius = jung_ball(points, &SolverConfig::default())?.radius;
    let bound = diameter * (n as f64 / (2.0 * (n as f64 + 1.0))).sqrt();
    Ok(JungCheck { diameter, radius, bound, holds: radius <= bound + 1e-9 })
}
