use super::{ConvexFunctionExpr as E, ExtendedReal};
use crate::convex_sets::{project_raw, support, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::{dist, dot_unchecked, norm, sub, VectorN};
use crate::solvers::qp::{self, QpProblem};
use crate::solvers::{minimize_over_box, nearest_in_hull, OracleValue, SolverConfig};
use nalgebra::{DMatrix, DVector};
use std::cell::RefCell;

pub fn eval(f: &ConvexFunctionExpr, x: &VectorN, cfg: &SolverConfig) -> Result<ExtendedReal> {
    let n = f.validate()?;
    if x.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.dim() });
    }
    Ok(match oracle(f, x, cfg)? {
        OracleValue::Finite { value, .. } => ExtendedReal::Finite(value),
        OracleValue::Infinite { .. } => ExtendedReal::PosInf,
    })
}

use super::ConvexFunctionExpr;

fn finite(value: f64, subgrad: Vec<f64>) -> OracleValue {
    OracleValue::Finite { value, subgrad }
}

fn infinite(sep: Option<Vec<f64>>) -> OracleValue {
    OracleValue::Infinite { separator: sep }
}

/// Value and subgradient, or +∞ with a separating direction when one is known.
pub fn oracle(f: &ConvexFunctionExpr, x: &[f64], cfg: &SolverConfig) -> Result<OracleValue> {
    Ok(match f {
        E::Quadratic { .. } => finite(0.5 * dot_unchecked(x, x), x.to_vec()),
        E::Kappa { n } => {
            let d = sub(&x[..*n], &x[*n..]);
            let g: Vec<f64> = d.iter().copied().chain(d.iter().map(|v| -v)).collect();
            finite(0.5 * dot_unchecked(&d, &d), g)
        }
        E::Delta { n } => {
            let s: Vec<f64> = (0..*n).map(|i| x[i] + x[n + i]).collect();
            let g: Vec<f64> = s.iter().chain(s.iter()).copied().collect();
            finite(0.5 * dot_unchecked(&s, &s), g)
        }
        E::MaxAffine { slopes, offsets } => {
            let mut best = 0;
            let mut bv = f64::NEG_INFINITY;
            for i in 0..slopes.len() {
                let v = dot_unchecked(&slopes[i], x) - offsets[i];
                if v > bv {
                    bv = v;
                    best = i;
                }
            }
            finite(bv, slopes[best].to_vec())
        }
        E::Indicator { body } => indicator_oracle(body, x),
        E::Sum { children, coeffs } => {
            let mut value = 0.0;
            let mut g = vec![0.0; x.len()];
            for (c, k) in children.iter().zip(coeffs) {
                match oracle(c, x, cfg)? {
                    OracleValue::Finite { value: v, subgrad } => {
                        value += k * v;
                        for j in 0..g.len() {
                            g[j] += k * subgrad[j];
                        }
                    }
                    inf => return Ok(inf),
                }
            }
            finite(value, g)
        }
        E::Scale { lambda, child } => match oracle(child, x, cfg)? {
            OracleValue::Finite { value, subgrad } => finite(lambda * value, subgrad.iter().map(|v| lambda * v).collect()),
            inf => inf,
        },
        E::EpiScale { lambda, child } => {
            let xs: Vec<f64> = x.iter().map(|v| v / lambda).collect();
            match oracle(child, &xs, cfg)? {
                OracleValue::Finite { value, subgrad } => finite(lambda * value, subgrad),
                inf => inf,
            }
        }
        E::Translate { a, astar, alpha, child } => match oracle(child, &sub(x, a), cfg)? {
            OracleValue::Finite { value, subgrad } => {
                let g = subgrad.iter().zip(astar.iter()).map(|(u, v)| u + v).collect();
                finite(value + dot_unchecked(x, astar) + alpha, g)
            }
            inf => inf,
        },
        E::Conjugate { child, search_box } => conjugate_oracle(child, *search_box, x, cfg)?,
        E::InfConv { left, right, search_box } => inf_conv_oracle(left, right, *search_box, x, cfg)?,
        E::ProxAvg { left, right, search_box } => prox_avg_oracle(left, right, *search_box, x, cfg)?,
    })
}

fn indicator_oracle(body: &ConvexBody, x: &[f64]) -> OracleValue {
    let inside = match body {
        ConvexBody::Ball(b) => dist(x, &b.center) <= b.radius + 1e-12 * (1.0 + b.radius),
        ConvexBody::Polytope(_) => dist(x, &project_raw(x, body)) <= 1e-9,
    };
    if inside {
        return finite(0.0, vec![0.0; x.len()]);
    }
    let p = project_raw(x, body);
    infinite(Some(sub(x, &p)))
}

/// Affine parametrization o + B t of a structured domain; `extent` bounds ‖t‖ when the domain is bounded.
#[derive(Debug, Clone)]
struct Hull {
    origin: Vec<f64>,
    basis: Vec<Vec<f64>>,
    extent: Option<f64>,
}

impl Hull {
    fn point(&self, t: &[f64]) -> Vec<f64> {
        let mut p = self.origin.clone();
        for (b, &tj) in self.basis.iter().zip(t) {
            for i in 0..p.len() {
                p[i] += tj * b[i];
            }
        }
        p
    }

    fn pull(&self, g: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot_unchecked(b, g)).collect()
    }

    fn map(&self, scale: f64, shift: &[f64]) -> Hull {
        Hull {
            origin: self.origin.iter().zip(shift).map(|(o, s)| scale * o + s).collect(),
            basis: self.basis.clone(),
            extent: self.extent.map(|e| e * scale.abs()),
        }
    }
}

/// Affine hull (orthonormal basis) of a point set with its radius about the centroid.
fn hull_of(points: &[&[f64]], keep_full: bool) -> Option<Hull> {
    let d = points[0].len();
    let k = points.len();
    let mut o = vec![0.0; d];
    for p in points {
        for i in 0..d {
            o[i] += p[i] / k as f64;
        }
    }
    let extent = points.iter().map(|p| dist(p, &o)).fold(0.0, f64::max);
    let m = DMatrix::from_fn(d, k, |i, j| points[j][i] - o[i]);
    let svd = m.svd(true, false);
    let u = svd.u?;
    let smax = svd.singular_values.max();
    let basis: Vec<Vec<f64>> = (0..svd.singular_values.len())
        .filter(|&j| svd.singular_values[j] > 1e-12 * smax.max(1.0))
        .map(|j| u.column(j).iter().copied().collect())
        .collect();
    if basis.len() == d && !keep_full {
        return None;
    }
    Some(Hull { origin: o, basis, extent: Some(extent) })
}

fn identity_hull(center: &[f64], extent: f64) -> Hull {
    let d = center.len();
    let basis = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    Hull { origin: center.to_vec(), basis, extent: Some(extent) }
}

/// Known structure of dom f: a lower-dimensional affine hull, or a bounded body.
fn domain_hull(f: &ConvexFunctionExpr) -> Option<Hull> {
    match f {
        E::Indicator { body: ConvexBody::Ball(b) } => Some(identity_hull(&b.center, b.radius)),
        E::Indicator { body: ConvexBody::Polytope(p) } => {
            let vs: Vec<&[f64]> = p.vertices().iter().map(|v| v.coords()).collect();
            hull_of(&vs, true)
        }
        E::Conjugate { child, .. } => match child.as_ref() {
            E::MaxAffine { slopes, .. } => {
                let vs: Vec<&[f64]> = slopes.iter().map(|v| v.coords()).collect();
                hull_of(&vs, true)
            }
            _ => None,
        },
        E::Translate { a, child, .. } => domain_hull(child).map(|h| h.map(1.0, a)),
        E::Scale { child, .. } => domain_hull(child),
        E::EpiScale { lambda, child } => domain_hull(child).map(|h| h.map(*lambda, &vec![0.0; h.origin.len()])),
        E::Sum { children, .. } => children.iter().find_map(domain_hull),
        _ => None,
    }
}

enum Opt {
    Finite { x: Vec<f64>, value: f64 },
    Unbounded { x: Vec<f64> },
    Empty,
}

const IMPROVE: f64 = 1e-3;
const EDGE: f64 = 1e-3;

/// Minimize a convex oracle over a structured domain or the box [−r, r]^d, doubling the box
/// twice when the minimizer sits on its boundary. Unbounded means both doublings improved by > 1e-3.
fn optimize(
    d: usize,
    r0: f64,
    hull: Option<&Hull>,
    obj: impl Fn(&[f64]) -> Result<OracleValue>,
    cfg: &SolverConfig,
) -> Result<Opt> {
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let tol = 0.1 * cfg.tol;
    let wrapped = |t: &[f64], h: Option<&Hull>| -> OracleValue {
        let x = match h {
            Some(h) => h.point(t),
            None => t.to_vec(),
        };
        match obj(&x) {
            Ok(OracleValue::Finite { value, subgrad }) => {
                let g = match h {
                    Some(h) => h.pull(&subgrad),
                    None => subgrad,
                };
                OracleValue::Finite { value, subgrad: g }
            }
            Ok(OracleValue::Infinite { separator }) => OracleValue::Infinite {
                separator: separator.map(|s| match h {
                    Some(h) => h.pull(&s),
                    None => s,
                }),
            },
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                OracleValue::Infinite { separator: None }
            }
        }
    };
    if let Some(h) = hull {
        let r = h.basis.len();
        if r == 0 {
            return match wrapped(&[], Some(h)) {
                _ if err.borrow().is_some() => Err(err.into_inner().unwrap()),
                OracleValue::Finite { value, .. } => Ok(Opt::Finite { x: h.origin.clone(), value }),
                _ => Ok(Opt::Empty),
            };
        }
        if let Some(e) = h.extent {
            let w = 1.01 * e + 1e-9;
            let lo = vec![-w; r];
            let hi = vec![w; r];
            let rep = minimize_over_box(|t| wrapped(t, Some(h)), &lo, &hi, tol, cfg);
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            return Ok(match rep.x {
                Some(t) => Opt::Finite { x: h.point(&t), value: rep.value },
                None => Opt::Empty,
            });
        }
    }
    let dim = hull.map_or(d, |h| h.basis.len());
    let mut prev: Option<f64> = None;
    let mut last = None;
    for round in 0..3 {
        let r = r0 * f64::powi(2.0, round);
        let lo = vec![-r; dim];
        let hi = vec![r; dim];
        let rep = minimize_over_box(|t| wrapped(t, hull), &lo, &hi, tol, cfg);
        if let Some(e) = err.borrow_mut().take() {
            return Err(e);
        }
        let Some(t) = rep.x.clone() else { continue };
        let x = match hull {
            Some(h) => h.point(&t),
            None => t.clone(),
        };
        if !rep.touches_boundary(&lo, &hi, EDGE) {
            return Ok(Opt::Finite { x, value: rep.value });
        }
        if let Some(p) = prev {
            if p - rep.value <= IMPROVE {
                return Ok(Opt::Finite { x, value: rep.value });
            }
        }
        prev = Some(rep.value);
        last = Some(x);
    }
    Ok(match last {
        Some(x) => Opt::Unbounded { x },
        None => Opt::Empty,
    })
}

fn conjugate_oracle(child: &ConvexFunctionExpr, r0: f64, y: &[f64], cfg: &SolverConfig) -> Result<OracleValue> {
    match child {
        E::MaxAffine { slopes, offsets } => polyhedral_conjugate(slopes, offsets, y),
        E::Indicator { body } => {
            let (v, arg) = support(body, y);
            Ok(finite(v, arg))
        }
        _ => {
            let hull = domain_hull(child);
            let obj = |x: &[f64]| -> Result<OracleValue> {
                Ok(match oracle(child, x, cfg)? {
                    OracleValue::Finite { value, subgrad } => {
                        finite(value - dot_unchecked(x, y), subgrad.iter().zip(y).map(|(g, v)| g - v).collect())
                    }
                    inf => inf,
                })
            };
            match optimize(y.len(), r0, hull.as_ref(), obj, cfg)? {
                Opt::Finite { x, value } => Ok(finite(-value, x)),
                Opt::Unbounded { x } => {
                    let nx = norm(&x);
                    Ok(infinite(if nx > 0.0 { Some(x.iter().map(|v| v / nx).collect()) } else { None }))
                }
                Opt::Empty => Err(Error::BoxExhausted { node: format!("conjugate (no finite point of {} in box)", child.label()) }),
            }
        }
    }
}

/// f*(y) = min{Σλᵢoᵢ : Σλᵢsᵢ = y, λ ∈ simplex}; +∞ when y is more than 1e-6 from conv{sᵢ}.
fn polyhedral_conjugate(slopes: &[VectorN], offsets: &[f64], y: &[f64]) -> Result<OracleValue> {
    let vs: Vec<&[f64]> = slopes.iter().map(|s| s.coords()).collect();
    let (_, p, _) = nearest_in_hull(&vs, y, &SolverConfig::default().with_tol(1e-14));
    let gap = dist(&p, y);
    if gap > 1e-6 {
        return Ok(infinite(Some(sub(y, &p))));
    }
    let k = slopes.len();
    let hull = hull_of(&vs, true).expect("non-empty slopes");
    let r = hull.basis.len();
    let mut prob = QpProblem::new(k);
    prob.q = DVector::from_column_slice(offsets);
    let mut a = DMatrix::zeros(r + 1, k);
    let mut b = DVector::zeros(r + 1);
    let target = hull.pull(&sub(&p, &hull.origin));
    for j in 0..k {
        let c = hull.pull(&sub(&vs[j], &hull.origin));
        for i in 0..r {
            a[(i, j)] = c[i];
        }
        a[(r, j)] = 1.0;
    }
    for i in 0..r {
        b[i] = target[i];
    }
    b[r] = 1.0;
    prob.a = a;
    prob.b = b;
    prob.g = -DMatrix::identity(k, k);
    prob.h = DVector::zeros(k);
    let sol = qp::solve(&prob);
    if !sol.converged && !sol.polished {
        return Err(Error::NonConvergence("polyhedral conjugate LP".into()));
    }
    // d(value)/d(target) = −ν, mapped back through the hull basis
    let mut g = vec![0.0; y.len()];
    for i in 0..r {
        for j in 0..y.len() {
            g[j] -= sol.y[i] * hull.basis[i][j];
        }
    }
    Ok(finite(sol.objective, g))
}

fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

fn inf_conv_oracle(f: &ConvexFunctionExpr, g: &ConvexFunctionExpr, r0: f64, x: &[f64], cfg: &SolverConfig) -> Result<OracleValue> {
    // f□g = g□f: put the structured side first
    let (f, g) = if domain_hull(f).is_none() && domain_hull(g).is_some() { (g, f) } else { (f, g) };
    let hull = domain_hull(f);
    let obj = |y: &[f64]| -> Result<OracleValue> {
        let fy = oracle(f, y, cfg)?;
        let OracleValue::Finite { value: a, subgrad: ga } = fy else { return Ok(fy) };
        let z = sub(x, y);
        Ok(match oracle(g, &z, cfg)? {
            OracleValue::Finite { value: b, subgrad: gb } => finite(a + b, sub(&ga, &gb)),
            OracleValue::Infinite { separator } => infinite(separator.map(|s| neg(&s))),
        })
    };
    match optimize(x.len(), r0, hull.as_ref(), obj, cfg)? {
        Opt::Finite { x: y, value } => {
            let sg = match oracle(g, &sub(x, &y), cfg)? {
                OracleValue::Finite { subgrad, .. } => subgrad,
                _ => match oracle(f, &y, cfg)? {
                    OracleValue::Finite { subgrad, .. } => subgrad,
                    _ => vec![0.0; x.len()],
                },
            };
            Ok(finite(value, sg))
        }
        Opt::Unbounded { .. } => Err(Error::BoxExhausted { node: "inf_conv".into() }),
        Opt::Empty => Ok(infinite(None)),
    }
}

/// ψ(x) = min_y ½f(2y) + ½g(2(x − y)) + ½‖2y − x‖².
fn prox_avg_oracle(f: &ConvexFunctionExpr, g: &ConvexFunctionExpr, r0: f64, x: &[f64], cfg: &SolverConfig) -> Result<OracleValue> {
    let n = x.len();
    let half: Vec<f64> = vec![0.0; n];
    let hull = domain_hull(f).map(|h| h.map(0.5, &half));
    let obj = |y: &[f64]| -> Result<OracleValue> {
        let u: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
        let fu = oracle(f, &u, cfg)?;
        let OracleValue::Finite { value: a, subgrad: ga } = fu else { return Ok(fu) };
        let w: Vec<f64> = (0..n).map(|i| 2.0 * (x[i] - y[i])).collect();
        let gw = oracle(g, &w, cfg)?;
        let OracleValue::Finite { value: b, subgrad: gb } = gw else {
            let OracleValue::Infinite { separator } = gw else { unreachable!() };
            return Ok(infinite(separator.map(|s| neg(&s))));
        };
        let r: Vec<f64> = (0..n).map(|i| 2.0 * y[i] - x[i]).collect();
        let grad = (0..n).map(|i| ga[i] - gb[i] + 2.0 * r[i]).collect();
        Ok(finite(0.5 * a + 0.5 * b + 0.5 * dot_unchecked(&r, &r), grad))
    };
    match optimize(n, r0, hull.as_ref(), obj, cfg)? {
        Opt::Finite { x: y, value } => {
            let w: Vec<f64> = (0..n).map(|i| 2.0 * (x[i] - y[i])).collect();
            let gb = match oracle(g, &w, cfg)? {
                OracleValue::Finite { subgrad, .. } => subgrad,
                _ => vec![0.0; n],
            };
            Ok(finite(value, (0..n).map(|i| gb[i] + x[i] - 2.0 * y[i]).collect()))
        }
        Opt::Unbounded { .. } => Err(Error::BoxExhausted { node: "prox_avg".into() }),
        Opt::Empty => Ok(infinite(None)),
    }
}
