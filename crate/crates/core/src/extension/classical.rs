use super::{extend_minimax, ExtensionValue, FiniteMapData, Modulus, CONSISTENCY_TOL};
use crate::convex_sets::{project, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::{dist, VectorN};
use crate::solvers::SolverConfig;
use serde::{Deserialize, Serialize};

/// `Lower` is sup(f(a) − ω(‖x − a‖)), the least extension; `Upper` is inf(f(a) + ω(‖x − a‖)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

fn check_modulus(data: &FiniteMapData, w: &Modulus) -> Result<()> {
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            let db = (data.values[i][0] - data.values[j][0]).abs();
            if db > w.eval(dist(&data.points[i], &data.points[j])) + CONSISTENCY_TOL {
                return Err(Error::ModulusViolation { i, j });
            }
        }
    }
    Ok(())
}

fn mcshane_raw(data: &FiniteMapData, col: usize, w: &Modulus, x: &[f64], side: Side) -> f64 {
    let terms = (0..data.len()).map(|i| {
        let t = w.eval(dist(x, &data.points[i]));
        match side {
            Side::Lower => data.values[i][col] - t,
            Side::Upper => data.values[i][col] + t,
        }
    });
    match side {
        Side::Lower => terms.fold(f64::NEG_INFINITY, f64::max),
        Side::Upper => terms.fold(f64::INFINITY, f64::min),
    }
}

pub fn extend_mcshane(data: &FiniteMapData, w: &Modulus, x: &VectorN, side: Side) -> Result<f64> {
    data.scalar()?;
    data.check_query(x)?;
    if !w.is_subadditive() {
        return Err(Error::Invalid("modulus is not subadditive on its grid".into()));
    }
    check_modulus(data, w)?;
    Ok(mcshane_raw(data, 0, w, x, side))
}

/// Lower McShane extension with ω(t) = Lt in each coordinate; √n·L-Lipschitz.
pub fn extend_coordinatewise(data: &FiniteMapData, x: &VectorN) -> Result<VectorN> {
    data.check_query(x)?;
    let w = Modulus::linear(data.lipschitz());
    VectorN::new((0..data.n).map(|j| mcshane_raw(data, j, &w, x, Side::Lower)).collect())
}

/// F(x) = f(p(x, A)) with the minimax extension as f on the convex domain A.
pub fn extend_project_domain(data: &FiniteMapData, domain: &ConvexBody, x: &VectorN, cfg: &SolverConfig) -> Result<ExtensionValue> {
    data.check_query(x)?;
    for (i, a) in data.points.iter().enumerate() {
        let d = dist(a, &project(a, domain)?);
        if d > 1e-9 {
            return Err(Error::Invalid(format!("data point {i} lies {d:e} outside the domain")));
        }
    }
    extend_minimax(data, &project(x, domain)?, cfg)
}

/// τ(t) = 3/2 + t/(2√(1 + t²)), a homeomorphism R → (1, 2).
pub fn tietze_map(t: f64) -> f64 {
    1.5 + t / (2.0 * (1.0 + t * t).sqrt())
}

pub fn tietze_inverse(s: f64) -> f64 {
    let u = s - 1.5;
    2.0 * u / (1.0 - 4.0 * u * u).sqrt()
}

/// Riesz formula inf_a τ(f(a))·d(x, a)/d(x, A), conjugated by τ.
pub fn tietze_extend(data: &FiniteMapData, x: &VectorN) -> Result<f64> {
    data.scalar()?;
    data.check_query(x)?;
    let ds: Vec<f64> = data.points.iter().map(|a| dist(x, a)).collect();
    let (near, dmin) = ds.iter().copied().enumerate().fold((0, f64::INFINITY), |b, (i, d)| if d < b.1 { (i, d) } else { b });
    if dmin <= 1e-12 {
        return Ok(data.values[near][0]);
    }
    let s = (0..data.len()).map(|i| tietze_map(data.values[i][0]) * ds[i] / dmin).fold(f64::INFINITY, f64::min);
    Ok(tietze_inverse(s))
}
