use super::{conjugate, delta_fn, eval, reflect, sum, ConvexFunctionExpr, ExtendedReal};
use crate::error::{Error, Result};
use crate::geometry::{dot, VectorN};
use crate::solvers::SolverConfig;
use serde::Serialize;

fn finite_at(f: &ConvexFunctionExpr, x: &VectorN, cfg: &SolverConfig) -> Result<f64> {
    eval(f, x, cfg)?.finite().ok_or_else(|| Error::Invalid(format!("sample {:?} outside dom {}", x.coords(), f.label())))
}

/// max |f**(x) − f(x)| over the samples.
pub fn biconjugate_check(f: &ConvexFunctionExpr, samples: &[VectorN], search_box: f64, cfg: &SolverConfig) -> Result<f64> {
    let ff = conjugate(conjugate(f.clone(), search_box), search_box);
    let mut gap: f64 = 0.0;
    for x in samples {
        let a = finite_at(f, x, cfg)?;
        let b = finite_at(&ff, x, cfg)?;
        gap = gap.max((a - b).abs());
    }
    Ok(gap)
}

/// max |δ*(x*, y*) − δ(−y*, −x*)|; samples are stacked (x*, y*) in R^{2n}.
pub fn delta_conjugate_identity_check(
    a: &VectorN,
    b: &VectorN,
    samples: &[VectorN],
    search_box: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let n = a.dim();
    let d = delta_fn(a, b)?;
    let dc = conjugate(d.clone(), search_box);
    let mut gap: f64 = 0.0;
    for s in samples {
        if s.dim() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: s.dim() });
        }
        let swapped = VectorN::new(s[n..].iter().chain(&s[..n]).map(|v| -v).collect())?;
        let lhs = finite_at(&dc, s, cfg)?;
        let rhs = finite_at(&d, &swapped, cfg)?;
        gap = gap.max((lhs - rhs).abs());
    }
    Ok(gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityReport {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// inf(f − g) against max(g* − f*) for concave g, passed as h = −g.
pub fn fenchel_duality_solve(
    f: &ConvexFunctionExpr,
    h: &ConvexFunctionExpr,
    search_box: f64,
    cfg: &SolverConfig,
) -> Result<DualityReport> {
    let n = f.validate()?;
    if h.validate()? != n {
        return Err(Error::DimensionMismatch { expected: n, got: h.dim() });
    }
    let zero = VectorN::zeros(n);
    let unbounded = |what: &str| Error::BoxExhausted { node: format!("fenchel {what}") };
    // inf F = −F*(0)
    let primal_fn = conjugate(sum(vec![f.clone(), h.clone()], vec![1.0, 1.0])?, search_box);
    let primal = match eval(&primal_fn, &zero, cfg)? {
        ExtendedReal::Finite(v) => -v,
        ExtendedReal::PosInf => return Err(unbounded("primal")),
    };
    // g*(x*) = −h*(−x*)
    let dual_obj = sum(vec![conjugate(f.clone(), search_box), conjugate(reflect(h), search_box)], vec![1.0, 1.0])?;
    let dual = match eval(&conjugate(dual_obj, search_box), &zero, cfg)? {
        ExtendedReal::Finite(v) => v,
        ExtendedReal::PosInf => return Err(unbounded("dual")),
    };
    Ok(DualityReport { primal, dual, gap: primal - dual })
}

/// min f(x) + f*(x*) − ⟨x, x*⟩ over pairs where both terms are finite.
pub fn fenchel_young_check(
    f: &ConvexFunctionExpr,
    pairs: &[(VectorN, VectorN)],
    search_box: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let fc = conjugate(f.clone(), search_box);
    let mut slack = f64::INFINITY;
    for (x, xs) in pairs {
        let (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) = (eval(f, x, cfg)?, eval(&fc, xs, cfg)?) else {
            continue;
        };
        slack = slack.min(a + b - dot(x, xs)?);
    }
    Ok(slack)
}
