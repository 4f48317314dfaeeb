use super::{SolveReport, SolverConfig};
use crate::error::{Error, Result};

/// Golden-section search for a unimodal f on [a, b]; stops when the bracket is ≤ tol·(b − a).
pub fn golden_section(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &SolverConfig) -> Result<SolveReport> {
    if !(a < b) {
        return Err(Error::Invalid(format!("golden_section needs a < b, got [{a}, {b}]")));
    }
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let width = cfg.tol * (b - a);
    let mut iters = 0;
    while hi - lo > width && iters < cfg.max_iters {
        iters += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    let (x, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(SolveReport { argmin: vec![x], value: v, residual: hi - lo, iters, converged: hi - lo <= width })
}
