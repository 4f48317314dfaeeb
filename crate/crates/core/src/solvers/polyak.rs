use super::{SolveReport, SolverConfig};

/// Subgradient descent with Polyak steps toward a known attainable target.
///
/// Stops as soon as f(x) ≤ target + tol. A vanishing subgradient above the target means
/// the target is not attainable; the run stops unconverged.
pub fn polyak_subgradient(
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
    target: f64,
    x0: &[f64],
    cfg: &SolverConfig,
) -> SolveReport {
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut best = (x.clone(), fx);
    for it in 0..cfg.max_iters {
        if fx <= target + cfg.tol {
            return SolveReport { argmin: x, value: fx, residual: (fx - target).max(0.0), iters: it, converged: true };
        }
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if gg < 1e-28 {
            break;
        }
        let step = (fx - target) / gg;
        for i in 0..x.len() {
            x[i] -= step * g[i];
        }
        (fx, g) = f(&x);
        if fx < best.1 {
            best = (x.clone(), fx);
        }
    }
    if fx <= target + cfg.tol {
        return SolveReport { argmin: x, value: fx, residual: (fx - target).max(0.0), iters: cfg.max_iters, converged: true };
    }
    SolveReport { argmin: best.0, value: best.1, residual: (best.1 - target).max(0.0), iters: cfg.max_iters, converged: false }
}
