use super::{SolveReport, SolverConfig};

/// Value and gradients of a jointly convex f(y, λ) on R^n × simplex.
pub struct JointEval {
    pub value: f64,
    pub grad_y: Vec<f64>,
    pub grad_lambda: Vec<f64>,
}

/// Combined gradient / Frank–Wolfe descent with Armijo backtracking
/// (factor 0.5, initial step 1.0, c₁ = 1e-4).
///
/// `argmin` is y followed by λ. The residual is ‖∇_y f‖² plus the Frank–Wolfe gap in λ.
pub fn joint_descent(
    f: impl Fn(&[f64], &[f64]) -> JointEval,
    y0: &[f64],
    k: usize,
    cfg: &SolverConfig,
) -> SolveReport {
    let mut y = y0.to_vec();
    let mut lam = vec![1.0 / k as f64; k];
    let mut e = f(&y, &lam);
    let mut res = f64::INFINITY;
    for it in 0..cfg.max_iters {
        let s = argmin(&e.grad_lambda);
        let gl: f64 = e.grad_lambda.iter().zip(&lam).map(|(g, l)| g * l).sum();
        let fw_gap = (gl - e.grad_lambda[s]).max(0.0);
        let gy2: f64 = e.grad_y.iter().map(|g| g * g).sum();
        res = gy2 + fw_gap;
        if res <= cfg.tol {
            return pack(y, lam, e.value, res, it, true);
        }
        // directional derivative along (−∇_y, e_s − λ) is −res
        let mut t = 1.0;
        loop {
            let yt: Vec<f64> = y.iter().zip(&e.grad_y).map(|(a, g)| a - t * g).collect();
            let mut lt: Vec<f64> = lam.iter().map(|l| (1.0 - t) * l).collect();
            lt[s] += t;
            let et = f(&yt, &lt);
            if et.value <= e.value - 1e-4 * t * res {
                y = yt;
                lam = lt;
                e = et;
                break;
            }
            t *= 0.5;
            if t < 1e-20 {
                return pack(y, lam, e.value, res, it, false);
            }
        }
    }
    pack(y, lam, e.value, res, cfg.max_iters, false)
}

fn argmin(g: &[f64]) -> usize {
    let mut s = 0;
    for i in 1..g.len() {
        if g[i] < g[s] {
            s = i;
        }
    }
    s
}

fn pack(mut y: Vec<f64>, lam: Vec<f64>, value: f64, residual: f64, iters: usize, converged: bool) -> SolveReport {
    y.extend(lam);
    SolveReport { argmin: y, value, residual, iters, converged }
}
