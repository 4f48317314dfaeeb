//! Frank–Wolfe with away steps on the simplex, plus exact polishing on the support.

use super::{SolveReport, SolverConfig};
use nalgebra::{DMatrix, DVector};

/// Dense symmetric matrix assembled from a linear-operator oracle.
pub struct DenseQ {
    q: Vec<f64>,
    k: usize,
}

impl DenseQ {
    pub fn from_oracle(k: usize, apply: impl Fn(&[f64], &mut [f64])) -> Self {
        let mut q = vec![0.0; k * k];
        let mut e = vec![0.0; k];
        let mut col = vec![0.0; k];
        for j in 0..k {
            e[j] = 1.0;
            apply(&e, &mut col);
            e[j] = 0.0;
            for i in 0..k {
                q[i * k + j] = col[i];
            }
        }
        // symmetrize against oracle roundoff
        for i in 0..k {
            for j in 0..i {
                let s = 0.5 * (q[i * k + j] + q[j * k + i]);
                q[i * k + j] = s;
                q[j * k + i] = s;
            }
        }
        DenseQ { q, k }
    }

    /// Gram matrix of the given vectors.
    pub fn gram(vs: &[&[f64]]) -> Self {
        let k = vs.len();
        let mut q = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..=i {
                let d = crate::geometry::dot_unchecked(vs[i], vs[j]);
                q[i * k + j] = d;
                q[j * k + i] = d;
            }
        }
        DenseQ { q, k }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.k + j]
    }

    fn mul(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.k {
            let row = &self.q[i * self.k..(i + 1) * self.k];
            let mut s = 0.0;
            for j in 0..self.k {
                s += row[j] * x[j];
            }
            out[i] = s;
        }
    }
}

/// Minimize ½λᵀQλ + cᵀλ over the probability simplex.
///
/// `residual` is the Frank–Wolfe gap ∇f(λ)ᵀλ − min ∇f(λ).
pub fn minimize_quadratic_over_simplex(
    q_apply: impl Fn(&[f64], &mut [f64]),
    c: &[f64],
    cfg: &SolverConfig,
) -> SolveReport {
    let q = DenseQ::from_oracle(c.len(), q_apply);
    solve_dense(&q, c, cfg)
}

fn objective(q: &DenseQ, c: &[f64], l: &[f64], g: &mut [f64]) -> f64 {
    q.mul(l, g);
    let mut v = 0.0;
    for i in 0..l.len() {
        v += l[i] * (0.5 * g[i] + c[i]);
        g[i] += c[i];
    }
    v
}

pub fn solve_dense(q: &DenseQ, c: &[f64], cfg: &SolverConfig) -> SolveReport {
    let k = c.len();
    assert!(k >= 1, "empty simplex");
    // start at the best vertex
    let mut best = 0;
    for i in 1..k {
        if 0.5 * q.at(i, i) + c[i] < 0.5 * q.at(best, best) + c[best] {
            best = i;
        }
    }
    let mut lam = vec![0.0; k];
    lam[best] = 1.0;
    let mut g = vec![0.0; k];
    let mut value = objective(q, c, &lam, &mut g);
    let mut gap = f64::INFINITY;
    let mut iters = 0;
    let mut d = vec![0.0; k];
    let mut qd = vec![0.0; k];
    let mut stalled = 0;
    while iters < cfg.max_iters {
        let (s, gmin) = argmin(&g);
        let gl: f64 = (0..k).map(|i| g[i] * lam[i]).sum();
        gap = (gl - gmin).max(0.0);
        if gap <= cfg.tol * (1.0 + value.abs()) {
            return SolveReport { argmin: lam, value, residual: gap, iters, converged: true };
        }
        iters += 1;
        // away vertex among the support
        let mut v = s;
        let mut gv = f64::NEG_INFINITY;
        for i in 0..k {
            if lam[i] > 0.0 && g[i] > gv {
                gv = g[i];
                v = i;
            }
        }
        let gmax;
        if gl - gmin >= gv - gl || lam[v] >= 1.0 {
            for i in 0..k {
                d[i] = -lam[i];
            }
            d[s] += 1.0;
            gmax = 1.0;
        } else {
            for i in 0..k {
                d[i] = lam[i];
            }
            d[v] -= 1.0;
            gmax = lam[v] / (1.0 - lam[v]);
        }
        line_step(q, &g, &mut lam, &d, &mut qd, gmax);
        if v != s && d[v] < 0.0 && lam[v] < 1e-15 {
            lam[v] = 0.0;
        }
        let before = value;
        value = objective(q, c, &lam, &mut g);
        if iters % polish_period(k) == 0 {
            if let Some(nv) = polish(q, c, &mut lam, &mut g) {
                value = nv;
            }
        }
        // no progress at working precision: the gap is roundoff
        if value >= before - 1e-15 * (1.0 + before.abs()) {
            stalled += 1;
            if stalled >= 3 {
                let (_, gmin) = argmin(&g);
                let gl: f64 = (0..k).map(|i| g[i] * lam[i]).sum();
                gap = (gl - gmin).max(0.0);
                let ok = gap <= cfg.tol * (1.0 + value.abs());
                return SolveReport { argmin: lam, value, residual: gap, iters, converged: ok };
            }
        } else {
            stalled = 0;
        }
    }
    SolveReport { argmin: lam, value, residual: gap, iters, converged: false }
}

fn polish_period(k: usize) -> usize {
    if k <= 64 {
        1
    } else {
        10
    }
}

fn argmin(g: &[f64]) -> (usize, f64) {
    let mut s = 0;
    for i in 1..g.len() {
        if g[i] < g[s] {
            s = i;
        }
    }
    (s, g[s])
}

/// Exact line search along d, step clipped to [0, gmax].
fn line_step(q: &DenseQ, g: &[f64], lam: &mut [f64], d: &[f64], qd: &mut [f64], gmax: f64) {
    let k = lam.len();
    q.mul(d, qd);
    let curv: f64 = (0..k).map(|i| d[i] * qd[i]).sum();
    let slope: f64 = (0..k).map(|i| g[i] * d[i]).sum();
    let step = if curv > 0.0 { (-slope / curv).clamp(0.0, gmax) } else { gmax };
    if step == gmax {
        for i in 0..k {
            lam[i] += gmax * d[i];
        }
    } else {
        for i in 0..k {
            lam[i] += step * d[i];
        }
    }
    for x in lam.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

/// Minimize over the affine hull of the current support, then move toward that point
/// as far as the simplex allows. Returns the new value on improvement.
fn polish(q: &DenseQ, c: &[f64], lam: &mut Vec<f64>, g: &mut [f64]) -> Option<f64> {
    let k = lam.len();
    let sup: Vec<usize> = (0..k).filter(|&i| lam[i] > 0.0).collect();
    let m = sup.len();
    if m < 2 {
        return None;
    }
    let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
    let mut rhs = DVector::<f64>::zeros(m + 1);
    for (a, &i) in sup.iter().enumerate() {
        for (b, &j) in sup.iter().enumerate() {
            kkt[(a, b)] = q.at(i, j);
        }
        kkt[(a, m)] = 1.0;
        kkt[(m, a)] = 1.0;
        rhs[a] = -c[i];
    }
    rhs[m] = 1.0;
    let sol = kkt.svd(true, true).solve(&rhs, 1e-13).ok()?;
    let mut d = vec![0.0; k];
    let mut gmax = 1.0f64;
    for (a, &i) in sup.iter().enumerate() {
        d[i] = sol[a] - lam[i];
        if d[i] < 0.0 {
            gmax = gmax.min(lam[i] / -d[i]);
        }
    }
    let old = objective(q, c, lam, g);
    let mut trial = lam.clone();
    let mut qd = vec![0.0; k];
    line_step(q, g, &mut trial, &d, &mut qd, gmax);
    let s: f64 = trial.iter().sum();
    for x in trial.iter_mut() {
        *x /= s;
    }
    let mut g2 = vec![0.0; k];
    let nv = objective(q, c, &trial, &mut g2);
    if nv <= old {
        // snap ratio-test casualties to zero
        for x in trial.iter_mut() {
            if *x < 1e-15 {
                *x = 0.0;
            }
        }
        let nv = objective(q, c, &trial, g);
        *lam = trial;
        Some(nv)
    } else {
        objective(q, c, lam, g);
        None
    }
}

/// Nearest point of conv(vs) to x: returns (weights, point, squared distance, report).
pub fn nearest_in_hull(vs: &[&[f64]], x: &[f64], cfg: &SolverConfig) -> (Vec<f64>, Vec<f64>, SolveReport) {
    // ‖Vλ − x‖² = λᵀGλ − 2(Vᵀx)ᵀλ + ‖x‖²; shift by x for conditioning
    let shifted: Vec<Vec<f64>> = vs.iter().map(|v| crate::geometry::sub(v, x)).collect();
    let refs: Vec<&[f64]> = shifted.iter().map(|v| v.as_slice()).collect();
    let q = DenseQ::gram(&refs);
    let c = vec![0.0; vs.len()];
    let mut rep = solve_dense(&q, &c, cfg);
    let p = crate::geometry::combine(vs, &rep.argmin);
    rep.value *= 2.0;
    (rep.argmin.clone(), p, rep)
}
