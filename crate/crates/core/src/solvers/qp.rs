//! Small dense convex QP: min ½xᵀPx + qᵀx  s.t.  Ax = b, Gx ≤ h.
//!
//! Mehrotra predictor–corrector interior point, followed by an active-set polish that
//! solves the equality-constrained KKT system on the constraints the IPM marks active.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct QpProblem {
    pub p: DMatrix<f64>,
    pub q: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub g: DMatrix<f64>,
    pub h: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: DVector<f64>,
    /// Multipliers of Ax = b.
    pub y: DVector<f64>,
    /// Multipliers of Gx ≤ h.
    pub z: DVector<f64>,
    pub objective: f64,
    pub iters: usize,
    pub converged: bool,
    pub polished: bool,
}

impl QpProblem {
    pub fn new(n: usize) -> Self {
        QpProblem {
            p: DMatrix::zeros(n, n),
            q: DVector::zeros(n),
            a: DMatrix::zeros(0, n),
            b: DVector::zeros(0),
            g: DMatrix::zeros(0, n),
            h: DVector::zeros(0),
        }
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.p * x)) + self.q.dot(x)
    }

    /// Largest constraint violation at x.
    pub fn infeasibility(&self, x: &DVector<f64>) -> f64 {
        let e = (&self.a * x - &self.b).amax();
        let i = (&self.g * x - &self.h).max().max(0.0);
        if self.a.nrows() == 0 { i } else if self.g.nrows() == 0 { e } else { e.max(i) }
    }
}

const MAX_ITERS: usize = 200;

pub fn solve(prob: &QpProblem) -> QpSolution {
    let n = prob.q.len();
    let me = prob.a.nrows();
    let mi = prob.g.nrows();
    let scale = 1.0 + prob.q.amax().max(if me > 0 { prob.b.amax() } else { 0.0 }).max(if mi > 0 { prob.h.amax() } else { 0.0 });

    let amax = |m: &DMatrix<f64>| if m.is_empty() { 0.0 } else { m.amax() };
    let dscale = scale + amax(&prob.p) + amax(&prob.a) + amax(&prob.g);

    // initial point from the D = I system
    let ones = DVector::from_element(mi, 1.0);
    let (mut x, mut y) = Factor::new(prob, &ones)
        .and_then(|f| f.solve(&(-&prob.q), &prob.b, &prob.h))
        .map_or((DVector::zeros(n), DVector::zeros(me)), |(x, y, _)| (x, y));
    let r0 = &prob.h - &prob.g * &x;
    let mut s = r0.map(|v| v.max(1.0));
    let mut z = DVector::from_element(mi, 1.0);

    let mut iters = 0;
    let mut converged = false;
    while iters < MAX_ITERS {
        let rd = &prob.p * &x + &prob.q + prob.a.transpose() * &y + prob.g.transpose() * &z;
        let rp = &prob.a * &x - &prob.b;
        let ri = &prob.g * &x + &s - &prob.h;
        let mu = if mi > 0 { s.dot(&z) / mi as f64 } else { 0.0 };
        let obj = prob.objective(&x);
        let small = |v: &DVector<f64>| v.is_empty() || v.amax() <= 1e-13 * scale;
        let gap = mu * mi as f64;
        let dual_ok = rd.is_empty() || rd.amax() <= 1e-11 * dscale;
        if dual_ok && small(&rp) && small(&ri) && gap <= 1e-14 * (1.0 + obj.abs()) {
            converged = true;
            break;
        }
        // complementarity below roundoff: further steps only amplify KKT error
        if gap <= 1e-22 * (1.0 + obj.abs()) {
            break;
        }
        iters += 1;
        if mi == 0 {
            match Factor::new(prob, &DVector::zeros(0)).and_then(|f| f.solve(&(-&prob.q), &prob.b, &DVector::zeros(0))) {
                Some((xs, ys, _)) => {
                    x = xs;
                    y = ys;
                    converged = true;
                }
                None => {}
            }
            break;
        }
        let d = s.component_div(&z);
        let Some(fact) = Factor::new(prob, &d) else { break };
        let dir = |rc: &DVector<f64>| -> Option<(DVector<f64>, DVector<f64>, DVector<f64>, DVector<f64>)> {
            // G dx − D dz = −ri + rc/z,  ds = −rc/z − D dz
            let rcz = rc.component_div(&z);
            let (dx, dy, dz) = fact.solve(&(-&rd), &(-&rp), &(-&ri + &rcz))?;
            let ds = -rcz - d.component_mul(&dz);
            Some((dx, dy, ds, dz))
        };
        let rc_aff = s.component_mul(&z);
        let Some((_, _, ds_a, dz_a)) = dir(&rc_aff) else { break };
        let a_aff = step_to_boundary(&s, &ds_a).min(step_to_boundary(&z, &dz_a)).min(1.0);
        let mu_aff = (&s + a_aff * &ds_a).dot(&(&z + a_aff * &dz_a)) / mi as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);
        let rc = &rc_aff + ds_a.component_mul(&dz_a) - DVector::from_element(mi, sigma * mu);
        let Some((mut dx, mut dy, mut ds, mut dz)) = dir(&rc) else { break };
        let step = |ds: &DVector<f64>, dz: &DVector<f64>| (0.99 * step_to_boundary(&s, ds).min(step_to_boundary(&z, dz))).min(1.0);
        let mut alpha = step(&ds, &dz);
        let mu_new = (&s + alpha * &ds).dot(&(&z + alpha * &dz)) / mi as f64;
        if mu_new > (1.0 - 0.1 * alpha) * mu {
            // the corrector overshoots on strongly curved problems: fall back to a centred Newton step
            let rc = rc_aff - DVector::from_element(mi, sigma.max(0.1) * mu);
            if let Some(d) = dir(&rc) {
                (dx, dy, ds, dz) = d;
                alpha = step(&ds, &dz);
            }
        }
        x += alpha * dx;
        y += alpha * dy;
        s += alpha * ds;
        z += alpha * dz;
        for v in s.iter_mut().chain(z.iter_mut()) {
            if *v < 1e-300 {
                *v = 1e-300;
            }
        }
    }
    let objective = prob.objective(&x);
    let mut sol = QpSolution { x, y, z, objective, iters, converged, polished: false };
    if mi > 0 {
        polish(prob, &s, &mut sol);
    }
    sol
}

fn step_to_boundary(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    let mut a = f64::INFINITY;
    for i in 0..v.len() {
        if dv[i] < 0.0 {
            a = a.min(-v[i] / dv[i]);
        }
    }
    a
}

/// LU of the augmented KKT matrix [[P, Aᵀ, Gᵀ], [A, 0, 0], [G, 0, −D]] with a small
/// quasi-definite shift, refined against the unshifted matrix.
struct Factor<'a> {
    prob: &'a QpProblem,
    k0: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl<'a> Factor<'a> {
    fn new(prob: &'a QpProblem, d: &DVector<f64>) -> Option<Self> {
        let n = prob.q.len();
        let me = prob.a.nrows();
        let mi = prob.g.nrows();
        let m = n + me + mi;
        let mut k0 = DMatrix::zeros(m, m);
        k0.view_mut((0, 0), (n, n)).copy_from(&prob.p);
        k0.view_mut((n, 0), (me, n)).copy_from(&prob.a);
        k0.view_mut((0, n), (n, me)).copy_from(&prob.a.transpose());
        k0.view_mut((n + me, 0), (mi, n)).copy_from(&prob.g);
        k0.view_mut((0, n + me), (n, mi)).copy_from(&prob.g.transpose());
        for i in 0..mi {
            k0[(n + me + i, n + me + i)] = -d[i];
        }
        let mut kr = k0.clone();
        let amax = |x: &DMatrix<f64>| if x.is_empty() { 0.0 } else { x.amax() };
        let eps = 1e-14 * (1.0 + amax(&prob.p) + amax(&prob.a) + amax(&prob.g));
        for i in 0..m {
            kr[(i, i)] += if i < n { eps } else { -eps };
        }
        let lu = kr.lu();
        Some(Factor { prob, k0, lu })
    }

    fn solve(&self, rx: &DVector<f64>, ry: &DVector<f64>, rz: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        let n = self.prob.q.len();
        let me = self.prob.a.nrows();
        let mi = self.prob.g.nrows();
        let mut rhs = DVector::zeros(n + me + mi);
        rhs.rows_mut(0, n).copy_from(rx);
        rhs.rows_mut(n, me).copy_from(ry);
        rhs.rows_mut(n + me, mi).copy_from(rz);
        let mut sol = self.lu.solve(&rhs)?;
        let floor = 1e-16 * (1.0 + rhs.amax());
        let mut prev = f64::INFINITY;
        for _ in 0..10 {
            let r = &rhs - &self.k0 * &sol;
            let rn = r.amax();
            if !(rn > floor) || rn >= prev {
                break;
            }
            prev = rn;
            sol += self.lu.solve(&r)?;
        }
        if sol.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some((sol.rows(0, n).into_owned(), sol.rows(n, me).into_owned(), sol.rows(n + me, mi).into_owned()))
    }
}

/// Solve the KKT system with the constraints {i : zᵢ > sᵢ} held as equalities.
/// The result replaces the IPM point when it is feasible and no worse.
fn polish(prob: &QpProblem, s: &DVector<f64>, sol: &mut QpSolution) {
    let n = prob.q.len();
    let me = prob.a.nrows();
    let act: Vec<usize> = (0..prob.g.nrows()).filter(|&i| sol.z[i] > s[i]).collect();
    let na = act.len();
    let m = n + me + na;
    let mut k = DMatrix::zeros(m, m);
    k.view_mut((0, 0), (n, n)).copy_from(&prob.p);
    k.view_mut((n, 0), (me, n)).copy_from(&prob.a);
    k.view_mut((0, n), (n, me)).copy_from(&prob.a.transpose());
    for (r, &i) in act.iter().enumerate() {
        for j in 0..n {
            k[(n + me + r, j)] = prob.g[(i, j)];
            k[(j, n + me + r)] = prob.g[(i, j)];
        }
    }
    let mut rhs = DVector::zeros(m);
    rhs.rows_mut(0, n).copy_from(&(-&prob.q));
    rhs.rows_mut(n, me).copy_from(&prob.b);
    for (r, &i) in act.iter().enumerate() {
        rhs[n + me + r] = prob.h[i];
    }
    let delta = 1e-9;
    let mut kr = k.clone();
    for i in 0..m {
        kr[(i, i)] += if i < n { delta } else { -delta };
    }
    let lu = kr.lu();
    let mut v = DVector::zeros(m);
    v.rows_mut(0, n).copy_from(&sol.x);
    for _ in 0..50 {
        let r = &rhs - &k * &v;
        let Some(dv) = lu.solve(&r) else { return };
        v += &dv;
        if dv.amax() <= 1e-16 * (1.0 + v.amax()) {
            break;
        }
    }
    if v.iter().any(|t| !t.is_finite()) {
        return;
    }
    let x = v.rows(0, n).into_owned();
    let scale = 1.0 + prob.h.amax().max(if me > 0 { prob.b.amax() } else { 0.0 });
    let obj = prob.objective(&x);
    let dual_ok = (0..na).all(|r| v[n + me + r] >= -1e-9 * (1.0 + v.amax()));
    if prob.infeasibility(&x) <= 1e-12 * scale && (obj <= sol.objective + 1e-14 * (1.0 + obj.abs()) || dual_ok) {
        sol.x = x;
        sol.y = v.rows(n, me).into_owned();
        let mut z = DVector::zeros(prob.g.nrows());
        for (r, &i) in act.iter().enumerate() {
            z[i] = v[n + me + r].max(0.0);
        }
        sol.z = z;
        sol.objective = obj;
        sol.polished = true;
    }
}
