//! Cutting-plane minimization of convex oracles over an axis-aligned box:
//! bisection on the subgradient sign in 1-D, central-cut ellipsoid otherwise.

use super::SolverConfig;

/// Answer of a convex oracle at a point.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleValue {
    Finite { value: f64, subgrad: Vec<f64> },
    /// Outside the domain. A separator u means the domain lies in {z : ⟨u, z − x⟩ ≤ 0}.
    Infinite { separator: Option<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutReport {
    /// Best finite point, if any was found.
    pub x: Option<Vec<f64>>,
    pub value: f64,
    /// Certified lower bound on the minimum over the box.
    pub lower_bound: f64,
    pub iters: usize,
    pub converged: bool,
}

impl CutReport {
    /// True when the best point is within `frac` of the box width of some face.
    pub fn touches_boundary(&self, lo: &[f64], hi: &[f64], frac: f64) -> bool {
        match &self.x {
            None => true,
            Some(x) => (0..x.len()).any(|i| {
                let w = (hi[i] - lo[i]) * frac;
                x[i] - lo[i] <= w || hi[i] - x[i] <= w
            }),
        }
    }
}

pub fn minimize_over_box(
    oracle: impl Fn(&[f64]) -> OracleValue,
    lo: &[f64],
    hi: &[f64],
    tol: f64,
    cfg: &SolverConfig,
) -> CutReport {
    assert_eq!(lo.len(), hi.len());
    if lo.len() == 1 {
        bisect(oracle, lo[0], hi[0], tol, cfg)
    } else {
        ellipsoid(oracle, lo, hi, tol, cfg)
    }
}

fn bisect(oracle: impl Fn(&[f64]) -> OracleValue, lo: f64, hi: f64, tol: f64, cfg: &SolverConfig) -> CutReport {
    let (mut a, mut b) = (lo, hi);
    let mut best: Option<(f64, f64)> = None;
    // supporting lines (t, f(t), slope) on each side of the minimizer
    let mut left: Option<(f64, f64, f64)> = None;
    let mut right: Option<(f64, f64, f64)> = None;
    let mut lower = f64::NEG_INFINITY;
    let probe = |t: f64, best: &mut Option<(f64, f64)>| -> Option<(Option<f64>, f64)> {
        match oracle(&[t]) {
            OracleValue::Finite { value, subgrad } => {
                if best.map_or(true, |(_, v)| value < v) {
                    *best = Some((t, value));
                }
                Some((Some(value), subgrad[0]))
            }
            OracleValue::Infinite { separator } => separator.map(|s| (None, s[0])),
        }
    };
    let span = (hi - lo).max(1e-300);
    let mut iters = 0;
    while iters < cfg.max_iters && b - a > 1e-13 * span {
        iters += 1;
        let m = 0.5 * (a + b);
        match probe(m, &mut best) {
            Some((v, g)) if g > 0.0 => {
                if let Some(v) = v {
                    right = Some((m, v, g));
                }
                b = m;
            }
            Some((v, g)) if g < 0.0 => {
                if let Some(v) = v {
                    left = Some((m, v, g));
                }
                a = m;
            }
            Some((Some(v), _)) => {
                lower = v;
                break;
            }
            _ => match best {
                Some((t, _)) if t < m => b = m,
                _ => a = m,
            },
        }
        if let Some(lb) = tangent_bound(left, right, a, b) {
            lower = lower.max(lb);
        }
        if let Some((_, v)) = best {
            if v - lower <= tol {
                break;
            }
        }
    }
    for t in [a, b] {
        if let Some((Some(v), g)) = probe(t, &mut best) {
            // a supporting line at a box end bounds the other side
            if t == lo && g >= 0.0 || t == hi && g <= 0.0 {
                lower = lower.max(v);
            }
        }
    }
    let value = best.map(|(_, v)| v).unwrap_or(f64::INFINITY);
    if b - a <= 1e-13 * span {
        lower = lower.max(value - 1e-13 * span * slope_scale(left, right));
    }
    CutReport { x: best.map(|(t, _)| vec![t]), value, lower_bound: lower.min(value), iters, converged: best.is_some() }
}

fn slope_scale(left: Option<(f64, f64, f64)>, right: Option<(f64, f64, f64)>) -> f64 {
    let l = left.map_or(0.0, |x| x.2.abs());
    let r = right.map_or(0.0, |x| x.2.abs());
    l.max(r)
}

/// Lower bound on [a, b] from supporting lines at the two ends.
fn tangent_bound(left: Option<(f64, f64, f64)>, right: Option<(f64, f64, f64)>, a: f64, b: f64) -> Option<f64> {
    let (tl, vl, gl) = left?;
    let (tr, vr, gr) = right?;
    // intersection of v_l + g_l (t − t_l) and v_r + g_r (t − t_r) with g_l < 0 < g_r
    let t = ((vr - gr * tr) - (vl - gl * tl)) / (gl - gr);
    let t = t.clamp(a, b);
    Some((vl + gl * (t - tl)).max(vr + gr * (t - tr)))
}

fn ellipsoid(oracle: impl Fn(&[f64]) -> OracleValue, lo: &[f64], hi: &[f64], tol: f64, cfg: &SolverConfig) -> CutReport {
    let d = lo.len();
    let df = d as f64;
    let mut c: Vec<f64> = (0..d).map(|i| 0.5 * (lo[i] + hi[i])).collect();
    // P = J Jᵀ; updating the factor keeps P positive semidefinite under repeated thin cuts
    let mut jm = vec![0.0; d * d];
    for i in 0..d {
        jm[i * d + i] = df.sqrt() * 0.5 * (hi[i] - lo[i]);
    }
    let expand = df / (df * df - 1.0).sqrt();
    let beta = 1.0 - ((df - 1.0) / (df + 1.0)).sqrt();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut iters = 0;
    let mut h = vec![0.0; d];
    let mut jh = vec![0.0; d];
    let mut converged = false;
    while iters < cfg.max_iters {
        iters += 1;
        let mut g = vec![0.0; d];
        let mut fval = None;
        let mut outside = None;
        for i in 0..d {
            let v = (lo[i] - c[i]).max(c[i] - hi[i]);
            if v > 0.0 && outside.map_or(true, |(_, w)| v > w) {
                outside = Some((i, v));
            }
        }
        if let Some((i, _)) = outside {
            g[i] = if c[i] < lo[i] { -1.0 } else { 1.0 };
        } else {
            match oracle(&c) {
                OracleValue::Finite { value, subgrad } => {
                    if best.as_ref().map_or(true, |(_, v)| value < *v) {
                        best = Some((c.clone(), value));
                    }
                    g = subgrad;
                    fval = Some(value);
                }
                OracleValue::Infinite { separator: Some(s) } => g = s,
                OracleValue::Infinite { separator: None } => match &best {
                    Some((xb, _)) => g = c.iter().zip(xb).map(|(a, b)| a - b).collect(),
                    None => break,
                },
            }
        }
        // h = Jᵀ g
        for k in 0..d {
            h[k] = (0..d).map(|i| jm[i * d + k] * g[i]).sum();
        }
        let hn = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        if let Some(v) = fval {
            lower = lower.max(v - hn);
        }
        if let Some((_, v)) = &best {
            if *v - lower <= tol {
                converged = true;
                break;
            }
        }
        if !(hn > 1e-300) {
            break;
        }
        for k in 0..d {
            h[k] /= hn;
        }
        for i in 0..d {
            jh[i] = (0..d).map(|k| jm[i * d + k] * h[k]).sum();
        }
        for i in 0..d {
            c[i] -= jh[i] / (df + 1.0);
            for k in 0..d {
                jm[i * d + k] = expand * (jm[i * d + k] - beta * jh[i] * h[k]);
            }
        }
    }
    let value = best.as_ref().map(|b| b.1).unwrap_or(f64::INFINITY);
    CutReport { x: best.map(|b| b.0), value, lower_bound: lower.min(value), iters, converged }
}
