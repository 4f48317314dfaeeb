use super::{ExtensionValue, FiniteMapData};
use crate::error::{Error, Result};
use crate::geometry::{dist, VectorN};
use crate::monotone::{graph_of_resolvent, nonexpansive_to_firm, resolvent_eval, OperatorGraph};
use crate::solvers::qp::{self, QpProblem};
use crate::solvers::{polyak_subgradient, SolverConfig};
use nalgebra::{DMatrix, DVector};

fn constant(data: &FiniteMapData, x: &VectorN) -> ExtensionValue {
    let y = data.values[0].clone();
    let residual = residual(data, data.lipschitz(), x, &y);
    ExtensionValue { y, residual }
}

/// maxᵢ ‖y − bᵢ‖ − L‖x − aᵢ‖.
fn residual(data: &FiniteMapData, l: f64, x: &[f64], y: &[f64]) -> f64 {
    (0..data.len())
        .map(|i| dist(y, &data.values[i]) - l * dist(x, &data.points[i]))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// One-point Kirszbraun extension: the point of ∩ B̄(bᵢ, L‖x − aᵢ‖) minimizing
/// maxᵢ ‖y − bᵢ‖² − L²‖x − aᵢ‖², via its dual over the simplex.
pub fn extend_minimax(data: &FiniteMapData, x: &VectorN, cfg: &SolverConfig) -> Result<ExtensionValue> {
    data.check_query(x)?;
    let l = data.lipschitz();
    let k = data.len();
    if k == 1 || l == 0.0 {
        return Ok(constant(data, x));
    }
    let n = data.n;
    // values centred for conditioning; y shifts back at the end
    let mut mean = vec![0.0; n];
    for b in &data.values {
        for j in 0..n {
            mean[j] += b[j] / k as f64;
        }
    }
    let b = DMatrix::from_fn(n, k, |j, i| data.values[i][j] - mean[j]);
    let mut prob = QpProblem::new(k);
    prob.p = 2.0 * b.transpose() * &b;
    prob.q = DVector::from_fn(k, |i, _| {
        let r = l * dist(x, &data.points[i]);
        -(b.column(i).norm_squared() - r * r)
    });
    prob.a = DMatrix::from_element(1, k, 1.0);
    prob.b = DVector::from_element(1, 1.0);
    prob.g = -DMatrix::identity(k, k);
    prob.h = DVector::zeros(k);
    let sol = qp::solve(&prob);
    let lam = sol.x.map(|v| v.max(0.0));
    let centred = &b * &lam / lam.sum();
    let mut y: Vec<f64> = (0..n).map(|j| centred[j] + mean[j]).collect();
    let mut res = residual(data, l, x, &y);
    if res > 1e-9 {
        // primal max of ‖y − bᵢ‖² − rᵢ² has optimum ≤ 0
        let f = |z: &[f64]| {
            let mut best = (f64::NEG_INFINITY, 0);
            for i in 0..k {
                let r = l * dist(x, &data.points[i]);
                let v = dist(z, &data.values[i]).powi(2) - r * r;
                if v > best.0 {
                    best = (v, i);
                }
            }
            let g = (0..n).map(|j| 2.0 * (z[j] - data.values[best.1][j])).collect();
            (best.0, g)
        };
        let rep = polyak_subgradient(f, 0.0, &y, &cfg.clone().with_tol(1e-14));
        let r2 = residual(data, l, x, &rep.argmin);
        if r2 < res {
            y = rep.argmin;
            res = r2;
        }
    }
    if !res.is_finite() {
        return Err(Error::NonConvergence("minimax produced a non-finite point".into()));
    }
    Ok(ExtensionValue { y: VectorN::new(y)?, residual: res.max(0.0) })
}

/// Kirszbraun through monotone operators: pad to a common dimension, rescale to a
/// non-expansive f, pass to the firmly non-expansive ½(id + f), read off T = g⁻¹ − id,
/// and evaluate F = L(2G − id) with G the resolvent of the maximal monotone extension of T.
#[derive(Debug, Clone)]
pub struct ProxAvgExtension {
    m: usize,
    n: usize,
    k: usize,
    lipschitz: f64,
    graph: Option<OperatorGraph>,
    constant: Option<VectorN>,
}

impl ProxAvgExtension {
    pub fn new(data: &FiniteMapData) -> Result<Self> {
        let l = data.lipschitz();
        let k = data.m.max(data.n);
        let mut ext = ProxAvgExtension { m: data.m, n: data.n, k, lipschitz: l, graph: None, constant: None };
        if data.len() == 1 || l == 0.0 {
            ext.constant = Some(data.values[0].clone());
            return Ok(ext);
        }
        let pad = |v: &[f64], s: f64| -> Result<VectorN> {
            let mut p: Vec<f64> = v.iter().map(|c| c / s).collect();
            p.resize(k, 0.0);
            VectorN::new(p)
        };
        let pairs = (0..data.len())
            .map(|i| Ok((pad(&data.points[i], 1.0)?, pad(&data.values[i], l)?)))
            .collect::<Result<Vec<_>>>()?;
        let f = OperatorGraph::new(k, pairs)?;
        let g = nonexpansive_to_firm(&f)?;
        ext.graph = Some(graph_of_resolvent(&g));
        Ok(ext)
    }

    pub fn operator(&self) -> Option<&OperatorGraph> {
        self.graph.as_ref()
    }

    pub fn eval(&self, x: &VectorN, cfg: &SolverConfig) -> Result<ExtensionValue> {
        if x.dim() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: x.dim() });
        }
        if let Some(c) = &self.constant {
            return Ok(ExtensionValue { y: c.clone(), residual: 0.0 });
        }
        let mut xh = x.to_vec();
        xh.resize(self.k, 0.0);
        let xh = VectorN::new(xh)?;
        let r = resolvent_eval(self.graph.as_ref().expect("non-constant"), &xh, cfg)?;
        let y: Vec<f64> = (0..self.n).map(|j| self.lipschitz * (2.0 * r.y[j] - xh[j])).collect();
        Ok(ExtensionValue { y: VectorN::new(y)?, residual: r.residual })
    }
}

pub fn extend_proxavg(data: &FiniteMapData, x: &VectorN, cfg: &SolverConfig) -> Result<ExtensionValue> {
    data.check_query(x)?;
    ProxAvgExtension::new(data)?.eval(x, cfg)
}
