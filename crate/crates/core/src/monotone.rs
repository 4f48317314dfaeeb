//! Finite monotone graphs, resolvents, Fitzpatrick functions and the autoconjugate Ψ_T.
//!
//! Ψ_T(x̃) = min over λ ∈ simplex of ½Φ_T(2x̃ − Aλ) + ½oᵀλ + ½‖x̃ − Aλ‖², where A has columns
//! ãᵢ = (aᵢ, aᵢ*) and oᵢ = ⟨aᵢ, aᵢ*⟩. The max inside Φ_T becomes an epigraph variable, so every
//! evaluation below is one dense QP.

use crate::error::{Error, Result};
use crate::functions::{self, ConvexFunctionExpr, ExtendedReal};
use crate::geometry::{dist, dot_unchecked, norm_sq, sub, VectorN};
use crate::solvers::qp::{self, QpProblem, QpSolution};
use crate::solvers::SolverConfig;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub const MONOTONE_TOL: f64 = 1e-10;
pub const RESOLVENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorGraph {
    pub n: usize,
    pub pairs: Vec<(VectorN, VectorN)>,
}

impl OperatorGraph {
    pub fn new(n: usize, pairs: Vec<(VectorN, VectorN)>) -> Result<Self> {
        let g = OperatorGraph { n, pairs };
        g.validate()?;
        Ok(g)
    }

    pub fn from_rows(rows: &[(Vec<f64>, Vec<f64>)]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.0.len());
        let pairs = rows
            .iter()
            .map(|(x, y)| Ok((VectorN::new(x.clone())?, VectorN::new(y.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, pairs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invalid("graph dimension must be positive".into()));
        }
        for (x, y) in &self.pairs {
            for d in [x.dim(), y.dim()] {
                if d != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, got: d });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn non_empty(&self) -> Result<()> {
        self.validate()?;
        if self.is_empty() {
            return Err(Error::Invalid("empty operator graph".into()));
        }
        Ok(())
    }

    fn map_pairs(&self, f: impl Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>)) -> OperatorGraph {
        let pairs = self
            .pairs
            .iter()
            .map(|(x, y)| {
                let (u, v) = f(x, y);
                (VectorN::new(u).expect("finite"), VectorN::new(v).expect("finite"))
            })
            .collect();
        OperatorGraph { n: self.n, pairs }
    }
}

/// Worst pair for a pairwise inequality; `worst` is None with fewer than two pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCheck {
    pub holds: bool,
    pub min: f64,
    pub worst: Option<(usize, usize)>,
}

fn pairwise(g: &OperatorGraph, f: impl Fn(&[f64], &[f64]) -> f64, tol: f64) -> PairCheck {
    let mut min = f64::INFINITY;
    let mut worst = None;
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let (xi, yi) = &g.pairs[i];
            let (xj, yj) = &g.pairs[j];
            let v = f(&sub(xi, xj), &sub(yi, yj));
            if v < min {
                min = v;
                worst = Some((i, j));
            }
        }
    }
    if worst.is_none() {
        min = 0.0;
    }
    PairCheck { holds: min >= -tol, min, worst }
}

/// min over pairs of ⟨x − y, x* − y*⟩.
pub fn is_monotone(t: &OperatorGraph) -> PairCheck {
    pairwise(t, |dx, dy| dot_unchecked(dx, dy), MONOTONE_TOL)
}

/// min over pairs of ⟨Δf, Δx⟩ − ‖Δf‖².
pub fn firmly_nonexpansive_check(f: &OperatorGraph) -> PairCheck {
    pairwise(f, |dx, df| dot_unchecked(df, dx) - norm_sq(df), MONOTONE_TOL)
}

/// (x, x*) ↦ (x + x*, x): the graph of (T + id)⁻¹.
pub fn resolvent_of_graph(t: &OperatorGraph) -> Result<OperatorGraph> {
    t.validate()?;
    let g = t.map_pairs(|x, y| (x.iter().zip(y).map(|(a, b)| a + b).collect(), x.to_vec()));
    let mut keep: Vec<(VectorN, VectorN)> = Vec::with_capacity(g.len());
    for (u, v) in g.pairs {
        match keep.iter().find(|(w, _)| dist(w, &u) <= 1e-12) {
            Some((_, img)) if dist(img, &v) > 1e-10 => {
                return Err(Error::InconsistentGraph(format!(
                    "resolvent input {:?} has images {:?} and {:?}",
                    u.coords(),
                    img.coords(),
                    v.coords()
                )))
            }
            Some(_) => {}
            None => keep.push((u, v)),
        }
    }
    Ok(OperatorGraph { n: t.n, pairs: keep })
}

/// (y, y*) ↦ (y*, y − y*).
pub fn graph_of_resolvent(f: &OperatorGraph) -> OperatorGraph {
    f.map_pairs(|y, ys| (ys.to_vec(), sub(y, ys)))
}

/// f ↦ ½(id + f).
pub fn nonexpansive_to_firm(f: &OperatorGraph) -> Result<OperatorGraph> {
    f.validate()?;
    let c = pairwise(f, |dx, df| norm_sq(dx) - norm_sq(df), 1e-12);
    if !c.holds {
        let (i, j) = c.worst.expect("violation needs a pair");
        let dx = dist(&f.pairs[i].0, &f.pairs[j].0);
        let ratio = dist(&f.pairs[i].1, &f.pairs[j].1) / dx;
        return Err(Error::LipschitzViolation { i, j, ratio, lipschitz: 1.0 });
    }
    Ok(f.map_pairs(|x, y| (x.to_vec(), x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect())))
}

/// g ↦ 2g − id.
pub fn firm_to_nonexpansive(g: &OperatorGraph) -> Result<OperatorGraph> {
    g.validate()?;
    let c = firmly_nonexpansive_check(g);
    if !c.holds {
        let (i, j) = c.worst.expect("violation needs a pair");
        return Err(Error::Invalid(format!("pairs {i} and {j} violate firm non-expansiveness (slack {:e})", c.min)));
    }
    Ok(g.map_pairs(|x, y| (x.to_vec(), x.iter().zip(y).map(|(a, b)| 2.0 * b - a).collect())))
}

fn stacked(x: &[f64], xs: &[f64]) -> Vec<f64> {
    x.iter().chain(xs).copied().collect()
}

/// Φ_T(x, x*) = maxᵢ ⟨x, aᵢ*⟩ + ⟨aᵢ, x*⟩ − ⟨aᵢ, aᵢ*⟩.
pub fn fitzpatrick_eval(t: &OperatorGraph, x: &VectorN, xstar: &VectorN) -> Result<f64> {
    t.non_empty()?;
    check_dims(t, &[x, xstar])?;
    Ok(t.pairs
        .iter()
        .map(|(a, s)| dot_unchecked(x, s) + dot_unchecked(a, xstar) - dot_unchecked(a, s))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Φ_T as a max-affine expression on R^{2n}.
pub fn fitzpatrick_expr(t: &OperatorGraph) -> Result<ConvexFunctionExpr> {
    t.non_empty()?;
    let slopes = t.pairs.iter().map(|(a, s)| VectorN::new(stacked(s, a))).collect::<Result<Vec<_>>>()?;
    let offsets = t.pairs.iter().map(|(a, s)| dot_unchecked(a, s)).collect();
    functions::max_affine(slopes, offsets)
}

/// Φ_T*(y, y*) by the exact polyhedral rule.
pub fn fitzpatrick_conj_eval(t: &OperatorGraph, y: &VectorN, ystar: &VectorN, cfg: &SolverConfig) -> Result<ExtendedReal> {
    check_dims(t, &[y, ystar])?;
    let f = functions::conjugate(fitzpatrick_expr(t)?, 1.0);
    functions::eval(&f, &VectorN::new(stacked(y, ystar))?, cfg)
}

fn check_dims(t: &OperatorGraph, vs: &[&VectorN]) -> Result<()> {
    for v in vs {
        if v.dim() != t.n {
            return Err(Error::DimensionMismatch { expected: t.n, got: v.dim() });
        }
    }
    Ok(())
}

/// Shared pieces of the Ψ_T programs.
struct PsiData {
    k: usize,
    d: usize,
    /// columns ãᵢ
    a: DMatrix<f64>,
    /// rows sⱼ = ãⱼᵗ
    s: DMatrix<f64>,
    o: DVector<f64>,
}

impl PsiData {
    fn new(t: &OperatorGraph) -> Result<Self> {
        t.non_empty()?;
        let k = t.len();
        let n = t.n;
        let d = 2 * n;
        let a = DMatrix::from_fn(d, k, |r, i| if r < n { t.pairs[i].0[r] } else { t.pairs[i].1[r - n] });
        let s = DMatrix::from_fn(k, d, |j, c| if c < n { t.pairs[j].1[c] } else { t.pairs[j].0[c - n] });
        let o = DVector::from_fn(k, |i, _| dot_unchecked(&t.pairs[i].0, &t.pairs[i].1));
        Ok(PsiData { k, d, a, s, o })
    }

    /// QP in (u, λ, t) with x̃ = M u + c: min ½‖Mu + c − Aλ‖² + ½oᵀλ + ½t + extra, under
    /// S(2(Mu + c) − Aλ) − o ≤ t·1, λ ≥ 0, 1ᵀλ = 1, and optional |uᵢ| ≤ bound.
    fn program(&self, m: &DMatrix<f64>, c: &DVector<f64>, extra_p: &DMatrix<f64>, extra_q: &DVector<f64>, bound: Option<f64>) -> QpProblem {
        let (k, nu) = (self.k, m.ncols());
        let nv = nu + k + 1;
        let mut prob = QpProblem::new(nv);
        // ‖Mu − Aλ + c‖² = ‖B v + c‖² with B = [M, −A, 0]
        let mut b = DMatrix::zeros(self.d, nv);
        b.view_mut((0, 0), (self.d, nu)).copy_from(m);
        b.view_mut((0, nu), (self.d, k)).copy_from(&(-&self.a));
        let mut p = b.transpose() * &b;
        {
            let mut v = p.view_mut((0, 0), (nu, nu));
            v += extra_p;
        }
        prob.p = p;
        let mut q = b.transpose() * c;
        {
            let mut v = q.rows_mut(0, nu);
            v += extra_q;
        }
        {
            let mut v = q.rows_mut(nu, k);
            v += 0.5 * &self.o;
        }
        q[nv - 1] = 0.5;
        prob.q = q;
        let nb = bound.map_or(0, |_| 2 * nu);
        let mut g = DMatrix::zeros(2 * k + nb, nv);
        let mut h = DVector::zeros(2 * k + nb);
        let sm = &self.s * m;
        let sa = &self.s * &self.a;
        let sc = &self.s * c;
        for j in 0..k {
            for col in 0..nu {
                g[(j, col)] = 2.0 * sm[(j, col)];
            }
            for i in 0..k {
                g[(j, nu + i)] = -sa[(j, i)];
            }
            g[(j, nv - 1)] = -1.0;
            h[j] = self.o[j] - 2.0 * sc[j];
            g[(k + j, nu + j)] = -1.0;
        }
        if let Some(r) = bound {
            for i in 0..nu {
                g[(2 * k + 2 * i, i)] = 1.0;
                h[2 * k + 2 * i] = r;
                g[(2 * k + 2 * i + 1, i)] = -1.0;
                h[2 * k + 2 * i + 1] = r;
            }
        }
        prob.g = g;
        prob.h = h;
        let mut eq = DMatrix::zeros(1, nv);
        eq.view_mut((0, nu), (1, k)).fill(1.0);
        prob.a = eq;
        prob.b = DVector::from_element(1, 1.0);
        prob
    }
}

fn solve_checked(prob: &QpProblem, what: &str) -> Result<QpSolution> {
    let sol = qp::solve(prob);
    if !sol.converged && !sol.polished {
        return Err(Error::NonConvergence(format!("{what}: interior point stalled after {} iterations", sol.iters)));
    }
    Ok(sol)
}

/// Ψ_T(x, x*).
pub fn psi_eval(t: &OperatorGraph, x: &VectorN, xstar: &VectorN, _cfg: &SolverConfig) -> Result<f64> {
    check_dims(t, &[x, xstar])?;
    let pd = PsiData::new(t)?;
    let xt = DVector::from_vec(stacked(x, xstar));
    let m = DMatrix::zeros(pd.d, 0);
    let prob = pd.program(&m, &xt, &DMatrix::zeros(0, 0), &DVector::zeros(0), None);
    let sol = solve_checked(&prob, "psi")?;
    Ok(sol.objective + 0.5 * xt.norm_squared())
}

/// Ψ_T*(w̃) = sup over |x̃ᵢ| ≤ bound of ⟨x̃, w̃⟩ − Ψ_T(x̃); a sup on the box boundary is box exhaustion.
pub fn psi_conj_eval(t: &OperatorGraph, w: &[f64], bound: f64, _cfg: &SolverConfig) -> Result<f64> {
    let pd = PsiData::new(t)?;
    if w.len() != pd.d {
        return Err(Error::DimensionMismatch { expected: pd.d, got: w.len() });
    }
    let m = DMatrix::identity(pd.d, pd.d);
    let c = DVector::zeros(pd.d);
    let prob = pd.program(&m, &c, &DMatrix::zeros(pd.d, pd.d), &(-DVector::from_column_slice(w)), Some(bound));
    let sol = solve_checked(&prob, "psi conjugate")?;
    if sol.x.rows(0, pd.d).amax() >= bound * (1.0 - 1e-6) {
        return Err(Error::BoxExhausted { node: "psi conjugate".into() });
    }
    Ok(-sol.objective)
}

/// max |Ψ_T*(x*, x) − Ψ_T(x, x*)| over stacked samples (x, x*).
pub fn autoconjugacy_check(t: &OperatorGraph, samples: &[VectorN], bound: f64, cfg: &SolverConfig) -> Result<f64> {
    let n = t.n;
    let mut gap: f64 = 0.0;
    for s in samples {
        if s.dim() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: s.dim() });
        }
        let (x, xs) = (VectorN::new(s[..n].to_vec())?, VectorN::new(s[n..].to_vec())?);
        let psi = psi_eval(t, &x, &xs, cfg)?;
        let conj = psi_conj_eval(t, &stacked(&xs, &x), bound, cfg)?;
        gap = gap.max((psi - conj).abs());
    }
    Ok(gap)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventValue {
    pub y: VectorN,
    /// Ψ_T(y, x − y) − ⟨y, x − y⟩ at the returned y; zero exactly on the extended graph.
    pub residual: f64,
    pub converged: bool,
}

/// G(x) = (T̄ + id)⁻¹(x) for the maximal monotone extension T̄ represented by Ψ_T.
pub fn resolvent_eval(t: &OperatorGraph, x: &VectorN, _cfg: &SolverConfig) -> Result<ResolventValue> {
    check_dims(t, &[x])?;
    let pd = PsiData::new(t)?;
    let n = t.n;
    // x̃ = (y, x − y)
    let m = DMatrix::from_fn(pd.d, n, |r, c| {
        if r == c {
            1.0
        } else if r == c + n {
            -1.0
        } else {
            0.0
        }
    });
    let c = DVector::from_fn(pd.d, |r, _| if r < n { 0.0 } else { x[r - n] });
    // −⟨y, x − y⟩ = ‖y‖² − ⟨x, y⟩
    let extra_p = DMatrix::identity(n, n) * 2.0;
    let extra_q = -DVector::from_column_slice(x);
    let prob = pd.program(&m, &c, &extra_p, &extra_q, None);
    let sol = solve_checked(&prob, "resolvent")?;
    let y: Vec<f64> = sol.x.rows(0, n).iter().copied().collect();
    let y = VectorN::new(y)?;
    let xy = sub(x, &y);
    let residual = psi_eval(t, &y, &VectorN::new(xy.clone())?, _cfg)? - dot_unchecked(&y, &xy);
    let residual = residual.max(0.0);
    Ok(ResolventValue { y, residual, converged: residual <= RESOLVENT_TOL })
}

/// Evaluator of the resolvent of the extension of a fixed graph.
#[derive(Debug, Clone)]
pub struct ResolventMap {
    pub graph: OperatorGraph,
    pub tol: f64,
}

impl ResolventMap {
    pub fn new(graph: OperatorGraph) -> Result<Self> {
        graph.non_empty()?;
        Ok(ResolventMap { graph, tol: RESOLVENT_TOL })
    }

    pub fn eval(&self, x: &VectorN, cfg: &SolverConfig) -> Result<ResolventValue> {
        let v = resolvent_eval(&self.graph, x, cfg)?;
        if v.residual > self.tol {
            return Err(Error::NonConvergence(format!("resolvent residual {:e} above {:e}", v.residual, self.tol)));
        }
        Ok(v)
    }
}
