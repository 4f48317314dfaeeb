//! Extended-real convex functions as expression trees with oracle evaluation.

mod checks;
mod eval;

pub use checks::{
    biconjugate_check, delta_conjugate_identity_check, fenchel_duality_solve, fenchel_young_check, DualityReport,
};
pub use eval::{eval, oracle};

use crate::convex_sets::ConvexBody;
use crate::error::{Error, Result};
use crate::geometry::{Ball, Polytope, VectorN};
use serde::{Deserialize, Serialize};

/// R ∪ {+∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInf => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ExtendedReal::PosInf
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexFunctionExpr {
    /// ½‖x‖² on R^n.
    Quadratic { n: usize },
    /// maxᵢ(⟨sᵢ, x⟩ − oᵢ).
    MaxAffine { slopes: Vec<VectorN>, offsets: Vec<f64> },
    Indicator { body: ConvexBody },
    /// ½‖x − y‖² on R^n × R^n.
    Kappa { n: usize },
    /// ½‖x + y‖² on R^n × R^n.
    Delta { n: usize },
    Sum { children: Vec<ConvexFunctionExpr>, coeffs: Vec<f64> },
    /// x ↦ λ f(x/λ).
    EpiScale { lambda: f64, child: Box<ConvexFunctionExpr> },
    /// x ↦ λ f(x).
    Scale { lambda: f64, child: Box<ConvexFunctionExpr> },
    /// x ↦ g(x − a) + ⟨x, a*⟩ + α.
    Translate { a: VectorN, astar: VectorN, alpha: f64, child: Box<ConvexFunctionExpr> },
    /// Search box is [−box, box]^d.
    Conjugate {
        child: Box<ConvexFunctionExpr>,
        #[serde(rename = "box")]
        search_box: f64,
    },
    InfConv {
        left: Box<ConvexFunctionExpr>,
        right: Box<ConvexFunctionExpr>,
        #[serde(rename = "box")]
        search_box: f64,
    },
    ProxAvg {
        left: Box<ConvexFunctionExpr>,
        right: Box<ConvexFunctionExpr>,
        #[serde(rename = "box")]
        search_box: f64,
    },
}

use ConvexFunctionExpr as E;

impl ConvexFunctionExpr {
    /// Ambient dimension after checking every node's invariants.
    pub fn validate(&self) -> Result<usize> {
        let same = |a: usize, b: usize| {
            if a == b {
                Ok(a)
            } else {
                Err(Error::DimensionMismatch { expected: a, got: b })
            }
        };
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            E::Quadratic { n } => nonzero(*n),
            E::Kappa { n } | E::Delta { n } => nonzero(*n).map(|n| 2 * n),
            E::MaxAffine { slopes, offsets } => {
                let first = slopes.first().ok_or_else(|| Error::Invalid("max_affine needs a piece".into()))?;
                if slopes.len() != offsets.len() {
                    return Err(Error::DimensionMismatch { expected: slopes.len(), got: offsets.len() });
                }
                if offsets.iter().any(|o| !o.is_finite()) {
                    return Err(Error::Invalid("non-finite offset".into()));
                }
                for s in slopes {
                    same(first.dim(), s.dim())?;
                }
                Ok(first.dim())
            }
            E::Indicator { body } => Ok(body.dim()),
            E::Sum { children, coeffs } => {
                let first = children.first().ok_or_else(|| Error::Invalid("sum needs a child".into()))?;
                if children.len() != coeffs.len() {
                    return Err(Error::DimensionMismatch { expected: children.len(), got: coeffs.len() });
                }
                if coeffs.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
                    return Err(Error::Invalid("sum coefficients must be finite and >= 0".into()));
                }
                let n = first.validate()?;
                for c in &children[1..] {
                    same(n, c.validate()?)?;
                }
                Ok(n)
            }
            E::EpiScale { lambda, child } | E::Scale { lambda, child } => {
                positive("lambda", *lambda)?;
                child.validate()
            }
            E::Translate { a, astar, alpha, child } => {
                let n = child.validate()?;
                same(n, a.dim())?;
                same(n, astar.dim())?;
                if !alpha.is_finite() {
                    return Err(Error::Invalid("non-finite alpha".into()));
                }
                Ok(n)
            }
            E::Conjugate { child, search_box } => {
                positive("box", *search_box)?;
                child.validate()
            }
            E::InfConv { left, right, search_box } | E::ProxAvg { left, right, search_box } => {
                positive("box", *search_box)?;
                same(left.validate()?, right.validate()?)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            E::Quadratic { n } => *n,
            E::Kappa { n } | E::Delta { n } => 2 * n,
            E::MaxAffine { slopes, .. } => slopes[0].dim(),
            E::Indicator { body } => body.dim(),
            E::Sum { children, .. } => children[0].dim(),
            E::EpiScale { child, .. } | E::Scale { child, .. } | E::Translate { child, .. } | E::Conjugate { child, .. } => {
                child.dim()
            }
            E::InfConv { left, .. } | E::ProxAvg { left, .. } => left.dim(),
        }
    }

    /// Short node label used in error messages.
    pub fn label(&self) -> &'static str {
        match self {
            E::Quadratic { .. } => "quadratic",
            E::MaxAffine { .. } => "max_affine",
            E::Indicator { .. } => "indicator",
            E::Kappa { .. } => "kappa",
            E::Delta { .. } => "delta",
            E::Sum { .. } => "sum",
            E::EpiScale { .. } => "epi_scale",
            E::Scale { .. } => "scale",
            E::Translate { .. } => "translate",
            E::Conjugate { .. } => "conjugate",
            E::InfConv { .. } => "inf_conv",
            E::ProxAvg { .. } => "prox_avg",
        }
    }
}

fn nonzero(n: usize) -> Result<usize> {
    if n == 0 {
        Err(Error::Invalid("dimension must be at least 1".into()))
    } else {
        Ok(n)
    }
}

pub fn q(n: usize) -> ConvexFunctionExpr {
    E::Quadratic { n }
}

pub fn kappa(n: usize) -> ConvexFunctionExpr {
    E::Kappa { n }
}

pub fn delta_sum(n: usize) -> ConvexFunctionExpr {
    E::Delta { n }
}

pub fn max_affine(slopes: Vec<VectorN>, offsets: Vec<f64>) -> Result<ConvexFunctionExpr> {
    let f = E::MaxAffine { slopes, offsets };
    f.validate()?;
    Ok(f)
}

pub fn indicator(body: ConvexBody) -> ConvexFunctionExpr {
    E::Indicator { body }
}

/// Indicator of a single point.
pub fn point_indicator(p: VectorN) -> ConvexFunctionExpr {
    E::Indicator { body: ConvexBody::Polytope(Polytope::new(vec![p]).expect("one vertex")) }
}

/// ‖x‖ as the support function of the unit ball.
pub fn norm_fn(n: usize) -> ConvexFunctionExpr {
    let ball = Ball::new(VectorN::zeros(n), 1.0).expect("unit ball");
    conjugate(indicator(ConvexBody::Ball(ball)), 1.0)
}

pub fn sum(children: Vec<ConvexFunctionExpr>, coeffs: Vec<f64>) -> Result<ConvexFunctionExpr> {
    let f = E::Sum { children, coeffs };
    f.validate()?;
    Ok(f)
}

pub fn translate(a: VectorN, astar: VectorN, alpha: f64, child: ConvexFunctionExpr) -> Result<ConvexFunctionExpr> {
    let f = E::Translate { a, astar, alpha, child: Box::new(child) };
    f.validate()?;
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleMode {
    Mul,
    Epi,
}

/// λf (`Mul`) or λ∗f (`Epi`).
pub fn scale_ops(f: ConvexFunctionExpr, lambda: f64, mode: ScaleMode) -> Result<ConvexFunctionExpr> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Invalid(format!("scale factor must be positive, got {lambda}")));
    }
    Ok(match mode {
        ScaleMode::Mul => E::Scale { lambda, child: Box::new(f) },
        ScaleMode::Epi => E::EpiScale { lambda, child: Box::new(f) },
    })
}

/// Conjugate node. Max-affine and indicator children are evaluated exactly.
pub fn conjugate(f: ConvexFunctionExpr, search_box: f64) -> ConvexFunctionExpr {
    E::Conjugate { child: Box::new(f), search_box }
}

pub fn inf_conv(f: ConvexFunctionExpr, g: ConvexFunctionExpr, search_box: f64) -> ConvexFunctionExpr {
    E::InfConv { left: Box::new(f), right: Box::new(g), search_box }
}

pub fn prox_avg(f: ConvexFunctionExpr, g: ConvexFunctionExpr, search_box: f64) -> ConvexFunctionExpr {
    E::ProxAvg { left: Box::new(f), right: Box::new(g), search_box }
}

/// δ(x, y) = ½‖x‖² + ½‖y‖² − ⟨x + y, a + b⟩ + ½‖a + b‖², i.e. Δ(a − x, b − y) − ⟨x, y⟩.
pub fn delta_fn(a: &VectorN, b: &VectorN) -> Result<ConvexFunctionExpr> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let n = a.dim();
    let shift: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let lin: Vec<f64> = b.iter().chain(a.iter()).map(|v| -v).collect();
    let ab = crate::geometry::dot_unchecked(a, b);
    translate(VectorN::new(shift)?, VectorN::new(lin)?, ab, q(2 * n))
}

fn neg_vec(v: &VectorN) -> VectorN {
    VectorN::new(v.iter().map(|x| -x).collect()).expect("finite")
}

/// x ↦ f(−x).
pub fn reflect(f: &ConvexFunctionExpr) -> ConvexFunctionExpr {
    let r = |c: &ConvexFunctionExpr| Box::new(reflect(c));
    match f {
        E::Quadratic { .. } | E::Kappa { .. } | E::Delta { .. } => f.clone(),
        E::MaxAffine { slopes, offsets } => E::MaxAffine { slopes: slopes.iter().map(neg_vec).collect(), offsets: offsets.clone() },
        E::Indicator { body } => E::Indicator {
            body: match body {
                ConvexBody::Ball(b) => ConvexBody::Ball(Ball { center: neg_vec(&b.center), radius: b.radius }),
                ConvexBody::Polytope(p) => {
                    ConvexBody::Polytope(Polytope::new(p.vertices().iter().map(neg_vec).collect()).expect("same shape"))
                }
            },
        },
        E::Sum { children, coeffs } => E::Sum { children: children.iter().map(reflect).collect(), coeffs: coeffs.clone() },
        E::EpiScale { lambda, child } => E::EpiScale { lambda: *lambda, child: r(child) },
        E::Scale { lambda, child } => E::Scale { lambda: *lambda, child: r(child) },
        E::Translate { a, astar, alpha, child } => {
            E::Translate { a: neg_vec(a), astar: neg_vec(astar), alpha: *alpha, child: r(child) }
        }
        E::Conjugate { child, search_box } => E::Conjugate { child: r(child), search_box: *search_box },
        E::InfConv { left, right, search_box } => E::InfConv { left: r(left), right: r(right), search_box: *search_box },
        E::ProxAvg { left, right, search_box } => E::ProxAvg { left: r(left), right: r(right), search_box: *search_box },
    }
}
