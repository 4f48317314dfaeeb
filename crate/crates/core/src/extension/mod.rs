//! Extensions of finite map data: Kirszbraun (two ways), McShane–Whitney, Tietze and friends.

mod classical;
mod kirszbraun;
mod modulus;

pub use classical::{extend_coordinatewise, extend_mcshane, extend_project_domain, tietze_extend, tietze_inverse, tietze_map, Side};
pub use kirszbraun::{extend_minimax, extend_proxavg, ProxAvgExtension};
pub use modulus::{affine_majorant, concave_majorant, empirical_modulus, uniform_extend, Modulus};

use crate::convex_sets::ConvexBody;
use crate::error::{Error, Result};
use crate::geometry::{dist, VectorN};
use crate::solvers::SolverConfig;
use serde::{Deserialize, Serialize};

pub const DUPLICATE_TOL: f64 = 1e-12;
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Deserialization does not validate; call `validate` on loaded data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMapData {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub lipschitz: Option<f64>,
    pub points: Vec<VectorN>,
    pub values: Vec<VectorN>,
}

impl FiniteMapData {
    pub fn new(points: Vec<VectorN>, values: Vec<VectorN>, lipschitz: Option<f64>) -> Result<Self> {
        let m = points.first().map_or(0, |p| p.dim());
        let n = values.first().map_or(0, |v| v.dim());
        let d = FiniteMapData { m, n, lipschitz, points, values };
        d.validate()?;
        Ok(d)
    }

    pub fn from_rows(points: &[&[f64]], values: &[&[f64]], lipschitz: Option<f64>) -> Result<Self> {
        let p = points.iter().map(|c| VectorN::new(c.to_vec())).collect::<Result<_>>()?;
        let v = values.iter().map(|c| VectorN::new(c.to_vec())).collect::<Result<_>>()?;
        Self::new(p, v, lipschitz)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() || self.points.len() != self.values.len() {
            return Err(Error::Invalid(format!(
                "need equal non-zero counts of points and values, got {} and {}",
                self.points.len(),
                self.values.len()
            )));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::Invalid("dimensions must be positive".into()));
        }
        for p in &self.points {
            if p.dim() != self.m {
                return Err(Error::DimensionMismatch { expected: self.m, got: p.dim() });
            }
        }
        for v in &self.values {
            if v.dim() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: v.dim() });
            }
        }
        if let Some(l) = self.lipschitz {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::Invalid(format!("L must be finite and non-negative, got {l}")));
            }
        }
        let l = self.lipschitz.unwrap_or(f64::INFINITY);
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let da = dist(&self.points[i], &self.points[j]);
                let db = dist(&self.values[i], &self.values[j]);
                if (da <= DUPLICATE_TOL && db > CONSISTENCY_TOL) || db > l * da + CONSISTENCY_TOL {
                    let ratio = if da > 0.0 { db / da } else { f64::INFINITY };
                    return Err(Error::LipschitzViolation { i, j, ratio, lipschitz: self.lipschitz.unwrap_or(0.0) });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Supplied L, or the data's own constant.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz.unwrap_or_else(|| lipschitz_constant(self))
    }

    fn check_query(&self, x: &VectorN) -> Result<()> {
        if x.dim() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: x.dim() });
        }
        Ok(())
    }

    fn scalar(&self) -> Result<()> {
        if self.n != 1 {
            return Err(Error::Invalid(format!("scalar method needs n = 1, data has n = {}", self.n)));
        }
        Ok(())
    }
}

/// max ‖Δb‖/‖Δa‖ over pairs of distinct points; 0 with a single point.
pub fn lipschitz_constant(data: &FiniteMapData) -> f64 {
    let mut l: f64 = 0.0;
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            let da = dist(&data.points[i], &data.points[j]);
            if da > DUPLICATE_TOL {
                l = l.max(dist(&data.values[i], &data.values[j]) / da);
            }
        }
    }
    l
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionValue {
    pub y: VectorN,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Minimax,
    Proxavg,
    Mcshane,
    Coordinatewise,
    ProjectDomain,
    Tietze,
}

/// A fitted extension: captured data plus whatever per-method state queries share.
#[derive(Debug, Clone)]
pub struct ExtensionModel {
    pub method: Method,
    pub data: FiniteMapData,
    pub cfg: SolverConfig,
    pub domain: Option<ConvexBody>,
    pub modulus: Option<Modulus>,
    pub side: Side,
    proxavg: Option<ProxAvgExtension>,
}

impl ExtensionModel {
    pub fn new(method: Method, data: FiniteMapData, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        data.validate()?;
        let proxavg = match method {
            Method::Proxavg => Some(ProxAvgExtension::new(&data)?),
            Method::Mcshane | Method::Tietze => {
                data.scalar()?;
                None
            }
            _ => None,
        };
        Ok(ExtensionModel { method, data, cfg, domain: None, modulus: None, side: Side::Lower, proxavg })
    }

    pub fn with_domain(mut self, domain: ConvexBody) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn with_modulus(mut self, modulus: Modulus, side: Side) -> Self {
        self.modulus = Some(modulus);
        self.side = side;
        self
    }

    pub fn eval(&self, x: &VectorN) -> Result<ExtensionValue> {
        let scalar = |v: f64| Ok(ExtensionValue { y: VectorN::new(vec![v])?, residual: 0.0 });
        match self.method {
            Method::Minimax => extend_minimax(&self.data, x, &self.cfg),
            Method::Proxavg => self.proxavg.as_ref().expect("built in new").eval(x, &self.cfg),
            Method::Mcshane => {
                let w = match &self.modulus {
                    Some(w) => w.clone(),
                    None => Modulus::linear(self.data.lipschitz()),
                };
                scalar(extend_mcshane(&self.data, &w, x, self.side)?)
            }
            Method::Coordinatewise => Ok(ExtensionValue { y: extend_coordinatewise(&self.data, x)?, residual: 0.0 }),
            Method::ProjectDomain => {
                let d = self.domain.as_ref().ok_or_else(|| Error::Invalid("project_domain needs a domain".into()))?;
                extend_project_domain(&self.data, d, x, &self.cfg)
            }
            Method::Tietze => scalar(tietze_extend(&self.data, x)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lipschitz_constants() {
        let d = FiniteMapData::from_rows(&[&[0.0], &[1.0]], &[&[0.0], &[2.0]], None).unwrap();
        assert_eq!(lipschitz_constant(&d), 2.0);
        let c = FiniteMapData::from_rows(&[&[0.0], &[1.0], &[3.0]], &[&[5.0], &[5.0], &[5.0]], None).unwrap();
        assert_eq!(lipschitz_constant(&c), 0.0);
        let (s, co) = (0.6f64, 0.8f64);
        let pts: [&[f64]; 3] = [&[1.0, 0.0], &[0.3, -2.0], &[4.0, 1.5]];
        let vals: Vec<Vec<f64>> = pts.iter().map(|p| vec![co * p[0] - s * p[1], s * p[0] + co * p[1]]).collect();
        let vr: Vec<&[f64]> = vals.iter().map(|v| v.as_slice()).collect();
        let r = FiniteMapData::from_rows(&pts, &vr, None).unwrap();
        assert!((lipschitz_constant(&r) - 1.0).abs() <= 1e-12);
        assert_eq!(lipschitz_constant(&FiniteMapData::from_rows(&[&[1.0]], &[&[1.0]], None).unwrap()), 0.0);
    }

    #[test]
    fn validation_errors() {
        let dup = FiniteMapData::from_rows(&[&[0.0], &[0.0]], &[&[0.0], &[1.0]], None);
        assert!(matches!(dup, Err(Error::LipschitzViolation { i: 0, j: 1, .. })));
        let bad = FiniteMapData::from_rows(&[&[0.0], &[1.0], &[2.0]], &[&[0.0], &[0.5], &[1.6]], Some(1.0));
        assert!(matches!(bad, Err(Error::LipschitzViolation { i: 1, j: 2, .. })));
        assert!(FiniteMapData::from_rows(&[&[0.0]], &[], None).is_err());
    }

    #[test]
    fn json_schema() {
        let s = r#"{"m": 1, "n": 1, "L": null, "points": [[-1], [1]], "values": [[0], [2]]}"#;
        let d: FiniteMapData = serde_json::from_str(s).unwrap();
        assert_eq!(d.lipschitz(), 1.0);
        let back = serde_json::to_string(&d).unwrap();
        assert!(back.contains("\"L\":null"));
        let bad = r#"{"m": 1, "n": 1, "L": 0.5, "points": [[-1], [1]], "values": [[0], [2]]}"#;
        assert!(serde_json::from_str::<FiniteMapData>(bad).unwrap().validate().is_err());
    }
}
