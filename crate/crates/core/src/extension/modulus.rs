use super::{extend_mcshane, FiniteMapData, Side};
use crate::error::{Error, Result};
use crate::geometry::{dist, VectorN};
use crate::solvers::SolverConfig;
use serde::{Deserialize, Serialize};

/// Piecewise-linear modulus of continuity through (tₖ, ω(tₖ)), extended by the last slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modulus {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl Modulus {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() {
            return Err(Error::Invalid("a modulus needs at least two breakpoints and one value per breakpoint".into()));
        }
        if breakpoints[0] != 0.0 || values[0] != 0.0 {
            return Err(Error::Invalid("a modulus starts at ω(0) = 0".into()));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite modulus entry".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("breakpoints must increase strictly".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Invalid("modulus values must be non-decreasing".into()));
        }
        Ok(Modulus { breakpoints, values })
    }

    /// ω(t) = Lt.
    pub fn linear(l: f64) -> Self {
        Modulus { breakpoints: vec![0.0, 1.0], values: vec![0.0, l.max(0.0)] }
    }

    pub fn from_fn(grid: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid.to_vec(), grid.iter().map(|&t| f(t)).collect())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        let (b, v) = (&self.breakpoints, &self.values);
        let i = b.partition_point(|&x| x <= t).clamp(1, b.len() - 1);
        let s = (t - b[i - 1]) / (b[i] - b[i - 1]);
        if s <= 1.0 {
            // exact at breakpoints, and monotone in (v[i-1], v[i]) under rounding
            (1.0 - s) * v[i - 1] + s * v[i]
        } else {
            v[i] + (v[i] - v[i - 1]) * (s - 1.0)
        }
    }

    fn slopes(&self) -> Vec<f64> {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(b, v)| (v[1] - v[0]) / (b[1] - b[0]))
            .collect()
    }

    pub fn is_concave(&self) -> bool {
        self.slopes().windows(2).all(|s| s[1] <= s[0] + 1e-12 * (1.0 + s[0].abs()))
    }

    /// ω(s + t) ≤ ω(s) + ω(t) for all grid s, t.
    pub fn is_subadditive(&self) -> bool {
        let b = &self.breakpoints;
        b.iter().enumerate().all(|(i, &s)| {
            b[i..].iter().all(|&t| self.eval(s + t) <= self.eval(s) + self.eval(t) + 1e-12 * (1.0 + self.eval(s + t)))
        })
    }

    fn scaled(&self, c: f64) -> Modulus {
        Modulus { breakpoints: self.breakpoints.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }
}

/// ω(t) = max ‖Δb‖ over pairs with ‖Δa‖ ≤ t, on the grid of pairwise distances.
pub fn empirical_modulus(data: &FiniteMapData) -> Result<Modulus> {
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            pairs.push((dist(&data.points[i], &data.points[j]), dist(&data.values[i], &data.values[j])));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut bp = vec![0.0];
    let mut vals = vec![0.0];
    for (d, w) in pairs {
        if d <= super::DUPLICATE_TOL {
            continue;
        }
        let w = w.max(*vals.last().expect("non-empty"));
        if d > *bp.last().expect("non-empty") {
            bp.push(d);
            vals.push(w);
        } else {
            *vals.last_mut().expect("non-empty") = w;
        }
    }
    Modulus::new(bp, vals)
}

/// ω₁(t) = intercept + slope·t with intercept 2 and slope 1/δ, δ the largest grid prefix with ω < 1.
pub fn affine_majorant(w: &Modulus) -> Result<(f64, f64)> {
    let (b, v) = (w.breakpoints(), w.values());
    if v[1] >= 1.0 {
        return Err(Error::NoAdmissibleDelta(v[1]));
    }
    let last = v.iter().take_while(|&&x| x < 1.0).count() - 1;
    let delta = b[last];
    let (slope, intercept) = (1.0 / delta, 2.0);
    for (t, x) in b.iter().zip(v) {
        if intercept + slope * t < *x {
            return Err(Error::Invalid(format!("affine majorant fails at t = {t}: modulus is not subadditive")));
        }
    }
    Ok((slope, intercept))
}

/// Least concave majorant on the grid (upper hull, monotone chain).
pub fn concave_majorant(w: &Modulus) -> Result<Modulus> {
    affine_majorant(w)?;
    let (b, v) = (w.breakpoints(), w.values());
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..b.len() {
        while hull.len() >= 2 {
            let (p, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop q when it lies on or below the chord p → i
            let cross = (b[q] - b[p]) * (v[i] - v[p]) - (v[q] - v[p]) * (b[i] - b[p]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut vals = Vec::with_capacity(b.len());
    let mut seg = 0;
    for (i, &t) in b.iter().enumerate() {
        while seg + 1 < hull.len() - 1 && hull[seg + 1] <= i {
            seg += 1;
        }
        let (p, q) = (hull[seg], hull[(seg + 1).min(hull.len() - 1)]);
        let y = if p == q || i == p { v[p] } else if i == q { v[q] } else { v[p] + (v[q] - v[p]) * (t - b[p]) / (b[q] - b[p]) };
        vals.push(y.max(v[i]));
    }
    Modulus::new(b.to_vec(), vals)
}

/// Empirical modulus → concave majorant → lower McShane formula.
pub fn uniform_extend(data: &FiniteMapData, x: &VectorN, _cfg: &SolverConfig) -> Result<f64> {
    data.scalar()?;
    data.check_query(x)?;
    if data.len() == 1 {
        return Ok(data.values[0][0]);
    }
    let w = empirical_modulus(data)?;
    let top = w.values().last().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(data.values[0][0]);
    }
    // finite data: normalizing by 2·max ω puts the whole grid below the δ threshold
    let norm = 2.0 * top;
    let w2 = concave_majorant(&w.scaled(1.0 / norm))?.scaled(norm);
    extend_mcshane(data, &w2, x, Side::Lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn grid(k: usize, hi: f64) -> Vec<f64> {
        (0..=k).map(|i| hi * i as f64 / k as f64).collect()
    }

    #[test]
    fn evaluation_interpolates_and_extrapolates() {
        let w = Modulus::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 3.0]).unwrap();
        assert_eq!(w.eval(0.5), 1.0);
        assert_eq!(w.eval(2.0), 2.5);
        assert_eq!(w.eval(5.0), 4.0);
        assert!(w.is_concave() && w.is_subadditive());
        assert!(Modulus::new(vec![0.0, 1.0], vec![0.0, -1.0]).is_err());
        assert!(Modulus::new(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn affine_majorant_cases() {
        let lin = Modulus::from_fn(&grid(10, 2.0), |t| t).unwrap();
        let (s, c) = affine_majorant(&lin).unwrap();
        assert!((1.0 / s - 0.8).abs() < 1e-12 && c == 2.0);
        let sq = Modulus::from_fn(&grid(40, 4.0), f64::sqrt).unwrap();
        let (s, c) = affine_majorant(&sq).unwrap();
        assert!(sq.breakpoints().iter().all(|&t| c + s * t >= t.sqrt()));
        let jump = Modulus::new(vec![0.0, 0.1, 1.0], vec![0.0, 0.5, 0.6]).unwrap();
        assert!(affine_majorant(&jump).is_ok());
        let big = Modulus::new(vec![0.0, 0.1, 1.0], vec![0.0, 1.0, 1.2]).unwrap();
        assert_eq!(affine_majorant(&big), Err(Error::NoAdmissibleDelta(1.0)));
    }

    #[test]
    fn majorant_of_square_is_chord() {
        let w = Modulus::from_fn(&grid(100, 1.0), |t| t * t).unwrap();
        let m = concave_majorant(&w).unwrap();
        for (t, y) in m.breakpoints().iter().zip(m.values()) {
            assert!((y - t).abs() <= 1e-9);
        }
        let c = Modulus::from_fn(&grid(20, 0.9), |t| t.sqrt() * 0.5).unwrap();
        assert_eq!(concave_majorant(&c).unwrap(), c);
    }

    #[test]
    fn uniform_extension() {
        let d = FiniteMapData::from_rows(&[&[0.0], &[1.0], &[3.0]], &[&[0.0], &[2.0], &[1.0]], None).unwrap();
        let cfg = SolverConfig::default();
        for i in 0..3 {
            assert!((uniform_extend(&d, &d.points[i], &cfg).unwrap() - d.values[i][0]).abs() <= 1e-12);
        }
        let single = FiniteMapData::from_rows(&[&[0.0]], &[&[4.0]], None).unwrap();
        assert_eq!(uniform_extend(&single, &VectorN::new(vec![9.0]).unwrap(), &cfg).unwrap(), 4.0);
        // √-Hölder data
        let ts: Vec<f64> = (0..8).map(|i| (i * i) as f64 / 100.0).collect();
        let pts: Vec<Vec<f64>> = ts.iter().map(|&t| vec![t]).collect();
        let vals: Vec<Vec<f64>> = ts.iter().map(|&t| vec![t.sqrt()]).collect();
        let pr: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let vr: Vec<&[f64]> = vals.iter().map(|p| p.as_slice()).collect();
        let h = FiniteMapData::from_rows(&pr, &vr, None).unwrap();
        let w = empirical_modulus(&h).unwrap();
        let w2 = concave_majorant(&w.scaled(0.25)).unwrap().scaled(4.0);
        let mut rng = seeded(5);
        for _ in 0..200 {
            let (a, b) = (rng.random_range(-0.2..0.6), rng.random_range(-0.2..0.6));
            let fa = uniform_extend(&h, &VectorN::new(vec![a]).unwrap(), &cfg).unwrap();
            let fb = uniform_extend(&h, &VectorN::new(vec![b]).unwrap(), &cfg).unwrap();
            assert!((fa - fb).abs() <= w2.eval((a - b).abs()) + 1e-6);
        }
    }

    fn monotone_grid() -> impl Strategy<Value = Modulus> {
        prop::collection::vec((0.01..1.0f64, 0.0..1.0f64), 1..15).prop_map(|steps| {
            let mut b = vec![0.0];
            let mut v = vec![0.0];
            for (dt, dv) in steps {
                b.push(b.last().unwrap() + dt);
                v.push(v.last().unwrap() + dv * dv);
            }
            Modulus::new(b, v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn majorant_properties(w in monotone_grid()) {
            let top = w.values().last().copied().unwrap();
            let s = if top > 0.0 { 0.5 / top } else { 1.0 };
            let ws = w.scaled(s);
            let m = concave_majorant(&ws).unwrap();
            prop_assert!(m.is_concave());
            prop_assert!(m.values().windows(2).all(|p| p[1] >= p[0]));
            prop_assert!(m.values().iter().zip(ws.values()).all(|(a, b)| *a >= b - 1e-15));
            prop_assert!(m.is_subadditive());
        }
    }
}
