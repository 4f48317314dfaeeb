//! Seeded generators for extension datasets and ball families.

use crate::convex_sets::ConvexBody;
use crate::error::{Error, Result};
use crate::extension::FiniteMapData;
use crate::geometry::{Ball, VectorN};
use crate::helly::BodyFamily;
use crate::rng::Rng64;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

fn gaussian(rng: &mut Rng64, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// n×m matrix with orthonormal columns (n ≥ m) or rows (n < m).
fn partial_isometry(rng: &mut Rng64, n: usize, m: usize) -> DMatrix<f64> {
    if n >= m {
        gaussian(rng, n, m).qr().q()
    } else {
        gaussian(rng, m, n).qr().q().transpose()
    }
}

/// Samples x ↦ c·Qx + t at `count` points uniform in [−2, 2]^m, with Q a random
/// (partial) rotation and c ∈ [0.3, 1]. L is left to be computed from the data.
pub fn lipschitz_data(m: usize, n: usize, count: usize, rng: &mut Rng64) -> Result<FiniteMapData> {
    if m == 0 || n == 0 || count == 0 {
        return Err(Error::Invalid("dimensions and count must be positive".into()));
    }
    let q = partial_isometry(rng, n, m);
    let c: f64 = rng.random_range(0.3..=1.0);
    let t = gaussian(rng, n, 1);
    let mut points = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let a = DMatrix::from_fn(m, 1, |_, _| rng.random_range(-2.0..2.0));
        let b = c * &q * &a + &t;
        points.push(VectorN::new(a.iter().copied().collect())?);
        values.push(VectorN::new(b.iter().copied().collect())?);
    }
    FiniteMapData::new(points, values, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyMode {
    /// Every ball contains a shared core point.
    CommonCore,
    /// Common-core family with ball 1 moved off to be disjoint from ball 0.
    DisjointPair,
    /// Independent centres in [−3, 3]^n and radii in [0.5, 3].
    Random,
}

fn unit(rng: &mut Rng64, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if l > 1e-9 {
            return v.iter().map(|x| x / l).collect();
        }
    }
}

fn ball(center: Vec<f64>, radius: f64) -> Result<ConvexBody> {
    Ok(ConvexBody::Ball(Ball::new(VectorN::new(center)?, radius)?))
}

pub fn ball_family(n: usize, count: usize, mode: FamilyMode, rng: &mut Rng64) -> Result<BodyFamily> {
    if n == 0 || count == 0 || (mode == FamilyMode::DisjointPair && count < 2) {
        return Err(Error::Invalid("family needs n ≥ 1 and enough balls for its mode".into()));
    }
    let mut bodies = Vec::with_capacity(count);
    match mode {
        FamilyMode::Random => {
            for _ in 0..count {
                let c = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
                bodies.push(ball(c, rng.random_range(0.5..3.0))?);
            }
        }
        FamilyMode::CommonCore | FamilyMode::DisjointPair => {
            let core: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mut balls = Vec::with_capacity(count);
            for _ in 0..count {
                let u = unit(rng, n);
                let rho: f64 = rng.random_range(0.0..3.0);
                let c: Vec<f64> = core.iter().zip(&u).map(|(p, d)| p + rho * d).collect();
                balls.push((c, rho + rng.random_range(0.05..1.0)));
            }
            if mode == FamilyMode::DisjointPair {
                let u = unit(rng, n);
                let gap = rng.random_range(0.1..1.0);
                let (c0, r0) = balls[0].clone();
                let r1 = balls[1].1;
                balls[1].0 = c0.iter().zip(&u).map(|(c, d)| c + (r0 + r1 + gap) * d).collect();
            }
            for (c, r) in balls {
                bodies.push(ball(c, r)?);
            }
        }
    }
    BodyFamily::new(bodies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::lipschitz_constant;
    use crate::helly::check_k_intersection;
    use crate::rng::seeded;
    use crate::solvers::SolverConfig;

    #[test]
    fn lipschitz_data_is_contractive_and_seeded() {
        for (m, n) in [(1, 1), (2, 2), (3, 3), (2, 3), (3, 1)] {
            let d = lipschitz_data(m, n, 15, &mut seeded(9)).unwrap();
            assert!(lipschitz_constant(&d) <= 1.0 + 1e-9);
            assert_eq!(d, lipschitz_data(m, n, 15, &mut seeded(9)).unwrap());
        }
        assert_ne!(lipschitz_data(2, 2, 5, &mut seeded(1)).unwrap(), lipschitz_data(2, 2, 5, &mut seeded(2)).unwrap());
    }

    #[test]
    fn family_modes() {
        let cfg = SolverConfig::default();
        let f = ball_family(2, 8, FamilyMode::CommonCore, &mut seeded(4)).unwrap();
        assert!(check_k_intersection(&f, 3, &cfg).unwrap().intersects);
        let f = ball_family(2, 8, FamilyMode::DisjointPair, &mut seeded(4)).unwrap();
        let r = check_k_intersection(&f, 2, &cfg).unwrap();
        assert!(!r.intersects);
        assert_eq!(r.violating_subset, Some(vec![0, 1]));
        assert!(ball_family(2, 1, FamilyMode::DisjointPair, &mut seeded(0)).is_err());
    }
}
