//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use lipext::convex_sets::{caratheodory, distance, project, radon_partition, ConvexBody};
use lipext::datagen::{ball_family, lipschitz_data, FamilyMode};
use lipext::extension::{
    concave_majorant, empirical_modulus, extend_mcshane, extend_minimax, lipschitz_constant, FiniteMapData, Modulus,
    ProxAvgExtension, Side,
};
use lipext::functions::{
    self, biconjugate_check, conjugate, delta_conjugate_identity_check, fenchel_duality_solve, indicator, kappa,
    max_affine, point_indicator, q, translate, ExtendedReal,
};
use lipext::geometry::dot;
use lipext::helly::{check_k_intersection, common_point, jung_ball, jung_bound_check, BodyFamily};
use lipext::monotone::{
    autoconjugacy_check, firm_to_nonexpansive, firmly_nonexpansive_check, fitzpatrick_conj_eval, fitzpatrick_eval,
    graph_of_resolvent, is_monotone, nonexpansive_to_firm, psi_eval, resolvent_of_graph, OperatorGraph,
};
use lipext::rng::{seeded, Rng64};
use lipext::{Ball, Polytope, SolverConfig, VectorN};
use rand::Rng;
use rayon::prelude::*;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

type Check = Result<String, String>;

fn v(c: &[f64]) -> VectorN {
    VectorN::new(c.to_vec()).unwrap()
}

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn uniform(rng: &mut Rng64, d: usize, r: f64) -> VectorN {
    v(&(0..d).map(|_| rng.random_range(-r..r)).collect::<Vec<_>>())
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn fin(x: ExtendedReal) -> Option<f64> {
    x.finite()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1. Kirszbraun suite

struct KirszStats {
    interp: f64,
    ratio_excess: f64,
    residual: f64,
}

fn kirszbraun_dataset(idx: usize) -> Result<KirszStats, String> {
    let mut rng = seeded(1000 + idx as u64);
    let dim = 1 + idx % 3;
    let count = rng.random_range(2..=20);
    let data = lipschitz_data(dim, dim, count, &mut rng).map_err(|e| e.to_string())?;
    let l = lipschitz_constant(&data);
    ensure(l <= 1.0 + 1e-9, || format!("dataset {idx}: generated L = {l}"))?;
    let data = FiniteMapData::new(data.points, data.values, Some(l)).map_err(|e| e.to_string())?;

    // 125 random base points, each with a nearby partner, then 750 random pairs from the pool
    let mut pool: Vec<VectorN> = Vec::new();
    for _ in 0..125 {
        let a = uniform(&mut rng, dim, 3.0);
        let b = v(&a.iter().map(|x| x + rng.random_range(-1e-2..1e-2)).collect::<Vec<_>>());
        pool.push(a);
        pool.push(b);
    }
    let mut pairs: Vec<(usize, usize)> = (0..125).map(|i| (2 * i, 2 * i + 1)).collect();
    while pairs.len() < 1000 {
        let (i, j) = (rng.random_range(0..pool.len()), rng.random_range(0..pool.len()));
        if i != j {
            pairs.push((i, j));
        }
    }

    let mut st = KirszStats { interp: 0.0, ratio_excess: f64::NEG_INFINITY, residual: 0.0 };
    let c = cfg();
    let prox = ProxAvgExtension::new(&data).map_err(|e| e.to_string())?;
    for method in 0..2 {
        let run = |x: &VectorN| -> Result<(VectorN, f64), String> {
            if method == 0 {
                let r = extend_minimax(&data, x, &c).map_err(|e| format!("dataset {idx}, query {:?}: {e}", x.coords()))?;
                Ok((r.y, r.residual))
            } else {
                let r = prox.eval(x, &c).map_err(|e| format!("dataset {idx}, query {:?}: {e}", x.coords()))?;
                Ok((r.y, 0.0))
            }
        };
        for (a, b) in data.points.iter().zip(&data.values) {
            let (y, res) = run(a)?;
            st.interp = st.interp.max(dist(&y, b));
            st.residual = st.residual.max(res);
        }
        let ys = pool.iter().map(run).collect::<Result<Vec<_>, _>>()?;
        for (_, res) in &ys {
            st.residual = st.residual.max(*res);
        }
        for &(i, j) in &pairs {
            let dx = dist(&pool[i], &pool[j]);
            let dy = dist(&ys[i].0, &ys[j].0);
            st.ratio_excess = st.ratio_excess.max(dy - l * (1.0 + 1e-4) * dx);
        }
    }
    Ok(st)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let stats = (0..50).into_par_iter().map(kirszbraun_dataset).collect::<Result<Vec<_>, _>>()?;
    let secs = start.elapsed().as_secs_f64();
    let interp = stats.iter().map(|s| s.interp).fold(0.0, f64::max);
    let excess = stats.iter().map(|s| s.ratio_excess).fold(f64::NEG_INFINITY, f64::max);
    let residual = stats.iter().map(|s| s.residual).fold(0.0, f64::max);
    let detail = format!(
        "50 datasets, max interpolation error {interp:.2e}, max (‖ΔF‖ − L(1+1e-4)‖Δx‖) {excess:.2e}, max minimax residual {residual:.2e}, {secs:.1} s"
    );
    ensure(interp <= 1e-5 && excess <= 0.0 && residual <= 1e-6 && secs < 120.0, || detail.clone())?;
    Ok(detail)
}

// 2. Closed-form conjugates

fn criterion_2() -> Check {
    let c = cfg();
    let qs = conjugate(q(2), 10.0);
    let mut qgap: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let x = v(&[-2.0 + 4.0 * i as f64 / 9.0, -2.0 + 4.0 * j as f64 / 9.0]);
            let a = fin(functions::eval(&qs, &x, &c).map_err(|e| e.to_string())?).ok_or("q* infinite on grid")?;
            qgap = qgap.max((a - 0.5 * dot(&x, &x).unwrap()).abs());
        }
    }
    ensure(qgap <= 1e-5, || format!("q* gap {qgap:e}"))?;

    let mut rng = seeded(2);
    let mut kgap: f64 = 0.0;
    let mut off_finite = 0;
    for n in 1..=2 {
        let ks = conjugate(kappa(n), 10.0);
        for _ in 0..10 {
            let x = uniform(&mut rng, n, 2.0);
            let anti: Vec<f64> = x.iter().copied().chain(x.iter().map(|t| -t)).collect();
            let val = fin(functions::eval(&ks, &v(&anti), &c).map_err(|e| e.to_string())?).ok_or("κ* infinite on anti-diagonal")?;
            kgap = kgap.max((val - 0.5 * dot(&x, &x).unwrap()).abs());
            let y = uniform(&mut rng, n, 2.0);
            let off: Vec<f64> = x.iter().chain(y.iter()).copied().collect();
            if dist(&x, &y.iter().map(|t| -t).collect::<Vec<_>>()) > 1e-3
                && !functions::eval(&ks, &v(&off), &c).map_err(|e| e.to_string())?.is_infinite()
            {
                off_finite += 1;
            }
        }
    }
    ensure(kgap <= 1e-6 && off_finite == 0, || format!("κ* gap {kgap:e}, {off_finite} finite off-diagonal values"))?;

    let mut dgap: f64 = 0.0;
    let choices = [(vec![0.0, 0.0], vec![0.0, 0.0]), (vec![1.0, -0.5], vec![0.3, 0.7]), (vec![-2.0, 1.0], vec![1.5, -1.0])];
    for (a, b) in &choices {
        let samples: Vec<VectorN> = (0..10).map(|_| uniform(&mut rng, 4, 2.0)).collect();
        let g = delta_conjugate_identity_check(&v(a), &v(b), &samples, 10.0, &c).map_err(|e| e.to_string())?;
        dgap = dgap.max(g);
    }
    ensure(dgap <= 1e-5, || format!("δ* identity gap {dgap:e}"))?;
    Ok(format!("q* gap {qgap:.2e} (100 pts), κ* gap {kgap:.2e} and +∞ off the anti-diagonal, δ* gap {dgap:.2e} (3×10)"))
}

// 3. Biconjugation

fn criterion_3() -> Check {
    let gaps = (0..20)
        .into_par_iter()
        .map(|i| -> Result<f64, String> {
            let mut rng = seeded(300 + i);
            let n = 1 + (i as usize) % 2;
            let k = rng.random_range(1..=10);
            let slopes: Vec<VectorN> = (0..k).map(|_| uniform(&mut rng, n, 2.0)).collect();
            let offsets: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = max_affine(slopes, offsets).map_err(|e| e.to_string())?;
            let xs: Vec<VectorN> = (0..10).map(|_| uniform(&mut rng, n, 2.0)).collect();
            biconjugate_check(&f, &xs, 10.0, &cfg()).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let g = gaps.iter().copied().fold(0.0, f64::max);
    ensure(g <= 1e-5, || format!("max biconjugate gap {g:e}"))?;
    Ok(format!("20 max-affine functions, max |f** − f| {g:.2e}"))
}

// 4. Fenchel duality

fn criterion_4() -> Check {
    let lin = |c: &[f64]| max_affine(vec![v(&c.iter().map(|x| -x).collect::<Vec<_>>())], vec![0.0]).unwrap();
    let abs1 = max_affine(vec![v(&[1.0]), v(&[-1.0])], vec![0.0, 0.0]).unwrap();
    let ball = |r: f64| indicator(ConvexBody::Ball(Ball::new(v(&[0.0, 0.0]), r).unwrap()));
    let shifted = |a: &[f64]| translate(v(a), v(&vec![0.0; a.len()]), 0.0, q(a.len())).unwrap();
    let n3 = |c: &[f64]| dot(c, c).unwrap();
    // (f, h = −g, inf(f + h))
    let cases: Vec<(functions::ConvexFunctionExpr, functions::ConvexFunctionExpr, f64)> = vec![
        (q(1), lin(&[2.0]), -2.0),
        (q(2), lin(&[1.0, -2.0]), -2.5),
        (q(2), lin(&[0.5, 0.5]), -0.25),
        (q(1), q(1), 0.0),
        (shifted(&[1.0, 2.0]), q(2), 0.25 * n3(&[1.0, 2.0])),
        (shifted(&[-3.0]), q(1), 2.25),
        (ball(1.5), lin(&[3.0, 4.0]), -7.5),
        (ball(1.0), q(2), 0.0),
        (abs1.clone(), shifted(&[1.0]), 0.5),
        (point_indicator(v(&[1.0, -1.0])), q(2), 1.0),
    ];
    let mut worst_gap: f64 = 0.0;
    let mut worst_opt: f64 = 0.0;
    for (i, (f, h, opt)) in cases.iter().enumerate() {
        let r = fenchel_duality_solve(f, h, 10.0, &cfg()).map_err(|e| format!("instance {i}: {e}"))?;
        worst_gap = worst_gap.max(r.gap.abs());
        worst_opt = worst_opt.max((r.primal - opt).abs()).max((r.dual - opt).abs());
    }
    ensure(worst_gap <= 1e-5 && worst_opt <= 1e-5, || format!("max gap {worst_gap:e}, max distance to the known optimum {worst_opt:e}"))?;
    Ok(format!("10 instances, max primal − dual gap {worst_gap:.2e}, max error vs known optimum {worst_opt:.2e}"))
}

// 5 and 6. Monotone graphs

/// x ↦ Mx + c with M = BᵀB + (C − Cᵀ), sampled at k random points.
fn random_monotone(seed: u64) -> OperatorGraph {
    let mut rng = seeded(seed);
    let n = 1 + (seed as usize) % 2;
    let k = rng.random_range(1..=8);
    let b: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let cm: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let shift: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let m = |i: usize, j: usize| (0..n).map(|r| b[r * n + i] * b[r * n + j]).sum::<f64>() + cm[i * n + j] - cm[j * n + i];
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..k)
        .map(|_| {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let y = (0..n).map(|i| (0..n).map(|j| m(i, j) * x[j]).sum::<f64>() + shift[i]).collect();
            (x, y)
        })
        .collect();
    OperatorGraph::from_rows(&rows).unwrap()
}

fn criterion_5() -> Check {
    let res = (0..20u64)
        .into_par_iter()
        .map(|s| -> Result<[f64; 4], String> {
            let t = random_monotone(500 + s);
            ensure(is_monotone(&t).holds, || format!("graph {s} not monotone"))?;
            let c = cfg();
            let mut g = [0.0f64; 4];
            for (a, astar) in &t.pairs {
                let ip = dot(a, astar).unwrap();
                g[0] = g[0].max((fitzpatrick_eval(&t, a, astar).map_err(|e| e.to_string())? - ip).abs());
                let fc = fitzpatrick_conj_eval(&t, astar, a, &c).map_err(|e| e.to_string())?;
                g[1] = g[1].max(fin(fc).map_or(f64::INFINITY, |v| (v - ip).abs()));
                g[2] = g[2].max((psi_eval(&t, a, astar, &c).map_err(|e| e.to_string())? - ip).abs());
            }
            let mut rng = seeded(5500 + s);
            let samples: Vec<VectorN> = (0..10).map(|_| uniform(&mut rng, 2 * t.n, 2.0)).collect();
            g[3] = autoconjugacy_check(&t, &samples, 1e3, &c).map_err(|e| e.to_string())?;
            Ok(g)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mx = |i: usize| res.iter().map(|g| g[i]).fold(0.0, f64::max);
    let (phi, phic, psi, auto) = (mx(0), mx(1), mx(2), mx(3));
    let detail = format!("20 graphs, Φ gap {phi:.2e}, Φ* gap {phic:.2e}, Ψ gap {psi:.2e}, autoconjugacy gap {auto:.2e}");
    ensure(phi <= 1e-12 && phic <= 1e-8 && psi <= 1e-5 && auto <= 1e-4, || detail.clone())?;
    Ok(detail)
}

fn graph_dist(a: &OperatorGraph, b: &OperatorGraph) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.pairs.iter().zip(&b.pairs).map(|((x, y), (u, w))| dist(x, u).max(dist(y, w))).fold(0.0, f64::max)
}

fn criterion_6() -> Check {
    let mut trip: f64 = 0.0;
    let mut slack = f64::INFINITY;
    for s in 0..200u64 {
        let t = random_monotone(600 + s);
        let f = resolvent_of_graph(&t).map_err(|e| e.to_string())?;
        slack = slack.min(firmly_nonexpansive_check(&f).min);
        trip = trip.max(graph_dist(&graph_of_resolvent(&f), &t));
        let ne = firm_to_nonexpansive(&f).map_err(|e| e.to_string())?;
        trip = trip.max(graph_dist(&nonexpansive_to_firm(&ne).map_err(|e| e.to_string())?, &f));
    }
    for s in 0..20u64 {
        let t = random_monotone(500 + s);
        let f = resolvent_of_graph(&t).map_err(|e| e.to_string())?;
        slack = slack.min(firmly_nonexpansive_check(&f).min);
    }
    let detail = format!("220 graphs, round-trip error {trip:.2e}, min firm slack {slack:.2e}");
    ensure(trip <= 1e-12 && slack >= -1e-10, || detail.clone())?;
    Ok(detail)
}

// 7. Helly suite

/// Grid brute force over the common bounding box: does some cell meet every ball?
fn grid_oracle(f: &BodyFamily) -> bool {
    let balls: Vec<&Ball> = f.bodies.iter().map(|b| match b {
        ConvexBody::Ball(b) => b,
        _ => unreachable!(),
    }).collect();
    let (mut lo, mut hi) = ([f64::NEG_INFINITY; 2], [f64::INFINITY; 2]);
    for b in &balls {
        for d in 0..2 {
            lo[d] = lo[d].max(b.center[d] - b.radius);
            hi[d] = hi[d].min(b.center[d] + b.radius);
        }
    }
    if lo[0] > hi[0] || lo[1] > hi[1] {
        return false;
    }
    let h = [(hi[0] - lo[0]) / 199.0, (hi[1] - lo[1]) / 199.0];
    let half_diag = 0.5 * (h[0] * h[0] + h[1] * h[1]).sqrt();
    (0..200).any(|i| {
        (0..200).any(|j| {
            let p = [lo[0] + i as f64 * h[0], lo[1] + j as f64 * h[1]];
            balls.iter().all(|b| dist(&p, &b.center) <= b.radius + half_diag)
        })
    })
}

fn criterion_7() -> Check {
    let rows = (0..100u64)
        .into_par_iter()
        .map(|s| -> Result<(bool, bool, f64), String> {
            let mut rng = seeded(700 + s);
            let count = rng.random_range(5..=30);
            let mode = [FamilyMode::CommonCore, FamilyMode::DisjointPair, FamilyMode::Random][(s % 3) as usize];
            let fam = ball_family(2, count, mode, &mut rng).map_err(|e| e.to_string())?;
            let c = cfg();
            let passes = check_k_intersection(&fam, 3, &c).map_err(|e| e.to_string())?.intersects;
            let oracle = grid_oracle(&fam);
            let residual = if passes { common_point(&fam, &c).residual } else { 0.0 };
            Ok((passes, oracle, residual))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let passed = rows.iter().filter(|r| r.0).count();
    let false_pos = rows.iter().filter(|r| r.0 && !r.1).count();
    let residual = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let detail = format!("100 families, {passed} pass the 3-check, false positives {false_pos}, max witness residual {residual:.2e}");
    ensure(false_pos == 0 && residual <= 1e-6 && passed > 0 && passed < 100, || detail.clone())?;
    Ok(detail)
}

// 8. Geometry certificates

fn criterion_8() -> Check {
    let c = cfg();
    let mut rng = seeded(8);
    let (mut car_support_ok, mut car_err): (bool, f64) = (true, 0.0);
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let k = rng.random_range(1..=12);
        let verts: Vec<VectorN> = (0..k).map(|_| uniform(&mut rng, n, 2.0)).collect();
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        let s: f64 = w.iter().sum();
        let x = v(&(0..n).map(|d| verts.iter().zip(&w).map(|(p, wi)| p[d] * wi / s).sum()).collect::<Vec<_>>());
        let p = Polytope::new(verts.clone()).map_err(|e| e.to_string())?;
        let cert = caratheodory(&x, &p).map_err(|e| e.to_string())?;
        car_support_ok &= cert.indices.len() <= n + 1;
        let rec: Vec<f64> =
            (0..n).map(|d| cert.indices.iter().zip(cert.weights.weights()).map(|(&i, wi)| verts[i][d] * wi).sum()).collect();
        car_err = car_err.max(dist(&rec, &x));
    }
    ensure(car_support_ok && car_err <= 1e-8, || format!("Carathéodory support ok {car_support_ok}, error {car_err:e}"))?;

    let mut radon_err: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let pts: Vec<VectorN> = (0..n + 2).map(|_| uniform(&mut rng, n, 2.0)).collect();
        let (i, j, w) = radon_partition(&pts, n).map_err(|e| e.to_string())?;
        for side in [i, j] {
            let hull = Polytope::new(side.iter().map(|&k| pts[k].clone()).collect()).map_err(|e| e.to_string())?;
            radon_err = radon_err.max(distance(&w, &ConvexBody::Polytope(hull)).map_err(|e| e.to_string())?);
        }
    }
    ensure(radon_err <= 1e-8, || format!("Radon witness distance {radon_err:e}"))?;

    let mut proj_slack = f64::INFINITY;
    for t in 0..1000 {
        let n = 1 + t % 3;
        let body = if t % 2 == 0 {
            ConvexBody::Ball(Ball::new(uniform(&mut rng, n, 1.0), rng.random_range(0.2..2.0)).unwrap())
        } else {
            let k = rng.random_range(1..=8);
            ConvexBody::Polytope(Polytope::new((0..k).map(|_| uniform(&mut rng, n, 2.0)).collect()).unwrap())
        };
        let (x, y) = (uniform(&mut rng, n, 4.0), uniform(&mut rng, n, 4.0));
        let (px, py) = (project(&x, &body).unwrap(), project(&y, &body).unwrap());
        let dp: Vec<f64> = px.iter().zip(py.iter()).map(|(a, b)| a - b).collect();
        let dx: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
        proj_slack = proj_slack.min(dot(&dp, &dx).unwrap() - dot(&dp, &dp).unwrap());
    }
    ensure(proj_slack >= -1e-8, || format!("projection firm slack {proj_slack:e}"))?;

    let mut jung_excess = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let k = rng.random_range(2..=15);
        let pts: Vec<VectorN> = (0..k).map(|_| uniform(&mut rng, n, 2.0)).collect();
        let j = jung_bound_check(&pts).map_err(|e| e.to_string())?;
        jung_excess = jung_excess.max(j.radius - j.bound);
    }
    let tri = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.5, 3f64.sqrt() / 2.0])];
    let tb = jung_ball(&tri, &c).map_err(|e| e.to_string())?;
    let tj = jung_bound_check(&tri).map_err(|e| e.to_string())?;
    let tri_err = (tb.radius - 1.0 / 3f64.sqrt()).abs().max((tj.bound - tb.radius).abs());
    ensure(jung_excess <= 1e-9 && tri_err <= 1e-6, || format!("Jung excess {jung_excess:e}, triangle error {tri_err:e}"))?;
    Ok(format!(
        "Carathéodory error {car_err:.2e}, Radon {radon_err:.2e}, projection slack {proj_slack:.2e}, Jung excess {jung_excess:.2e}, triangle {tri_err:.2e}"
    ))
}

// 9. Modulus machinery

fn scaled(w: &Modulus, s: f64) -> Modulus {
    Modulus::new(w.breakpoints().to_vec(), w.values().iter().map(|x| x * s).collect()).unwrap()
}

fn criterion_9() -> Check {
    let mut rng = seeded(9);
    let mut bad = 0;
    for _ in 0..200 {
        let k = rng.random_range(2..=30);
        let mut bp = vec![0.0];
        let mut vals = vec![0.0];
        for _ in 1..k {
            bp.push(bp.last().unwrap() + rng.random_range(0.01..0.5));
            vals.push((vals.last().unwrap() + rng.random_range(0.0..0.1f64)).min(0.99));
        }
        let w = Modulus::new(bp.clone(), vals.clone()).unwrap();
        let m = concave_majorant(&w).map_err(|e| e.to_string())?;
        let ok = m.is_concave()
            && m.values().windows(2).all(|p| p[1] >= p[0])
            && bp.iter().zip(&vals).all(|(t, x)| m.eval(*t) >= *x)
            && (0..100).all(|i| {
                let t = (bp.last().unwrap() * i as f64 / 99.0).min(*bp.last().unwrap());
                m.eval(t) >= w.eval(t)
            });
        bad += usize::from(!ok);
    }
    ensure(bad == 0, || format!("{bad} majorants fail concave/increasing/≥ ω"))?;

    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let sq = Modulus::from_fn(&grid, |t| t * t).unwrap();
    let chord = concave_majorant(&sq).map_err(|e| e.to_string())?;
    let chord_err = (0..=1000).map(|i| i as f64 / 1000.0).map(|t| (chord.eval(t) - t).abs()).fold(0.0, f64::max);
    ensure(chord_err <= 1e-9, || format!("t² majorant differs from the chord by {chord_err:e}"))?;

    let (mut order_viol, mut excess) = (0usize, f64::NEG_INFINITY);
    for s in 0..10 {
        let mut r = seeded(900 + s);
        let m = 1 + (s as usize) % 3;
        let data = lipschitz_data(m, 1, r.random_range(3..=15), &mut r).unwrap();
        let emp = empirical_modulus(&data).unwrap();
        let top = 2.0 * emp.values().last().copied().unwrap();
        let w = scaled(&concave_majorant(&scaled(&emp, 1.0 / top)).unwrap(), top);
        let xs: Vec<VectorN> = (0..200).map(|_| uniform(&mut r, m, 3.0)).collect();
        let lo: Vec<f64> = xs.iter().map(|x| extend_mcshane(&data, &w, x, Side::Lower).unwrap()).collect();
        let hi: Vec<f64> = xs.iter().map(|x| extend_mcshane(&data, &w, x, Side::Upper).unwrap()).collect();
        // equal sides may land an ulp apart
        order_viol += lo.iter().zip(&hi).filter(|(a, b)| **a - **b > 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0)).count();
        for _ in 0..100 {
            let (i, j) = (r.random_range(0..xs.len()), r.random_range(0..xs.len()));
            let bound = w.eval(dist(&xs[i], &xs[j])) + 1e-6;
            excess = excess.max((lo[i] - lo[j]).abs() - bound).max((hi[i] - hi[j]).abs() - bound);
        }
    }
    ensure(order_viol == 0 && excess <= 0.0, || format!("{order_viol} lower > upper, ω excess {excess:e}"))?;
    Ok(format!("200 grids ok, t² chord error {chord_err:.2e}, McShane 10³ pairs max excess over ω + 1e-6 {excess:.2e}"))
}

// 10. CLI determinism

fn lipext(dir: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_lipext")).current_dir(dir).args(args).output().unwrap().status.code().unwrap()
}

fn criterion_10() -> Check {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let fx = |n: &str| Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(n).to_str().unwrap().to_string();
    std::fs::write(dir.join("q2.csv"), "0,0\n1.5,-0.5\n3,3\n-2,1\n").unwrap();
    std::fs::write(dir.join("q1.csv"), "0\n0.5\n-3\n").unwrap();
    std::fs::write(dir.join("p.csv"), "1,-1\n0.3,0.3\n").unwrap();
    std::fs::write(dir.join("s2.csv"), "0.1,0.2\n-1,1\n").unwrap();
    std::fs::write(dir.join("s4.csv"), "0.1,0.2,0.3,0.4\n-1,0.5,2,0\n").unwrap();
    std::fs::write(dir.join("q1d.json"), r#"{"m":1,"n":1,"L":null,"points":[[0],[1],[2.5]],"values":[[0],[0.4],[1.0]]}"#).unwrap();
    let (four, q, kc, sing) = (fx("four_balls.json"), fx("q.json"), fx("kappa_conj.json"), fx("singleton.json"));
    let runs: Vec<Vec<&str>> = vec![
        vec!["gen", "--kind", "lipschitz-data", "--n", "2", "--count", "12", "--seed", "5", "--out", "d.json"],
        vec!["gen", "--kind", "ball-family", "--n", "2", "--count", "8", "--mode", "common-core", "--out", "f.json"],
        vec!["extend", "--data", "d.json", "--queries", "q2.csv", "--method", "minimax", "--out", "e1.csv"],
        vec!["extend", "--data", "d.json", "--queries", "q2.csv", "--method", "proxavg", "--out", "e2.csv"],
        vec!["extend", "--data", "q1d.json", "--queries", "q1.csv", "--method", "mcshane", "--out", "e3.csv"],
        vec!["extend", "--data", "d.json", "--queries", "q2.csv", "--method", "coordinatewise", "--out", "e4.csv"],
        vec!["helly", "--family", "f.json", "--mode", "verify", "--out", "h1.json"],
        vec!["helly", "--family", &four, "--mode", "common-point", "--out", "h2.json"],
        vec!["helly", "--family", "f.json", "--mode", "k-check", "--k", "2", "--out", "h3.json"],
        vec!["function", "--function", &kc, "--eval", "p.csv", "--out", "fe.csv"],
        vec!["function", "--function", &q, "--conjugate-check", "--out", "fc.json"],
        vec!["function", "--function", &q, "--duality", &q, "--out", "fd.json"],
        vec!["monotone", "--graph", &sing, "--check", "--out", "mc.json"],
        vec!["monotone", "--graph", &sing, "--resolvent", "s2.csv", "--out", "mr.csv"],
        vec!["monotone", "--graph", &sing, "--autoconjugacy", "s4.csv", "--out", "ma.json"],
    ];
    let mut diffs = Vec::new();
    for args in &runs {
        let out = args.last().unwrap();
        let code = lipext(dir, args);
        let first = std::fs::read(dir.join(out)).map_err(|e| format!("{out}: {e} (exit {code})"))?;
        std::fs::remove_file(dir.join(out)).unwrap();
        let manifest = format!("{out}.manifest.json");
        let code2 = lipext(dir, &["replay", &manifest]);
        let second = std::fs::read(dir.join(out)).map_err(|e| format!("{out} replay: {e}"))?;
        if first != second || code != code2 {
            diffs.push(out.to_string());
        }
    }
    ensure(diffs.is_empty(), || format!("replay differs for {diffs:?}"))?;
    Ok(format!("{} commands replayed byte-identically", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("Kirszbraun extension suite", criterion_1),
        ("closed-form conjugates", criterion_2),
        ("biconjugation", criterion_3),
        ("Fenchel duality", criterion_4),
        ("monotone-operator identities", criterion_5),
        ("resolvent correspondence", criterion_6),
        ("Helly suite", criterion_7),
        ("geometry certificates", criterion_8),
        ("modulus machinery", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("PASS {:>2} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
