use crate::args::*;
use crate::io::*;
use lipext::datagen::{ball_family, lipschitz_data, FamilyMode};
use lipext::extension::{ExtensionModel, FiniteMapData, Method};
use lipext::functions::{self, ConvexFunctionExpr, DualityReport, ExtendedReal};
use lipext::helly::{check_k_intersection, common_point, helly_verify, BodyFamily};
use lipext::monotone::{self, OperatorGraph, PairCheck};
use lipext::rng::seeded;
use lipext::{SolverConfig, VectorN};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::path::PathBuf;

/// Exit code plus the input files read.
pub struct Outcome {
    pub code: i32,
    pub inputs: Vec<PathBuf>,
}

pub fn solver_cfg(g: &GlobalOpts, tol: Option<f64>) -> Result<SolverConfig, Failure> {
    let cfg = SolverConfig { tol: tol.unwrap_or(1e-9), max_iters: g.max_iters, seed: g.seed };
    cfg.validate()?;
    Ok(cfg)
}

fn vec_n(v: &[f64]) -> Result<VectorN, Failure> {
    Ok(VectorN::new(v.to_vec())?)
}

fn header(prefix: &str, d: usize) -> impl Iterator<Item = String> + '_ {
    (1..=d).map(move |i| format!("{prefix}_{i}"))
}

pub fn extend(a: &ExtendArgs, g: &GlobalOpts) -> Result<Outcome, Failure> {
    let data: FiniteMapData = read_json(&a.data)?;
    data.validate()?;
    let tol = g.tol.unwrap_or(1e-6);
    let method = match a.method {
        ExtendMethod::Minimax => Method::Minimax,
        ExtendMethod::Proxavg => Method::Proxavg,
        ExtendMethod::Mcshane => Method::Mcshane,
        ExtendMethod::Coordinatewise => Method::Coordinatewise,
    };
    let model = ExtensionModel::new(method, data.clone(), solver_cfg(g, None)?)?;
    let queries = read_points(&a.queries, data.m)?;
    let results: Vec<_> = queries.par_iter().map(|q| model.eval(&VectorN::new(q.clone())?)).collect();
    let mut out = csv_line(header("q", data.m).chain(header("F", data.n)).chain(["residual".to_string()]));
    let mut worst: f64 = 0.0;
    for (q, r) in queries.iter().zip(results) {
        let r = r?;
        worst = worst.max(r.residual);
        out += &csv_line(q.iter().chain(r.y.iter()).chain([&r.residual]).map(|v| fmt_num(*v)));
    }
    write_text(&a.out, &out)?;
    if worst > tol {
        eprintln!("largest residual {worst:e} exceeds tolerance {tol:e}");
    }
    Ok(Outcome { code: if worst <= tol { 0 } else { 4 }, inputs: vec![a.data.clone(), a.queries.clone()] })
}

pub fn helly(a: &HellyArgs, g: &GlobalOpts) -> Result<Outcome, Failure> {
    let fam: BodyFamily = read_json(&a.family)?;
    fam.validate()?;
    let cfg = solver_cfg(g, g.tol)?;
    let r = match a.mode {
        HellyMode::Verify => helly_verify(&fam, &cfg)?,
        HellyMode::CommonPoint => common_point(&fam, &cfg),
        HellyMode::KCheck => {
            let k = a.k.ok_or_else(|| Failure::invalid("k-check needs --k"))?;
            if k == 0 {
                return Err(Failure::invalid("--k must be at least 1"));
            }
            check_k_intersection(&fam, k, &cfg)?
        }
    };
    write_json(&a.out, &r)?;
    Ok(Outcome { code: if r.intersects { 0 } else { 1 }, inputs: vec![a.family.clone()] })
}

#[derive(Serialize)]
struct ConjugateReport {
    samples: usize,
    finite_samples: usize,
    /// max |f** − f| where f is finite; null if f** is infinite there.
    biconjugate_gap: Option<f64>,
    /// max |f* − f| where both are finite.
    self_conjugacy_gap: Option<f64>,
    /// min f(x) + f*(y) − ⟨x, y⟩ over sample pairs with finite terms.
    young_min_slack: Option<f64>,
}

fn max_opt(acc: Option<f64>, v: f64) -> Option<f64> {
    Some(acc.map_or(v, |a| a.max(v)))
}

pub fn function(a: &FunctionArgs, g: &GlobalOpts) -> Result<Outcome, Failure> {
    let f: ConvexFunctionExpr = read_json(&a.function)?;
    let d = f.validate()?;
    let cfg = solver_cfg(g, g.tol)?;
    let mut inputs = vec![a.function.clone()];
    if let Some(p) = &a.eval {
        inputs.push(p.clone());
        let pts = read_points(p, d)?;
        let vals: Vec<_> = pts.par_iter().map(|x| functions::eval(&f, &VectorN::new(x.clone())?, &cfg)).collect();
        let mut out = csv_line(header("x", d).chain(["value".to_string()]));
        for (x, v) in pts.iter().zip(vals) {
            let v = match v? {
                ExtendedReal::Finite(v) => v,
                ExtendedReal::PosInf => f64::INFINITY,
            };
            out += &csv_line(x.iter().chain([&v]).map(|c| fmt_num(*c)));
        }
        write_text(&a.out, &out)?;
        return Ok(Outcome { code: 0, inputs });
    }
    if let Some(p) = &a.duality {
        inputs.push(p.clone());
        let h: ConvexFunctionExpr = read_json(p)?;
        let r: DualityReport = functions::fenchel_duality_solve(&f, &h, a.search_box, &cfg)?;
        write_json(&a.out, &r)?;
        return Ok(Outcome { code: if r.gap.abs() <= 1e-5 { 0 } else { 1 }, inputs });
    }
    let mut rng = seeded(g.seed);
    let xs: Vec<VectorN> =
        (0..a.samples).map(|_| vec_n(&(0..d).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>())).collect::<Result<_, _>>()?;
    let fc = functions::conjugate(f.clone(), a.search_box);
    let fcc = functions::conjugate(fc.clone(), a.search_box);
    let rows: Vec<_> = xs
        .par_iter()
        .map(|x| -> lipext::Result<(ExtendedReal, ExtendedReal, ExtendedReal)> {
            Ok((functions::eval(&f, x, &cfg)?, functions::eval(&fc, x, &cfg)?, functions::eval(&fcc, x, &cfg)?))
        })
        .collect::<lipext::Result<_>>()?;
    let mut rep = ConjugateReport { samples: xs.len(), finite_samples: 0, biconjugate_gap: None, self_conjugacy_gap: None, young_min_slack: None };
    let mut bic_inf = false;
    for (fx, fs, fss) in &rows {
        let Some(v) = fx.finite() else { continue };
        rep.finite_samples += 1;
        match fss.finite() {
            Some(w) => rep.biconjugate_gap = max_opt(rep.biconjugate_gap, (v - w).abs()),
            None => bic_inf = true,
        }
        if let Some(s) = fs.finite() {
            rep.self_conjugacy_gap = max_opt(rep.self_conjugacy_gap, (v - s).abs());
        }
    }
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            if let (Some(u), Some(w)) = (rows[i].0.finite(), rows[j].1.finite()) {
                let s = u + w - lipext::geometry::dot(&xs[i], &xs[j])?;
                rep.young_min_slack = Some(rep.young_min_slack.map_or(s, |m: f64| m.min(s)));
            }
        }
    }
    if bic_inf {
        rep.biconjugate_gap = None;
    }
    write_json(&a.out, &rep)?;
    let ok = !bic_inf && rep.biconjugate_gap.is_none_or(|g| g <= 1e-5);
    Ok(Outcome { code: if ok { 0 } else { 1 }, inputs })
}

#[derive(Serialize)]
struct MonotoneReport {
    monotone: PairCheck,
    resolvent_firm: Option<PairCheck>,
    /// max |Φ_T(a, a*) − ⟨a, a*⟩| on the graph.
    fitzpatrick_gap: Option<f64>,
    /// max |Φ_T*(a*, a) − ⟨a, a*⟩| on the graph.
    fitzpatrick_conj_gap: Option<f64>,
    /// max |Ψ_T(a, a*) − ⟨a, a*⟩| on the graph.
    psi_gap: Option<f64>,
}

fn require_monotone(t: &OperatorGraph) -> Result<(), Failure> {
    let c = monotone::is_monotone(t);
    if let (false, Some((i, j))) = (c.holds, c.worst) {
        return Err(Failure::invalid(format!("graph is not monotone: pairs {i} and {j} give {:e}", c.min)));
    }
    Ok(())
}

pub fn monotone(a: &MonotoneArgs, g: &GlobalOpts) -> Result<Outcome, Failure> {
    let t: OperatorGraph = read_json(&a.graph)?;
    t.validate()?;
    if t.is_empty() {
        return Err(Failure::invalid("empty operator graph"));
    }
    let cfg = solver_cfg(g, g.tol)?;
    let n = t.n;
    let mut inputs = vec![a.graph.clone()];
    if let Some(p) = &a.resolvent {
        inputs.push(p.clone());
        require_monotone(&t)?;
        let qs = read_points(p, n)?;
        let rs: Vec<_> = qs.par_iter().map(|q| monotone::resolvent_eval(&t, &VectorN::new(q.clone())?, &cfg)).collect();
        let mut out = csv_line(header("x", n).chain(header("G", n)).chain(["residual".to_string()]));
        let mut ok = true;
        for (q, r) in qs.iter().zip(rs) {
            let r = r?;
            ok &= r.converged;
            out += &csv_line(q.iter().chain(r.y.iter()).chain([&r.residual]).map(|v| fmt_num(*v)));
        }
        write_text(&a.out, &out)?;
        return Ok(Outcome { code: if ok { 0 } else { 4 }, inputs });
    }
    if let Some(p) = &a.autoconjugacy {
        inputs.push(p.clone());
        require_monotone(&t)?;
        let samples = read_points(p, 2 * n)?.iter().map(|s| vec_n(s)).collect::<Result<Vec<_>, _>>()?;
        let gap = monotone::autoconjugacy_check(&t, &samples, a.search_box, &cfg)?;
        #[derive(Serialize)]
        struct Auto {
            samples: usize,
            gap: f64,
        }
        write_json(&a.out, &Auto { samples: samples.len(), gap })?;
        return Ok(Outcome { code: if gap <= 1e-4 { 0 } else { 1 }, inputs });
    }
    let mono = monotone::is_monotone(&t);
    let mut rep = MonotoneReport { monotone: mono.clone(), resolvent_firm: None, fitzpatrick_gap: None, fitzpatrick_conj_gap: None, psi_gap: None };
    if mono.holds {
        rep.resolvent_firm = Some(monotone::firmly_nonexpansive_check(&monotone::resolvent_of_graph(&t)?));
        let (mut fg, mut cg, mut pg) = (0.0f64, 0.0f64, 0.0f64);
        for (x, xs) in &t.pairs {
            let ip = lipext::geometry::dot(x, xs)?;
            fg = fg.max((monotone::fitzpatrick_eval(&t, x, xs)? - ip).abs());
            cg = cg.max(match monotone::fitzpatrick_conj_eval(&t, xs, x, &cfg)? {
                ExtendedReal::Finite(v) => (v - ip).abs(),
                ExtendedReal::PosInf => f64::MAX,
            });
            pg = pg.max((monotone::psi_eval(&t, x, xs, &cfg)? - ip).abs());
        }
        rep.fitzpatrick_gap = Some(fg);
        rep.fitzpatrick_conj_gap = Some(cg);
        rep.psi_gap = Some(pg);
    }
    write_json(&a.out, &rep)?;
    Ok(Outcome { code: if mono.holds { 0 } else { 1 }, inputs })
}

pub fn gen(a: &GenArgs, g: &GlobalOpts) -> Result<Outcome, Failure> {
    let mut rng = seeded(g.seed);
    match a.kind {
        GenKind::LipschitzData => {
            let d = lipschitz_data(a.m.unwrap_or(a.n), a.n, a.count, &mut rng)?;
            write_json(&a.out, &d)?;
        }
        GenKind::BallFamily => {
            let mode = match a.mode {
                GenMode::CommonCore => FamilyMode::CommonCore,
                GenMode::DisjointPair => FamilyMode::DisjointPair,
                GenMode::Random => FamilyMode::Random,
            };
            let f = ball_family(a.n, a.count, mode, &mut rng)?;
            write_json(&a.out, &f)?;
        }
    }
    Ok(Outcome { code: 0, inputs: vec![] })
}

