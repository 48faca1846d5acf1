//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero when any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use walras::cli::{run_command, run_on_economy, Command, CommonFlags, Format};
use walras::demand::{demand_of, TAU_UTIL};
use walras::diagnostics::{
    audit_assumptions, build_cheapest_point_pathology, probe_lower, probe_upper, BudgetMap, Correspondence,
    DemandMap, ProbeConfig,
};
use walras::economy::{Agent, Economy, UtilityFunction};
use walras::equilibrium::{certify, find_equilibrium_grid, price_adjust, EquilibriumCertificate};
use walras::excess::{excess_demand, excess_set_distance, homogeneity_check, walras_value, TAU_WALRAS};
use walras::geometry::{convex_combination, normalize_prices, simplex_contains, simplex_grid, Bundle, SIMPLEX_TOL};
use walras::sampling::{random_economy, random_simplex_point, seeded, EconomyShape};

use common::{cd, data, economy, edgeworth, two_good_cobb_douglas_price};

const SEED: u64 = 0xACCE_97;

type Outcome = Result<String, String>;

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 Walras's law suite", walras_law),
        ("2 homogeneity suite", homogeneity),
        ("3 Edgeworth and symmetric oracles", edgeworth_oracle),
        ("4 certificate soundness", certificate_soundness),
        ("5 exchange-value face correctness", mu_correctness),
        ("6 existence at desk scale", existence),
        ("7 pathology reproduction", pathology),
        ("8 simplex closure, idempotence, scale invariance", simplex_suite),
        ("9 free-disposal equilibrium", free_disposal),
        ("10 determinism of machine reports", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.2} s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.2} s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn desk_economies(n: usize, seed: u64) -> Vec<Economy> {
    let mut rng = seeded(seed);
    (0..n).map(|_| random_economy(&mut rng, &EconomyShape::default())).collect()
}

fn walras_law() -> Outcome {
    let started = Instant::now();
    let mut rng = seeded(SEED);
    let shape = EconomyShape::default();
    let mut samples = 0;
    let mut worst: f64 = 0.0;
    for pair in 0..1000 {
        let econ = random_economy(&mut rng, &shape);
        let p = random_simplex_point(&mut rng, econ.num_goods());
        let set = excess_demand(&econ, &p, TAU_UTIL).map_err(|e| format!("pair {pair}: {e}"))?;
        for s in &set.samples {
            let v = walras_value(s).map_err(|e| format!("pair {pair}: {e}"))?;
            worst = worst.max(v.abs());
            ensure(v.abs() <= TAU_WALRAS, || format!("pair {pair}: |p·z| = {}", v.abs()))?;
            samples += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 pairs, {samples} samples, max |p·z| = {worst:.2e}, {elapsed:.2?}"))
}

fn homogeneity() -> Outcome {
    let mut rng = seeded(SEED + 2);
    let shape = EconomyShape::default();
    let mut worst: f64 = 0.0;
    for case in 0..300 {
        let econ = random_economy(&mut rng, &shape);
        let raw: Vec<f64> = (0..econ.num_goods()).map(|_| rng.random_range(0.05..5.0)).collect();
        let p = normalize_prices(&raw).unwrap();
        let base = excess_demand(&econ, &p, TAU_UTIL).map_err(|e| e.to_string())?;
        for alpha in [0.5, 2.0, 1e6] {
            let scaled: Vec<f64> = raw.iter().map(|v| v * alpha).collect();
            let q = normalize_prices(&scaled).unwrap();
            for i in 0..econ.num_agents() {
                let a = demand_of(&econ, i, &p, TAU_UTIL).map_err(|e| e.to_string())?;
                let b = demand_of(&econ, i, &q, TAU_UTIL).map_err(|e| e.to_string())?;
                ensure(a.points.len() == b.points.len(), || format!("case {case}: demand shapes differ"))?;
                for (x, y) in a.points.iter().zip(&b.points) {
                    let d = x.iter().zip(y.iter()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                    worst = worst.max(d);
                    ensure(d <= 1e-8, || format!("case {case}, alpha {alpha}: demand moved by {d}"))?;
                }
            }
            let other = excess_demand(&econ, &q, TAU_UTIL).map_err(|e| e.to_string())?;
            let d = excess_set_distance(&base, &other);
            worst = worst.max(d);
            ensure(d <= 1e-8, || format!("case {case}, alpha {alpha}: excess moved by {d}"))?;
            ensure(homogeneity_check(&econ, &p, alpha, TAU_UTIL).map_err(|e| e.to_string())?, || {
                format!("case {case}: homogeneity_check false at alpha {alpha}")
            })?;
        }
    }
    Ok(format!("300 economies x 3 scalings, max deviation {worst:.2e}"))
}

fn symmetric_economies() -> Vec<(String, Economy)> {
    vec![
        (
            "identical agents, 2 goods".into(),
            economy(vec![cd(&[0.5, 0.5], &[1.0, 1.0]), cd(&[0.5, 0.5], &[1.0, 1.0])], true),
        ),
        (
            "mirror pair".into(),
            economy(vec![cd(&[0.7, 0.3], &[1.0, 0.0]), cd(&[0.3, 0.7], &[0.0, 1.0])], false),
        ),
        (
            "cyclic triple".into(),
            economy(
                vec![
                    cd(&[0.5, 0.3, 0.2], &[1.0, 0.5, 0.2]),
                    cd(&[0.2, 0.5, 0.3], &[0.2, 1.0, 0.5]),
                    cd(&[0.3, 0.2, 0.5], &[0.5, 0.2, 1.0]),
                ],
                true,
            ),
        ),
        (
            "identical agents, 4 goods".into(),
            economy(vec![cd(&[0.25; 4], &[1.0, 2.0, 2.0, 1.0]), cd(&[0.25; 4], &[2.0, 1.0, 1.0, 2.0])], true),
        ),
        (
            "CES mirror pair".into(),
            {
                let a = Agent::new(UtilityFunction::ces(vec![0.8, 0.2], -0.5).unwrap(), Bundle::new(vec![2.0, 0.5]).unwrap());
                let b = Agent::new(UtilityFunction::ces(vec![0.2, 0.8], -0.5).unwrap(), Bundle::new(vec![0.5, 2.0]).unwrap());
                economy(vec![a, b], true)
            },
        ),
    ]
}

fn edgeworth_oracle() -> Outcome {
    let oracle = two_good_cobb_douglas_price(&[(vec![0.6, 0.4], vec![1.0, 0.0]), (vec![0.6, 0.4], vec![0.0, 1.0])]);
    ensure((oracle - 0.6).abs() < 1e-9, || format!("bisection oracle gave {oracle}"))?;
    let cert = find_equilibrium_grid(&edgeworth(), 1e-4, 12).map_err(|e| e.to_string())?;
    let gap = (cert.price[0] - oracle).abs().max((cert.price[1] - (1.0 - oracle)).abs());
    ensure(gap <= 1e-3, || format!("Edgeworth solved to {} (oracle {oracle})", cert.price))?;
    let mut worst: f64 = 0.0;
    for (name, econ) in symmetric_economies() {
        let cert = find_equilibrium_grid(&econ, 1e-4, 12).map_err(|e| format!("{name}: {e}"))?;
        let u = 1.0 / econ.num_goods() as f64;
        let d = cert.price.iter().map(|v| (v - u).abs()).fold(0.0, f64::max);
        worst = worst.max(d);
        ensure(d <= 1e-6, || format!("{name}: solved to {}", cert.price))?;
    }
    Ok(format!("Edgeworth p* = {} vs bisection {oracle:.6}; symmetric max deviation {worst:.1e}", cert.price))
}

fn sound(econ: &Economy, cert: &EquilibriumCertificate) -> Result<(), String> {
    let eps = cert.epsilon;
    for (j, (p, z)) in cert.price.iter().zip(cert.excess.iter()).enumerate() {
        ensure(*z <= eps, || format!("good {j}: z = {z} > {eps}"))?;
        ensure(!(*p > eps) || z.abs() <= eps, || format!("good {j}: p = {p} but |z| = {}", z.abs()))?;
    }
    let again = certify(econ, &cert.price, eps).map_err(|e| format!("independent certify rejected: {e}"))?;
    ensure(again.excess == cert.excess, || "independent certify chose a different sample".into())
}

fn certificate_soundness() -> Outcome {
    let mut econs: Vec<Economy> = symmetric_economies().into_iter().map(|(_, e)| e).collect();
    econs.push(edgeworth());
    econs.extend(desk_economies(30, SEED + 4));
    for name in ["free_good.toml", "leontief.toml", "symmetric.toml"] {
        econs.push(walras::cli::parse_economy(&data(name)).unwrap().economy);
    }
    let certs: Vec<Result<(), String>> = econs
        .par_iter()
        .map(|e| {
            let mut checked = Vec::new();
            for eps in [1e-4, 1e-6] {
                if let Ok(c) = find_equilibrium_grid(e, eps, 12) {
                    checked.push(sound(e, &c));
                }
            }
            if checked.is_empty() {
                return Err("no certificate to check".into());
            }
            checked.into_iter().collect()
        })
        .collect();
    let n = certs.len();
    certs.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(format!("{n} economies, every certificate re-verified"))
}

fn mu_correctness() -> Outcome {
    let grids: Vec<Vec<Vec<f64>>> =
        (2..=4).map(|l| simplex_grid(l, 100).unwrap().into_iter().map(|p| p.into_inner()).collect()).collect();
    let mut rng = seeded(SEED + 5);
    let cases: Vec<(usize, Vec<f64>, f64, Vec<f64>, Vec<f64>)> = (0..10_000)
        .map(|k| {
            let l = rng.random_range(2..=4);
            // Every other draw uses a coarse lattice so ties are common.
            let z: Vec<f64> = if k % 2 == 0 {
                (0..l).map(|_| rng.random_range(-2.0..2.0)).collect()
            } else {
                (0..l).map(|_| f64::from(rng.random_range(-2i32..=2)) * 0.25).collect()
            };
            let w1: Vec<f64> = (0..l).map(|_| rng.random::<f64>()).collect();
            let w2: Vec<f64> = (0..l).map(|_| rng.random::<f64>()).collect();
            (l, z, rng.random::<f64>(), w1, w2)
        })
        .collect();
    let ties = cases.iter().filter(|(_, z, ..)| price_adjust(z, 1e-9).active.len() > 1).count();
    cases.par_iter().enumerate().try_for_each(|(k, (l, z, alpha, w1, w2))| {
        let face = price_adjust(z, 1e-9);
        let brute = common::brute_force_active(z, &grids[l - 2], 1e-9);
        ensure(face.active == brute, || format!("case {k}: z = {z:?}, face {:?}, brute force {brute:?}", face.active))?;
        let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let in_face = |w: &[f64]| {
            let raw: Vec<f64> = (0..*l).map(|j| if face.active.contains(&j) { w[j] + 1e-3 } else { 0.0 }).collect();
            normalize_prices(&raw).unwrap()
        };
        let (p1, p2) = (in_face(w1), in_face(w2));
        let mix = convex_combination(&p1, &p2, *alpha).unwrap();
        for p in [&p1[..], &p2[..], &mix[..], &face.representative[..]] {
            let v: f64 = p.iter().zip(z).map(|(a, b)| a * b).sum();
            ensure((v - top).abs() <= 1e-12, || format!("case {k}: face value {v} vs max {top}"))?;
        }
        Ok::<(), String>(())
    })?;
    Ok(format!("10000 excess vectors ({ties} with tied maxima) match brute force over simplex_grid(l, 100)"))
}

fn existence_reports() -> Result<Vec<String>, String> {
    let mut rng = seeded(SEED + 6);
    let shape = EconomyShape::default();
    let mut econs = Vec::new();
    while econs.len() < 100 {
        let e = random_economy(&mut rng, &shape);
        if audit_assumptions(&e).passed() {
            econs.push(e);
        }
    }
    let flags = CommonFlags { seed: Some(SEED), epsilon: Some(1e-4), ..CommonFlags::default() };
    let solve = Command::Solve { file: "random.toml".into(), max_refinements: 12 };
    econs
        .par_iter()
        .enumerate()
        .map(|(k, e)| {
            let direct = find_equilibrium_grid(e, 1e-4, 12).map_err(|err| format!("economy {k}: {err}"))?;
            sound(e, &direct).map_err(|err| format!("economy {k}: {err}"))?;
            let report = run_on_economy(&solve, e, &flags);
            ensure(report.exit_code == 0, || format!("economy {k}: solve exited {}", report.exit_code))?;
            Ok(report.render(Format::Machine))
        })
        .collect()
}

fn existence() -> Outcome {
    let started = Instant::now();
    let reports = existence_reports()?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{} audited economies certified at 1e-4, {elapsed:.2?}", reports.len()))
}

fn pathology_reports() -> Result<Vec<String>, String> {
    let path = build_cheapest_point_pathology();
    let map = BudgetMap::new(&path.economy, path.agent);
    let config = ProbeConfig::with_seed(SEED);
    let lower = probe_lower(&map, &path.price, &[path.target.to_vec()], &config).map_err(|e| e.to_string())?;
    let upper = probe_upper(&map, &path.price, &config).map_err(|e| e.to_string())?;
    ensure(!lower.passed(), || "pathology passed the lower probe".into())?;
    ensure(lower.witness.as_ref().is_some_and(|w| w.target.is_some()), || "lower failure without witness".into())?;
    ensure(upper.passed(), || format!("pathology failed the upper probe: {}", upper.summary))?;
    let mut out = vec![serde_json::to_string(&lower).unwrap(), serde_json::to_string(&upper).unwrap()];

    let mut rng = seeded(SEED + 7);
    let econs: Vec<Economy> = (0..4).map(|_| random_economy(&mut rng, &EconomyShape::default())).collect();
    for (k, econ) in econs.iter().enumerate() {
        let prices: Vec<_> = (0..100).map(|_| random_simplex_point(&mut rng, econ.num_goods())).collect();
        let lines: Vec<Result<String, String>> = prices
            .par_iter()
            .map(|p| {
                let mut lines = String::new();
                for i in 0..econ.num_agents() {
                    let maps: [Box<dyn Correspondence>; 2] =
                        [Box::new(BudgetMap::new(econ, i)), Box::new(DemandMap::new(econ, i))];
                    for map in maps {
                        let targets = map.image(p).map_err(|e| e.to_string())?.vertices();
                        let up = probe_upper(map.as_ref(), p, &config).map_err(|e| e.to_string())?;
                        let lo = probe_lower(map.as_ref(), p, &targets, &config).map_err(|e| e.to_string())?;
                        for r in [&up, &lo] {
                            ensure(r.passed(), || format!("economy {k}, {} at {p}: {}", r.correspondence, r.summary))?;
                            lines.push_str(&serde_json::to_string(r).unwrap());
                        }
                    }
                }
                Ok(lines)
            })
            .collect();
        for l in lines {
            out.push(l?);
        }
    }
    let probe = Command::Probe { file: None, price: None, pathology: true };
    let report = run_command(&probe, None, &CommonFlags { seed: Some(SEED), ..CommonFlags::default() });
    ensure(report.exit_code == 2, || format!("probe --pathology exited {}", report.exit_code))?;
    out.push(report.render(Format::Machine));
    Ok(out)
}

fn pathology() -> Outcome {
    pathology_reports()?;
    Ok("lower probe fails with a witness and upper passes; budget and demand probes pass for every agent of 4 economies at 100 interior prices each".into())
}

fn simplex_suite() -> Outcome {
    let mut rng = seeded(SEED + 8);
    let mut worst: f64 = 0.0;
    for k in 0..10_000 {
        let l = rng.random_range(2..=6);
        let a = random_simplex_point(&mut rng, l);
        let b = random_simplex_point(&mut rng, l);
        let alpha = rng.random::<f64>();
        let c = convex_combination(&a, &b, alpha).unwrap();
        let sum_err = (c.iter().sum::<f64>() - 1.0).abs();
        ensure(c.iter().all(|v| *v >= 0.0) && simplex_contains(&c, SIMPLEX_TOL) && sum_err <= 1e-12, || {
            format!("case {k}: combination {c:?} left the simplex")
        })?;
        let raw: Vec<f64> = (0..l).map(|_| rng.random_range(0.0..10.0)).collect();
        let p = normalize_prices(&raw).unwrap();
        let again = normalize_prices(&p).unwrap();
        let scale = [1e-6, 0.5, 3.0, 1e9][k % 4];
        let scaled = normalize_prices(&raw.iter().map(|v| v * scale).collect::<Vec<_>>()).unwrap();
        for (x, (y, z)) in p.iter().zip(again.iter().zip(scaled.iter())) {
            worst = worst.max((x - y).abs()).max((x - z).abs());
        }
        ensure(worst <= 1e-12, || format!("case {k}: normalization drifted by {worst}"))?;
    }
    Ok(format!("10000 combinations stay on the simplex; normalization drift {worst:.1e}"))
}

fn free_disposal() -> Outcome {
    let parsed = walras::cli::parse_economy(&data("free_good.toml")).map_err(|e| e.to_string())?;
    let econ = parsed.economy;
    let cert = find_equilibrium_grid(&econ, 1e-4, 12).map_err(|e| e.to_string())?;
    let checked = certify(&econ, &cert.price, 1e-6).map_err(|e| e.to_string())?;
    for c in [&cert, &checked] {
        ensure(c.price[1] == 0.0, || format!("unvalued good priced at {}", c.price[1]))?;
        ensure(c.excess[1] < 0.0, || format!("unvalued good excess {}", c.excess[1]))?;
        let value = c.value();
        ensure(value.abs() <= 1e-12, || format!("p*·z* = {value}"))?;
    }
    Ok(format!("p* = {}, z* = {}, p*·z* = {}", cert.price, cert.excess, cert.value()))
}

fn criterion_three_report() -> Result<String, String> {
    let flags = CommonFlags { seed: Some(SEED), ..CommonFlags::default() };
    let solve = Command::Solve { file: "edgeworth.toml".into(), max_refinements: 12 };
    let report = run_command(&solve, Some(&data("edgeworth.toml")), &flags);
    ensure(report.exit_code == 0, || format!("solve exited {}", report.exit_code))?;
    Ok(report.render(Format::Machine))
}

fn determinism() -> Outcome {
    let run = || -> Result<Vec<String>, String> {
        let mut all = vec![criterion_three_report()?];
        all.extend(existence_reports()?);
        all.extend(pathology_reports()?);
        Ok(all)
    };
    let first = run()?;
    for attempt in 2..=3 {
        let again = run()?;
        ensure(again.len() == first.len(), || format!("run {attempt} produced a different number of reports"))?;
        if let Some(k) = (0..first.len()).find(|&k| first[k] != again[k]) {
            return Err(format!("run {attempt}: report {k} differs"));
        }
    }
    let bytes: usize = first.iter().map(|s| s.len()).sum();
    Ok(format!("3 runs, {} reports ({bytes} bytes) byte-identical", first.len()))
}
