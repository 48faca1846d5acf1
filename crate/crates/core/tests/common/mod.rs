//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use walras::economy::{Agent, Economy, UtilityFunction};
use walras::geometry::Bundle;

pub fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))).expect("test data file")
}

pub fn cd(weights: &[f64], h: &[f64]) -> Agent {
    Agent::new(UtilityFunction::cobb_douglas(weights.to_vec()).unwrap(), Bundle::new(h.to_vec()).unwrap())
}

pub fn economy(agents: Vec<Agent>, survival: bool) -> Economy {
    let l = agents[0].endowment.len();
    let goods = (1..=l).map(|j| format!("g{j}")).collect();
    Economy::with_options(goods, agents, 2.0, survival).unwrap()
}

pub fn edgeworth() -> Economy {
    economy(vec![cd(&[0.6, 0.4], &[1.0, 0.0]), cd(&[0.6, 0.4], &[0.0, 1.0])], false)
}

/// Unconstrained Cobb-Douglas demand: `x_j = a_j (p . h) / p_j`.
pub fn cobb_douglas_demand(weights: &[f64], h: &[f64], p: &[f64]) -> Vec<f64> {
    let wealth: f64 = p.iter().zip(h).map(|(a, b)| a * b).sum();
    weights.iter().zip(p).map(|(a, pj)| a * wealth / pj).collect()
}

/// Root of a continuous function with a sign change on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Equilibrium price of good 1 in a two-good Cobb-Douglas economy, by bisection
/// on the aggregate excess demand for good 1 at `(q, 1 - q)`.
pub fn two_good_cobb_douglas_price(agents: &[(Vec<f64>, Vec<f64>)]) -> f64 {
    let z1 = |q: f64| {
        let p = [q, 1.0 - q];
        let total: f64 = agents.iter().map(|(_, h)| h[0]).sum();
        agents.iter().map(|(a, h)| cobb_douglas_demand(a, h, &p)[0]).sum::<f64>() - total
    };
    bisect(z1, 1e-3, 1.0 - 1e-3)
}

/// Brute-force argmax of `p . z` over a price list: indices carrying positive
/// weight in some maximizing price.
pub fn brute_force_active(z: &[f64], grid: &[Vec<f64>], tol: f64) -> Vec<usize> {
    let value = |p: &[f64]| p.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
    let best = grid.iter().map(|p| value(p)).fold(f64::NEG_INFINITY, f64::max);
    let mut active = vec![false; z.len()];
    for p in grid {
        if value(p) >= best - tol {
            for (j, v) in p.iter().enumerate() {
                if *v > 0.0 {
                    active[j] = true;
                }
            }
        }
    }
    (0..z.len()).filter(|&j| active[j]).collect()
}
