//! Budget sets, utility-maximizing demand, and free disposal.
//!
//! Demand is computed exactly for every supported family:
//!
//! * Cobb-Douglas and CES with `rho < 1` are separable and strictly quasi-concave,
//!   so the box-constrained optimum is a water-filling solution: each coordinate is
//!   `clamp(c_j t, lo_j, hi_j)` with `c_j = (a_j / p_j)^sigma` and a single level `t`
//!   chosen so the budget binds. The spend is piecewise linear in `t`, so `t` is
//!   solved in closed form on the right segment.
//! * Linear utilities fill goods in decreasing order of `a_j / p_j`; ties yield a
//!   polytope of optima.
//! * Leontief utilities buy the cheapest bundle on the ray `c t`, with any leftover
//!   budget (when the truncation box binds) spread freely.
//! * CES with `rho > 1` is quasi-convex; optima sit on vertices of the budget polytope.
//!
//! Goods with a zero price are free: monotone agents take the whole truncation box.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economy::{Agent, Economy, TruncationBox, UtilityFunction};
use crate::geometry::{dot, Bundle, PriceVector};
use crate::polytope::{box_cut_vertices, Cut};

/// Relative tolerance under which two utility levels (or bang-per-buck ratios) tie.
pub const TAU_UTIL: f64 = 1e-8;
/// Absolute tolerance for budget equalities.
pub const TAU_BUDGET: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DemandError {
    #[error(
        "budget set is empty: endowment value {wealth} is below the cheapest consumption {cheapest}; \
         the survival hypothesis p·h > min p·x fails at this price"
    )]
    EmptyBudget { wealth: f64, cheapest: f64 },
    #[error("demand set has more than {0} free coordinates; too many extreme points to enumerate")]
    TooManyExtremePoints(usize),
    #[error("bundle overspends the budget: slack {slack}")]
    Infeasible { slack: f64 },
    #[error("dimension mismatch: price has {price} goods, agent has {agent}")]
    Dimension { price: usize, agent: usize },
}

/// The image of the demand correspondence at one price: a polytope given by its
/// extreme points (or, when `convex` is false, a finite set of optima).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandSet {
    pub points: Vec<Bundle>,
    pub convex: bool,
    /// Goods on which some optimum sits at the truncation box ceiling.
    pub truncation_active: Vec<bool>,
    /// Utility attained by the optima.
    pub utility: f64,
}

impl DemandSet {
    pub fn is_singleton(&self) -> bool {
        self.points.len() == 1
    }

    pub fn first(&self) -> &Bundle {
        &self.points[0]
    }

    fn build(points: Vec<Vec<f64>>, convex: bool, bounds: &TruncationBox, utility: &UtilityFunction) -> Self {
        let truncation_active = (0..bounds.upper.len())
            .map(|j| {
                let up = bounds.upper[j];
                points.iter().any(|x| x[j] >= up - 1e-9 * up.max(1.0))
            })
            .collect();
        let points: Vec<Bundle> = points.into_iter().map(Bundle::from_clamped).collect();
        let utility = points.iter().map(|x| utility.eval(x)).fold(f64::NEG_INFINITY, f64::max);
        Self { points, convex, truncation_active, utility }
    }
}

/// Aggregate disposal of unwanted stocks. Non-positive; zero on priced goods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisposalChoice {
    pub amounts: Vec<f64>,
}

impl DisposalChoice {
    pub fn none(dim: usize) -> Self {
        Self { amounts: vec![0.0; dim] }
    }

    pub fn is_none(&self) -> bool {
        self.amounts.iter().all(|a| *a == 0.0)
    }
}

/// Value of the agent's endowment, `p · h`.
pub fn budget_value(agent: &Agent, p: &PriceVector) -> f64 {
    p.dot(&agent.endowment)
}

/// Cheapest point of the truncated consumption set: its lower corner.
pub fn cheapest_consumption(bounds: &TruncationBox, p: &PriceVector) -> f64 {
    p.dot(&bounds.lower)
}

pub fn budget_contains(agent: &Agent, bounds: &TruncationBox, p: &PriceVector, x: &[f64], tol: f64) -> bool {
    bounds.contains(x, 0.0) && p.dot(x) <= budget_value(agent, p) + tol
}

/// `p · h - p · x`; errors when the bundle overspends beyond [`TAU_BUDGET`].
pub fn walras_slack(agent: &Agent, p: &PriceVector, x: &[f64]) -> Result<f64, DemandError> {
    let wealth = budget_value(agent, p);
    let slack = wealth - p.dot(x);
    if slack < -TAU_BUDGET * wealth.max(1.0) {
        return Err(DemandError::Infeasible { slack });
    }
    Ok(slack)
}

/// Demand of agent `i` of an economy, using the economy's truncation box.
pub fn demand_of(econ: &Economy, i: usize, p: &PriceVector, tol: f64) -> Result<DemandSet, DemandError> {
    demand(econ.agent(i), &econ.truncated_consumption_set(i), p, tol)
}

/// Utility maximizers over the budget set intersected with the truncation box.
/// `tol` is the relative tie threshold for Linear ratios and vertex utilities.
pub fn demand(agent: &Agent, bounds: &TruncationBox, p: &PriceVector, tol: f64) -> Result<DemandSet, DemandError> {
    let l = agent.endowment.len();
    if p.len() != l {
        return Err(DemandError::Dimension { price: p.len(), agent: l });
    }
    let wealth = budget_value(agent, p);
    let cheapest = cheapest_consumption(bounds, p);
    if wealth < cheapest - TAU_BUDGET * wealth.max(1.0) {
        return Err(DemandError::EmptyBudget { wealth, cheapest });
    }
    let wealth = wealth.max(cheapest);
    let lo = bounds.lower.quantities();
    let hi = bounds.upper.quantities();
    let vtol = 1e-10 * hi.iter().copied().fold(1.0, f64::max);

    let (points, convex) = match &agent.utility {
        UtilityFunction::CobbDouglas { weights } => (vec![water_fill(weights, 1.0, p, lo, hi, wealth)], true),
        UtilityFunction::Ces { weights, rho } if *rho < 1.0 => {
            (vec![water_fill(weights, 1.0 / (1.0 - rho), p, lo, hi, wealth)], true)
        }
        UtilityFunction::Ces { weights, rho } if *rho == 1.0 => {
            (linear_demand(weights, p, lo, hi, wealth, tol, vtol)?, true)
        }
        UtilityFunction::Ces { .. } => (vertex_maximizers(&agent.utility, p, lo, hi, wealth, tol, vtol)?, false),
        UtilityFunction::Linear { weights } => (linear_demand(weights, p, lo, hi, wealth, tol, vtol)?, true),
        UtilityFunction::Leontief { coefficients } => (leontief_demand(coefficients, p, lo, hi, wealth, vtol)?, true),
    };
    Ok(DemandSet::build(points, convex, bounds, &agent.utility))
}

/// Maximizes `sum a_j g(x_j)` with `g' (x) = x^{-1/sigma}` over the box and budget.
fn water_fill(weights: &[f64], sigma: f64, p: &[f64], lo: &[f64], hi: &[f64], wealth: f64) -> Vec<f64> {
    let l = p.len();
    let mut x = lo.to_vec();
    let priced: Vec<usize> = (0..l).filter(|&j| p[j] > 0.0).collect();
    for j in 0..l {
        if p[j] <= 0.0 {
            x[j] = hi[j];
        }
    }
    // Relative intensities, scaled in log space so extreme prices cannot overflow.
    let logs: Vec<f64> = priced.iter().map(|&j| sigma * (weights[j].ln() - p[j].ln())).collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c: Vec<f64> = logs.iter().map(|v| (v - peak).exp()).collect();

    let spend_at = |t: f64| -> f64 {
        priced
            .iter()
            .zip(&c)
            .map(|(&j, &cj)| p[j] * (cj * t).clamp(lo[j], hi[j]))
            .sum()
    };
    let ceiling: f64 = priced.iter().map(|&j| p[j] * hi[j]).sum();
    if wealth >= ceiling {
        for &j in &priced {
            x[j] = hi[j];
        }
        return x;
    }

    let mut breaks: Vec<f64> = priced
        .iter()
        .zip(&c)
        .filter(|(_, &cj)| cj > 0.0)
        .flat_map(|(&j, &cj)| [lo[j] / cj, hi[j] / cj])
        .filter(|b| b.is_finite())
        .collect();
    breaks.push(0.0);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    // First breakpoint whose spend reaches the wealth bounds the active segment.
    let mut left = 0.0;
    let mut right = *breaks.last().unwrap();
    for &b in &breaks {
        if spend_at(b) >= wealth {
            right = b;
            break;
        }
        left = b;
    }
    let mid = 0.5 * (left + right);
    let mut fixed_spend = 0.0;
    let mut slope = 0.0;
    for (&j, &cj) in priced.iter().zip(&c) {
        let v = cj * mid;
        if v <= lo[j] {
            fixed_spend += p[j] * lo[j];
        } else if v >= hi[j] {
            fixed_spend += p[j] * hi[j];
        } else {
            slope += p[j] * cj;
        }
    }
    let t = if slope > 0.0 { ((wealth - fixed_spend) / slope).clamp(left, right) } else { right };
    for (&j, &cj) in priced.iter().zip(&c) {
        let v = cj * mid;
        x[j] = if v <= lo[j] {
            lo[j]
        } else if v >= hi[j] {
            hi[j]
        } else {
            (cj * t).clamp(lo[j], hi[j])
        };
    }
    x
}

fn linear_demand(
    weights: &[f64],
    p: &[f64],
    lo: &[f64],
    hi: &[f64],
    wealth: f64,
    tol: f64,
    vtol: f64,
) -> Result<Vec<Vec<f64>>, DemandError> {
    let l = p.len();
    let mut x_lo = lo.to_vec();
    let mut x_hi = lo.to_vec();
    let mut cut_weights = vec![0.0; l];
    let mut bound = 0.0;
    let mut cut = Cut::AtMost;

    // Free goods: valued ones are taken in full, unvalued ones are a matter of indifference.
    for j in 0..l {
        if p[j] <= 0.0 {
            x_lo[j] = if weights[j] > 0.0 { hi[j] } else { lo[j] };
            x_hi[j] = hi[j];
        }
    }

    let mut priced: Vec<usize> = (0..l).filter(|&j| p[j] > 0.0).collect();
    let ratio = |j: usize| weights[j] / p[j];
    priced.sort_by(|&a, &b| ratio(b).partial_cmp(&ratio(a)).unwrap().then(a.cmp(&b)));

    let mut remaining = wealth - priced.iter().map(|&j| p[j] * lo[j]).sum::<f64>();
    let mut start = 0;
    while start < priced.len() {
        let head = ratio(priced[start]);
        let mut end = start + 1;
        while end < priced.len() {
            let r = ratio(priced[end]);
            let tied = if head == 0.0 { r == 0.0 } else { (head - r) <= tol * head && r > 0.0 };
            if !tied {
                break;
            }
            end += 1;
        }
        let group = &priced[start..end];
        let capacity: f64 = group.iter().map(|&j| p[j] * (hi[j] - lo[j])).sum();
        if head > 0.0 && remaining > capacity + vtol {
            for &j in group {
                x_lo[j] = hi[j];
                x_hi[j] = hi[j];
            }
            remaining -= capacity;
            start = end;
            continue;
        }
        // Marginal group: the remaining budget is spent somewhere inside it.
        for &j in group {
            x_hi[j] = hi[j];
            cut_weights[j] = p[j];
            bound += p[j] * lo[j];
        }
        bound += remaining.clamp(0.0, capacity);
        if head > 0.0 {
            cut = Cut::Exactly;
        }
        break;
    }
    box_cut_vertices(&x_lo, &x_hi, &cut_weights, bound, cut, vtol)
        .ok_or(DemandError::TooManyExtremePoints(crate::polytope::MAX_FREE_COORDS))
}

fn leontief_demand(
    coefficients: &[f64],
    p: &[f64],
    lo: &[f64],
    hi: &[f64],
    wealth: f64,
    vtol: f64,
) -> Result<Vec<Vec<f64>>, DemandError> {
    let l = p.len();
    let box_level = (0..l).map(|j| hi[j] / coefficients[j]).fold(f64::INFINITY, f64::min);
    let cost = |t: f64| -> f64 { (0..l).map(|j| p[j] * lo[j].max(coefficients[j] * t)).sum() };

    // Spend is piecewise linear in the utility level; solve on the right segment.
    let level = if cost(box_level) <= wealth {
        box_level
    } else {
        let mut breaks: Vec<f64> = (0..l).map(|j| lo[j] / coefficients[j]).filter(|b| *b < box_level).collect();
        breaks.push(0.0);
        breaks.push(box_level);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let mut left = 0.0;
        let mut right = box_level;
        for &b in &breaks {
            if cost(b) >= wealth {
                right = b;
                break;
            }
            left = b;
        }
        let mid = 0.5 * (left + right);
        let mut fixed = 0.0;
        let mut slope = 0.0;
        for j in 0..l {
            if coefficients[j] * mid <= lo[j] {
                fixed += p[j] * lo[j];
            } else {
                slope += p[j] * coefficients[j];
            }
        }
        if slope > 0.0 {
            ((wealth - fixed) / slope).clamp(left, right)
        } else {
            right
        }
    };
    let floor: Vec<f64> = (0..l).map(|j| lo[j].max(coefficients[j] * level).min(hi[j])).collect();
    let bound = wealth.max(dot(p, &floor));
    box_cut_vertices(&floor, hi, p, bound, Cut::AtMost, vtol)
        .ok_or(DemandError::TooManyExtremePoints(crate::polytope::MAX_FREE_COORDS))
}

fn vertex_maximizers(
    utility: &UtilityFunction,
    p: &[f64],
    lo: &[f64],
    hi: &[f64],
    wealth: f64,
    tol: f64,
    vtol: f64,
) -> Result<Vec<Vec<f64>>, DemandError> {
    let vertices = box_cut_vertices(lo, hi, p, wealth, Cut::AtMost, vtol)
        .ok_or(DemandError::TooManyExtremePoints(crate::polytope::MAX_FREE_COORDS))?;
    let values: Vec<f64> = vertices.iter().map(|v| utility.eval(v)).collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(vertices
        .into_iter()
        .zip(values)
        .filter(|(_, u)| *u >= best - tol * best.abs().max(1.0))
        .map(|(v, _)| v)
        .collect())
}

/// Aggregate free disposal given total planned consumption: the unconsumed
/// surplus of every zero-priced good is thrown out; priced goods are kept.
pub fn disposal(econ: &Economy, p: &PriceVector, consumption: &[f64]) -> DisposalChoice {
    let total = econ.total_endowment();
    let amounts = p
        .iter()
        .zip(total.iter().zip(consumption))
        .map(|(pj, (t, c))| if *pj == 0.0 { -(t - c).max(0.0) } else { 0.0 })
        .collect();
    DisposalChoice { amounts }
}
