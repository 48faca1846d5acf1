//! The excess consumption correspondence and Walras's law.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{demand_of, disposal, DemandError, DemandSet, DisposalChoice, TAU_BUDGET};
use crate::economy::Economy;
use crate::geometry::{normalize_prices, Bundle, ExcessVector, GeometryError, PriceVector};

/// Absolute tolerance on `p · z`.
pub const TAU_WALRAS: f64 = 1e-8;
/// Maximum number of samples enumerated for a set-valued excess.
pub const SAMPLE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExcessError {
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("Walras's law violated: p·z = {value}; agent {agent} overspends by {overspend}")]
    WalrasViolation { value: f64, agent: usize, overspend: f64 },
    #[error("sample does not match the economy: {0}")]
    Shape(String),
}

/// One selection from the excess consumption correspondence at a price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessSample {
    pub price: PriceVector,
    pub selections: Vec<Bundle>,
    pub disposal: DisposalChoice,
    pub excess: ExcessVector,
    /// Per-agent budget slack `p·h - p·x`.
    pub slacks: Vec<f64>,
}

impl ExcessSample {
    /// Assembles a sample from per-agent selections and a disposal choice:
    /// `z = sum x - sum y - sum h`.
    pub fn from_parts(
        econ: &Economy,
        price: &PriceVector,
        selections: Vec<Bundle>,
        disposal: DisposalChoice,
    ) -> Result<Self, ExcessError> {
        let l = econ.num_goods();
        if selections.len() != econ.num_agents() {
            return Err(ExcessError::Shape(format!(
                "{} selections for {} agents",
                selections.len(),
                econ.num_agents()
            )));
        }
        if selections.iter().any(|x| x.len() != l) || disposal.amounts.len() != l || price.len() != l {
            return Err(ExcessError::Shape("dimension mismatch".into()));
        }
        let total = econ.total_endowment();
        let mut consumption = vec![0.0; l];
        for x in &selections {
            for (c, q) in consumption.iter_mut().zip(x.iter()) {
                *c += q;
            }
        }
        let gaps = consumption
            .iter()
            .zip(&disposal.amounts)
            .zip(total.iter())
            .map(|((c, y), t)| (c - y) - t)
            .collect();
        let slacks = econ
            .agents()
            .iter()
            .zip(&selections)
            .map(|(a, x)| price.dot(&a.endowment) - price.dot(x))
            .collect();
        Ok(Self { price: price.clone(), selections, disposal, excess: ExcessVector::new(gaps), slacks })
    }

    pub fn residual(&self) -> f64 {
        self.excess.max_gap()
    }
}

/// The finite representation of the excess set at one price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessSet {
    pub price: PriceVector,
    pub samples: Vec<ExcessSample>,
    /// True when enumeration stopped at [`SAMPLE_CAP`].
    pub capped: bool,
    pub demands: Vec<DemandSet>,
}

impl ExcessSet {
    /// Smallest `max_j z_j` over samples.
    pub fn residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual()).fold(f64::INFINITY, f64::min)
    }

    /// Sample minimizing `max_j z_j`; ties go to the earliest sample.
    pub fn best(&self) -> &ExcessSample {
        let mut best = &self.samples[0];
        for s in &self.samples[1..] {
            if s.residual() < best.residual() {
                best = s;
            }
        }
        best
    }

    pub fn first(&self) -> &ExcessSample {
        &self.samples[0]
    }
}

/// Evaluates the excess consumption correspondence at `p`.
///
/// Samples range over the product of the agents' demand extreme points in
/// lexicographic order (agent 0 varies slowest). For every consumption profile the
/// no-disposal sample comes first; when a zero-priced good is in surplus a second
/// sample disposes of that surplus.
pub fn excess_demand(econ: &Economy, p: &PriceVector, tol: f64) -> Result<ExcessSet, ExcessError> {
    let demands = (0..econ.num_agents())
        .map(|i| demand_of(econ, i, p, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let l = econ.num_goods();
    let mut samples = Vec::new();
    let mut capped = false;
    let mut index = vec![0usize; demands.len()];
    'outer: loop {
        let selections: Vec<Bundle> = index.iter().zip(&demands).map(|(&k, d)| d.points[k].clone()).collect();
        let mut consumption = vec![0.0; l];
        for x in &selections {
            for (c, q) in consumption.iter_mut().zip(x.iter()) {
                *c += q;
            }
        }
        let absorb = disposal(econ, p, &consumption);
        let options = if absorb.is_none() { vec![absorb] } else { vec![DisposalChoice::none(l), absorb] };
        for y in options {
            if samples.len() == SAMPLE_CAP {
                capped = true;
                break 'outer;
            }
            samples.push(ExcessSample::from_parts(econ, p, selections.clone(), y)?);
        }
        // Odometer step, last agent fastest.
        let mut pos = index.len();
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < demands[pos].points.len() {
                break;
            }
            index[pos] = 0;
        }
    }
    Ok(ExcessSet { price: p.clone(), samples, capped, demands })
}

/// `p · z`, checked against Walras's law.
pub fn walras_value(sample: &ExcessSample) -> Result<f64, ExcessError> {
    let value = sample.price.dot(&sample.excess);
    if value > TAU_WALRAS {
        let (agent, slack) = sample
            .slacks
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, s)| if s < acc.1 { (i, s) } else { acc });
        return Err(ExcessError::WalrasViolation { value, agent, overspend: -slack });
    }
    Ok(value)
}

/// Per-good box containing every excess vector the economy can produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessBound {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ExcessBound {
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        z.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, up))| *v >= lo - tol && *v <= up + tol)
    }
}

/// `[-sum h, sum upper - sum h]` per good.
pub fn excess_bound(econ: &Economy) -> ExcessBound {
    let total = econ.total_endowment();
    let mut ceiling = vec![0.0; econ.num_goods()];
    for i in 0..econ.num_agents() {
        for (c, u) in ceiling.iter_mut().zip(econ.truncated_consumption_set(i).upper.iter()) {
            *c += u;
        }
    }
    ExcessBound {
        lower: total.iter().map(|t| -t).collect(),
        upper: ceiling.iter().zip(total.iter()).map(|(c, t)| c - t).collect(),
    }
}

/// Symmetric distance between two excess sets: every sample of one must be
/// matched by some sample of the other.
pub fn excess_set_distance(a: &ExcessSet, b: &ExcessSet) -> f64 {
    let directed = |from: &ExcessSet, to: &ExcessSet| -> f64 {
        from.samples
            .iter()
            .map(|s| {
                to.samples
                    .iter()
                    .map(|t| {
                        s.excess
                            .iter()
                            .zip(t.excess.iter())
                            .map(|(u, v)| (u - v).abs())
                            .fold(0.0, f64::max)
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Whether excess demand at `normalize(alpha · p)` matches excess demand at `p`
/// within [`TAU_BUDGET`].
pub fn homogeneity_check(econ: &Economy, p: &PriceVector, alpha: f64, tol: f64) -> Result<bool, ExcessError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(ExcessError::Geometry(GeometryError::AlphaOutOfRange(alpha)));
    }
    let scaled: Vec<f64> = p.iter().map(|v| v * alpha).collect();
    let q = normalize_prices(&scaled)?;
    let base = excess_demand(econ, p, tol)?;
    let other = excess_demand(econ, &q, tol)?;
    Ok(base.samples.len() == other.samples.len() && excess_set_distance(&base, &other) <= TAU_BUDGET)
}
