//! Exchange-value correspondence, the composite fixed-point map, equilibrium
//! certification and the two search procedures (grid refinement, tâtonnement).

mod grid;
mod tatonnement;

pub use grid::{find_equilibrium_grid, GridSearch};
pub use tatonnement::{tatonnement, TatonnementConfig, TatonnementOutcome, TraceStep};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::TAU_UTIL;
use crate::economy::Economy;
use crate::excess::{excess_demand, ExcessError, ExcessSet};
use crate::geometry::{simplex_contains, ExcessVector, PriceVector, SIMPLEX_TOL};

/// Default tolerance for solving.
pub const SOLVE_EPSILON: f64 = 1e-4;
/// Default tolerance for certifying a known solution.
pub const CERTIFY_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error(transparent)]
    Excess(#[from] ExcessError),
    #[error("certificate rejected at good {good}: {reason} (price {price}, excess {excess}, tolerance {epsilon})")]
    Rejected { good: usize, price: f64, excess: f64, epsilon: f64, reason: RejectReason },
    #[error(
        "no certificate after {refinements} refinements; best price {best} has residual {residual}. \
         Either the tolerance is too tight for the search budget or an existence assumption fails"
    )]
    SearchExhausted { best: PriceVector, residual: f64, refinements: usize },
    #[error("invalid search parameter: {0}")]
    Parameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    /// Planned consumption exceeds the available stock.
    ExcessDemand,
    /// A good with positive price does not clear.
    Slackness,
    /// The price vector is not on the simplex.
    OffSimplex,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ExcessDemand => "excess demand above tolerance",
            Self::Slackness => "priced good does not clear",
            Self::OffSimplex => "price off the simplex",
        })
    }
}

/// A face of the price simplex: the maximizers of `p · z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexFace {
    /// Goods attaining the largest excess.
    pub active: Vec<usize>,
    /// Barycenter of the face.
    pub representative: PriceVector,
}

impl SimplexFace {
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        simplex_contains(p, tol) && p.iter().enumerate().all(|(j, v)| self.active.contains(&j) || *v <= tol)
    }
}

/// The exchange-value correspondence: prices maximizing the value of `z`.
pub fn price_adjust(z: &[f64], tol: f64) -> SimplexFace {
    let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let active: Vec<usize> = (0..z.len()).filter(|&j| z[j] >= top - tol).collect();
    let mut rep = vec![0.0; z.len()];
    let w = 1.0 / active.len() as f64;
    for &j in &active {
        rep[j] = w;
    }
    SimplexFace { active, representative: PriceVector::new(rep).expect("barycenter of a face lies on the simplex") }
}

/// `psi(p, z) = mu(z) x zeta(p)`.
pub fn psi_map(econ: &Economy, p: &PriceVector, z: &ExcessVector, tol: f64) -> Result<(SimplexFace, ExcessSet), EquilibriumError> {
    Ok((price_adjust(z, tol), excess_demand(econ, p, TAU_UTIL)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Grid,
    Tatonnement,
    Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSlack {
    pub good: usize,
    pub price: f64,
    pub excess: f64,
}

/// An approximate fixed point of the composite map, checked componentwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub price: PriceVector,
    pub excess: ExcessVector,
    pub slack: Vec<GoodSlack>,
    pub epsilon: f64,
    /// Refinement levels (grid) or iterations (tâtonnement) consumed.
    pub iterations: usize,
    pub method: Method,
}

impl EquilibriumCertificate {
    /// Re-checks the certificate invariants without recomputing excess demand.
    pub fn holds(&self) -> bool {
        check_point(&self.price, &self.excess, self.epsilon).is_ok()
    }

    /// `p* · z*`.
    pub fn value(&self) -> f64 {
        self.price.dot(&self.excess)
    }
}

fn check_point(p: &PriceVector, z: &[f64], epsilon: f64) -> Result<(), EquilibriumError> {
    let reject = |good: usize, reason| EquilibriumError::Rejected {
        good,
        price: p[good],
        excess: z[good],
        epsilon,
        reason,
    };
    if !simplex_contains(p, SIMPLEX_TOL) {
        return Err(reject(0, RejectReason::OffSimplex));
    }
    if let Some(j) = (0..z.len()).find(|&j| z[j] > epsilon) {
        return Err(reject(j, RejectReason::ExcessDemand));
    }
    if let Some(j) = (0..z.len()).find(|&j| p[j] > epsilon && z[j].abs() > epsilon) {
        return Err(reject(j, RejectReason::Slackness));
    }
    Ok(())
}

/// Certifies `p` as an equilibrium at tolerance `epsilon`.
pub fn certify(econ: &Economy, p: &PriceVector, epsilon: f64) -> Result<EquilibriumCertificate, EquilibriumError> {
    let set = excess_demand(econ, p, TAU_UTIL)?;
    certify_set(&set, epsilon, 0, Method::Check)
}

pub(crate) fn certify_set(
    set: &ExcessSet,
    epsilon: f64,
    iterations: usize,
    method: Method,
) -> Result<EquilibriumCertificate, EquilibriumError> {
    let sample = set.best();
    check_point(&sample.price, &sample.excess, epsilon)?;
    let slack = sample
        .price
        .iter()
        .zip(sample.excess.iter())
        .enumerate()
        .map(|(good, (p, z))| GoodSlack { good, price: *p, excess: *z })
        .collect();
    Ok(EquilibriumCertificate {
        price: sample.price.clone(),
        excess: sample.excess.clone(),
        slack,
        epsilon,
        iterations,
        method,
    })
}
