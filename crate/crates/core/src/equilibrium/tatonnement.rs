//! Walrasian price adjustment: raise prices of over-demanded goods, lower the rest.

use serde::{Deserialize, Serialize};

use super::{certify_set, EquilibriumCertificate, EquilibriumError, Method};
use crate::demand::TAU_UTIL;
use crate::economy::Economy;
use crate::excess::excess_demand;
use crate::geometry::{normalize_prices, ExcessVector, PriceVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TatonnementConfig {
    pub step: f64,
    pub max_iters: usize,
    pub epsilon: f64,
    /// Iterates are floored at this value before renormalizing.
    pub floor: f64,
}

impl TatonnementConfig {
    pub fn new(step: f64, max_iters: usize, epsilon: f64) -> Self {
        Self { step, max_iters, epsilon, floor: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub price: PriceVector,
    /// The lexicographically first excess selection at this price.
    pub excess: ExcessVector,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TatonnementOutcome {
    pub trace: Vec<TraceStep>,
    /// Present when some iterate certified; non-convergence is a normal outcome.
    pub certificate: Option<EquilibriumCertificate>,
}

impl TatonnementOutcome {
    pub fn converged(&self) -> bool {
        self.certificate.is_some()
    }
}

/// Runs `p <- normalize(max(floor, p + step * z))` until an iterate certifies or
/// the iteration budget is spent.
pub fn tatonnement(
    econ: &Economy,
    start: &PriceVector,
    config: &TatonnementConfig,
) -> Result<TatonnementOutcome, EquilibriumError> {
    if !(config.step > 0.0) {
        return Err(EquilibriumError::Parameter(format!("step must be positive, got {}", config.step)));
    }
    let mut price = start.clone();
    let mut trace = Vec::new();
    for iteration in 0..=config.max_iters {
        let set = excess_demand(econ, &price, TAU_UTIL)?;
        let z = set.first().excess.clone();
        trace.push(TraceStep { iteration, price: price.clone(), residual: z.max_gap(), excess: z.clone() });
        if let Ok(cert) = certify_set(&set, config.epsilon, iteration, Method::Tatonnement) {
            return Ok(TatonnementOutcome { trace, certificate: Some(cert) });
        }
        if iteration == config.max_iters {
            break;
        }
        let raw: Vec<f64> = price
            .iter()
            .zip(z.iter())
            .map(|(p, dz)| (p + config.step * dz).max(config.floor))
            .collect();
        price = normalize_prices(&raw).map_err(|e| EquilibriumError::Parameter(e.to_string()))?;
    }
    Ok(TatonnementOutcome { trace, certificate: None })
}
