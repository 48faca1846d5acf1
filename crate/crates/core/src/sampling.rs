//! Seeded randomness: simplex points, probe directions and random economies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::economy::{Agent, Economy, UtilityFunction};
use crate::geometry::{normalize_prices, Bundle, PriceVector};

pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the price simplex (normalized exponential draws).
pub fn random_simplex_point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PriceVector {
    let raw: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-300).collect();
    normalize_prices(&raw).expect("exponential draws are positive")
}

/// Bundle with coordinates drawn uniformly from `[lo_j, hi_j]`.
pub fn random_bundle<R: Rng + ?Sized>(rng: &mut R, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    lo.iter().zip(hi).map(|(l, h)| l + (h - l) * rng.random::<f64>()).collect()
}

/// Shape of randomly drawn economies.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomyShape {
    pub goods: (usize, usize),
    pub agents: (usize, usize),
    /// Share of agents with CES rather than Cobb-Douglas utility.
    pub ces_share: f64,
    pub rho: (f64, f64),
    pub weights: (f64, f64),
    pub endowments: (f64, f64),
}

impl Default for EconomyShape {
    fn default() -> Self {
        Self {
            goods: (2, 4),
            agents: (2, 5),
            ces_share: 0.5,
            rho: (-2.0, 0.5),
            weights: (0.2, 1.0),
            endowments: (0.2, 2.0),
        }
    }
}

/// A validated economy with strictly positive endowments and CD/CES utilities.
pub fn random_economy<R: Rng + ?Sized>(rng: &mut R, shape: &EconomyShape) -> Economy {
    let l = rng.random_range(shape.goods.0..=shape.goods.1);
    let n = rng.random_range(shape.agents.0..=shape.agents.1);
    let agents = (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..l).map(|_| rng.random_range(shape.weights.0..=shape.weights.1)).collect();
            let utility = if rng.random::<f64>() < shape.ces_share {
                // Stay away from the Cobb-Douglas limit where CES evaluation degenerates.
                let mut rho: f64 = 0.0;
                while rho.abs() < 0.05 {
                    rho = rng.random_range(shape.rho.0..=shape.rho.1);
                }
                UtilityFunction::ces(raw, rho).expect("weights are positive")
            } else {
                let s: f64 = raw.iter().sum();
                UtilityFunction::cobb_douglas(raw.iter().map(|w| w / s).collect()).expect("weights sum to one")
            };
            let h: Vec<f64> = (0..l).map(|_| rng.random_range(shape.endowments.0..=shape.endowments.1)).collect();
            Agent::new(utility, Bundle::new(h).expect("positive endowment"))
        })
        .collect();
    let goods = (1..=l).map(|j| format!("good{j}")).collect();
    Economy::new(goods, agents).expect("random economies satisfy every structural check")
}
