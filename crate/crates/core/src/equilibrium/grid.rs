//! Grid-refinement search for an approximate fixed point.
//!
//! A price is an approximate fixed point when some excess selection has
//! `max_j z_j <= epsilon` and priced goods clear. The search scans the full
//! simplex lattice once, then repeatedly zooms into windows around the best
//! cells at a finer resolution.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{certify_set, EquilibriumCertificate, EquilibriumError, Method};
use crate::demand::TAU_UTIL;
use crate::economy::Economy;
use crate::excess::excess_demand;
use crate::geometry::{lattice_price, simplex_grid_size, simplex_lattice, PriceVector};

/// Residuals below this are treated as ties, so exact equilibria are ranked by position.
const TIE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch {
    pub epsilon: f64,
    pub max_refinements: usize,
    /// Resolution of the first full scan; `None` picks the largest one within
    /// `max_initial_points`.
    pub initial_resolution: Option<u64>,
    pub max_initial_points: u128,
    /// Resolution multiplier between levels.
    pub refinement_factor: u64,
    /// Number of best cells refined at each level.
    pub candidates: usize,
    /// Cap on lattice points scanned per window.
    pub max_window_points: usize,
}

impl GridSearch {
    pub fn new(epsilon: f64, max_refinements: usize) -> Self {
        Self {
            epsilon,
            max_refinements,
            initial_resolution: None,
            max_initial_points: 20_000,
            refinement_factor: 4,
            candidates: 3,
            max_window_points: 4096,
        }
    }

    fn initial_resolution_for(&self, dim: usize) -> u64 {
        if let Some(k) = self.initial_resolution {
            return k.max(1);
        }
        let mut k = 1;
        while k < 4096 && simplex_grid_size(dim, k + 1) <= self.max_initial_points {
            k += 1;
        }
        k
    }

    /// Half-width (in fine steps) of the window scanned around each candidate.
    fn window_radius(&self, dim: usize) -> i64 {
        let wanted = (3 * self.refinement_factor as i64 + 1) / 2;
        let free = (dim - 1) as i32;
        let mut r = wanted;
        while r > 1 && (2 * r + 1).pow(free as u32) as usize > self.max_window_points {
            r -= 1;
        }
        r
    }

    pub fn run(&self, econ: &Economy) -> Result<EquilibriumCertificate, EquilibriumError> {
        if !(self.epsilon > 0.0) {
            return Err(EquilibriumError::Parameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.refinement_factor < 2 || self.candidates == 0 {
            return Err(EquilibriumError::Parameter("refinement factor must be >= 2 and candidates >= 1".into()));
        }
        let dim = econ.num_goods();
        let mut resolution = self.initial_resolution_for(dim);
        let mut points = simplex_lattice(dim, resolution).map_err(|e| EquilibriumError::Parameter(e.to_string()))?;
        let radius = self.window_radius(dim);
        let mut best_seen: Option<Scored> = None;

        for level in 0..=self.max_refinements {
            let mut scored: Vec<Scored> = points
                .par_iter()
                .map(|n| Scored::evaluate(econ, n, resolution))
                .collect();
            scored.sort_by(Scored::rank);

            for cand in scored.iter().take(self.candidates) {
                if !cand.residual.is_finite() {
                    continue;
                }
                let set = excess_demand(econ, &cand.price, TAU_UTIL)?;
                if let Ok(cert) = certify_set(&set, self.epsilon, level, Method::Grid) {
                    return Ok(cert);
                }
            }
            if let Some(top) = scored.first() {
                if best_seen.as_ref().is_none_or(|b| Scored::rank(top, b) == Ordering::Less) {
                    best_seen = Some(top.clone());
                }
            }
            if level == self.max_refinements {
                break;
            }

            let next = resolution
                .checked_mul(self.refinement_factor)
                .ok_or_else(|| EquilibriumError::Parameter("grid resolution overflow".into()))?;
            let mut window = BTreeSet::new();
            for cand in scored.iter().take(self.candidates) {
                let center: Vec<u64> = cand.lattice.iter().map(|n| n * self.refinement_factor).collect();
                collect_window(&center, next, radius, &mut window);
            }
            points = window.into_iter().collect();
            resolution = next;
        }

        let best = best_seen.expect("at least one lattice point is scanned");
        Err(EquilibriumError::SearchExhausted {
            best: best.price,
            residual: best.residual,
            refinements: self.max_refinements,
        })
    }
}

/// Scans `simplex_grid` at increasing resolution around the best cells.
pub fn find_equilibrium_grid(
    econ: &Economy,
    epsilon: f64,
    max_refinements: usize,
) -> Result<EquilibriumCertificate, EquilibriumError> {
    GridSearch::new(epsilon, max_refinements).run(econ)
}

#[derive(Debug, Clone)]
struct Scored {
    lattice: Vec<u64>,
    price: PriceVector,
    residual: f64,
    spread: f64,
}

impl Scored {
    fn evaluate(econ: &Economy, lattice: &[u64], resolution: u64) -> Self {
        let price = lattice_price(lattice, resolution);
        let residual = excess_demand(econ, &price, TAU_UTIL).map(|s| s.residual()).unwrap_or(f64::INFINITY);
        let center = 1.0 / price.len() as f64;
        let spread = price.iter().map(|v| (v - center) * (v - center)).sum();
        Self { lattice: lattice.to_vec(), price, residual, spread }
    }

    /// Residual first (floored), then closeness to the barycenter, then lexicographic price.
    fn rank(a: &Scored, b: &Scored) -> Ordering {
        let ra = a.residual.max(TIE_FLOOR);
        let rb = b.residual.max(TIE_FLOOR);
        ra.total_cmp(&rb)
            .then(a.spread.total_cmp(&b.spread))
            .then_with(|| a.price.partial_cmp(&b.price).unwrap_or(Ordering::Equal))
    }
}

fn collect_window(center: &[u64], resolution: u64, radius: i64, out: &mut BTreeSet<Vec<u64>>) {
    let free = center.len() - 1;
    let span = (2 * radius + 1) as usize;
    let total = span.pow(free as u32);
    for code in 0..total {
        let mut rest = code;
        let mut point = Vec::with_capacity(center.len());
        let mut used: i64 = 0;
        let mut ok = true;
        for c in &center[..free] {
            let offset = (rest % span) as i64 - radius;
            rest /= span;
            let v = *c as i64 + offset;
            if v < 0 {
                ok = false;
                break;
            }
            used += v;
            point.push(v as u64);
        }
        if !ok || used > resolution as i64 {
            continue;
        }
        point.push(resolution - used as u64);
        out.insert(point);
    }
}
