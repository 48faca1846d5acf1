//! Sequence probes for upper and lower hemicontinuity.
//!
//! A probe walks finitely many sequences `p_n -> p` (one per direction, one
//! point per radius) and compares the image at `p_n` with the image at `p`.
//! Passing means no counterexample was found along those sequences; it is
//! not a proof.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{demand, DemandError, DemandSet, TAU_UTIL};
use crate::economy::{Agent, Economy, TruncationBox};
use crate::geometry::{simplex_contains, PriceVector, SIMPLEX_TOL};
use crate::polytope::{box_cut_vertices, euclidean, hull_distance, project_box_halfspace, Cut};
use crate::sampling::{random_simplex_point, seeded, DEFAULT_SEED};

/// Residual threshold at the finest radius.
pub const PROBE_TOLERANCE: f64 = 1e-3;
/// Number of seeded random directions added to the coordinate approaches.
pub const RANDOM_DIRECTIONS: usize = 8;
/// Wording of every passing verdict.
pub const PASS_WORDING: &str = "no counterexample found";

pub fn default_radii() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("radii must be positive, strictly decreasing and at least 1e-8: {0:?}")]
    Radii(Vec<f64>),
    #[error("price is not on the simplex")]
    Price,
    #[error("target {index} is not in the image at the probed price (distance {distance})")]
    TargetOutside { index: usize, distance: f64 },
    #[error("image at the probed price could not be evaluated: {0}")]
    Image(String),
}

/// An image set, in a form that supports point-to-set distances.
#[derive(Debug, Clone, PartialEq)]
pub enum Image {
    /// Convex hull of the listed points.
    Hull(Vec<Vec<f64>>),
    /// Exactly the listed points.
    Points(Vec<Vec<f64>>),
    /// `{ lower <= x <= upper, price . x <= bound }`.
    Budget { lower: Vec<f64>, upper: Vec<f64>, price: Vec<f64>, bound: f64 },
}

impl Image {
    pub fn distance(&self, y: &[f64]) -> f64 {
        match self {
            Image::Hull(points) => hull_distance(y, points),
            Image::Points(points) => points.iter().map(|x| euclidean(y, x)).fold(f64::INFINITY, f64::min),
            Image::Budget { lower, upper, price, bound } => {
                euclidean(y, &project_box_halfspace(y, lower, upper, price, *bound))
            }
        }
    }

    /// Extreme points; every point of the image is a convex combination of them.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            Image::Hull(points) | Image::Points(points) => points.clone(),
            Image::Budget { lower, upper, price, bound } => {
                box_cut_vertices(lower, upper, price, *bound, Cut::AtMost, 1e-12).unwrap_or_default()
            }
        }
    }
}

/// A set-valued map from prices to bundles.
pub trait Correspondence: Sync {
    fn name(&self) -> String;
    fn image(&self, p: &PriceVector) -> Result<Image, String>;
}

impl From<DemandSet> for Image {
    fn from(d: DemandSet) -> Self {
        let points = d.points.into_iter().map(|b| b.into_inner()).collect();
        if d.convex {
            Image::Hull(points)
        } else {
            Image::Points(points)
        }
    }
}

/// Demand of one agent over its truncated consumption set.
#[derive(Debug, Clone)]
pub struct DemandMap {
    pub agent: Agent,
    pub bounds: TruncationBox,
    pub index: usize,
}

impl DemandMap {
    pub fn new(econ: &Economy, agent: usize) -> Self {
        Self { agent: econ.agent(agent).clone(), bounds: econ.truncated_consumption_set(agent), index: agent }
    }
}

impl Correspondence for DemandMap {
    fn name(&self) -> String {
        format!("demand of agent {}", self.index)
    }

    fn image(&self, p: &PriceVector) -> Result<Image, String> {
        demand(&self.agent, &self.bounds, p, TAU_UTIL).map(Image::from).map_err(|e: DemandError| e.to_string())
    }
}

/// Budget set of one agent within its truncated consumption set.
#[derive(Debug, Clone)]
pub struct BudgetMap {
    pub agent: Agent,
    pub bounds: TruncationBox,
    pub index: usize,
}

impl BudgetMap {
    pub fn new(econ: &Economy, agent: usize) -> Self {
        Self { agent: econ.agent(agent).clone(), bounds: econ.truncated_consumption_set(agent), index: agent }
    }
}

impl Correspondence for BudgetMap {
    fn name(&self) -> String {
        format!("budget of agent {}", self.index)
    }

    fn image(&self, p: &PriceVector) -> Result<Image, String> {
        let bound = p.dot(&self.agent.endowment);
        let cheapest = p.dot(&self.bounds.lower);
        if cheapest > bound + 1e-12 {
            return Err(format!("empty budget: wealth {bound} below cheapest consumption {cheapest}"));
        }
        Ok(Image::Budget {
            lower: self.bounds.lower.to_vec(),
            upper: self.bounds.upper.to_vec(),
            price: p.to_vec(),
            bound,
        })
    }
}

/// Correspondence given by a closure; used to build deliberate violations.
pub struct FnCorrespondence<F> {
    pub label: String,
    pub map: F,
}

impl<F> Correspondence for FnCorrespondence<F>
where
    F: Fn(&PriceVector) -> Result<Image, String> + Sync,
{
    fn name(&self) -> String {
        self.label.clone()
    }

    fn image(&self, p: &PriceVector) -> Result<Image, String> {
        (self.map)(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Notion {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub radii: Vec<f64>,
    pub tolerance: f64,
    pub seed: u64,
    pub random_directions: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { radii: default_radii(), tolerance: PROBE_TOLERANCE, seed: DEFAULT_SEED, random_directions: RANDOM_DIRECTIONS }
    }
}

impl ProbeConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// One sequence `p + r d` over the configured radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionProbe {
    pub label: String,
    pub direction: Vec<f64>,
    /// Residual per radius; infinite where the image could not be evaluated.
    pub residuals: Vec<f64>,
}

impl DirectionProbe {
    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().unwrap_or(&f64::INFINITY)
    }
}

/// The sequence that breaks the probed notion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub direction: String,
    pub prices: Vec<PriceVector>,
    /// Upper: the escaping point of each nearby image. Lower: the nearest point
    /// of each nearby image to the target.
    pub points: Vec<Vec<f64>>,
    /// The unreachable target (lower probes only).
    pub target: Option<Vec<f64>>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub notion: Notion,
    pub correspondence: String,
    pub price: PriceVector,
    pub radii: Vec<f64>,
    pub tolerance: f64,
    pub directions: Vec<DirectionProbe>,
    pub verdict: Verdict,
    pub summary: String,
    pub witness: Option<Witness>,
}

impl ContinuityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn check_inputs(p: &PriceVector, config: &ProbeConfig) -> Result<(), ProbeError> {
    let r = &config.radii;
    let ok = !r.is_empty()
        && r.iter().all(|v| v.is_finite() && *v > 0.0)
        && r.windows(2).all(|w| w[1] < w[0])
        && *r.last().unwrap() >= 1e-8;
    if !ok {
        return Err(ProbeError::Radii(r.clone()));
    }
    if !simplex_contains(p, SIMPLEX_TOL) {
        return Err(ProbeError::Price);
    }
    Ok(())
}

/// Probe directions at `p`: toward and away from every vertex, then toward
/// seeded random interior points. Directions leaving the simplex at the
/// largest radius, or vanishing, are dropped.
pub fn probe_directions(p: &PriceVector, config: &ProbeConfig) -> Vec<(String, Vec<f64>)> {
    let l = p.len();
    let r_max = config.radii.first().copied().unwrap_or(0.0);
    let mut out = Vec::new();
    for j in 0..l {
        let toward: Vec<f64> = (0..l).map(|k| f64::from(u8::from(k == j)) - p[k]).collect();
        out.push((format!("toward vertex {}", j + 1), toward.clone()));
        let away: Vec<f64> = toward.iter().map(|v| -v).collect();
        out.push((format!("away from vertex {}", j + 1), away));
    }
    let mut rng = seeded(config.seed);
    for k in 0..config.random_directions {
        let q = random_simplex_point(&mut rng, l);
        out.push((format!("random {}", k + 1), q.iter().zip(p.iter()).map(|(a, b)| a - b).collect()));
    }
    out.retain(|(_, d)| {
        d.iter().any(|v| v.abs() > 1e-12) && p.iter().zip(d).all(|(pj, dj)| pj + r_max * dj >= 0.0)
    });
    out
}

fn step(p: &PriceVector, d: &[f64], r: f64) -> PriceVector {
    let raw: Vec<f64> = p.iter().zip(d).map(|(pj, dj)| (pj + r * dj).max(0.0)).collect();
    let s: f64 = raw.iter().sum();
    PriceVector::new(raw.iter().map(|v| v / s).collect()).expect("steps stay on the simplex")
}

/// Upper hemicontinuity: no point of a nearby image may stay far from the image at `p`.
pub fn probe_upper<C: Correspondence + ?Sized>(
    map: &C,
    p: &PriceVector,
    config: &ProbeConfig,
) -> Result<ContinuityReport, ProbeError> {
    check_inputs(p, config)?;
    let at_p = map.image(p).map_err(ProbeError::Image)?;
    let dirs = probe_directions(p, config);
    let runs: Vec<(DirectionProbe, Vec<PriceVector>, Vec<Vec<f64>>)> = dirs
        .par_iter()
        .map(|(label, d)| {
            let mut residuals = Vec::new();
            let mut prices = Vec::new();
            let mut points = Vec::new();
            for &r in &config.radii {
                let q = step(p, d, r);
                let (res, far) = match map.image(&q) {
                    Ok(img) => img
                        .vertices()
                        .into_iter()
                        .map(|v| (at_p.distance(&v), v))
                        .fold((0.0, Vec::new()), |acc, (dist, v)| if dist > acc.0 || acc.1.is_empty() { (dist, v) } else { acc }),
                    Err(_) => (f64::INFINITY, Vec::new()),
                };
                residuals.push(res);
                prices.push(q);
                points.push(far);
            }
            (DirectionProbe { label: label.clone(), direction: d.clone(), residuals }, prices, points)
        })
        .collect();
    Ok(assemble(Notion::Upper, map.name(), p, config, runs, None))
}

/// Lower hemicontinuity: every target in the image at `p` must be approachable
/// from the images along each sequence.
pub fn probe_lower<C: Correspondence + ?Sized>(
    map: &C,
    p: &PriceVector,
    targets: &[Vec<f64>],
    config: &ProbeConfig,
) -> Result<ContinuityReport, ProbeError> {
    check_inputs(p, config)?;
    let at_p = map.image(p).map_err(ProbeError::Image)?;
    for (index, y) in targets.iter().enumerate() {
        let distance = at_p.distance(y);
        if !(distance <= 1e-9 * (1.0 + y.iter().fold(0.0_f64, |m, v| m.max(v.abs())))) {
            return Err(ProbeError::TargetOutside { index, distance });
        }
    }
    let dirs = probe_directions(p, config);
    let mut best: Option<ContinuityReport> = None;
    for y in targets {
        let runs: Vec<(DirectionProbe, Vec<PriceVector>, Vec<Vec<f64>>)> = dirs
            .par_iter()
            .map(|(label, d)| {
                let mut residuals = Vec::new();
                let mut prices = Vec::new();
                let mut points = Vec::new();
                for &r in &config.radii {
                    let q = step(p, d, r);
                    let (res, near) = match map.image(&q) {
                        Ok(img) => nearest(&img, y),
                        Err(_) => (f64::INFINITY, Vec::new()),
                    };
                    residuals.push(res);
                    prices.push(q);
                    points.push(near);
                }
                (DirectionProbe { label: label.clone(), direction: d.clone(), residuals }, prices, points)
            })
            .collect();
        let report = assemble(Notion::Lower, map.name(), p, config, runs, Some(y.clone()));
        best = Some(match best {
            None => report,
            Some(prev) => merge_lower(prev, report),
        });
    }
    Ok(best.unwrap_or_else(|| assemble(Notion::Lower, map.name(), p, config, Vec::new(), None)))
}

fn nearest(img: &Image, y: &[f64]) -> (f64, Vec<f64>) {
    match img {
        Image::Budget { lower, upper, price, bound } => {
            let x = project_box_halfspace(y, lower, upper, price, *bound);
            (euclidean(y, &x), x)
        }
        other => {
            let d = other.distance(y);
            let v = other
                .vertices()
                .into_iter()
                .min_by(|a, b| euclidean(y, a).total_cmp(&euclidean(y, b)))
                .unwrap_or_default();
            (d, v)
        }
    }
}

/// Keeps the per-direction maximum over targets and the first failing witness.
fn merge_lower(mut acc: ContinuityReport, next: ContinuityReport) -> ContinuityReport {
    for (a, b) in acc.directions.iter_mut().zip(&next.directions) {
        for (ra, rb) in a.residuals.iter_mut().zip(&b.residuals) {
            *ra = ra.max(*rb);
        }
    }
    if acc.witness.is_none() && next.witness.is_some() {
        acc.witness = next.witness;
        acc.verdict = Verdict::Fail;
        acc.summary = next.summary;
    }
    acc
}

fn assemble(
    notion: Notion,
    correspondence: String,
    p: &PriceVector,
    config: &ProbeConfig,
    runs: Vec<(DirectionProbe, Vec<PriceVector>, Vec<Vec<f64>>)>,
    target: Option<Vec<f64>>,
) -> ContinuityReport {
    let failing = runs.iter().find(|(d, _, _)| !(d.final_residual() <= config.tolerance));
    let witness = failing.map(|(d, prices, points)| Witness {
        direction: d.label.clone(),
        prices: prices.clone(),
        points: points.clone(),
        target: target.clone(),
        residuals: d.residuals.clone(),
    });
    let (verdict, summary) = match &witness {
        None => (Verdict::Pass, PASS_WORDING.to_string()),
        Some(w) => {
            let what = match notion {
                Notion::Upper => "nearby images keep a point away from the image at the limit",
                Notion::Lower => "a target in the image at the limit cannot be approached",
            };
            (Verdict::Fail, format!("counterexample along {}: {what}", w.direction))
        }
    };
    ContinuityReport {
        notion,
        correspondence,
        price: p.clone(),
        radii: config.radii.clone(),
        tolerance: config.tolerance,
        directions: runs.into_iter().map(|(d, _, _)| d).collect(),
        verdict,
        summary,
        witness,
    }
}

/// Upper probe of one agent's demand with default radii and seed.
pub fn probe_upper_hemicontinuity(
    econ: &Economy,
    agent: usize,
    p: &PriceVector,
    radii: &[f64],
) -> Result<ContinuityReport, ProbeError> {
    let config = ProbeConfig { radii: radii.to_vec(), ..ProbeConfig::default() };
    probe_upper(&DemandMap::new(econ, agent), p, &config)
}

/// Lower probe of one agent's demand with default seed.
pub fn probe_lower_hemicontinuity(
    econ: &Economy,
    agent: usize,
    p: &PriceVector,
    targets: &[Vec<f64>],
    radii: &[f64],
) -> Result<ContinuityReport, ProbeError> {
    let config = ProbeConfig { radii: radii.to_vec(), ..ProbeConfig::default() };
    probe_lower(&DemandMap::new(econ, agent), p, targets, &config)
}
