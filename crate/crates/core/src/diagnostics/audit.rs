//! Executable checks for the assumptions behind the existence argument.

use serde::{Deserialize, Serialize};

use crate::demand::TAU_UTIL;
use crate::economy::{Assumption, Economy};
use crate::sampling::{random_bundle, seeded, DEFAULT_SEED};

/// Midpoint triples drawn per agent for the convexity sweep.
const CONVEXITY_TRIPLES: usize = 1000;
/// Random feasible points per agent for the non-satiation check.
const SATIATION_POINTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum AuditStatus {
    Pass { checked: String },
    Fail { agent: Option<usize>, witness: String, points: Vec<Vec<f64>> },
    /// True by how the model is built; `construction` names the construction.
    Structural { construction: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub assumption: Assumption,
    pub label: String,
    #[serde(flatten)]
    pub status: AuditStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionAuditReport {
    pub seed: u64,
    pub entries: Vec<AuditEntry>,
}

impl AssumptionAuditReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| !matches!(e.status, AuditStatus::Fail { .. }))
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| matches!(e.status, AuditStatus::Fail { .. }))
    }

    pub fn status(&self, assumption: Assumption) -> &AuditStatus {
        &self.entries.iter().find(|e| e.assumption == assumption).expect("every assumption is audited").status
    }

    /// One line per assumption.
    pub fn digest(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| match &e.status {
                AuditStatus::Pass { .. } => format!("{}: pass", e.label),
                AuditStatus::Structural { .. } => format!("{}: structural", e.label),
                AuditStatus::Fail { witness, .. } => format!("{}: FAIL ({witness})", e.label),
            })
            .collect()
    }
}

pub fn audit_assumptions(econ: &Economy) -> AssumptionAuditReport {
    audit_assumptions_seeded(econ, DEFAULT_SEED)
}

pub fn audit_assumptions_seeded(econ: &Economy, seed: u64) -> AssumptionAuditReport {
    let entries = Assumption::ALL
        .iter()
        .map(|&a| {
            let status = match a {
                Assumption::ConsumptionSet => AuditStatus::Structural {
                    construction: "each agent consumes in the box [lower, margin × total endowment]: closed, convex, bounded below"
                        .into(),
                },
                Assumption::PreferenceMaximization => AuditStatus::Structural {
                    construction: "demand is the exact set of utility maximizers over the budget set".into(),
                },
                Assumption::ClosedPreferences => AuditStatus::Structural {
                    construction: "preferences come from utilities continuous on the consumption box".into(),
                },
                Assumption::GivenTotalStocks => total_stocks(econ),
                Assumption::Survival => survival(econ),
                Assumption::ConvexPreferences => convexity(econ, seed),
                Assumption::NonSatiation => non_satiation(econ, seed),
                Assumption::FreeDisposal => AuditStatus::Structural {
                    construction: "surplus of any zero-priced good can be disposed of at no cost".into(),
                },
            };
            AuditEntry { assumption: a, label: a.label().into(), status }
        })
        .collect();
    AssumptionAuditReport { seed, entries }
}

fn total_stocks(econ: &Economy) -> AuditStatus {
    let total = econ.total_endowment();
    match total.iter().position(|t| !(*t > 0.0)) {
        Some(j) => AuditStatus::Fail {
            agent: None,
            witness: format!("no stock of good {}", j + 1),
            points: vec![total.to_vec()],
        },
        None => AuditStatus::Pass { checked: "every good has a positive total stock".into() },
    }
}

fn survival(econ: &Economy) -> AuditStatus {
    for (i, a) in econ.agents().iter().enumerate() {
        if let Some(j) = a.survival_gap() {
            return AuditStatus::Fail {
                agent: Some(i),
                witness: format!("agent {i}: h not ≫ 0, coordinate {}", j + 1),
                points: vec![a.endowment.to_vec()],
            };
        }
    }
    AuditStatus::Pass { checked: "every endowment exceeds the lower consumption bound in every good".into() }
}

fn convexity(econ: &Economy, seed: u64) -> AuditStatus {
    let mut rng = seeded(seed);
    for (i, a) in econ.agents().iter().enumerate() {
        let bounds = econ.truncated_consumption_set(i);
        let u = &a.utility;
        for _ in 0..CONVEXITY_TRIPLES {
            let x = random_bundle(&mut rng, &bounds.lower, &bounds.upper);
            let y = random_bundle(&mut rng, &bounds.lower, &bounds.upper);
            let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
            let floor = u.eval(&x).min(u.eval(&y));
            if u.eval(&mid) < floor - TAU_UTIL * floor.abs().max(1.0) {
                return AuditStatus::Fail {
                    agent: Some(i),
                    witness: format!(
                        "agent {i}: u(midpoint) = {} below min(u(a), u(b)) = {floor}",
                        u.eval(&mid)
                    ),
                    points: vec![x, y, mid],
                };
            }
        }
        if !u.convex_by_parameters() {
            return AuditStatus::Fail {
                agent: Some(i),
                witness: format!("agent {i}: {} parameters outside the quasi-concave range", u.kind()),
                points: Vec::new(),
            };
        }
    }
    AuditStatus::Pass {
        checked: format!("parameter ranges and {CONVEXITY_TRIPLES} seeded midpoint triples per agent"),
    }
}

fn non_satiation(econ: &Economy, seed: u64) -> AuditStatus {
    let mut rng = seeded(seed ^ 0x9e37_79b9_7f4a_7c15);
    let total = econ.total_endowment();
    for (i, a) in econ.agents().iter().enumerate() {
        let bounds = econ.truncated_consumption_set(i);
        let room = total.iter().zip(bounds.upper.iter()).map(|(t, u)| u - t).fold(f64::INFINITY, f64::min);
        let delta = 1e-3 * room;
        let mut points = vec![total.to_vec()];
        for _ in 0..SATIATION_POINTS {
            points.push(random_bundle(&mut rng, &bounds.lower, &total));
        }
        for x in points {
            let up: Vec<f64> = x.iter().map(|v| v + delta).collect();
            if !(a.utility.eval(&up) > a.utility.eval(&x)) {
                return AuditStatus::Fail {
                    agent: Some(i),
                    witness: format!("agent {i}: adding {delta} of every good does not raise utility"),
                    points: vec![x, up],
                };
            }
        }
    }
    AuditStatus::Pass {
        checked: format!("utility rises along the diagonal at the total-stock corner and {SATIATION_POINTS} seeded points"),
    }
}
