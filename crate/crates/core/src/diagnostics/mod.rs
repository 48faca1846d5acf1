//! Continuity probes, the cheapest-point budget pathology, and the assumption audit.

mod audit;
mod continuity;

pub use audit::{audit_assumptions, audit_assumptions_seeded, AssumptionAuditReport, AuditEntry, AuditStatus};
pub use continuity::{
    default_radii, probe_directions, probe_lower, probe_lower_hemicontinuity, probe_upper,
    probe_upper_hemicontinuity, BudgetMap, ContinuityReport, Correspondence, DemandMap, DirectionProbe,
    FnCorrespondence, Image, Notion, ProbeConfig, ProbeError, Verdict, Witness, PASS_WORDING, PROBE_TOLERANCE,
    RANDOM_DIRECTIONS,
};

use crate::economy::{Agent, Economy, UtilityFunction};
use crate::geometry::{Bundle, PriceVector};

/// An agent whose wealth falls to the value of its cheapest consumption.
#[derive(Debug, Clone)]
pub struct Pathology {
    pub economy: Economy,
    /// The agent whose budget set misbehaves.
    pub agent: usize,
    pub price: PriceVector,
    pub target: Bundle,
}

/// Two Cobb-Douglas agents with endowments `(0, 2)` and `(2, 0)`; boxes are
/// `[0, 4]^2`. At `p = (1, 0)` agent 0 owns only a free good, so its budget
/// set is the whole segment `x_1 = 0`, yet at `(1 - 1/n, 1/n)` it can afford at
/// most two units of good 2. The target `(0, 3)` is therefore in the budget set at
/// the limit but not near any budget set along the sequence.
pub fn build_cheapest_point_pathology() -> Pathology {
    let u = UtilityFunction::cobb_douglas(vec![0.5, 0.5]).expect("valid weights");
    let agents = vec![
        Agent::new(u.clone(), Bundle::new(vec![0.0, 2.0]).expect("non-negative")),
        Agent::new(u, Bundle::new(vec![2.0, 0.0]).expect("non-negative")),
    ];
    let economy = Economy::with_options(vec!["good1".into(), "good2".into()], agents, 2.0, false)
        .expect("total endowment is positive");
    Pathology {
        economy,
        agent: 0,
        price: PriceVector::vertex(2, 0),
        target: Bundle::new(vec![0.0, 3.0]).expect("non-negative"),
    }
}
