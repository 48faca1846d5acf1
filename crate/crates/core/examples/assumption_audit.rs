//! Auditing the existence assumptions of an economy.
//!
//! The second agent has CES preferences with `rho = 2`, which are not convex;
//! the audit returns a concrete triple of bundles that breaks convexity.

use walras::diagnostics::{audit_assumptions_seeded, AuditStatus};
use walras::economy::{Agent, Economy, UtilityFunction};
use walras::geometry::Bundle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let agents = vec![
        Agent::new(UtilityFunction::cobb_douglas(vec![0.5, 0.5])?, Bundle::new(vec![1.0, 1.0])?),
        Agent::new(UtilityFunction::ces(vec![1.0, 1.0], 2.0)?, Bundle::new(vec![1.0, 0.5])?),
    ];
    let econ = Economy::new(vec!["x".into(), "y".into()], agents)?;

    let audit = audit_assumptions_seeded(&econ, 7);
    for line in audit.digest() {
        println!("{line}");
    }
    for entry in audit.failures() {
        if let AuditStatus::Fail { points, .. } = &entry.status {
            println!("\n{} witness points:", entry.label);
            for p in points {
                println!("  {p:?}");
            }
        }
    }
    Ok(())
}
