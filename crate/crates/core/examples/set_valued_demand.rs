//! Demand as a set: ties in linear utility, kinks in Leontief, and how the
//! image moves as prices cross the tie.

use walras::demand::{demand, TAU_UTIL};
use walras::diagnostics::{probe_lower_hemicontinuity, probe_upper_hemicontinuity, default_radii};
use walras::economy::{Agent, Economy, UtilityFunction};
use walras::geometry::{Bundle, PriceVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let agents = vec![
        Agent::new(UtilityFunction::linear(vec![1.0, 1.0])?, Bundle::new(vec![1.0, 1.0])?),
        Agent::new(UtilityFunction::leontief(vec![1.0, 2.0])?, Bundle::new(vec![1.0, 1.0])?),
    ];
    let econ = Economy::new(vec!["tea".into(), "coffee".into()], agents)?;

    for q in [0.45, 0.5, 0.55] {
        let p = PriceVector::new(vec![q, 1.0 - q])?;
        for i in 0..econ.num_agents() {
            let d = demand(econ.agent(i), &econ.truncated_consumption_set(i), &p, TAU_UTIL)?;
            let pts: Vec<String> = d.points.iter().map(|x| x.to_string()).collect();
            println!("p {p}  agent {i} ({}): {}", econ.agent(i).utility.kind(), pts.join(" "));
        }
    }

    // At the tie the linear agent's demand jumps: upper hemicontinuous but not lower.
    let p = PriceVector::uniform(2);
    let upper = probe_upper_hemicontinuity(&econ, 0, &p, &default_radii())?;
    let lower = probe_lower_hemicontinuity(&econ, 0, &p, &[vec![1.0, 1.0]], &default_radii())?;
    println!("upper {:?}, lower {:?} ({})", upper.verdict, lower.verdict, lower.summary);
    Ok(())
}
