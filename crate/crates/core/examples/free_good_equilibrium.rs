//! A good nobody wants ends up free, and the surplus is disposed of.

use walras::economy::{Agent, Economy, UtilityFunction};
use walras::equilibrium::find_equilibrium_grid;
use walras::excess::excess_demand;
use walras::demand::TAU_UTIL;
use walras::geometry::Bundle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = UtilityFunction::linear(vec![1.0, 0.0])?;
    let agents = vec![
        Agent::new(u.clone(), Bundle::new(vec![1.0, 1.0])?),
        Agent::new(u, Bundle::new(vec![0.5, 0.7])?),
    ];
    let econ = Economy::new(vec!["useful".into(), "useless".into()], agents)?;

    let cert = find_equilibrium_grid(&econ, 1e-6, 12)?;
    println!("price {}  excess {}", cert.price, cert.excess);
    for s in &cert.slack {
        println!("  good {}: price {:.3e}, excess {:.3e}", s.good + 1, s.price, s.excess);
    }

    let set = excess_demand(&econ, &cert.price, TAU_UTIL)?;
    for (k, sample) in set.samples.iter().enumerate() {
        println!("sample {k}: disposal {:?}, excess {}", sample.disposal.amounts, sample.excess);
    }
    Ok(())
}
