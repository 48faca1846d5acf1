//! Two Cobb-Douglas traders in an Edgeworth box, solved by grid refinement.
//!
//! Agent 0 owns all of good 1, agent 1 all of good 2; both spend 60% on good 1,
//! so the market clears at `p = (0.6, 0.4)`.

use walras::economy::{Agent, Economy, UtilityFunction};
use walras::equilibrium::{certify, find_equilibrium_grid};
use walras::geometry::{Bundle, PriceVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = UtilityFunction::cobb_douglas(vec![0.6, 0.4])?;
    let agents = vec![
        Agent::new(u.clone(), Bundle::new(vec![1.0, 0.0])?),
        Agent::new(u, Bundle::new(vec![0.0, 1.0])?),
    ];
    let econ = Economy::with_options(vec!["bread".into(), "wine".into()], agents, 2.0, false)?;

    let cert = find_equilibrium_grid(&econ, 1e-6, 12)?;
    println!("price   {}", cert.price);
    println!("excess  {}", cert.excess);
    println!("levels  {}", cert.iterations);

    // Certification is a pure check, so it can be run on any price.
    match certify(&econ, &PriceVector::new(vec![0.5, 0.5])?, 1e-6) {
        Ok(_) => println!("(0.5, 0.5) certified"),
        Err(e) => println!("(0.5, 0.5) rejected: {e}"),
    }
    Ok(())
}
