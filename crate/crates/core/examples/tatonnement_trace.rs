//! Price adjustment dynamics, cross-checked against the grid solver.
//!
//! A symmetric Cobb-Douglas economy settles quickly on the price the grid solver
//! finds. In Scarf's economy of cyclic complements the dynamics spiral away from
//! the interior equilibrium and end on a vertex where two goods are free, a
//! different equilibrium from the one the grid returns.

use walras::economy::{Agent, Economy, UtilityFunction};
use walras::equilibrium::{find_equilibrium_grid, tatonnement, TatonnementConfig};
use walras::geometry::{Bundle, PriceVector};

fn report(name: &str, econ: &Economy, start: &PriceVector, config: &TatonnementConfig) -> Result<(), Box<dyn std::error::Error>> {
    let out = tatonnement(econ, start, config)?;
    println!("{name}: {} steps, converged {}", out.trace.len(), out.converged());
    for step in out.trace.iter().take(4) {
        println!("  {:>3}  p {}  residual {:.4}", step.iteration, step.price, step.residual);
    }
    if let Some(last) = out.trace.last() {
        println!("  ...  p {}  residual {:.4}", last.price, last.residual);
    }
    let grid = find_equilibrium_grid(econ, config.epsilon, 12)?;
    println!("  grid solver: p {}", grid.price);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cd = UtilityFunction::cobb_douglas(vec![0.25, 0.5, 0.25])?;
    let agents = (0..2).map(|_| Agent::new(cd.clone(), Bundle::new(vec![1.0; 3]).unwrap())).collect();
    let smooth = Economy::new(vec!["a".into(), "b".into(), "c".into()], agents)?;
    report("cobb-douglas", &smooth, &PriceVector::new(vec![0.6, 0.2, 0.2])?, &TatonnementConfig::new(0.1, 500, 1e-6))?;

    // Scarf's economy: agent i owns good i and wants goods i and i+1 in fixed proportion
    // (the third good gets a negligible coefficient).
    let agents = (0..3)
        .map(|i| {
            let mut coeffs = vec![1e-3; 3];
            coeffs[i] = 1.0;
            coeffs[(i + 1) % 3] = 1.0;
            let mut h = vec![0.0; 3];
            h[i] = 1.0;
            Agent::new(UtilityFunction::leontief(coeffs).unwrap(), Bundle::new(h).unwrap())
        })
        .collect();
    let cyclic = Economy::with_options(vec!["a".into(), "b".into(), "c".into()], agents, 2.0, false)?;
    report("scarf", &cyclic, &PriceVector::new(vec![0.5, 0.3, 0.2])?, &TatonnementConfig::new(0.1, 300, 1e-6))?;
    Ok(())
}
