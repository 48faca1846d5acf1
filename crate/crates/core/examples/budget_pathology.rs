//! Budget sets that fail lower hemicontinuity when wealth hits its minimum.

use walras::demand::{budget_value, cheapest_consumption};
use walras::diagnostics::{build_cheapest_point_pathology, probe_lower, probe_upper, BudgetMap, ProbeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = build_cheapest_point_pathology();
    let econ = &path.economy;
    let bounds = econ.truncated_consumption_set(path.agent);
    println!(
        "at p = {}: wealth {}, cheapest consumption {}",
        path.price,
        budget_value(econ.agent(path.agent), &path.price),
        cheapest_consumption(&bounds, &path.price)
    );

    let map = BudgetMap::new(econ, path.agent);
    let config = ProbeConfig::default();
    let upper = probe_upper(&map, &path.price, &config)?;
    println!("upper: {:?} ({})", upper.verdict, upper.summary);

    let lower = probe_lower(&map, &path.price, &[path.target.to_vec()], &config)?;
    println!("lower: {:?} ({})", lower.verdict, lower.summary);
    if let Some(w) = &lower.witness {
        println!("  along {}:", w.direction);
        for (p, r) in w.prices.iter().zip(&w.residuals) {
            println!("    p {p}  distance to target {r:.4}");
        }
    }
    Ok(())
}
