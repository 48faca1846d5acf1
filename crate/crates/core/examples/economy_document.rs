//! Reading and writing economy documents, and driving the CLI in-process.

use walras::cli::{main_with_args, parse_economy, EconomyDocument};
use walras::sampling::{random_economy, seeded, EconomyShape};

const TEXT: &str = r#"
version = 1
goods = ["bread", "wine"]

[options]
assume_survival = false
epsilon = 1e-6

[[agents]]
name = "baker"
endowment = [1.0, 0.0]
utility = { kind = "CobbDouglas", weights = [0.6, 0.4] }

[[agents]]
name = "vintner"
endowment = [0.0, 1.0]
utility = { kind = "CobbDouglas", weights = [0.6, 0.4] }
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let parsed = parse_economy(TEXT)?;
    println!("{} agents, margin {}", parsed.economy.num_agents(), parsed.economy.margin());

    match parse_economy(&TEXT.replace("CobbDouglas", "CobDouglas")) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("schema error: {e}"),
    }

    let econ = random_economy(&mut seeded(3), &EconomyShape::default());
    println!("\n{}", EconomyDocument::from_economy(&econ, 3).to_toml());

    let path = std::env::temp_dir().join("walras-example.toml");
    std::fs::write(&path, TEXT)?;
    let (out, code) = main_with_args(["walras", "solve", path.to_str().unwrap()]);
    println!("walras solve exited {code}\n{out}");
    std::fs::remove_file(path)?;
    Ok(())
}
